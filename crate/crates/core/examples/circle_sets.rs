//! Build the bundled set families and print their gap statistics.

use dirichlet_lab::circle_sets::{build_cantor, build_point_sequence, build_theta_sequence, CantorSpec, CircleSet, PushforwardMode, SequenceKind};
use dirichlet_lab::quad::Tolerance;

fn describe(name: &str, e: &CircleSet) {
    let t = 1e-3;
    println!(
        "{name:<22} gaps {:>6}  |E_t| {:.4e}  N_E(t) {:>5}  truncation {:.2e}",
        e.gaps().len(),
        e.sublevel_measure(t),
        e.gap_counting(t),
        e.truncation_error()
    );
}

fn main() -> dirichlet_lab::Result<()> {
    let cantor = build_cantor(&CantorSpec::constant(1.0 / 3.0, 10))?;
    describe("middle-third cantor", &cantor);
    describe("symmetric 1/n", &build_point_sequence(SequenceKind::Symmetric, 1.0, 2000)?);
    describe("one-sided 1/n", &build_point_sequence(SequenceKind::OneSided, 1.0, 2000)?);
    describe("theta set", &build_theta_sequence(0.25, 1.5, 2000)?);

    // the two evaluations of a distance integral agree
    let tol = Tolerance::new(1e-10, 1e-300);
    let omega = |t: f64| t.powf(0.2);
    let exact = cantor.pushforward_integral(omega, PushforwardMode::ExactGaps, tol).value;
    let counting = cantor.pushforward_integral(omega, PushforwardMode::Counting, tol).value;
    println!("int dist^0.2: exact {exact:.12} counting {counting:.12}");
    Ok(())
}
