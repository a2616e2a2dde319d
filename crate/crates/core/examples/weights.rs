//! Grid certificates for a few weights.

use dirichlet_lab::weights::{certify, Weight};

fn main() -> dirichlet_lab::Result<()> {
    let weights = [
        ("t^0.3", Weight::power(0.3)?),
        ("t", Weight::identity()),
        ("log^-1(8/t)", Weight::log_power(1.0, 8.0)?),
    ];
    for (name, w) in &weights {
        let c = certify(w, 0.5, 400);
        println!(
            "{name:<12} increasing {:?}  concave(t^1/2) {:?}  sharp {}  x w'(x)/(x^2 w'(x^2)) in [{:.3}, {:.3}]",
            c.increasing,
            c.concave_power,
            c.sharp_hypotheses_hold(),
            c.derivative_ratio.min,
            c.derivative_ratio.max
        );
    }
    Ok(())
}
