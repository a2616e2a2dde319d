//! K and L class tests on the three model sets.

use dirichlet_lab::circle_sets::{build_cantor, build_point_sequence, CantorSpec, SequenceKind};
use dirichlet_lab::set_classes::{k_test, l_test, ArcScan, ZetaGrid};

fn main() -> dirichlet_lab::Result<()> {
    let sets = [
        ("cantor 1/3", build_cantor(&CantorSpec::constant(1.0 / 3.0, 12))?),
        ("symmetric 1/n", build_point_sequence(SequenceKind::Symmetric, 1.0, 20000)?),
        ("one-sided 1/n", build_point_sequence(SequenceKind::OneSided, 1.0, 20000)?),
    ];
    for (name, e) in &sets {
        let k = k_test(e, &ArcScan::default());
        let l2 = l_test(e, 2, &ZetaGrid::default());
        println!(
            "{name:<14} K {:<12} (c_E {:.3e})  L2 {:<12} (growth {:.2})",
            k.verdict.as_str(),
            k.constant,
            l2.verdict.as_str(),
            l2.growth_exponent
        );
    }
    Ok(())
}
