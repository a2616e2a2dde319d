//! Multiplier verdicts for f_{α,E} on a Cantor set on both sides of the
//! dimension threshold, and the necessary condition along a theta set.

use std::sync::Arc;

use dirichlet_lab::carleson::{cn_sequence, multiplier_measure, multiplier_verdict, ArcFamily};
use dirichlet_lab::circle_sets::{build_cantor, build_theta_sequence, CantorSpec};
use dirichlet_lab::set_classes::{l_test, ZetaGrid};
use dirichlet_lab::weights::Weight;

fn main() -> dirichlet_lab::Result<()> {
    let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12))?);
    let l1 = l_test(&e, 1, &ZetaGrid::default());
    let dim = 2f64.ln() / 3f64.ln();
    println!("threshold alpha = {:.4}", dim / 2.0);
    for alpha in [0.25, 0.4] {
        let v = multiplier_verdict(&Weight::power(alpha)?, e.clone(), &l1, &ArcFamily::anchored(e.clone()))?;
        println!("alpha {alpha}: in D {}  multiplier {}  ({})", v.in_dirichlet.as_str(), v.multiplier.as_str(), v.justification);
    }

    for beta in [1.5, 3.0] {
        let theta = Arc::new(build_theta_sequence(0.25, beta, 1000)?);
        let mu = multiplier_measure(theta.clone(), &Weight::power(0.25)?);
        let indices: Vec<u64> = (2..=6).map(|k| 10u64.pow(k)).collect();
        let r = cn_sequence(&mu, &theta, &indices)?;
        println!("theta set beta {beta}: trend exponent {:.3}  verdict {}", r.exponent, r.verdict.as_str());
    }
    Ok(())
}
