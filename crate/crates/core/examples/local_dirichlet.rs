//! Local Dirichlet integrals: the distance formula against the boundary
//! double integral, and the split over the three regions.

use std::sync::Arc;

use dirichlet_lab::circle_sets::{build_cantor, CantorSpec, CircleSet};
use dirichlet_lab::local_dirichlet::{douglas_local, one_minus_z_pow, rs_local, QuadConfig};
use dirichlet_lab::outer_functions::OuterDistanceFunction;

fn main() -> dirichlet_lab::Result<()> {
    let cfg = QuadConfig::default();
    let point = Arc::new(CircleSet::point());
    for alpha in [0.3, 0.7, 1.0] {
        let f = OuterDistanceFunction::power(alpha, point.clone())?;
        let theta = 2.0;
        let rs = rs_local(&f, theta, &cfg)?.total;
        let dg = douglas_local(one_minus_z_pow(alpha), theta, &cfg)?;
        println!("alpha {alpha}: distance formula {rs:.10}  double integral {dg:.10}");
    }

    let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12))?);
    let f = OuterDistanceFunction::power(0.3, e.clone())?;
    for gen in 1..=5 {
        let g = e.resolved_gaps().find(|g| g.generation == gen).expect("generation present");
        let b = rs_local(&f, g.midpoint(), &cfg)?;
        println!(
            "gap gen {} mid: total {:.6}  own gap {:.6}  near {:.6}  far {:.6}",
            g.generation, b.total, b.over_i, b.over_gamma, b.over_sigma
        );
    }
    Ok(())
}
