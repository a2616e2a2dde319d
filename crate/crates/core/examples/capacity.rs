//! Capacity series, polarity and cyclicity checks.

use std::sync::Arc;

use dirichlet_lab::capacity::{cantor_capacity_series, cyclicity_check, energy_divergence, polarity_check};
use dirichlet_lab::circle_sets::{build_cantor, CantorSpec, CircleSet, RatioRule};
use dirichlet_lab::local_dirichlet::QuadConfig;
use dirichlet_lab::measures::BoundaryMeasure;
use dirichlet_lab::outer_functions::OuterDistanceFunction;
use dirichlet_lab::weights::GrowthGauge;

fn main() -> dirichlet_lab::Result<()> {
    for rule in [RatioRule::Constant(0.3), RatioRule::Exponential, RatioRule::SuperExponential] {
        let r = cantor_capacity_series(&CantorSpec { ratios: rule.clone(), depth: 8 }, 40)?;
        println!("{rule:?}: series {}", r.verdict);
    }

    let leb = BoundaryMeasure::lebesgue();
    let point = Arc::new(CircleSet::point());
    let cantor = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12))?);
    for (name, e) in [("point", &point), ("cantor", &cantor)] {
        let energy = energy_divergence(e, &leb);
        let polar = polarity_check(e, &leb, &GrowthGauge::Power { p: 1.0 });
        println!("{name}: energy integral {}  polarity criterion {}", energy.verdict, polar.verdict);
    }

    let cfg = QuadConfig::default();
    for (name, e) in [("point", point), ("cantor", cantor)] {
        let f = OuterDistanceFunction::power(0.3, e)?;
        let r = cyclicity_check(&f, &leb, &GrowthGauge::Power { p: 1.0 }, &cfg)?;
        println!("{name}: {}", r.verdict());
    }
    Ok(())
}
