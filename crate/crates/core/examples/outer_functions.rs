//! Evaluate `f_{α,E}` inside the disk and on the circle.

use std::sync::Arc;

use dirichlet_lab::circle_sets::CircleSet;
use dirichlet_lab::outer_functions::OuterDistanceFunction;
use dirichlet_lab::quad::Tolerance;
use num_complex::Complex64;

fn main() -> dirichlet_lab::Result<()> {
    // with E = {1} and α = 1/2 this is (1 - z)^{1/2} up to a unimodular factor
    let f = OuterDistanceFunction::power(0.5, Arc::new(CircleSet::point()))?;
    for r in [0.0, 0.5, 0.9, 0.99] {
        let z = Complex64::new(r, 0.0);
        let v = f.evaluate_interior(z, Tolerance::default())?;
        println!("|f({r})| = {:.10}   |1 - z|^(1/2) = {:.10}", v.norm(), (1.0 - r).sqrt());
    }
    println!("boundary modulus at pi: {:.10}", f.boundary_modulus_at(std::f64::consts::PI));
    println!("log-integrable: {}", f.carleson_check().finite);
    Ok(())
}
