//! The outer function `f_{ω,E}` with boundary modulus `ω(dist(ζ,E))`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::circle_sets::{chord, AnglePoint, CircleSet, PushforwardMode, PushforwardResult, TWO_PI};
use crate::error::{LabError, Result};
use crate::gap_tree::GapTree;
use crate::quad::{integrate_vec, pairwise_sum, Tolerance};
use crate::weights::Weight;

/// `f_{ω,E}`. The Richter–Sundberg moment tree is built on first use and
/// shared by clones.
#[derive(Clone, Debug)]
pub struct OuterDistanceFunction {
    weight: Weight,
    set: Arc<CircleSet>,
    rs_tree: Arc<OnceLock<GapTree>>,
}

impl OuterDistanceFunction {
    pub fn new(weight: Weight, set: Arc<CircleSet>) -> Self {
        OuterDistanceFunction { weight, set, rs_tree: Arc::new(OnceLock::new()) }
    }

    /// `f_{α,E}`, boundary modulus `dist(ζ,E)^α`.
    pub fn power(alpha: f64, set: Arc<CircleSet>) -> Result<Self> {
        Ok(Self::new(Weight::power(alpha)?, set))
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn set(&self) -> &CircleSet {
        &self.set
    }

    pub fn set_arc(&self) -> Arc<CircleSet> {
        self.set.clone()
    }

    /// Tree over the gaps with profiles `[ω(d)², log ω(d), 1]`.
    pub(crate) fn rs_tree(&self) -> &GapTree {
        self.rs_tree.get_or_init(|| {
            let w = self.weight.clone();
            GapTree::build(&self.set, 3, move |v, out| {
                let d = chord(v);
                let lw = w.log_value(d);
                out[0] = (2.0 * lw).exp();
                out[1] = lw;
                out[2] = 1.0;
            })
        })
    }

    /// `|f*(ζ)| = ω(dist(ζ,E))`; on `E` this is the limit `ω(0⁺)`.
    pub fn boundary_modulus(&self, zeta: AnglePoint) -> f64 {
        self.weight.value(self.set.dist(zeta.theta()))
    }

    pub fn boundary_modulus_at(&self, theta: f64) -> f64 {
        self.weight.value(self.set.dist(theta))
    }

    /// `∫_T |log ω(dist(ζ,E))| |dζ|` with the band divergence diagnostic.
    pub fn carleson_check(&self) -> CarlesonCheck {
        carleson_check(&self.set, &self.weight)
    }

    /// Herglotz evaluation of `f(z)` for `|z| ≤ 1 - 1e-8`.
    pub fn evaluate_interior(&self, z: Complex64, tol: Tolerance) -> Result<Complex64> {
        if z.norm() > 1.0 - 1e-8 {
            return Err(LabError::InvalidParameter(format!("|z| = {} exceeds 1 - 1e-8", z.norm())));
        }
        let check = self.carleson_check();
        if !check.finite {
            return Err(LabError::InvalidParameter("log ω(dist) is not integrable".into()));
        }
        let theta_z = z.arg();
        let w = &self.weight;
        let mut parts_re = Vec::new();
        let mut parts_im = Vec::new();
        let mut converged = true;
        let herglotz = |theta: f64| {
            let zeta = Complex64::from_polar(1.0, theta);
            (zeta + z) / (zeta - z)
        };
        for g in self.set.gaps() {
            let h = g.half();
            // split the gap at the half point and at the radial projection of z
            let mut cuts = vec![0.0, h];
            if let Some(v) = g.offset(theta_z) {
                let dv = if v <= h { v } else { g.length - v };
                if dv > 0.0 && dv < h {
                    cuts.insert(1, dv);
                }
            }
            for pair in cuts.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let (vals, ok) = integrate_vec(
                    |s, out: &mut [f64]| {
                        // v = a + (b - a) s³ near the endpoint, linear elsewhere
                        let (v, jac) = if a == 0.0 { (b * s * s * s, 3.0 * b * s * s) } else { (a + (b - a) * s, b - a) };
                        if v <= 0.0 {
                            out[0] = 0.0;
                            out[1] = 0.0;
                            return;
                        }
                        let lw = w.log_value(chord(v));
                        let k = herglotz(g.start + v) + herglotz(g.end() - v);
                        out[0] = jac * lw * k.re;
                        out[1] = jac * lw * k.im;
                    },
                    2,
                    0.0,
                    1.0,
                    tol,
                );
                converged &= ok;
                parts_re.push(vals[0]);
                parts_im.push(vals[1]);
            }
        }
        let rest = self.set.complement_length();
        if rest > 0.0 {
            for arc in self.set.complement_arcs() {
                let lw0 = w.log_value(0.0);
                let (vals, ok) = integrate_vec(
                    |t, out: &mut [f64]| {
                        let k = herglotz(t);
                        out[0] = lw0 * k.re;
                        out[1] = lw0 * k.im;
                    },
                    2,
                    arc.start,
                    arc.end(),
                    tol,
                );
                converged &= ok;
                parts_re.push(vals[0]);
                parts_im.push(vals[1]);
            }
        }
        if !converged {
            return Err(LabError::NonConvergence { error: tol.rel });
        }
        let log_f = Complex64::new(pairwise_sum(&parts_re), pairwise_sum(&parts_im)) / TWO_PI;
        Ok(log_f.exp())
    }
}

/// Integrability of `log ω(dist(·,E))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlesonCheck {
    pub finite: bool,
    /// `∫_T |log ω(dist)| |dζ|` for the represented set (`+∞` if divergent).
    pub value: f64,
    pub diagnostic: PushforwardResult,
}

/// `∫_T |log ω(dist(ζ,E))| |dζ| < ∞` (the Carleson condition for `ω = id`).
pub fn carleson_check(set: &CircleSet, w: &Weight) -> CarlesonCheck {
    let tol = Tolerance::new(1e-10, 0.0);
    let r = set.pushforward_integral(|d| w.log_value(d).abs(), PushforwardMode::Counting, tol);
    CarlesonCheck { finite: r.finite, value: r.value, diagnostic: r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, CantorSpec};
    use std::f64::consts::PI;

    fn point() -> Arc<CircleSet> {
        Arc::new(CircleSet::point())
    }

    #[test]
    fn boundary_modulus_examples() {
        let f = OuterDistanceFunction::new(Weight::identity(), point());
        assert!((f.boundary_modulus(AnglePoint::new(PI)) - 2.0).abs() < 1e-15);
        let f = OuterDistanceFunction::power(0.3, point()).unwrap();
        assert!((f.boundary_modulus(AnglePoint::new(PI / 2.0)) - 2f64.powf(0.15)).abs() < 1e-15);
        assert_eq!(f.boundary_modulus(AnglePoint::new(0.0)), 0.0);
    }

    #[test]
    fn carleson_examples() {
        let f = OuterDistanceFunction::new(Weight::identity(), point());
        let c = f.carleson_check();
        assert!(c.finite);
        // ∫_0^{2π} |log(2 sin(θ/2))| dθ, by direct quadrature
        let direct = crate::quad::integrate_graded(|t| (2.0 * (t / 2.0).sin()).ln().abs(), 0.0, PI, crate::quad::Endpoint::Left, Tolerance::new(1e-12, 0.0)).value * 2.0;
        assert!((c.value - direct).abs() < 1e-8, "{} vs {}", c.value, direct);
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 10)).unwrap());
        assert!(carleson_check(&e, &Weight::identity()).finite);
        assert!(carleson_check(&e, &Weight::constant(2.0).unwrap()).finite);
    }

    #[test]
    fn interior_of_one_minus_z() {
        let f = OuterDistanceFunction::new(Weight::identity(), point());
        let tol = Tolerance::new(1e-11, 1e-13);
        let v0 = f.evaluate_interior(Complex64::new(0.0, 0.0), tol).unwrap();
        assert!((v0.norm() - 1.0).abs() < 1e-9, "{v0}");
        let v = f.evaluate_interior(Complex64::new(0.5, 0.0), tol).unwrap();
        assert!((v.norm() - 0.5).abs() < 1e-9, "{v}");
        let f = OuterDistanceFunction::power(0.4, point()).unwrap();
        let v = f.evaluate_interior(Complex64::new(-0.5, 0.0), tol).unwrap();
        assert!((v.norm() - 1.5f64.powf(0.4)).abs() < 1e-9);
        let z = Complex64::new(0.3, 0.6);
        let v = f.evaluate_interior(z, tol).unwrap();
        let exact = (Complex64::new(1.0, 0.0) - z).powf(0.4);
        assert!((v - exact).norm() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn interior_of_constant() {
        let f = OuterDistanceFunction::new(Weight::constant(3.0).unwrap(), point());
        let v = f.evaluate_interior(Complex64::new(0.3, 0.1), Tolerance::new(1e-11, 1e-13)).unwrap();
        assert!((v - Complex64::new(3.0, 0.0)).norm() < 1e-9);
    }
}
