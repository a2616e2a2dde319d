//! Capacity, polarity and cyclicity criteria.
//!
//! Every verdict here comes from a sufficient condition. A convergent
//! series or integral leaves the criterion silent; it is never read as a
//! proof of positive capacity, except for the Cantor series, which is an
//! equivalence.

use std::fmt;

use crate::circle_sets::{CantorSpec, CircleSet};
use crate::error::{LabError, Result};
use crate::local_dirichlet::{dirichlet_mu, QuadConfig};
use crate::measures::BoundaryMeasure;
use crate::outer_functions::OuterDistanceFunction;
use crate::quad::{integrate, series_verdict, Tolerance};
use crate::set_classes::{growth_verdict, k_test, l_test, ArcScan, ScaleRow, Verdict, ZetaGrid};
use crate::weights::GrowthGauge;

#[derive(Clone, Debug, PartialEq)]
pub enum CapacityVerdict {
    /// The series or integral diverges: capacity zero, the set is polar.
    Diverges,
    /// Convergent: the criterion is silent.
    Converges,
    /// A hypothesis of the criterion fails; names the clause.
    HypothesesNotMet(String),
}

impl CapacityVerdict {
    pub fn as_str(&self) -> &str {
        match self {
            CapacityVerdict::Diverges => "diverges",
            CapacityVerdict::Converges => "converges",
            CapacityVerdict::HypothesesNotMet(_) => "hypotheses-not-met",
        }
    }

    pub fn polar(&self) -> bool {
        *self == CapacityVerdict::Diverges
    }
}

impl fmt::Display for CapacityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityVerdict::HypothesesNotMet(c) => write!(f, "hypotheses-not-met ({c})"),
            v => f.write_str(v.as_str()),
        }
    }
}

/// A criterion with its partial sums (or partial integrals).
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityReport {
    pub criterion: &'static str,
    /// `(index or lower limit, partial value)`, partial values nondecreasing.
    pub trajectory: Vec<(f64, f64)>,
    pub verdict: CapacityVerdict,
}

fn cumulative(xs: &[f64], terms: &[f64]) -> Vec<(f64, f64)> {
    let mut acc = 0.0;
    xs.iter()
        .zip(terms)
        .map(|(&x, &t)| {
            acc += t;
            (x, acc)
        })
        .collect()
}

/// Partial sums of `Σ 2^{-n} log⁺(1/(π ρ₁…ρ_n))`. The series diverges
/// exactly when the Cantor set has zero logarithmic capacity. The positive
/// part only touches the first few terms for ratios near 1/2, which keeps
/// the partial sums monotone without changing convergence.
pub fn cantor_capacity_series(spec: &CantorSpec, terms: usize) -> Result<CapacityReport> {
    if terms < 10 {
        return Err(LabError::InvalidParameter(format!("need at least 10 terms, got {terms}")));
    }
    let log_pi = std::f64::consts::PI.ln();
    let mut log_product = 0.0;
    let mut values = Vec::with_capacity(terms);
    for n in 1..=terms {
        log_product += spec.ratios.log_inverse(n);
        values.push(0.5f64.powi(n as i32) * (log_product - log_pi).max(0.0));
    }
    let xs: Vec<f64> = (1..=terms).map(|n| n as f64).collect();
    let verdict = if series_verdict(&values).converges { CapacityVerdict::Converges } else { CapacityVerdict::Diverges };
    Ok(CapacityReport { criterion: "cantor series", trajectory: cumulative(&xs, &values), verdict })
}

/// Dyadic thresholds `t_k = 2·2^{-k}` down to the trusted floor of the set.
fn dyadic_thresholds(set: &CircleSet) -> Vec<f64> {
    let floor = (4.0 * set.trusted_floor()).max(1e-12);
    (0..60).map(|k| 2.0 * 0.5f64.powi(k)).take_while(|&t| t >= floor).collect()
}

/// `∫ dt/μ(E_t)` over dyadic bands of the chordal threshold, finest band
/// at the trusted floor. Divergence means capacity zero.
pub fn energy_divergence(set: &CircleSet, mu: &BoundaryMeasure) -> CapacityReport {
    let ts = dyadic_thresholds(set);
    let tol = Tolerance::new(1e-8, 1e-300);
    let bands: Vec<f64> = ts
        .windows(2)
        .map(|w| {
            // t = e^u over [t_{k+1}, t_k]
            integrate(
                |u| {
                    let t = u.exp();
                    t / mu.sublevel_mass(set, t)
                },
                w[1].ln(),
                w[0].ln(),
                tol,
            )
            .value
        })
        .collect();
    let verdict = if bands.iter().any(|b| !b.is_finite()) || !series_verdict(&bands).converges {
        CapacityVerdict::Diverges
    } else {
        CapacityVerdict::Converges
    };
    CapacityReport { criterion: "integral of dt/mu(E_t)", trajectory: cumulative(&ts[1..], &bands), verdict }
}

/// One hypothesis and whether it held.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub verdict: CapacityVerdict,
    pub clauses: Vec<Clause>,
}

impl CriterionReport {
    fn from_clauses(clauses: Vec<Clause>, success: CapacityVerdict) -> Self {
        let verdict = match clauses.iter().find(|c| !c.holds) {
            Some(c) => CapacityVerdict::HypothesesNotMet(c.name.to_string()),
            None => success,
        };
        CriterionReport { verdict, clauses }
    }

    pub fn failing_clause(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.holds)
    }
}

/// Scanned exponents for the `h(t)/t^σ` increasing hypothesis.
pub fn sigma_grid() -> Vec<f64> {
    (1..=10).map(|k| 0.5f64.powi(k)).collect()
}

const GRID_POINTS: usize = 400;

/// `μ(E_t) = O(h(t))` over dyadic `t` down to the trusted floor.
fn o_bound(set: &CircleSet, mu: &BoundaryMeasure, h: &GrowthGauge) -> Clause {
    let rows: Vec<ScaleRow> = dyadic_thresholds(set)
        .into_iter()
        .map(|t| ScaleRow { scale: t, value: mu.sublevel_mass(set, t) / h.eval(t), running: 0.0 })
        .collect();
    let sup = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    let holds = growth_verdict(&rows).0 == Verdict::Pass;
    Clause { name: "mu(E_t) = O(h(t))", holds, detail: format!("sup mu(E_t)/h(t) = {sup:.6e} over {} thresholds", rows.len()) }
}

fn h_over_t_decreasing(h: &GrowthGauge, t_min: f64) -> Clause {
    Clause { name: "h(t)/t decreasing", holds: h.ratio_decreasing(1.0, t_min, GRID_POINTS), detail: String::new() }
}

fn h_over_power_increasing(h: &GrowthGauge, t_min: f64) -> Clause {
    let found = sigma_grid().into_iter().find(|&s| h.ratio_increasing(s, t_min, GRID_POINTS));
    Clause {
        name: "h(t)/t^sigma increasing for some sigma",
        holds: found.is_some(),
        detail: found.map(|s| format!("sigma = {s}")).unwrap_or_default(),
    }
}

fn h_divergent(h: &GrowthGauge) -> Clause {
    Clause { name: "integral of dt/h(t) diverges", holds: h.diverges_at_zero(), detail: String::new() }
}

/// Sufficient polarity criterion: `E ∈ L₂`, `μ(E_t) = O(h)`, `h(t)/t`
/// decreasing, `h(t)/t^β` increasing for some β, and `∫_0 dt/h = ∞`.
pub fn polarity_check(set: &CircleSet, mu: &BoundaryMeasure, h: &GrowthGauge) -> CriterionReport {
    let l2 = l_test(set, 2, &ZetaGrid::default());
    let t_min = set.trusted_floor().max(1e-10);
    let mut clauses = vec![Clause { name: "E in L2", holds: l2.verdict == Verdict::Pass, detail: format!("l_test: {}", l2.verdict.as_str()) }];
    clauses.push(o_bound(set, mu, h));
    clauses.push(h_over_t_decreasing(h, t_min));
    clauses.push(h_over_power_increasing(h, t_min));
    clauses.push(h_divergent(h));
    CriterionReport::from_clauses(clauses, CapacityVerdict::Diverges)
}

/// Hypotheses of the cyclicity theorem for `f_{ω,E}` in `D(μ)`: `E` a
/// K-set, `μ(E_t) = O(h)`, the two monotonicity conditions on `h`,
/// `∫ dt/h = ∞`, and `f ∈ D(μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicityReport {
    pub cyclic: bool,
    pub clauses: Vec<Clause>,
}

impl CyclicityReport {
    pub fn failing_clause(&self) -> Option<&Clause> {
        self.clauses.iter().find(|c| !c.holds)
    }

    pub fn verdict(&self) -> String {
        match self.failing_clause() {
            None => "cyclic".into(),
            Some(c) => format!("hypotheses-not-met ({})", c.name),
        }
    }
}

pub fn cyclicity_check(f: &OuterDistanceFunction, mu: &BoundaryMeasure, h: &GrowthGauge, cfg: &QuadConfig) -> Result<CyclicityReport> {
    let set = f.set();
    let t_min = set.trusted_floor().max(1e-10);
    let k = k_test(set, &ArcScan::default());
    let mut clauses = vec![Clause { name: "E is a K-set", holds: k.verdict == Verdict::Pass, detail: format!("k_test: {}", k.verdict.as_str()) }];
    clauses.push(o_bound(set, mu, h));
    clauses.push(h_over_t_decreasing(h, t_min));
    clauses.push(h_over_power_increasing(h, t_min));
    clauses.push(h_divergent(h));
    let member = dirichlet_mu(f, mu, cfg)?;
    clauses.push(Clause { name: "f in D(mu)", holds: member.finite, detail: format!("D_mu(f) = {:.6e}", member.value) });
    Ok(CyclicityReport { cyclic: clauses.iter().all(|c| c.holds), clauses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, RatioRule};
    use crate::weights::Weight;
    use std::sync::Arc;

    #[test]
    fn cantor_series_examples() {
        for xi in [0.1, 0.3, 0.45] {
            let r = cantor_capacity_series(&CantorSpec::constant(xi, 10), 30).unwrap();
            assert_eq!(r.verdict, CapacityVerdict::Converges, "{xi}");
            assert!(r.trajectory.windows(2).all(|w| w[1].1 >= w[0].1));
        }
        let fast = CantorSpec { ratios: RatioRule::SuperExponential, depth: 10 };
        assert_eq!(cantor_capacity_series(&fast, 30).unwrap().verdict, CapacityVerdict::Diverges);
        let slow = CantorSpec { ratios: RatioRule::Exponential, depth: 10 };
        assert_eq!(cantor_capacity_series(&slow, 30).unwrap().verdict, CapacityVerdict::Converges);
        assert!(cantor_capacity_series(&slow, 5).is_err());
    }

    #[test]
    fn point_is_polar_cantor_is_not() {
        let point = CircleSet::point();
        assert!(energy_divergence(&point, &BoundaryMeasure::lebesgue()).verdict.polar());
        let e = build_cantor(&CantorSpec::constant(1.0 / 3.0, 12)).unwrap();
        assert_eq!(energy_divergence(&e, &BoundaryMeasure::lebesgue()).verdict, CapacityVerdict::Converges);
    }

    #[test]
    fn polarity_examples() {
        let point = CircleSet::point();
        let leb = BoundaryMeasure::lebesgue();
        assert_eq!(polarity_check(&point, &leb, &GrowthGauge::Power { p: 1.0 }).verdict, CapacityVerdict::Diverges);
        let r = polarity_check(&point, &leb, &GrowthGauge::TLog { k: 1.0 });
        assert_eq!(r.verdict, CapacityVerdict::Diverges, "{r:?}");
        let r = polarity_check(&point, &leb, &GrowthGauge::Power { p: 0.5 });
        assert!(!r.verdict.polar());
    }

    #[test]
    fn cyclic_examples() {
        let cfg = QuadConfig::default();
        let f = OuterDistanceFunction::power(0.3, Arc::new(CircleSet::point())).unwrap();
        let h = GrowthGauge::Power { p: 1.0 };
        let r = cyclicity_check(&f, &BoundaryMeasure::lebesgue(), &h, &cfg).unwrap();
        assert!(r.cyclic, "{r:?}");
        let r = cyclicity_check(&f, &BoundaryMeasure::point_mass(std::f64::consts::PI, 1.0), &h, &cfg).unwrap();
        assert!(r.cyclic, "{r:?}");
    }

    #[test]
    fn cantor_zero_set_fails_a_clause() {
        let cfg = QuadConfig::default();
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12)).unwrap());
        let f = OuterDistanceFunction::new(Weight::power(0.4).unwrap(), e);
        let dim = 2f64.ln() / 3f64.ln();
        let linear = cyclicity_check(&f, &BoundaryMeasure::lebesgue(), &GrowthGauge::Power { p: 1.0 }, &cfg).unwrap();
        assert_eq!(linear.failing_clause().unwrap().name, "mu(E_t) = O(h(t))");
        let fitted = cyclicity_check(&f, &BoundaryMeasure::lebesgue(), &GrowthGauge::Power { p: 1.0 - dim }, &cfg).unwrap();
        assert!(!fitted.cyclic);
        let names: Vec<&str> = fitted.clauses.iter().filter(|c| !c.holds).map(|c| c.name).collect();
        assert!(names.contains(&"integral of dt/h(t) diverges"), "{names:?}");
    }
}
