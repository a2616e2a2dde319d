//! Local Dirichlet integrals through the Richter–Sundberg formula
//!
//! `D_ζ(f) = (1/2π) ∫ [|f(ζ')|² - |f(ζ)|² - 2|f(ζ)|² log(|f(ζ')|/|f(ζ)|)] / |ζ - ζ'|² |dζ'|`,
//!
//! the Douglas double-integral oracle, and `D_μ` aggregation.
//!
//! With `b = ω(δ)` and `u = 2 log(ω(δ')/ω(δ))` the integrand is
//! `b²(e^u - 1 - u)/|ζ - ζ'|²`. Expanding `e^u b² = ω(δ')²` shows it is a
//! combination of the gap profiles `ω(δ')²`, `log ω(δ')` and `1`, which is
//! what the far-field tree expands.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::circle_sets::{angle_diff, chord, normalize, CircleSet, TWO_PI};
use crate::error::{LabError, Result};
use crate::gap_tree::opening_ratio;
use crate::kernel::kernel;
use crate::measures::{BoundaryMeasure, Density};
use crate::outer_functions::OuterDistanceFunction;
use crate::quad::{gauss_legendre, integrate, integrate_graded, linear_fit, pairwise_sum, Endpoint, Tolerance};

/// Tolerances and quadrature rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width of the window around `ζ` (relative to `dist(ζ,E)` in arc
    /// length) replaced by the continuous limit of the integrand.
    pub exclusion_radius_factor: f64,
    /// Reject points closer to the set than `100 × truncation_error`.
    pub enforce_trust: bool,
    /// Gauss–Legendre nodes per gap half in `ζ`-integrals.
    pub zeta_nodes: usize,
    /// Trailing generations ignored in trend fits (too close to the
    /// truncation depth).
    pub skip_generations: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
            exclusion_radius_factor: 1e-6,
            enforce_trust: true,
            zeta_nodes: 32,
            skip_generations: 5,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn untrusted(mut self) -> Self {
        self.enforce_trust = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) || self.max_subdivisions < 32 {
            return Err(LabError::InvalidParameter("tolerances must be positive and max_subdivisions >= 32".into()));
        }
        Ok(())
    }

    fn tolerance(&self, abs: f64) -> Tolerance {
        Tolerance { rel: self.rel_tol, abs, max_subdivisions: self.max_subdivisions }
    }
}

/// `D_ζ` split over the own gap `I`, `Γ` and `Σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalDirichletBreakdown {
    pub total: f64,
    pub over_i: f64,
    pub over_gamma: f64,
    pub over_sigma: f64,
}

impl LocalDirichletBreakdown {
    fn infinite() -> Self {
        LocalDirichletBreakdown { total: f64::INFINITY, over_i: f64::INFINITY, over_gamma: f64::INFINITY, over_sigma: f64::INFINITY }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    I,
    Gamma,
    Sigma,
}

/// A boundary point placed relative to a gap endpoint: `ζ = anchor + offset`
/// with `|offset| = dist_arc` the arc distance to the set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Located {
    pub gap: usize,
    pub anchor: f64,
    pub offset: f64,
    pub dist_arc: f64,
}

impl Located {
    pub fn theta(&self) -> f64 {
        normalize(self.anchor + self.offset)
    }
}

/// Right endpoint of gap `j`, taken bitwise from the next gap start when the
/// two coincide.
pub(crate) fn gap_end(set: &CircleSet, j: usize) -> f64 {
    let gaps = set.gaps();
    let g = &gaps[j];
    let next = if j + 1 < gaps.len() { gaps[j + 1].start } else { gaps[0].start + TWO_PI };
    if (next - g.end()).abs() <= 1e-12 {
        next
    } else {
        g.end()
    }
}

/// Place `ζ` in its gap; `None` when `ζ ∈ E`.
pub fn locate(set: &CircleSet, theta: f64) -> Option<Located> {
    let j = set.locate(theta)?;
    let g = set.gaps()[j];
    let v = g.offset(theta)?;
    Some(if v <= g.half() {
        Located { gap: j, anchor: g.start, offset: v, dist_arc: v }
    } else {
        let w = g.length - v;
        Located { gap: j, anchor: gap_end(set, j), offset: -w, dist_arc: w }
    })
}

/// Point at arc distance `v` from the start (`from_end = false`) or the end
/// of gap `j`.
pub fn located_in_gap(set: &CircleSet, j: usize, v: f64, from_end: bool) -> Located {
    if from_end {
        Located { gap: j, anchor: gap_end(set, j), offset: -v, dist_arc: v }
    } else {
        Located { gap: j, anchor: set.gaps()[j].start, offset: v, dist_arc: v }
    }
}

/// `e^u - 1 - u` without cancellation.
fn phi(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        u * u * (0.5 + u * (1.0 / 6.0 + u / 24.0))
    } else {
        u.exp_m1() - u
    }
}

/// Per-point constants of the integrand.
struct Zeta<'a> {
    f: &'a OuterDistanceFunction,
    loc: Located,
    log_b: f64,
    b2: f64,
}

impl Zeta<'_> {
    fn integrand(&self, d_arc: f64) -> f64 {
        let u = 2.0 * (self.f.weight().log_value(chord(d_arc)) - self.log_b);
        self.b2 * phi(u)
    }

    /// `Γ` and `Σ` parts of another gap.
    fn near_gap(&self, j: usize, cfg: &QuadConfig) -> (f64, f64) {
        let set = self.f.set();
        let g = set.gaps()[j];
        let h = g.half();
        let xs = angle_diff(g.start, self.loc.anchor) - self.loc.offset;
        let xe = angle_diff(gap_end(set, j), self.loc.anchor) - self.loc.offset;
        let body = |v: f64| self.integrand(v) * (kernel(xs + v) + kernel(xe - v));
        let abs = cfg.abs_tol * g.length / TWO_PI;
        let split = self.loc.dist_arc.min(h);
        let gamma = integrate_graded(body, 0.0, split, Endpoint::Left, cfg.tolerance(abs)).value;
        let sigma = if split < h { integrate(body, split, h, cfg.tolerance(abs)).value } else { 0.0 };
        (gamma, sigma)
    }

    /// Integral over the own gap, in the coordinate `y` measured from the
    /// anchor endpoint (`ζ` sits at `y = δ`).
    fn own_gap(&self, cfg: &QuadConfig) -> f64 {
        let g = self.f.set().gaps()[self.loc.gap];
        let len = g.length;
        let half = 0.5 * len;
        let delta = self.loc.dist_arc;
        let eps = cfg.exclusion_radius_factor * delta;
        let abs = cfg.abs_tol * len / TWO_PI;
        let tol = cfg.tolerance(abs);
        let d_of = |y: f64| y.min(len - y);
        let mut parts = Vec::with_capacity(4);
        // [0, δ - ε], graded at the endpoint
        parts.push(integrate_graded(|y| self.integrand(d_of(y)) * kernel(y - delta), 0.0, delta - eps, Endpoint::Left, tol).value);
        // window around ζ: the limit 2ω'(δ)²cos²(δ/2)
        let dw = self.f.weight().derivative(chord(delta));
        let c = (0.5 * delta).cos();
        parts.push(2.0 * eps * 2.0 * dw * dw * c * c);
        let right = half.max(delta + eps);
        if right > delta + eps {
            parts.push(integrate(|y| self.integrand(d_of(y)) * kernel(y - delta), delta + eps, right, tol).value);
        }
        // far half measured from the other endpoint
        parts.push(
            integrate_graded(|z| self.integrand(z) * kernel(len - z - delta), 0.0, len - right, Endpoint::Left, tol).value,
        );
        pairwise_sum(&parts)
    }

    /// Arcs of positive length inside `E` (all in `Γ`).
    fn complement(&self) -> f64 {
        let set = self.f.set();
        if set.complement_length() <= 0.0 {
            return 0.0;
        }
        let value = self.integrand(0.0);
        let mut total = 0.0;
        for arc in set.complement_arcs() {
            let x1 = (angle_diff(arc.start, self.loc.anchor) - self.loc.offset).rem_euclid(TWO_PI);
            let x2 = x1 + arc.length;
            let cot = |x: f64| (0.5 * x).cos() / (0.5 * x).sin();
            total += 0.5 * (cot(x1) - cot(x2));
        }
        value * total
    }
}

fn prepare<'a>(f: &'a OuterDistanceFunction, loc: Located) -> Zeta<'a> {
    let log_b = f.weight().log_value(chord(loc.dist_arc));
    Zeta { f, loc, log_b, b2: (2.0 * log_b).exp() }
}

fn check_trust(f: &OuterDistanceFunction, loc: &Located, cfg: &QuadConfig) -> Result<()> {
    let d = chord(loc.dist_arc);
    let floor = f.set().trusted_floor();
    if cfg.enforce_trust && d < floor {
        return Err(LabError::Untrusted { distance: d, floor });
    }
    Ok(())
}

/// `D_ζ` at a located point, far field everywhere it applies.
pub fn rs_total_at(f: &OuterDistanceFunction, loc: Located, cfg: &QuadConfig) -> f64 {
    let z = prepare(f, loc);
    let own = z.own_gap(cfg);
    let tree = f.rs_tree();
    let coefs = [1.0, -2.0 * z.b2, 2.0 * z.b2 * z.log_b - z.b2];
    let mut near = Vec::new();
    let far = tree.traverse(loc.anchor, loc.offset, Some(loc.gap), opening_ratio(cfg.rel_tol), &coefs, |_| true, |j| {
        let (g, s) = z.near_gap(j, cfg);
        near.push(g + s);
    });
    (own + far + pairwise_sum(&near) + z.complement()) / TWO_PI
}

/// Breakdown of `D_ζ` over `I`, `Γ`, `Σ` at a located point.
pub fn rs_breakdown_at(f: &OuterDistanceFunction, loc: Located, cfg: &QuadConfig) -> LocalDirichletBreakdown {
    let z = prepare(f, loc);
    let own = z.own_gap(cfg);
    let tree = f.rs_tree();
    let coefs = [1.0, -2.0 * z.b2, 2.0 * z.b2 * z.log_b - z.b2];
    let mut gamma = Vec::new();
    let mut sigma = Vec::new();
    let delta = loc.dist_arc;
    let far = tree.traverse(
        loc.anchor,
        loc.offset,
        Some(loc.gap),
        opening_ratio(cfg.rel_tol),
        &coefs,
        |node| node.max_half_len <= delta,
        |j| {
            let (g, s) = z.near_gap(j, cfg);
            gamma.push(g);
            sigma.push(s);
        },
    );
    let over_i = own / TWO_PI;
    let over_gamma = (far + pairwise_sum(&gamma) + z.complement()) / TWO_PI;
    let over_sigma = pairwise_sum(&sigma) / TWO_PI;
    LocalDirichletBreakdown { total: over_i + over_gamma + over_sigma, over_i, over_gamma, over_sigma }
}

fn on_set_value(f: &OuterDistanceFunction, theta: f64, cfg: &QuadConfig) -> LocalDirichletBreakdown {
    let w = f.weight();
    if w.at_zero() == 0.0 || !w.at_zero().is_finite() {
        return LocalDirichletBreakdown::infinite();
    }
    if let crate::weights::WeightKind::Constant { .. } = w.kind() {
        return LocalDirichletBreakdown { total: 0.0, over_i: 0.0, over_gamma: 0.0, over_sigma: 0.0 };
    }
    // ω(0⁺) > 0: direct integral over every gap
    let loc = Located { gap: usize::MAX, anchor: theta, offset: 0.0, dist_arc: 0.0 };
    let z = prepare(f, loc);
    let mut gamma = Vec::new();
    let mut sigma = Vec::new();
    for j in 0..f.set().gaps().len() {
        let (g, s) = z.near_gap(j, cfg);
        gamma.push(g);
        sigma.push(s);
    }
    let over_gamma = pairwise_sum(&gamma) / TWO_PI;
    let over_sigma = pairwise_sum(&sigma) / TWO_PI;
    LocalDirichletBreakdown { total: over_gamma + over_sigma, over_i: 0.0, over_gamma, over_sigma }
}

/// `D_ζ(f)` with its regional breakdown. Points of `E` give `+∞` when
/// `ω(0⁺) = 0`.
pub fn rs_local(f: &OuterDistanceFunction, theta: f64, cfg: &QuadConfig) -> Result<LocalDirichletBreakdown> {
    cfg.validate()?;
    match locate(f.set(), theta) {
        None => Ok(on_set_value(f, theta, cfg)),
        Some(loc) => {
            check_trust(f, &loc, cfg)?;
            Ok(rs_breakdown_at(f, loc, cfg))
        }
    }
}

/// `D_ζ(f)` alone (faster than [`rs_local`]).
pub fn rs_total(f: &OuterDistanceFunction, theta: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    match locate(f.set(), theta) {
        None => Ok(on_set_value(f, theta, cfg).total),
        Some(loc) => {
            check_trust(f, &loc, cfg)?;
            Ok(rs_total_at(f, loc, cfg))
        }
    }
}

/// The integrand restricted to one region.
pub fn rs_regional(f: &OuterDistanceFunction, theta: f64, region: Region, cfg: &QuadConfig) -> Result<f64> {
    let b = rs_local(f, theta, cfg)?;
    Ok(match region {
        Region::I => b.over_i,
        Region::Gamma => b.over_gamma,
        Region::Sigma => b.over_sigma,
    })
}

/// `(1/2π) ∫ |f(ξ) - f(ζ)|²/|ξ - ζ|² |dξ|` from closed-form boundary values.
/// The boundary function may be singular at the point `1`.
pub fn douglas_local<F: Fn(f64) -> Complex64>(boundary: F, theta: f64, cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    let f0 = boundary(theta);
    let kink = (-theta).rem_euclid(TWO_PI);
    let scale = kink.min(TWO_PI - kink).min(1.0);
    if scale == 0.0 {
        return Err(LabError::InvalidParameter("douglas_local needs ζ ≠ 1".into()));
    }
    let eps = cfg.exclusion_radius_factor * scale;
    let body = |t: f64| {
        let d = boundary(theta + t) - f0;
        d.norm_sqr() * kernel(t)
    };
    let tol = cfg.tolerance(cfg.abs_tol);
    let left = integrate_graded(body, eps, kink, Endpoint::Right, tol);
    let right = integrate_graded(body, kink, TWO_PI - eps, Endpoint::Left, tol);
    let h = 1e-5 * scale;
    let deriv = (boundary(theta + h) - boundary(theta - h)) / (2.0 * h);
    let window = 2.0 * eps * deriv.norm_sqr();
    if !(left.converged && right.converged) {
        return Err(LabError::NonConvergence { error: left.error + right.error });
    }
    Ok((left.value + right.value + window) / TWO_PI)
}

/// Boundary values of `(1 - z)^α`.
pub fn one_minus_z_pow(alpha: f64) -> impl Fn(f64) -> Complex64 {
    move |t: f64| Complex64::new(1.0 - t.cos(), -t.sin()).powf(alpha)
}

/// Contribution of one generation (construction level or dyadic band).
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationTerm {
    pub generation: u32,
    pub gaps: usize,
    pub value: f64,
}

/// `∫ D_ζ(f) dμ(ζ)` with the trend diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureIntegral {
    /// Estimate for the ideal set (`+∞` when the trend diverges).
    pub value: f64,
    pub finite: bool,
    /// Geometric ratio of consecutive generation terms.
    pub trend_ratio: f64,
    pub generations: Vec<GenerationTerm>,
    pub atoms_part: f64,
    /// Sum over the computed generations only.
    pub partial: f64,
}

/// Weight of the density at a point of gap `j` at arc distance `v` from
/// its start or end.
fn density_weight(mu: &BoundaryMeasure, set: &CircleSet, loc: &Located) -> f64 {
    match mu.density() {
        None => 0.0,
        Some(Density::Angle(g)) => g(loc.theta()),
        Some(Density::Distance { set: own, g }) => {
            if own.gaps() == set.gaps() {
                g(chord(loc.dist_arc))
            } else {
                g(own.dist(loc.theta()))
            }
        }
    }
}

/// `∫_{gap} D_ζ(f) dμ(ζ)` over gap `j`, graded toward both endpoints.
fn gap_integral(f: &OuterDistanceFunction, mu: &BoundaryMeasure, j: usize, nodes: &[(f64, f64)], cfg: &QuadConfig) -> f64 {
    let set = f.set();
    let h = set.gaps()[j].half();
    let mut parts = Vec::with_capacity(2 * nodes.len());
    for from_end in [false, true] {
        for &(s, w) in nodes {
            let s2 = s * s;
            let v = h * s2 * s2;
            if v <= 0.0 {
                continue;
            }
            let loc = located_in_gap(set, j, v, from_end);
            let dens = density_weight(mu, set, &loc);
            if dens == 0.0 {
                parts.push(0.0);
                continue;
            }
            parts.push(w * 4.0 * h * s2 * s * dens * rs_total_at(f, loc, cfg));
        }
    }
    pairwise_sum(&parts)
}

/// A finite set with every gap represented: sums need no tail.
fn exact_set(set: &CircleSet) -> bool {
    set.gaps().iter().all(|g| !g.unresolved) && set.tail().is_none()
}

/// Which gap generations can be computed reliably: all resolved ones minus
/// the trailing `skip_generations`.
fn usable_generations(set: &CircleSet, cfg: &QuadConfig) -> Vec<u32> {
    let mut gens: Vec<u32> = set.resolved_gaps().map(|g| g.generation).collect();
    gens.sort_unstable();
    gens.dedup();
    if exact_set(set) {
        return gens;
    }
    let keep = gens.len().saturating_sub(cfg.skip_generations).max(gens.len().min(3));
    gens.truncate(keep);
    gens
}

/// `D_μ(f) = ∫_T D_ζ(f) dμ(ζ)`: atoms by direct evaluation, the density
/// generation by generation with a geometric tail fitted to the last terms.
pub fn dirichlet_mu(f: &OuterDistanceFunction, mu: &BoundaryMeasure, cfg: &QuadConfig) -> Result<MeasureIntegral> {
    cfg.validate()?;
    let set = f.set();
    let mut atoms = Vec::new();
    for &(theta, mass) in mu.atoms() {
        let d = match locate(set, theta) {
            None => on_set_value(f, theta, cfg).total,
            Some(loc) => {
                check_trust(f, &loc, cfg)?;
                rs_total_at(f, loc, cfg)
            }
        };
        atoms.push(mass * d);
    }
    let atoms_part = pairwise_sum(&atoms);
    if mu.density().is_none() {
        return Ok(MeasureIntegral {
            value: atoms_part,
            finite: atoms_part.is_finite(),
            trend_ratio: 0.0,
            generations: Vec::new(),
            atoms_part,
            partial: atoms_part,
        });
    }
    if set.complement_length() > 0.0 && f.weight().at_zero() == 0.0 {
        return Ok(MeasureIntegral {
            value: f64::INFINITY,
            finite: false,
            trend_ratio: f64::INFINITY,
            generations: Vec::new(),
            atoms_part,
            partial: f64::INFINITY,
        });
    }
    let gens = usable_generations(set, cfg);
    let selected: Vec<usize> = (0..set.gaps().len())
        .filter(|&j| {
            let g = &set.gaps()[j];
            !g.unresolved && gens.binary_search(&g.generation).is_ok()
        })
        .collect();
    let (xs, ws) = gauss_legendre(cfg.zeta_nodes);
    let nodes: Vec<(f64, f64)> = xs.iter().zip(&ws).map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
    let per_gap: Vec<f64> = selected.par_iter().map(|&j| gap_integral(f, mu, j, &nodes, cfg)).collect();

    let mut generations: Vec<GenerationTerm> = Vec::new();
    for &gen in &gens {
        let vals: Vec<f64> =
            selected.iter().zip(&per_gap).filter(|(&j, _)| set.gaps()[j].generation == gen).map(|(_, &v)| v).collect();
        generations.push(GenerationTerm { generation: gen, gaps: vals.len(), value: pairwise_sum(&vals) });
    }
    let partial = pairwise_sum(&generations.iter().map(|g| g.value).collect::<Vec<_>>()) + atoms_part;
    let trend_ratio = if exact_set(set) { 0.0 } else { trend_ratio(&generations) };
    let finite = trend_ratio < 1.0 && partial.is_finite();
    let value = if finite {
        let last = generations.last().map(|g| g.value).unwrap_or(0.0);
        partial + last * trend_ratio / (1.0 - trend_ratio)
    } else {
        f64::INFINITY
    };
    Ok(MeasureIntegral { value, finite, trend_ratio, generations, atoms_part, partial })
}

/// Geometric ratio per generation fitted to the trailing (up to five)
/// generation terms, skipping the first generation when possible.
pub fn trend_ratio(terms: &[GenerationTerm]) -> f64 {
    let usable: Vec<&GenerationTerm> = terms.iter().filter(|t| t.value > 0.0 && t.value.is_finite()).collect();
    if usable.len() < 2 {
        return if usable.is_empty() { 0.0 } else { f64::NAN };
    }
    let start = usable.len().saturating_sub(5).max(if usable.len() > 3 { 1 } else { 0 });
    let xs: Vec<f64> = usable[start..].iter().map(|t| t.generation as f64).collect();
    let ys: Vec<f64> = usable[start..].iter().map(|t| t.value.ln()).collect();
    linear_fit(&xs, &ys).slope.exp()
}

/// Dirichlet energy `∫_T D_ζ(f) |dζ|/2π`.
pub fn dirichlet_energy(f: &OuterDistanceFunction, cfg: &QuadConfig) -> Result<MeasureIntegral> {
    dirichlet_mu(f, &BoundaryMeasure::lebesgue(), cfg)
}

/// `∫_T dist ω'(dist)² dμ`, the comparison side for distance-type
/// functions.
pub fn distance_model_integral(f: &OuterDistanceFunction, mu: &BoundaryMeasure) -> f64 {
    let w = f.weight().clone();
    let set = f.set_arc();
    let model = move |theta: f64| {
        let d = set.dist(theta);
        let dw = w.derivative(d);
        d * dw * dw
    };
    let atoms: f64 = mu.atoms().iter().map(|&(t, m)| m * model(t)).sum();
    let tol = Tolerance::new(1e-10, 1e-300);
    let dens = match mu.density() {
        None => 0.0,
        Some(_) => {
            let parts: Vec<f64> = f
                .set()
                .gaps()
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    let h = g.half();
                    let mut s = 0.0;
                    for from_end in [false, true] {
                        s += integrate_graded(
                            |v| {
                                let loc = located_in_gap(f.set(), j, v, from_end);
                                let dw = f.weight().derivative(chord(v));
                                chord(v) * dw * dw * density_weight(mu, f.set(), &loc)
                            },
                            0.0,
                            h,
                            Endpoint::Left,
                            tol,
                        )
                        .value;
                    }
                    s
                })
                .collect();
            pairwise_sum(&parts)
        }
    };
    atoms + dens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, CantorSpec};
    use crate::weights::Weight;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn point() -> Arc<CircleSet> {
        Arc::new(CircleSet::point())
    }

    #[test]
    fn identity_has_unit_local_integral() {
        let f = OuterDistanceFunction::new(Weight::identity(), point());
        let cfg = QuadConfig::default();
        for k in 0..20 {
            let theta = TWO_PI * (k as f64 + 0.5) / 20.0;
            let b = rs_local(&f, theta, &cfg).unwrap();
            assert!((b.total - 1.0).abs() < 1e-8, "θ={theta}: {}", b.total);
            assert_eq!(b.over_gamma, 0.0);
        }
    }

    #[test]
    fn constant_function_vanishes() {
        let f = OuterDistanceFunction::new(Weight::constant(2.0).unwrap(), point());
        let b = rs_local(&f, 1.0, &QuadConfig::default()).unwrap();
        assert!(b.total.abs() < 1e-14);
    }

    #[test]
    fn douglas_examples() {
        let cfg = QuadConfig::default();
        let z = |t: f64| Complex64::from_polar(1.0, t);
        assert!((douglas_local(z, PI / 2.0, &cfg).unwrap() - 1.0).abs() < 1e-8);
        let z2 = |t: f64| Complex64::from_polar(1.0, 2.0 * t);
        assert!((douglas_local(z2, 2.5, &cfg).unwrap() - 2.0).abs() < 1e-8);
        let c = |_t: f64| Complex64::new(3.0, 0.0);
        assert!(douglas_local(c, 1.0, &cfg).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rs_matches_douglas_for_powers() {
        let cfg = QuadConfig::default();
        for alpha in [0.3, 0.7] {
            let f = OuterDistanceFunction::power(alpha, point()).unwrap();
            for theta in [0.4, 2.0, PI, 5.9] {
                let rs = rs_local(&f, theta, &cfg).unwrap().total;
                let dg = douglas_local(one_minus_z_pow(alpha), theta, &cfg).unwrap();
                assert!((rs - dg).abs() < 1e-7 * dg, "α={alpha} θ={theta}: {rs} vs {dg}");
            }
        }
    }

    #[test]
    fn rs_matches_douglas_for_one_minus_z_squared() {
        // |1 - ζ²| = d·sqrt(4 - d²) with d the distance to {1, -1}
        let w = Weight::custom(|t: f64| t * (4.0 - t * t).sqrt(), |t: f64| (4.0 - 2.0 * t * t) / (4.0 - t * t).sqrt(), 0.0);
        let e = Arc::new(CircleSet::from_points(&[0.0, PI]).unwrap());
        let f = OuterDistanceFunction::new(w, e);
        let cfg = QuadConfig::default();
        let g = |t: f64| Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * t);
        for theta in [0.3, 1.2, 2.0, 4.0, 5.5] {
            let rs = rs_local(&f, theta, &cfg).unwrap().total;
            let dg = douglas_local(g, theta, &cfg).unwrap();
            assert!((rs - dg).abs() < 1e-7 * dg, "θ={theta}: {rs} vs {dg}");
        }
    }

    #[test]
    fn regions_add_up_on_cantor() {
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12)).unwrap());
        let f = OuterDistanceFunction::power(0.3, e.clone()).unwrap();
        let cfg = QuadConfig::default();
        let g = e.resolved_gaps().find(|g| g.generation == 3).unwrap();
        let theta = g.start + 0.3 * g.length;
        let b = rs_local(&f, theta, &cfg).unwrap();
        assert!((b.over_i + b.over_gamma + b.over_sigma - b.total).abs() < 1e-12 * b.total);
        let t = rs_total(&f, theta, &cfg).unwrap();
        assert!((t - b.total).abs() < 1e-8 * t, "{t} vs {}", b.total);
        assert!(b.over_gamma > 0.0 && b.over_sigma > 0.0);
    }

    #[test]
    fn far_field_matches_brute_force() {
        let e = Arc::new(build_cantor(&CantorSpec::constant(0.25, 6)).unwrap());
        let f = OuterDistanceFunction::power(0.4, e.clone()).unwrap();
        let cfg = QuadConfig::default();
        let theta = e.resolved_gaps().find(|g| g.generation == 2).unwrap().midpoint() + 0.01;
        let loc = locate(&e, theta).unwrap();
        let z = prepare(&f, loc);
        let mut parts = vec![z.own_gap(&cfg)];
        for j in 0..e.gaps().len() {
            if j != loc.gap {
                let (g, s) = z.near_gap(j, &cfg);
                parts.push(g + s);
            }
        }
        let brute = pairwise_sum(&parts) / TWO_PI;
        let fast = rs_total(&f, theta, &cfg).unwrap();
        assert!((fast - brute).abs() < 1e-8 * brute, "{fast} vs {brute}");
    }

    #[test]
    fn untrusted_points_rejected() {
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 4)).unwrap());
        let f = OuterDistanceFunction::power(0.3, e.clone()).unwrap();
        let g = e.resolved_gaps().next().unwrap();
        let err = rs_local(&f, g.start + 1e-3, &QuadConfig::default()).unwrap_err();
        assert!(matches!(err, LabError::Untrusted { .. }));
        assert!(rs_local(&f, g.start + 1e-3, &QuadConfig::default().untrusted()).is_ok());
    }

    #[test]
    fn on_set_is_infinite() {
        let f = OuterDistanceFunction::power(0.3, point()).unwrap();
        assert!(rs_local(&f, 0.0, &QuadConfig::default()).unwrap().total.is_infinite());
    }

    #[test]
    fn energy_and_atoms() {
        let f = OuterDistanceFunction::new(Weight::identity(), point());
        let cfg = QuadConfig::default();
        let e = dirichlet_energy(&f, &cfg).unwrap();
        assert!((e.value - 1.0).abs() < 1e-7, "{}", e.value);
        let d = dirichlet_mu(&f, &BoundaryMeasure::point_mass(PI, 1.0), &cfg).unwrap();
        assert!((d.value - 1.0).abs() < 1e-8);
        let c = OuterDistanceFunction::new(Weight::constant(1.5).unwrap(), point());
        assert!(dirichlet_energy(&c, &cfg).unwrap().value.abs() < 1e-14);
    }
}
