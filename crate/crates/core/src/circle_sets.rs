//! Closed subsets of the unit circle stored through their complementary arcs.
//!
//! A [`CircleSet`] keeps the sorted list of open gaps (components of the
//! complement). Truncated constructions (Cantor sets at finite depth, point
//! sequences cut at a finite index) are represented by a finite skeleton of
//! points that belong to the ideal set; the gaps that stand for the
//! unresolved remainder are flagged as `unresolved` and their total size is
//! recorded as the truncation error.
//!
//! Distances are chordal, `|ζ - ζ'| = 2 |sin(Δθ/2)|`; gap lengths and the
//! counting function use arc length.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::quad::{integrate, integrate_graded, integrate_to_infinity, pairwise_sum, series_verdict, Endpoint, SeriesVerdict, Tolerance};

pub const TWO_PI: f64 = 2.0 * PI;

/// Reduce an angle to `[0, 2π)`.
pub fn normalize(theta: f64) -> f64 {
    let r = theta.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Chord length subtended by an arc of length `arc` (in `[0, 2π]`).
pub fn chord(arc: f64) -> f64 {
    2.0 * (0.5 * arc.abs().min(TWO_PI)).sin().abs()
}

/// Arc length (at most π) whose chord is `d`.
pub fn chord_to_arc(d: f64) -> f64 {
    2.0 * (0.5 * d.clamp(0.0, 2.0)).asin()
}

/// Signed angular difference `a - b` reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(TWO_PI);
    if d > PI {
        d -= TWO_PI;
    }
    d
}

/// A boundary point `e^{iθ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnglePoint {
    theta: f64,
}

impl AnglePoint {
    pub fn new(theta: f64) -> Self {
        AnglePoint { theta: normalize(theta) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Equality up to `1e-14` radians, across the seam at 0.
    pub fn approx_eq(&self, other: &AnglePoint) -> bool {
        angle_diff(self.theta, other.theta).abs() <= 1e-14
    }

    /// Chordal distance to another boundary point.
    pub fn chordal_distance(&self, other: &AnglePoint) -> f64 {
        chord(angle_diff(self.theta, other.theta))
    }
}

/// An arc `[start, start + length]` (angles unrolled past 2π when it wraps).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Self {
        Arc { start: normalize(start), length }
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn midpoint(&self) -> f64 {
        normalize(self.start + 0.5 * self.length)
    }

    /// Offset of `theta` from the start when it lies in the closed arc.
    pub fn offset(&self, theta: f64) -> Option<f64> {
        let v = (theta - self.start).rem_euclid(TWO_PI);
        (v <= self.length || self.length >= TWO_PI).then_some(v)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.offset(theta).is_some()
    }
}

/// A complementary open arc of a set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    pub start: f64,
    pub length: f64,
    /// Construction level for Cantor sets, dyadic length band otherwise.
    pub generation: u32,
    /// The gap stands in for a truncated part of the ideal set.
    pub unresolved: bool,
}

impl Gap {
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn half(&self) -> f64 {
        0.5 * self.length
    }

    pub fn midpoint(&self) -> f64 {
        normalize(self.start + 0.5 * self.length)
    }

    /// Offset `v ∈ (0, L)` of `theta` from the gap start, if inside the gap.
    pub fn offset(&self, theta: f64) -> Option<f64> {
        let v = (theta - self.start).rem_euclid(TWO_PI);
        if v > 0.0 && v < self.length {
            Some(v)
        } else {
            None
        }
    }

    pub fn as_arc(&self) -> Arc {
        Arc { start: self.start, length: self.length }
    }
}

fn dyadic_generation(length: f64) -> u32 {
    (TWO_PI / length).log2().floor().max(0.0) as u32
}

/// Which side(s) of 1 a point sequence occupies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    Symmetric,
    OneSided,
}

/// Ratio sequence of a Cantor construction.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioRule {
    Constant(f64),
    Listed(Vec<f64>),
    /// `ρ_n = 2^{-2^n}`.
    SuperExponential,
    /// `ρ_n = e^{-n}`.
    Exponential,
}

impl RatioRule {
    /// `log(1/ρ_n)` for `n ≥ 1`, without forming `ρ_n` when it underflows.
    pub fn log_inverse(&self, n: usize) -> f64 {
        match self {
            RatioRule::Constant(r) => -r.ln(),
            RatioRule::Listed(v) => -v[(n - 1).min(v.len() - 1)].ln(),
            RatioRule::SuperExponential => 2f64.powi(n as i32) * std::f64::consts::LN_2,
            RatioRule::Exponential => n as f64,
        }
    }

    pub fn ratio(&self, n: usize) -> f64 {
        (-self.log_inverse(n)).exp()
    }
}

/// Parameters of a generalized Cantor set.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorSpec {
    pub ratios: RatioRule,
    pub depth: usize,
}

impl CantorSpec {
    pub fn constant(ratio: f64, depth: usize) -> Self {
        CantorSpec { ratios: RatioRule::Constant(ratio), depth }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(LabError::InvalidParameter("depth must be at least 1".into()));
        }
        if let RatioRule::Listed(v) = &self.ratios {
            if v.is_empty() {
                return Err(LabError::InvalidParameter("empty ratio list".into()));
            }
        }
        for n in 1..=self.depth {
            let r = self.ratios.ratio(n);
            if !(r > 0.0 && r < 0.5) && self.ratios.log_inverse(n) <= std::f64::consts::LN_2 {
                return Err(LabError::InvalidParameter(format!("ratio {r} at level {n} is outside (0, 1/2)")));
            }
        }
        Ok(())
    }
}

/// Rule generating the gaps of a sequence set beyond its truncation index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailRule {
    /// Gap between `n^{-γ}` and `(n+1)^{-γ}`.
    PowerSequence { gamma: f64 },
    /// Gap `t_n` with `t_n^{2α} = 1/(n log^β n)`.
    Theta { alpha: f64, beta: f64 },
}

impl TailRule {
    /// Gap length for a (real) index `n`.
    pub fn gap_length(&self, n: f64) -> f64 {
        match *self {
            TailRule::PowerSequence { gamma } => {
                n.powf(-gamma) * (-(-gamma * (1.0 / n).ln_1p()).exp_m1())
            }
            TailRule::Theta { alpha, beta } => (-(n.ln() + beta * n.ln().ln()) / (2.0 * alpha)).exp(),
        }
    }
}

/// The ideal continuation of a truncated sequence set: gaps with index
/// `n ≥ first_index`, each unresolved gap of the skeleton holding one copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceTail {
    pub first_index: u64,
    pub rule: TailRule,
}

impl SequenceTail {
    /// `Σ_{n ≥ first_index} f(gap_length(n))`, explicit for the first terms
    /// and Euler–Maclaurin beyond.
    pub fn sum<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let n0 = self.first_index as f64;
        let explicit = 4000usize;
        let mut acc = 0.0;
        for i in (0..explicit).rev() {
            acc += f(self.rule.gap_length(n0 + i as f64));
        }
        let m = n0 + explicit as f64;
        let g = |x: f64| f(self.rule.gap_length(x));
        let integral = integrate_to_infinity(
            |u| {
                let x = m * u.exp();
                g(x) * x
            },
            0.0,
            Tolerance::new(1e-12, 0.0),
        )
        .value;
        let h = m * 1e-3;
        let derivative = (g(m + h) - g(m - h)) / (2.0 * h);
        acc + integral + 0.5 * g(m) - derivative / 12.0
    }
}

/// Where a set came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Points,
    Gaps,
    Cantor { spec: CantorSpec },
    PointSequence { kind: SequenceKind, gamma: f64, count: usize },
    ThetaSequence { alpha: f64, beta: f64, count: usize },
}

/// How [`CircleSet::pushforward_integral`] evaluates `∫_T Ω(dist(ζ,E)) |dζ|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushforwardMode {
    /// Integrate `Ω(dist)` gap by gap.
    ExactGaps,
    /// Integrate `Ω(t) N_E(t)` in the distance variable.
    Counting,
}

/// Value of a distance integral with its divergence diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardResult {
    /// Integral for the represented set, `+∞` when the ideal set diverges.
    pub value: f64,
    /// Integral for the represented (truncated) set.
    pub truncated_value: f64,
    pub finite: bool,
    /// Integrability of `Ω` at 0.
    pub local_verdict: SeriesVerdict,
    /// Longest gap of each complete generation and the generation's share
    /// of the integral.
    pub group_upper: Vec<f64>,
    pub group_terms: Vec<f64>,
    /// Convergence of the generation series.
    pub verdict: SeriesVerdict,
}

/// A closed subset of the unit circle.
#[derive(Clone, Debug)]
pub struct CircleSet {
    gaps: Vec<Gap>,
    truncation_error: f64,
    provenance: Provenance,
    tail: Option<SequenceTail>,
    sorted_lengths: Vec<f64>,
    complement_length: f64,
}

impl CircleSet {
    fn assemble(gaps: Vec<Gap>, truncation_error: f64, provenance: Provenance, tail: Option<SequenceTail>) -> Result<Self> {
        if gaps.is_empty() {
            return Err(LabError::WholeCircle);
        }
        let mut sorted_lengths: Vec<f64> = gaps.iter().map(|g| g.length).collect();
        sorted_lengths.sort_by(|a, b| b.total_cmp(a));
        let mut set = CircleSet { gaps, truncation_error, provenance, tail, sorted_lengths, complement_length: 0.0 };
        set.complement_length = pairwise_sum(&set.complement_arcs().iter().map(|a| a.length).collect::<Vec<_>>());
        Ok(set)
    }

    /// Finite set of points (angles in radians).
    pub fn from_points(angles: &[f64]) -> Result<Self> {
        Self::from_points_flagged(angles, |_, _| false, 0.0, Provenance::Points, None)
    }

    /// The single point `1`.
    pub fn point() -> Self {
        Self::from_points(&[0.0]).expect("one point is a valid set")
    }

    fn from_points_flagged<F: Fn(f64, f64) -> bool>(
        angles: &[f64],
        unresolved: F,
        truncation_error: f64,
        provenance: Provenance,
        tail: Option<SequenceTail>,
    ) -> Result<Self> {
        if angles.is_empty() {
            return Err(LabError::InvalidParameter("a set needs at least one point".into()));
        }
        let mut pts: Vec<f64> = angles.iter().map(|&a| normalize(a)).collect();
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        if pts.len() > 1 && (pts[0] + TWO_PI - pts[pts.len() - 1]) <= 1e-14 {
            pts.pop();
        }
        let n = pts.len();
        let mut gaps = Vec::with_capacity(n);
        for i in 0..n {
            let start = pts[i];
            let end = if i + 1 < n { pts[i + 1] } else { pts[0] + TWO_PI };
            let length = end - start;
            gaps.push(Gap { start, length, generation: dyadic_generation(length), unresolved: unresolved(start, length) });
        }
        Self::assemble(gaps, truncation_error, provenance, tail)
    }

    /// Set given directly by disjoint gaps. The complement may have positive
    /// measure.
    pub fn from_gaps(mut gaps: Vec<Gap>, truncation_error: f64) -> Result<Self> {
        if gaps.is_empty() {
            return Err(LabError::WholeCircle);
        }
        for g in gaps.iter_mut() {
            if !(g.length > 0.0 && g.length <= TWO_PI) {
                return Err(LabError::InvalidParameter(format!("gap length {} outside (0, 2π]", g.length)));
            }
            g.start = normalize(g.start);
        }
        gaps.sort_by(|a, b| a.start.total_cmp(&b.start));
        for i in 0..gaps.len() {
            let next_start = if i + 1 < gaps.len() { gaps[i + 1].start } else { gaps[0].start + TWO_PI };
            if gaps[i].end() > next_start + 1e-12 {
                return Err(LabError::InvalidParameter("gaps overlap".into()));
            }
        }
        let total: f64 = gaps.iter().map(|g| g.length).sum();
        if total > TWO_PI * (1.0 + 1e-12) {
            return Err(LabError::InvalidParameter("total gap length exceeds 2π".into()));
        }
        Self::assemble(gaps, truncation_error, Provenance::Gaps, None)
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn resolved_gaps(&self) -> impl Iterator<Item = &Gap> {
        self.gaps.iter().filter(|g| !g.unresolved)
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// Smallest distance at which results are treated as trustworthy.
    pub fn trusted_floor(&self) -> f64 {
        100.0 * self.truncation_error
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tail(&self) -> Option<&SequenceTail> {
        self.tail.as_ref()
    }

    /// Closed arcs of the finite-depth outer approximation (the closures of
    /// the unresolved gaps).
    pub fn outer_arcs(&self) -> Vec<Arc> {
        self.gaps.iter().filter(|g| g.unresolved).map(|g| g.as_arc()).collect()
    }

    /// Total length of the complement of the gaps, i.e. of
    /// [`complement_arcs`](Self::complement_arcs); round-off slivers count
    /// as zero.
    pub fn complement_length(&self) -> f64 {
        self.complement_length
    }

    /// Points bounding the gaps, sorted in `[0, 2π)`.
    pub fn boundary_points(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.gaps.len());
        for g in &self.gaps {
            pts.push(normalize(g.start));
            pts.push(normalize(g.end()));
        }
        pts.sort_by(|a, b| a.total_cmp(b));
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        pts
    }

    /// Index of the gap containing `theta`, `None` when `theta ∈ E`.
    pub fn locate(&self, theta: f64) -> Option<usize> {
        let t = normalize(theta);
        let idx = self.gaps.partition_point(|g| g.start <= t);
        if idx > 0 {
            let g = &self.gaps[idx - 1];
            if t > g.start && t < g.end() {
                return Some(idx - 1);
            }
        }
        let last = self.gaps.len() - 1;
        let g = &self.gaps[last];
        if t + TWO_PI < g.end() && t + TWO_PI > g.start {
            return Some(last);
        }
        None
    }

    /// Arc distance from `theta` to the set.
    pub fn arc_distance(&self, theta: f64) -> f64 {
        match self.locate(theta) {
            None => 0.0,
            Some(i) => {
                let g = &self.gaps[i];
                let v = g.offset(theta).unwrap_or(0.0);
                v.min(g.length - v)
            }
        }
    }

    /// Chordal distance `dist(ζ, E)`.
    pub fn dist(&self, theta: f64) -> f64 {
        chord(self.arc_distance(theta))
    }

    pub fn dist_to_point(&self, zeta: AnglePoint) -> f64 {
        self.dist(zeta.theta())
    }

    /// The component `I(ζ, E)` of the complement containing `ζ`.
    pub fn component_of(&self, theta: f64) -> Result<Gap> {
        self.locate(theta).map(|i| self.gaps[i]).ok_or(LabError::PointOnSet)
    }

    fn regions(&self, theta: f64) -> Result<(Vec<Arc>, Vec<Arc>)> {
        let own = self.locate(theta).ok_or(LabError::PointOnSet)?;
        let a = self.arc_distance(theta);
        let mut gamma = Vec::new();
        let mut sigma = Vec::new();
        for (j, g) in self.gaps.iter().enumerate() {
            if j == own {
                continue;
            }
            let s = a.min(g.half());
            if s >= g.half() {
                gamma.push(Arc::new(g.start, s));
                gamma.push(Arc::new(g.start + s, g.length - s));
            } else {
                gamma.push(Arc::new(g.start, s));
                gamma.push(Arc::new(g.end() - s, s));
                sigma.push(Arc::new(g.start + s, g.length - 2.0 * s));
            }
        }
        for arc in self.complement_arcs() {
            gamma.push(arc);
        }
        Ok((gamma, sigma))
    }

    /// `Γ(ζ,E)`: points outside `I(ζ,E)` at distance at most `dist(ζ,E)`.
    pub fn region_gamma(&self, theta: f64) -> Result<Vec<Arc>> {
        Ok(self.regions(theta)?.0)
    }

    /// `Σ(ζ,E)`: points outside `I(ζ,E)` at distance at least `dist(ζ,E)`.
    pub fn region_sigma(&self, theta: f64) -> Result<Vec<Arc>> {
        Ok(self.regions(theta)?.1)
    }

    /// Arcs of positive length contained in the set.
    pub fn complement_arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        let n = self.gaps.len();
        for i in 0..n {
            let end = self.gaps[i].end();
            let next = if i + 1 < n { self.gaps[i + 1].start } else { self.gaps[0].start + TWO_PI };
            if next - end > 1e-13 {
                out.push(Arc::new(end, next - end));
            }
        }
        out
    }

    /// `|E_t|` for the chordal threshold `t`.
    pub fn sublevel_measure(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.complement_length();
        }
        let s = chord_to_arc(t);
        let parts: Vec<f64> = self.gaps.iter().map(|g| 2.0 * s.min(g.half())).collect();
        (pairwise_sum(&parts) + self.complement_length()).min(TWO_PI)
    }

    /// `E_t = {ζ : dist(ζ,E) ≤ t}` as merged closed arcs, with its length.
    pub fn sublevel_set(&self, t: f64) -> (Vec<Arc>, f64) {
        let s = chord_to_arc(t.max(0.0));
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let n = self.gaps.len();
        for i in 0..n {
            let g = &self.gaps[i];
            let r = s.min(g.half());
            if r >= g.half() {
                pieces.push((g.start, g.end()));
            } else {
                pieces.push((g.start, g.start + r));
                pieces.push((g.end() - r, g.end()));
            }
            let next = if i + 1 < n { self.gaps[i + 1].start } else { self.gaps[0].start + TWO_PI };
            if next > g.end() {
                pieces.push((g.end(), next));
            }
        }
        let base = self.gaps[0].start;
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in pieces {
            if b < a {
                continue;
            }
            if let Some(last) = merged.last_mut() {
                if a <= last.1 + 1e-14 {
                    last.1 = last.1.max(b);
                    continue;
                }
            }
            merged.push((a, b));
        }
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().expect("nonempty");
            if last.1 >= first.0 + TWO_PI - 1e-14 {
                merged.pop();
                merged[0] = (last.0 - TWO_PI, first.1);
            }
        }
        let total = self.sublevel_measure(t);
        if merged.len() == 1 && merged[0].1 - merged[0].0 >= TWO_PI - 1e-14 {
            return (vec![Arc { start: 0.0, length: TWO_PI }], total);
        }
        let arcs = merged
            .into_iter()
            .map(|(a, b)| Arc { start: normalize(a), length: b - a })
            .filter(|a| a.length > 0.0 || base.is_nan())
            .collect();
        (arcs, total)
    }

    /// `N_E(t) = 2 #{gaps with arc length > 2t}`.
    pub fn gap_counting(&self, t: f64) -> usize {
        2 * self.sorted_lengths.partition_point(|&l| l > 2.0 * t)
    }

    /// Gap lengths in decreasing order.
    pub fn sorted_lengths(&self) -> &[f64] {
        &self.sorted_lengths
    }

    /// `∫_T Ω(dist(ζ,E)) |dζ|` for `Ω` given on chordal distances.
    ///
    /// Finiteness for the ideal set needs `Ω` integrable at 0 (judged from
    /// dyadic bands of `∫Ω` down to `π 2^{-60}`) and, for infinite sets, a
    /// convergent series of per-generation gap contributions (judged from
    /// its tail over the complete generations).
    pub fn pushforward_integral<F: Fn(f64) -> f64>(&self, omega: F, mode: PushforwardMode, tol: Tolerance) -> PushforwardResult {
        let f = |t: f64| omega(chord(t));
        let complement = self.complement_length();
        let complement_part = if complement > 0.0 { omega(0.0) * complement } else { 0.0 };

        let local_terms: Vec<f64> = (0..60)
            .map(|k| {
                let hi = PI * 0.5f64.powi(k);
                integrate(&f, 0.5 * hi, hi, tol).value.abs()
            })
            .collect();
        let local_verdict = series_verdict(&local_terms);
        let (group_upper, group_terms) = self.generation_terms(&f, tol);
        let verdict = series_verdict(&group_terms);
        let infinite_set = self.gaps.iter().any(|g| g.unresolved) || self.tail.is_some();

        let truncated_value = match mode {
            PushforwardMode::ExactGaps => {
                let mut cache: HashMap<u64, f64> = HashMap::new();
                let parts: Vec<f64> = self
                    .gaps
                    .iter()
                    .map(|g| *cache.entry(g.length.to_bits()).or_insert_with(|| 2.0 * integrate_graded(&f, 0.0, g.half(), Endpoint::Left, tol).value))
                    .collect();
                pairwise_sum(&parts) + complement_part
            }
            PushforwardMode::Counting => {
                let (halves, counts) = self.half_length_groups();
                let mut parts = Vec::with_capacity(halves.len());
                let mut lower = 0.0;
                for (k, &h) in halves.iter().enumerate() {
                    let n = 2.0 * counts[k] as f64;
                    let piece = if k == 0 {
                        integrate_graded(&f, 0.0, h, Endpoint::Left, tol).value
                    } else {
                        integrate(&f, lower, h, tol).value
                    };
                    parts.push(n * piece);
                    lower = h;
                }
                pairwise_sum(&parts) + complement_part
            }
        };
        let finite = truncated_value.is_finite() && local_verdict.converges && (!infinite_set || verdict.converges);
        PushforwardResult {
            value: if finite { truncated_value } else { f64::INFINITY },
            truncated_value,
            finite,
            local_verdict,
            group_upper,
            group_terms,
            verdict,
        }
    }

    /// Distinct half lengths in increasing order with the number of gaps at
    /// least that long.
    fn half_length_groups(&self) -> (Vec<f64>, Vec<usize>) {
        let mut halves: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for (i, &l) in self.sorted_lengths.iter().enumerate().rev() {
            let h = 0.5 * l;
            if halves.last() == Some(&h) {
                continue;
            }
            halves.push(h);
            counts.push(i + 1);
        }
        (halves, counts)
    }

    /// Generations that are complete in the representation: every gap an
    /// unresolved remainder could hide is shorter than the shortest
    /// unresolved gap, so all generations below its own are exact.
    pub fn complete_generations(&self) -> u32 {
        self.gaps.iter().filter(|g| g.unresolved).map(|g| g.generation).min().map_or(u32::MAX, |g| g.saturating_sub(1))
    }

    /// `Σ_{gaps of generation g} ∫_gap Ω(dist)` for the complete
    /// generations, with the longest gap of each generation.
    fn generation_terms<F: Fn(f64) -> f64>(&self, f: &F, tol: Tolerance) -> (Vec<f64>, Vec<f64>) {
        let top = self.complete_generations();
        let max_gen = self.gaps.iter().filter(|g| !g.unresolved && g.generation <= top).map(|g| g.generation).max();
        let Some(max_gen) = max_gen else {
            return (Vec::new(), Vec::new());
        };
        let mut cache: HashMap<u64, f64> = HashMap::new();
        let mut groups: Vec<Vec<f64>> = vec![Vec::new(); max_gen as usize + 1];
        let mut upper = vec![0.0f64; max_gen as usize + 1];
        for g in self.gaps.iter().filter(|g| !g.unresolved && g.generation <= max_gen) {
            let v = *cache
                .entry(g.length.to_bits())
                .or_insert_with(|| 2.0 * integrate_graded(f, 0.0, g.half(), Endpoint::Left, tol).value);
            groups[g.generation as usize].push(v);
            upper[g.generation as usize] = upper[g.generation as usize].max(g.length);
        }
        (upper, groups.iter().map(|v| pairwise_sum(v)).collect())
    }

    /// Rows `(gap start, gap length)` for export.
    pub fn gap_rows(&self) -> Vec<(f64, f64, u32, bool)> {
        self.gaps.iter().map(|g| (g.start, g.length, g.generation, g.unresolved)).collect()
    }
}

/// Generalized Cantor set at finite depth: at each level every arc of length
/// `L` is replaced by its two end subarcs of length `ρ_n L`.
pub fn build_cantor(spec: &CantorSpec) -> Result<CircleSet> {
    spec.validate()?;
    let log_len: f64 = TWO_PI.ln() - (1..=spec.depth).map(|n| spec.ratios.log_inverse(n)).sum::<f64>();
    let final_len = log_len.exp();
    if log_len < (1e-300f64).ln() {
        return Err(LabError::DepthUnderflow { depth: spec.depth, length: final_len });
    }
    let ratios: Vec<f64> = (1..=spec.depth).map(|n| spec.ratios.ratio(n)).collect();
    // skeleton points with the generation of the gap that starts there
    let mut points: Vec<(f64, Option<u32>)> = Vec::with_capacity(1 << (spec.depth + 1).min(30));
    fn recurse(start: f64, len: f64, level: usize, ratios: &[f64], out: &mut Vec<(f64, Option<u32>)>) {
        if level == ratios.len() {
            out.push((start, None));
            return;
        }
        let sub = ratios[level] * len;
        recurse(start, sub, level + 1, ratios, out);
        out.push((start + sub, Some(level as u32 + 1)));
        recurse(start + len - sub, sub, level + 1, ratios, out);
    }
    recurse(0.0, TWO_PI, 0, &ratios, &mut points);
    let n = points.len();
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n {
        let (start, generation) = points[i];
        let end = if i + 1 < n { points[i + 1].0 } else { TWO_PI };
        gaps.push(Gap {
            start,
            length: end - start,
            generation: generation.unwrap_or(spec.depth as u32 + 1),
            unresolved: generation.is_none(),
        });
    }
    CircleSet::assemble(gaps, final_len, Provenance::Cantor { spec: spec.clone() }, None)
}

/// `{e^{±i n^{-γ}}} ∪ {1}` (symmetric) or `{e^{-i n^{-γ}}} ∪ {1}` (one sided),
/// truncated at `n = count`.
pub fn build_point_sequence(kind: SequenceKind, gamma: f64, count: usize) -> Result<CircleSet> {
    if !(gamma > 0.0) || count < 2 {
        return Err(LabError::InvalidParameter("need gamma > 0 and count >= 2".into()));
    }
    let a = |n: usize| (n as f64).powf(-gamma);
    let mut angles = vec![0.0];
    for n in 1..=count {
        angles.push(-a(n));
        if kind == SequenceKind::Symmetric {
            angles.push(a(n));
        }
    }
    let last = a(count);
    let tol = 1e-12 * last;
    let unresolved = move |start: f64, length: f64| {
        let right_of_one = start.abs() < tol && (length - last).abs() <= tol.max(1e-15);
        let left_of_one = (start + length - TWO_PI).abs() < 1e-12 && (length - last).abs() <= 1e-9 * last;
        (kind == SequenceKind::Symmetric && right_of_one) || left_of_one
    };
    CircleSet::from_points_flagged(
        &angles,
        unresolved,
        last,
        Provenance::PointSequence { kind, gamma, count },
        Some(SequenceTail { first_index: count as u64, rule: TailRule::PowerSequence { gamma } }),
    )
}

/// `{e^{iθ_n} : n ≥ 2} ∪ {1}` with `θ_n = Σ_{k≥n} t_k`, `t_n^{2α} = 1/(n log^β n)`,
/// truncated at `n = count`.
pub fn build_theta_sequence(alpha: f64, beta: f64, count: usize) -> Result<CircleSet> {
    if !(alpha > 0.0) || !(beta > 1.0) || count < 3 {
        return Err(LabError::InvalidParameter("need alpha > 0, beta > 1, count >= 3".into()));
    }
    let p = 1.0 / (2.0 * alpha);
    if p < 1.0 || (p == 1.0 && beta * p <= 1.0) {
        return Err(LabError::DivergentSequence(format!(
            "t_n = (n log^{beta} n)^(-{p}) is not summable for alpha = {alpha}"
        )));
    }
    let rule = TailRule::Theta { alpha, beta };
    let tail = SequenceTail { first_index: count as u64, rule };
    let theta_last = tail.sum(|l| l);
    // θ_n = θ_{n+1} + t_n, n = count-1 down to 2
    let mut thetas = vec![0.0; count + 1];
    thetas[count] = theta_last;
    for n in (2..count).rev() {
        thetas[n] = thetas[n + 1] + rule.gap_length(n as f64);
    }
    if thetas[2] >= TWO_PI {
        return Err(LabError::InvalidParameter(format!("theta_2 = {} wraps around the circle", thetas[2])));
    }
    let mut gaps = Vec::with_capacity(count);
    gaps.push(Gap { start: 0.0, length: theta_last, generation: dyadic_generation(theta_last), unresolved: true });
    for n in (2..count).rev() {
        let length = rule.gap_length(n as f64);
        gaps.push(Gap { start: thetas[n + 1], length, generation: dyadic_generation(length), unresolved: false });
    }
    let big = TWO_PI - thetas[2];
    gaps.push(Gap { start: thetas[2], length: big, generation: dyadic_generation(big), unresolved: false });
    CircleSet::assemble(gaps, theta_last, Provenance::ThetaSequence { alpha, beta, count }, Some(tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn cantor_depth_one_arcs() {
        let e = build_cantor(&CantorSpec::constant(1.0 / 3.0, 1)).unwrap();
        let resolved: Vec<&Gap> = e.resolved_gaps().collect();
        assert_eq!(resolved.len(), 1);
        assert!(close(resolved[0].length, TWO_PI / 3.0, 1e-14));
        let arcs = e.outer_arcs();
        assert_eq!(arcs.len(), 2);
        assert!(close(arcs[0].start, 0.0, 1e-14) && close(arcs[0].length, TWO_PI / 3.0, 1e-14));
        assert!(close(arcs[1].start, 4.0 * PI / 3.0, 1e-14) && close(arcs[1].end(), TWO_PI, 1e-14));
        assert!(close(e.truncation_error(), TWO_PI / 3.0, 1e-14));
    }

    #[test]
    fn cantor_depth_two_gaps() {
        let e = build_cantor(&CantorSpec::constant(1.0 / 3.0, 2)).unwrap();
        let mut lengths: Vec<f64> = e.resolved_gaps().map(|g| g.length).collect();
        lengths.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(lengths.len(), 3);
        assert!(close(lengths[0], TWO_PI / 3.0, 1e-14));
        assert!(close(lengths[1], TWO_PI / 9.0, 1e-14));
        assert!(close(lengths[2], TWO_PI / 9.0, 1e-14));
        assert_eq!(e.outer_arcs().len(), 4);
        for arc in e.outer_arcs() {
            assert!(close(arc.length, TWO_PI / 9.0, 1e-13));
        }
        assert_eq!(e.gap_counting(PI / 4.0), 2);
    }

    #[test]
    fn cantor_single_step_generic_ratio() {
        let rho = 0.2;
        let e = build_cantor(&CantorSpec::constant(rho, 1)).unwrap();
        let g: Vec<&Gap> = e.resolved_gaps().collect();
        assert!(close(g[0].length, TWO_PI * (1.0 - 2.0 * rho), 1e-14));
        assert!(e.outer_arcs().iter().all(|a| close(a.length, TWO_PI * rho, 1e-14)));
    }

    #[test]
    fn cantor_underflow_rejected() {
        let err = build_cantor(&CantorSpec::constant(0.1, 400)).unwrap_err();
        assert!(matches!(err, LabError::DepthUnderflow { .. }));
        assert!(build_cantor(&CantorSpec::constant(0.6, 3)).is_err());
    }

    #[test]
    fn total_gap_length_is_full_circle() {
        let e = build_cantor(&CantorSpec::constant(0.3, 8)).unwrap();
        assert!(e.complement_length() < 1e-12);
        let f = build_point_sequence(SequenceKind::OneSided, 1.0, 100).unwrap();
        assert!(f.complement_length() < 1e-12);
    }

    #[test]
    fn symmetric_sequence_points() {
        let e = build_point_sequence(SequenceKind::Symmetric, 1.0, 3).unwrap();
        let pts = e.boundary_points();
        let expected = [0.0, 1.0 / 3.0, 0.5, 1.0, TWO_PI - 1.0, TWO_PI - 0.5, TWO_PI - 1.0 / 3.0];
        assert_eq!(pts.len(), expected.len());
        for (p, q) in pts.iter().zip(expected) {
            assert!(close(*p, q, 1e-14));
        }
        assert!(close(e.truncation_error(), 1.0 / 3.0, 1e-15));
        assert_eq!(e.gaps().iter().filter(|g| g.unresolved).count(), 2);
    }

    #[test]
    fn one_sided_sequence_points() {
        let f = build_point_sequence(SequenceKind::OneSided, 2.0, 2).unwrap();
        let pts = f.boundary_points();
        assert_eq!(pts.len(), 3);
        assert!(close(pts[0], 0.0, 1e-15));
        assert!(close(pts[1], TWO_PI - 1.0, 1e-14));
        assert!(close(pts[2], TWO_PI - 0.25, 1e-14));
    }

    #[test]
    fn sequence_gap_is_consecutive_difference() {
        let e = build_point_sequence(SequenceKind::Symmetric, 1.0, 50).unwrap();
        let g = e.component_of(0.5 * (1.0 / 10.0 + 1.0 / 11.0)).unwrap();
        assert!(close(g.length, 1.0 / 10.0 - 1.0 / 11.0, 1e-12));
        let rule = TailRule::PowerSequence { gamma: 1.0 };
        assert!(close(rule.gap_length(10.0), 1.0 / 10.0 - 1.0 / 11.0, 1e-13));
    }

    #[test]
    fn theta_sequence_gaps_telescope() {
        let e = build_theta_sequence(0.25, 3.0, 200).unwrap();
        let rule = TailRule::Theta { alpha: 0.25, beta: 3.0 };
        for g in e.resolved_gaps().take(40) {
            if g.length > 3.0 {
                continue;
            }
            let n = (2..200).find(|&n| close(rule.gap_length(n as f64), g.length, 1e-15));
            assert!(n.is_some(), "gap {} not a t_n", g.length);
        }
        // gap between θ_{n+1} and θ_n equals t_n exactly
        for n in [2usize, 5, 17, 150] {
            let t = rule.gap_length(n as f64);
            assert!(e.gaps().iter().any(|g| g.length == t));
        }
    }

    #[test]
    fn theta_sequence_parameter_checks() {
        assert!(build_theta_sequence(0.45, 1.5, 100).is_ok());
        assert!(matches!(build_theta_sequence(0.6, 2.0, 100), Err(LabError::DivergentSequence(_))));
        let e = build_theta_sequence(0.25, 3.0, 1000).unwrap();
        // tail sum matches a long explicit partial sum
        let rule = TailRule::Theta { alpha: 0.25, beta: 3.0 };
        let explicit: f64 = (1000..2_000_000).rev().map(|n| rule.gap_length(n as f64)).sum();
        assert!(e.truncation_error() > explicit);
        assert!(e.truncation_error() - explicit < 1e-12);
    }

    #[test]
    fn distances_to_single_point() {
        let e = CircleSet::point();
        assert!(close(e.dist(PI), 2.0, 1e-15));
        assert!(close(e.dist(PI / 2.0), 2f64.sqrt(), 1e-15));
        assert_eq!(e.dist(0.0), 0.0);
        assert_eq!(e.dist(TWO_PI), 0.0);
    }

    #[test]
    fn whole_circle_rejected() {
        assert!(matches!(CircleSet::from_gaps(vec![], 0.0), Err(LabError::WholeCircle)));
    }

    #[test]
    fn gamma_region_two_points() {
        let e = CircleSet::from_points(&[0.0, PI]).unwrap();
        let zeta = PI / 2.0;
        let own = e.component_of(zeta).unwrap();
        assert!(close(own.start, 0.0, 1e-15) && close(own.length, PI, 1e-15));
        let gamma = e.region_gamma(zeta).unwrap();
        assert_eq!(gamma.len(), 2);
        let total: f64 = gamma.iter().map(|a| a.length).sum();
        assert!(close(total, PI, 1e-14));
        // pointwise scan: every point of the lower half is within √2 of {1,-1}
        for k in 1..100 {
            let th = PI + PI * k as f64 / 100.0;
            assert!(e.dist(th) <= 2f64.sqrt() + 1e-12);
        }
        let sigma = e.region_sigma(zeta).unwrap();
        assert!(sigma.is_empty());
    }

    #[test]
    fn gamma_empty_for_point() {
        let e = CircleSet::point();
        let gamma = e.region_gamma(1.0).unwrap();
        assert!(gamma.iter().map(|a| a.length).sum::<f64>() == 0.0);
        assert!(e.region_gamma(0.0).is_err());
    }

    #[test]
    fn sublevel_of_point() {
        let e = CircleSet::point();
        let (arcs, total) = e.sublevel_set(2.0);
        assert!(close(total, TWO_PI, 1e-15));
        assert_eq!(arcs.len(), 1);
        let t = 1e-3;
        let (arcs, total) = e.sublevel_set(t);
        assert!(close(total, 4.0 * (t / 2.0).asin(), 1e-14));
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].contains(0.0));
    }

    #[test]
    fn sublevel_scan_matches_pointwise() {
        let e = build_cantor(&CantorSpec::constant(1.0 / 3.0, 2)).unwrap();
        for &t in &[0.05, 0.2, 0.5, 1.0] {
            let n = 200_000;
            let hits = (0..n).filter(|k| e.dist(TWO_PI * (*k as f64 + 0.5) / n as f64) <= t).count();
            let scan = TWO_PI * hits as f64 / n as f64;
            let (arcs, total) = e.sublevel_set(t);
            let arc_total: f64 = arcs.iter().map(|a| a.length).sum();
            assert!((scan - total).abs() < 1e-4, "t={t}: {scan} vs {total}");
            assert!((arc_total - total).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_of_point() {
        let e = CircleSet::point();
        assert_eq!(e.gap_counting(1.0), 2);
        assert_eq!(e.gap_counting(3.2), 0);
    }

    #[test]
    fn pushforward_constant_and_linear() {
        let e = CircleSet::point();
        let tol = Tolerance::new(1e-12, 0.0);
        for mode in [PushforwardMode::ExactGaps, PushforwardMode::Counting] {
            let one = e.pushforward_integral(|_| 1.0, mode, tol);
            assert!(close(one.truncated_value, TWO_PI, 1e-12));
            let lin = e.pushforward_integral(|t| t, mode, tol);
            assert!(close(lin.truncated_value, 8.0, 1e-12));
        }
    }

    #[test]
    fn pushforward_divergence_for_point() {
        let e = CircleSet::point();
        let tol = Tolerance::new(1e-10, 0.0);
        let r = e.pushforward_integral(|t| 1.0 / t, PushforwardMode::Counting, tol);
        assert!(!r.finite);
        let r = e.pushforward_integral(|t| t.powf(-0.5), PushforwardMode::Counting, tol);
        assert!(r.finite);
    }

    #[test]
    fn counting_bound_holds() {
        let e = build_cantor(&CantorSpec::constant(0.25, 6)).unwrap();
        for k in 0..100 {
            let t = 2.0 * 10f64.powf(-4.0 * k as f64 / 99.0);
            let lhs = t * e.gap_counting(t) as f64;
            assert!(lhs <= e.sublevel_measure(t) + 1e-12);
        }
    }
}
