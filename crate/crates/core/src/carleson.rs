//! Carleson-measure tests for the Dirichlet space and the multiplier
//! verdict for distance functions.
//!
//! A boundary measure is tested through the logarithmic energy of its
//! restrictions to arcs, through one-box bounds against a gauge `φ`, and
//! through the necessary condition `μ(I) = O(1/log(1/|I|))`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

pub use crate::measures::{in_box, BoundaryMeasure, Density, DiskMeasure};

use crate::circle_sets::{chord, normalize, Arc as CircleArc, CircleSet, Provenance, PushforwardMode, SequenceTail, TWO_PI};
use crate::error::{LabError, Result};
use crate::quad::{integrate, linear_fit, pairwise_sum, series_verdict, SeriesVerdict, Tolerance};
use crate::set_classes::{growth_verdict, ArcScan, ClassReport, ScaleRow, Verdict};
use crate::weights::{GrowthGauge, Weight};

/// Kernel of the boundary energy test. The plain kernel `log(1/|ζ-ξ|)` is
/// negative for `|ζ-ξ| > 1`; `Positive` truncates it at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogKernel {
    Plain,
    Positive,
}

impl LogKernel {
    fn eval(self, d: f64) -> f64 {
        let v = -d.ln();
        match self {
            LogKernel::Plain => v,
            LogKernel::Positive => v.max(0.0),
        }
    }
}

/// Arcs scanned by the tests, grouped by scale.
#[derive(Clone, Debug)]
pub enum ArcFamily {
    /// Dyadic arcs `[2πj/2^k, 2π(j+1)/2^k]` and their one-third shifts,
    /// `k = 0..levels`.
    Dyadic { levels: usize },
    /// Arcs starting, ending and centered at points of a set.
    Anchored { set: Arc<CircleSet>, scan: ArcScan },
    /// Arcs given explicitly (one scale per distinct length).
    Explicit(Vec<CircleArc>),
}

impl ArcFamily {
    pub fn anchored(set: Arc<CircleSet>) -> Self {
        ArcFamily::Anchored { set, scan: ArcScan { anchors: 32, ..ArcScan::default() } }
    }

    pub fn by_scale(&self) -> Vec<(f64, Vec<CircleArc>)> {
        match self {
            ArcFamily::Dyadic { levels } => (0..*levels)
                .map(|k| {
                    let n = 1usize << k;
                    let len = TWO_PI / n as f64;
                    let mut arcs: Vec<CircleArc> = (0..n).map(|j| CircleArc::new(j as f64 * len, len)).collect();
                    if k > 0 {
                        arcs.extend((0..n).map(|j| CircleArc::new(normalize((j as f64 + 1.0 / 3.0) * len), len)));
                    }
                    (len, arcs)
                })
                .collect(),
            ArcFamily::Anchored { set, scan } => {
                let anchors = scan.anchor_points(set);
                scan.scales(set).into_iter().map(|len| (len, scan.arcs(&anchors, len))).collect()
            }
            ArcFamily::Explicit(arcs) => {
                let mut lens: Vec<f64> = arcs.iter().map(|a| a.length).collect();
                lens.sort_by(|a, b| b.total_cmp(a));
                lens.dedup();
                lens.into_iter().map(|l| (l, arcs.iter().copied().filter(|a| a.length == l).collect())).collect()
            }
        }
    }
}

/// One scanned arc: `(|I|, μ(I), energy, ratio)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcRow {
    pub arc: CircleArc,
    pub mass: f64,
    pub energy: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcTestReport {
    pub sup_ratio: f64,
    pub witness: Option<CircleArc>,
    pub verdict: Verdict,
    /// Log-log slope of the per-scale sup against `log log(1/|I|)`.
    pub growth_exponent: f64,
    pub rows: Vec<ArcRow>,
    pub scales: Vec<ScaleRow>,
}

fn summarize(rows: Vec<ArcRow>, scale_of: impl Fn(&ArcRow) -> f64) -> ArcTestReport {
    let mut scales: Vec<ScaleRow> = Vec::new();
    let mut best = (0.0f64, None);
    for r in &rows {
        if r.mass <= 0.0 {
            continue;
        }
        let s = scale_of(r);
        if r.ratio > best.0 || best.1.is_none() {
            best = (r.ratio, Some(r.arc));
        }
        match scales.last_mut() {
            Some(last) if last.scale == s => last.value = last.value.max(r.ratio),
            _ => scales.push(ScaleRow { scale: s, value: r.ratio, running: 0.0 }),
        }
    }
    let mut running = f64::NEG_INFINITY;
    for s in scales.iter_mut() {
        running = running.max(s.value);
        s.running = running;
    }
    let (verdict, growth_exponent) = growth_verdict(&scales);
    ArcTestReport { sup_ratio: best.0, witness: best.1, verdict, growth_exponent, rows, scales }
}

/// A piece of the restriction of `μ` to an arc: mass, center angle and
/// angular extent.
#[derive(Clone, Copy, Debug)]
struct Cell {
    mass: f64,
    center: f64,
    width: f64,
}

/// Cells discretizing `μ|_I`. Pieces shorter than `|I|/LUMP` are merged
/// with their neighbours; singular distance densities get cells graded
/// geometrically toward the gap endpoints.
const LUMP: f64 = 128.0;
const GRADED: usize = 6;

fn cells_of(mu: &BoundaryMeasure, arc: CircleArc) -> Vec<Cell> {
    let min_w = arc.length / LUMP;
    let mut raw: Vec<Cell> = Vec::new();
    let push = |a: f64, b: f64, raw: &mut Vec<Cell>| {
        if b > a {
            let m = mu.arc_mass(CircleArc::new(normalize(a), b - a)) - atoms_in(mu, CircleArc::new(normalize(a), b - a));
            if m > 0.0 {
                raw.push(Cell { mass: m, center: 0.5 * (a + b), width: b - a });
            }
        }
    };
    match mu.density() {
        None => {}
        Some(Density::Angle(_)) => {
            let n = LUMP as usize / 2;
            let w = arc.length / n as f64;
            for k in 0..n {
                push(arc.start + k as f64 * w, arc.start + (k + 1) as f64 * w, &mut raw);
            }
        }
        Some(Density::Distance { set, .. }) => {
            let mut whole: HashMap<u64, f64> = HashMap::new();
            let mut piece = |s: f64, l: f64, a: f64, b: f64, raw: &mut Vec<Cell>| {
                let m = if a <= s && b >= s + l {
                    *whole.entry(l.to_bits()).or_insert_with(|| mu.gap_mass(l).unwrap_or(0.0))
                } else {
                    mu.gap_piece_mass(l, a - s, b - s).unwrap_or(0.0)
                };
                if m > 0.0 && b > a {
                    raw.push(Cell { mass: m, center: 0.5 * (a + b), width: b - a });
                }
            };
            for (s, l, p, q) in gap_pieces(set, arc) {
                if q - p < min_w {
                    piece(s, l, p, q, &mut raw);
                    continue;
                }
                let mid = s + 0.5 * l;
                // left half graded toward s, right half toward s + l
                for (lo, hi, anchor_left) in [(p, q.min(mid), true), (p.max(mid), q, false)] {
                    if hi <= lo {
                        continue;
                    }
                    let near_end = if anchor_left { lo <= s } else { hi >= s + l };
                    if !near_end {
                        piece(s, l, lo, hi, &mut raw);
                        continue;
                    }
                    let len = hi - lo;
                    let mut cuts: Vec<f64> = (0..=GRADED).map(|k| len * 0.25f64.powi((GRADED - k) as i32)).collect();
                    cuts.insert(0, 0.0);
                    for w in cuts.windows(2) {
                        if anchor_left {
                            piece(s, l, lo + w[0], lo + w[1], &mut raw);
                        } else {
                            piece(s, l, hi - w[1], hi - w[0], &mut raw);
                        }
                    }
                }
            }
        }
    }
    // merge runs of narrow cells
    raw.sort_by(|a, b| a.center.total_cmp(&b.center));
    let mut cells: Vec<Cell> = Vec::new();
    let mut run: Option<(f64, f64, f64, f64)> = None; // (mass, moment, left, right)
    let close = |(m, mo, l, r): (f64, f64, f64, f64)| Cell { mass: m, center: mo / m, width: r - l };
    for c in raw {
        if c.width >= min_w {
            if let Some(open) = run.take() {
                cells.push(close(open));
            }
            cells.push(c);
            continue;
        }
        let (l, r) = (c.center - 0.5 * c.width, c.center + 0.5 * c.width);
        let next = match run {
            None => (c.mass, c.mass * c.center, l, r),
            Some((m, mo, l0, r0)) => (m + c.mass, mo + c.mass * c.center, l0.min(l), r0.max(r)),
        };
        if next.3 - next.2 >= min_w {
            cells.push(close(next));
            run = None;
        } else {
            run = Some(next);
        }
    }
    if let Some(open) = run {
        cells.push(close(open));
    }
    cells
}

fn atoms_in(mu: &BoundaryMeasure, arc: CircleArc) -> f64 {
    mu.atoms().iter().filter(|(t, _)| arc.contains(*t)).map(|(_, m)| m).sum()
}

/// Pieces `(gap start, gap length, p, q)` of the gaps met by the arc, in
/// unwrapped angles `arc.start ≤ p < q ≤ arc.end()`.
fn gap_pieces(set: &CircleSet, arc: CircleArc) -> Vec<(f64, f64, f64, f64)> {
    let a = normalize(arc.start);
    let b = a + arc.length;
    let mut out = Vec::new();
    for shift in [-TWO_PI, 0.0, TWO_PI] {
        let gaps = set.gaps();
        let first = gaps.partition_point(|g| g.start + shift + g.length <= a);
        for g in &gaps[first..] {
            let s = g.start + shift;
            if s >= b {
                break;
            }
            let p = s.max(a);
            let q = (s + g.length).min(b);
            if q > p {
                out.push((s, g.length, p, q));
            }
        }
    }
    out.sort_by(|x, y| x.2.total_cmp(&y.2));
    out
}

/// Mean of the kernel between two cells. Neighbouring cells are treated as
/// uniform segments on a line, using `G(u) = u² log|u|/2 - 3u²/4` with
/// `G'' = log|u|`; distant ones by their centers.
fn cell_kernel(a: Cell, b: Cell, kernel: LogKernel) -> f64 {
    let c = angle_gap(a.center, b.center);
    if c > 4.0 * (a.width + b.width) {
        return kernel.eval(chord(c));
    }
    let g = |u: f64| if u == 0.0 { 0.0 } else { 0.5 * u * u * u.abs().ln() - 0.75 * u * u };
    let (ha, hb) = (0.5 * a.width, 0.5 * b.width);
    let mean_log = (g(c + ha + hb) - g(c - ha + hb) - g(c + ha - hb) + g(c - ha - hb)) / (a.width * b.width);
    match kernel {
        LogKernel::Plain => -mean_log,
        LogKernel::Positive => (-mean_log).max(0.0),
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// `∫_I ∫_I log(1/|ζ-ξ|) dμ dμ` by a cell product rule, exact for uniform
/// cells on a line between neighbours.
pub fn arc_log_energy(mu: &BoundaryMeasure, arc: CircleArc, kernel: LogKernel) -> (f64, f64) {
    let atoms = atoms_in(mu, arc);
    let cells = cells_of(mu, arc);
    let mass = atoms + pairwise_sum(&cells.iter().map(|c| c.mass).collect::<Vec<_>>());
    if atoms > 0.0 {
        return (mass, f64::INFINITY);
    }
    let rows: Vec<f64> = (0..cells.len())
        .map(|i| {
            let ci = cells[i];
            let row: Vec<f64> = cells.iter().map(|cj| ci.mass * cj.mass * cell_kernel(ci, *cj, kernel)).collect();
            pairwise_sum(&row)
        })
        .collect();
    (mass, pairwise_sum(&rows))
}

/// Boundary energy test: `sup_I (∫_I∫_I log(1/|ζ-ξ|) dμdμ)/μ(I)`.
pub fn ars_boundary_test(mu: &BoundaryMeasure, family: &ArcFamily, kernel: LogKernel) -> ArcTestReport {
    let mut rows = Vec::new();
    for (_, arcs) in family.by_scale() {
        let scale_rows: Vec<ArcRow> = arcs
            .par_iter()
            .map(|&arc| {
                let (mass, energy) = arc_log_energy(mu, arc, kernel);
                ArcRow { arc, mass, energy, ratio: if mass > 0.0 { energy / mass } else { 0.0 } }
            })
            .collect();
        rows.extend(scale_rows);
    }
    summarize(rows, |r| r.arc.length)
}

/// `Re k_w(z)` with `k_w(z) = log(1/(1 - w̄z))/(w̄z)`.
pub fn box_kernel(w: Complex64, z: Complex64) -> f64 {
    let u = w.conj() * z;
    if u.norm() < 1e-8 {
        return (Complex64::new(1.0, 0.0) + u * 0.5).re;
    }
    let one = Complex64::new(1.0, 0.0);
    if (one - u).norm() == 0.0 {
        return f64::INFINITY;
    }
    (-(one - u).ln() / u).re
}

/// Box energy test: `sup_I ∫∫_{S(I)} Re k_w(z) dμ(w)dμ(z) / μ(S̄(I))`.
pub fn ars_box_test(mu: &DiskMeasure, family: &ArcFamily) -> ArcTestReport {
    let mut rows = Vec::new();
    for (_, arcs) in family.by_scale() {
        let scale_rows: Vec<ArcRow> = arcs
            .par_iter()
            .map(|&arc| {
                let inside: Vec<(Complex64, f64)> = mu.samples.iter().copied().filter(|(z, _)| in_box(*z, arc)).collect();
                let mass: f64 = inside.iter().map(|s| s.1).sum();
                let energy = pairwise_sum(
                    &inside
                        .iter()
                        .map(|&(w, mw)| pairwise_sum(&inside.iter().map(|&(z, mz)| mw * mz * box_kernel(w, z)).collect::<Vec<_>>()))
                        .collect::<Vec<_>>(),
                );
                ArcRow { arc, mass, energy, ratio: if mass > 0.0 { energy / mass } else { 0.0 } }
            })
            .collect();
        rows.extend(scale_rows);
    }
    summarize(rows, |r| r.arc.length)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneBoxReport {
    /// `sup_I μ(S̄(I))/φ(|I|)` over the scan.
    pub sup_ratio: f64,
    pub ratio_bounded: Verdict,
    /// Convergence of `∫_0^{2π} φ(x)/x dx` from its dyadic pieces.
    pub integral: SeriesVerdict,
    pub holds: bool,
    /// First failing clause, if any.
    pub failing_clause: Option<&'static str>,
    pub rows: Vec<ArcRow>,
}

/// Sufficient one-box condition: `μ(S̄(I)) = O(φ(|I|))` and
/// `∫_0^{2π} φ(x)/x dx < ∞`.
pub fn one_box_test(mu: &BoundaryMeasure, phi: &GrowthGauge, family: &ArcFamily) -> OneBoxReport {
    let mut rows = Vec::new();
    for (_, arcs) in family.by_scale() {
        let scale_rows: Vec<ArcRow> = arcs
            .par_iter()
            .map(|&arc| {
                let mass = mu.arc_mass(arc);
                ArcRow { arc, mass, energy: 0.0, ratio: mass / phi.eval(arc.length) }
            })
            .collect();
        rows.extend(scale_rows);
    }
    let report = summarize(rows, |r| r.arc.length);
    let pieces: Vec<f64> = (0..80)
        .map(|k| {
            let hi = TWO_PI * 0.5f64.powi(k);
            integrate(|x| phi.eval(x) / x, 0.5 * hi, hi, Tolerance::new(1e-10, 1e-300)).value
        })
        .collect();
    let integral = series_verdict(&pieces);
    let ratio_ok = report.verdict == Verdict::Pass;
    let failing_clause = if !ratio_ok {
        Some("mu(S(I)) = O(phi(|I|))")
    } else if !integral.converges {
        Some("integral of phi(x)/x")
    } else {
        None
    };
    OneBoxReport {
        sup_ratio: report.sup_ratio,
        ratio_bounded: report.verdict,
        integral,
        holds: failing_clause.is_none(),
        failing_clause,
        rows: report.rows,
    }
}

/// The gauge `φ(s) = ∫_0^s t ω'(t)² N_E(t) dt / N_E(s)` built for Cantor
/// sets (`N_E` floored at 2 beyond the largest gap).
pub fn cantor_gauge(set: &CircleSet, w: &Weight) -> GrowthGauge {
    let mut halves: Vec<f64> = set.sorted_lengths().iter().map(|l| 0.5 * l).collect();
    halves.reverse();
    halves.dedup();
    let tol = Tolerance::new(1e-10, 1e-300);
    let w1 = w.clone();
    let density = move |t: f64| {
        let d = w1.derivative(t);
        t * d * d
    };
    // cumulative ∫_0^{h_k} t ω'² N_E dt at each breakpoint h_k
    let counts: Vec<f64> = halves.iter().map(|&h| set.gap_counting(h * (1.0 - 1e-12)) as f64).collect();
    let mut cumulative = vec![0.0];
    let mut lower = 0.0;
    for (k, &h) in halves.iter().enumerate() {
        let piece = crate::quad::integrate_graded(&density, lower, h, crate::quad::Endpoint::Left, tol).value;
        let last = *cumulative.last().expect("nonempty");
        cumulative.push(last + counts[k] * piece);
        lower = h;
    }
    let phi = move |s: f64| {
        let k = halves.partition_point(|&h| h < s);
        let (base, lo, n) = if k < halves.len() {
            (cumulative[k], if k == 0 { 0.0 } else { halves[k - 1] }, counts[k])
        } else {
            (cumulative[k], *halves.last().unwrap_or(&0.0), 0.0)
        };
        let extra = if n > 0.0 { n * crate::quad::integrate_graded(&density, lo, s, crate::quad::Endpoint::Left, tol).value } else { 0.0 };
        let n_s = n.max(2.0);
        (base + extra) / n_s
    };
    GrowthGauge::Custom(Arc::new(phi))
}

/// Necessary condition `μ(I) log(1/|I|) = O(1)` over arcs shorter than 1.
pub fn necessary_log_test(mu: &BoundaryMeasure, family: &ArcFamily) -> ArcTestReport {
    let mut rows = Vec::new();
    for (len, arcs) in family.by_scale() {
        if len >= 1.0 {
            continue;
        }
        let scale_rows: Vec<ArcRow> = arcs
            .par_iter()
            .map(|&arc| {
                let mass = mu.arc_mass(arc);
                ArcRow { arc, mass, energy: 0.0, ratio: mass * (1.0 / arc.length).ln() }
            })
            .collect();
        rows.extend(scale_rows);
    }
    let mut report = summarize(rows, |r| r.arc.length);
    // bounded or decaying sequences pass; growth in any power of log fails
    let (verdict, slope) = log_growth(&report.scales);
    report.verdict = verdict;
    report.growth_exponent = slope;
    report
}

fn log_growth(scales: &[ScaleRow]) -> (Verdict, f64) {
    let rows: Vec<&ScaleRow> = scales.iter().filter(|r| r.value > 0.0 && r.scale < 1.0).collect();
    if rows.iter().any(|r| !r.value.is_finite()) {
        return (Verdict::Fail, f64::INFINITY);
    }
    if rows.len() < 4 {
        return (Verdict::Inconclusive, f64::NAN);
    }
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.scale).ln().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.value.ln()).collect();
    let slope = linear_fit(&xs, &ys).slope;
    (if slope < 0.15 { Verdict::Pass } else if slope > 0.3 { Verdict::Fail } else { Verdict::Inconclusive }, slope)
}

/// `(N, |I_N|, μ(I_N), μ(I_N) log(1/|I_N|))` for the arcs `I_N = (1, e^{iθ_N})`
/// of a θ-sequence set, summed over the ideal tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CnRow {
    pub n: u64,
    pub length: f64,
    pub mass: f64,
    pub product: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CnSequenceReport {
    pub rows: Vec<CnRow>,
    /// Slope of `log(product)` against `log log N`.
    pub exponent: f64,
    pub verdict: Verdict,
}

/// Evaluate the necessary condition along `I_N` for `N` in `indices`.
pub fn cn_sequence(mu: &BoundaryMeasure, set: &CircleSet, indices: &[u64]) -> Result<CnSequenceReport> {
    let rule = match (set.provenance(), set.tail()) {
        (Provenance::ThetaSequence { .. }, Some(tail)) => tail.rule,
        _ => return Err(LabError::InvalidParameter("cn_sequence needs a theta-sequence set".into())),
    };
    if mu.gap_mass(1.0).is_none() {
        return Err(LabError::InvalidParameter("cn_sequence needs a distance-type density".into()));
    }
    let rows: Vec<CnRow> = indices
        .par_iter()
        .map(|&n| {
            let tail = SequenceTail { first_index: n, rule };
            let length = tail.sum(|l| l);
            let mass = tail.sum(|l| mu.gap_mass(l).unwrap_or(0.0));
            CnRow { n, length, mass, product: mass * (1.0 / length).ln() }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.product.ln()).collect();
    let exponent = linear_fit(&xs, &ys).slope;
    let verdict = if exponent < 0.15 { Verdict::Pass } else if exponent > 0.3 { Verdict::Fail } else { Verdict::Inconclusive };
    Ok(CnSequenceReport { rows, exponent, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Inconclusive,
}

impl Tri {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierVerdict {
    /// `f ∈ D`, from finiteness of `∫ dist ω'(dist)² |dζ|`.
    pub in_dirichlet: Tri,
    pub membership_integral: f64,
    pub multiplier: Tri,
    pub necessary: ArcTestReport,
    pub one_box: Option<OneBoxReport>,
    pub energy: Option<ArcTestReport>,
    pub justification: String,
}

/// The measure `dμ_{ω,E} = dist ω'(dist)² |dζ|`.
pub fn multiplier_measure(set: Arc<CircleSet>, w: &Weight) -> BoundaryMeasure {
    BoundaryMeasure::omega_measure(set, w)
}

/// Membership and multiplier verdict for `f_{ω,E}`. Requires the L-class
/// report of `E` (order 1 for power weights, order 2 otherwise); without a
/// passing report the hypotheses are not met.
pub fn multiplier_verdict(w: &Weight, set: Arc<CircleSet>, l_report: &ClassReport, family: &ArcFamily) -> Result<MultiplierVerdict> {
    if l_report.verdict != Verdict::Pass {
        return Err(LabError::InvalidParameter(format!("set class {} not certified ({})", l_report.class.name(), l_report.verdict.as_str())));
    }
    let w2 = w.clone();
    let membership = set.pushforward_integral(
        move |d| {
            let dw = w2.derivative(d);
            d * dw * dw
        },
        PushforwardMode::Counting,
        Tolerance::new(1e-9, 1e-300),
    );
    let in_dirichlet = if membership.finite { Tri::Yes } else { Tri::No };
    let mu = multiplier_measure(set.clone(), w);
    let necessary = necessary_log_test(&mu, family);
    if in_dirichlet == Tri::No {
        return Ok(MultiplierVerdict {
            in_dirichlet,
            membership_integral: membership.value,
            multiplier: Tri::No,
            necessary,
            one_box: None,
            energy: None,
            justification: "not in D: the distance integral diverges, and multipliers lie in D".into(),
        });
    }
    if necessary.verdict == Verdict::Fail {
        return Ok(MultiplierVerdict {
            in_dirichlet,
            membership_integral: membership.value,
            multiplier: Tri::No,
            necessary,
            one_box: None,
            energy: None,
            justification: "in D, but mu(I) log(1/|I|) is unbounded, so the measure is not Carleson".into(),
        });
    }
    let one_box = match set.provenance() {
        Provenance::Cantor { .. } => Some(one_box_test(&mu, &cantor_gauge(&set, w), family)),
        _ => None,
    };
    if one_box.as_ref().is_some_and(|o| o.holds) {
        return Ok(MultiplierVerdict {
            in_dirichlet,
            membership_integral: membership.value,
            multiplier: Tri::Yes,
            necessary,
            one_box,
            energy: None,
            justification: "in D and the one-box condition holds with the Cantor gauge".into(),
        });
    }
    let energy = ars_boundary_test(&mu, family, LogKernel::Plain);
    let (multiplier, justification) = match energy.verdict {
        Verdict::Pass => (Tri::Yes, "in D and the arc energy ratio stays bounded".to_string()),
        Verdict::Fail => (Tri::No, "in D, but the arc energy ratio grows".to_string()),
        Verdict::Inconclusive => (Tri::Inconclusive, "in D; sufficient and necessary tests do not decide".to_string()),
    };
    Ok(MultiplierVerdict {
        in_dirichlet,
        membership_integral: membership.value,
        multiplier,
        necessary,
        one_box,
        energy: Some(energy),
        justification,
    })
}

/// `φ(x) = 1/log(1/x)` style gauges and friends for examples and tests.
pub fn inverse_log_gauge() -> GrowthGauge {
    GrowthGauge::Custom(Arc::new(|x: f64| if x < 1.0 { 1.0 / (1.0 / x).ln().max(1e-300) } else { 1.0 / (PI * std::f64::consts::E / x).ln() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, build_theta_sequence, CantorSpec};
    use crate::set_classes::{l_test, ZetaGrid};

    #[test]
    fn lebesgue_full_circle_energy_vanishes() {
        let (m, e) = arc_log_energy(&BoundaryMeasure::lebesgue(), CircleArc::new(0.0, TWO_PI), LogKernel::Plain);
        assert!((m - 1.0).abs() < 1e-12);
        assert!(e.abs() < 5e-3, "{e}");
    }

    #[test]
    fn lebesgue_small_arcs_pass() {
        let r = ars_boundary_test(&BoundaryMeasure::lebesgue(), &ArcFamily::Dyadic { levels: 12 }, LogKernel::Plain);
        assert_eq!(r.verdict, Verdict::Pass);
        let small = r.rows.iter().find(|x| (x.arc.length - TWO_PI / 1024.0).abs() < 1e-12).unwrap();
        let l = small.arc.length;
        let model = l / TWO_PI * ((1.0 / l).ln() + 1.5);
        assert!((small.ratio - model).abs() < 0.05 * model, "{} vs {model}", small.ratio);
    }

    #[test]
    fn atom_fails_necessary_condition() {
        let mu = BoundaryMeasure::point_mass(1.0, 0.5);
        let family = ArcFamily::Explicit((1..14).map(|k| CircleArc::new(1.0 - 0.5f64.powi(k), 2.0 * 0.5f64.powi(k))).collect());
        assert_eq!(necessary_log_test(&mu, &family).verdict, Verdict::Fail);
        assert_eq!(necessary_log_test(&BoundaryMeasure::lebesgue(), &ArcFamily::Dyadic { levels: 14 }).verdict, Verdict::Pass);
    }

    #[test]
    fn box_kernel_at_origin() {
        let mu = DiskMeasure::new(vec![(Complex64::new(0.0, 0.0), 0.7)]);
        let r = ars_box_test(&mu, &ArcFamily::Explicit(vec![CircleArc::new(0.0, TWO_PI)]));
        assert!((r.sup_ratio - 0.7).abs() < 1e-12);
        let empty = ars_box_test(&mu, &ArcFamily::Explicit(vec![CircleArc::new(0.0, 0.1)]));
        assert_eq!(empty.scales.len(), 0);
    }

    #[test]
    fn one_box_clauses() {
        let lin = GrowthGauge::Power { p: 1.0 };
        let r = one_box_test(&BoundaryMeasure::lebesgue(), &lin, &ArcFamily::Dyadic { levels: 12 });
        assert!(r.holds, "{r:?}");
        let r = one_box_test(&BoundaryMeasure::lebesgue(), &inverse_log_gauge(), &ArcFamily::Dyadic { levels: 12 });
        assert_eq!(r.failing_clause, Some("integral of phi(x)/x"));
    }

    #[test]
    fn cantor_threshold_verdicts() {
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 12)).unwrap());
        let l1 = l_test(&e, 1, &ZetaGrid::default());
        let family = ArcFamily::anchored(e.clone());
        let above = multiplier_verdict(&Weight::power(0.4).unwrap(), e.clone(), &l1, &family).unwrap();
        assert_eq!(above.in_dirichlet, Tri::Yes);
        assert_eq!(above.multiplier, Tri::Yes, "{}", above.justification);
        let below = multiplier_verdict(&Weight::power(0.25).unwrap(), e, &l1, &family).unwrap();
        assert_eq!(below.in_dirichlet, Tri::No);
        assert_eq!(below.multiplier, Tri::No);
    }

    #[test]
    fn theta_set_cn_exponents() {
        for beta in [1.5, 3.0] {
            let e = build_theta_sequence(0.25, beta, 2000).unwrap();
            let mu = BoundaryMeasure::alpha_measure(Arc::new(e.clone()), 0.25);
            let ns: Vec<u64> = (4..=12).map(|k| 10f64.powf(k as f64 / 2.0) as u64).collect();
            let r = cn_sequence(&mu, &e, &ns).unwrap();
            assert!(r.rows.windows(2).all(|w| w[1].length < w[0].length));
            assert!(r.exponent.is_finite());
        }
    }

    #[test]
    fn scaling_the_measure_scales_ratios() {
        let mu = BoundaryMeasure::lebesgue();
        let family = ArcFamily::Dyadic { levels: 8 };
        let a = ars_boundary_test(&mu, &family, LogKernel::Plain);
        let b = ars_boundary_test(&mu.scaled(3.0), &family, LogKernel::Plain);
        assert!((b.sup_ratio - 3.0 * a.sup_ratio).abs() < 1e-10 * b.sup_ratio.abs());
        let ca = necessary_log_test(&mu, &family);
        let cb = necessary_log_test(&mu.scaled(3.0), &family);
        assert!((ca.growth_exponent - cb.growth_exponent).abs() < 1e-10);
    }
}
