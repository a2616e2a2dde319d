//! Quadrature and small numerical helpers.
//!
//! Adaptive Gauss–Kronrod (21 point) with a global error queue, graded
//! substitutions for integrable endpoint singularities, Gauss–Legendre
//! nodes, deterministic pairwise summation and least-squares fits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Sum with a fixed binary splitting order, so the result depends only on the
/// order of the input and never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Tolerances for one adaptive integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs, max_subdivisions: 200 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-10, 1e-14)
    }
}

/// Outcome of an adaptive integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult { value: 0.0, error: 0.0, converged: true, evaluations: 0 }
    }

    /// Combine two independent pieces.
    pub fn add(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

struct Rule {
    value: f64,
    error: f64,
}

fn gk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Rule {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Rule { value, error }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    order: usize,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    let first = gk21(&mut f, a, b);
    let mut evaluations = 21;
    let target = |v: f64| tol.abs.max(tol.rel * v.abs());
    if first.error <= target(first.value) || !first.value.is_finite() {
        return QuadResult {
            value: first.value,
            error: first.error,
            converged: first.value.is_finite(),
            evaluations,
        };
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: first.value, error: first.error, order: 0 });
    let mut total = first.value;
    let mut total_err = first.error;
    let mut counter = 1;
    let mut converged = false;
    while counter < tol.max_subdivisions {
        let worst = heap.pop().expect("queue is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: left.value, error: left.error, order: counter });
        heap.push(Piece { a: mid, b: worst.b, value: right.value, error: right.error, order: counter + 1 });
        counter += 2;
        if total_err <= target(total) {
            converged = true;
            break;
        }
        if !total.is_finite() {
            break;
        }
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = pieces.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = pieces.iter().map(|p| p.error).collect();
    let error = pairwise_sum(&errors);
    let value = pairwise_sum(&values);
    QuadResult { value, error, converged: converged || error <= target(value), evaluations }
}

/// Where an integrand may have an integrable singularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    None,
    Left,
    Right,
    Both,
}

const GRADE: i32 = 3;

/// Integrate over `[a, b]` with a polynomial grading `x = a + (b - a) w^3`
/// toward the singular end(s).
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    singular: Endpoint,
    tol: Tolerance,
) -> QuadResult {
    if a >= b {
        return QuadResult::zero();
    }
    match singular {
        Endpoint::None => integrate(f, a, b, tol),
        Endpoint::Left => graded_one_side(&mut f, a, b - a, tol),
        Endpoint::Right => graded_one_side(&mut f, b, a - b, tol),
        Endpoint::Both => {
            let mid = 0.5 * (a + b);
            let left = graded_one_side(&mut f, a, mid - a, tol);
            let right = graded_one_side(&mut f, b, mid - b, tol);
            left.add(right)
        }
    }
}

/// `∫` from `origin` over a signed length `len`, graded toward `origin`.
fn graded_one_side(f: &mut dyn FnMut(f64) -> f64, origin: f64, len: f64, tol: Tolerance) -> QuadResult {
    let k = GRADE as f64;
    integrate(
        |w| {
            let wk = w.powi(GRADE - 1);
            if wk == 0.0 {
                return 0.0;
            }
            let x = origin + len * wk * w;
            if x == origin {
                return 0.0;
            }
            f(x) * k * len.abs() * wk
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral over `[a, ∞)` of a decaying integrand, through `x = a + s/(1-s)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: Tolerance) -> QuadResult {
    integrate(
        |s| {
            if s >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - s;
            let x = a + s / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Adaptive Gauss–Kronrod for a vector-valued integrand. The error test is
/// applied componentwise.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> (Vec<f64>, bool) {
    let mut out = vec![0.0; dim];
    if a >= b {
        return (out, true);
    }
    let mut stack = vec![(a, b, 0usize)];
    let mut converged = true;
    let mut scratch = vec![0.0; dim];
    let mut fk = vec![0.0; dim];
    let mut fg = vec![0.0; dim];
    let mut pieces = 0usize;
    let initial = vec_rule(&mut f, a, b, &mut scratch, &mut fk, &mut fg);
    let scale: Vec<f64> = initial.iter().map(|v| v.abs()).collect();
    while let Some((lo, hi, depth)) = stack.pop() {
        let values = vec_rule(&mut f, lo, hi, &mut scratch, &mut fk, &mut fg);
        pieces += 1;
        let width_share = (hi - lo) / (b - a);
        let mut ok = true;
        for i in 0..dim {
            let err = fk[i] - fg[i];
            let allowed = tol.abs.max(tol.rel * scale[i]) * width_share.sqrt().max(1e-3);
            if err.abs() > allowed {
                ok = false;
            }
        }
        let mid = 0.5 * (lo + hi);
        if ok || depth > 60 || pieces > tol.max_subdivisions * 8 || mid <= lo || mid >= hi {
            if !ok {
                converged = false;
            }
            for i in 0..dim {
                out[i] += values[i];
            }
        } else {
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    (out, converged)
}

fn vec_rule<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    scratch: &mut [f64],
    fk: &mut [f64],
    fg: &mut [f64],
) -> Vec<f64> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    fk.iter_mut().for_each(|v| *v = 0.0);
    fg.iter_mut().for_each(|v| *v = 0.0);
    f(center, scratch);
    for i in 0..scratch.len() {
        fk[i] += WGK[10] * scratch[i];
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, scratch);
            for i in 0..scratch.len() {
                fk[i] += WGK[j] * scratch[i];
                if j % 2 == 1 {
                    fg[i] += WG[j / 2] * scratch[i];
                }
            }
        }
    }
    for i in 0..fk.len() {
        fk[i] *= half;
        fg[i] *= half;
    }
    fk.to_vec()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = x;
                p0 = 1.0;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Least-squares line through `(x, y)` pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len().min(ys.len()) as f64;
    if n < 2.0 {
        return LinearFit { slope: f64::NAN, intercept: f64::NAN, r2: f64::NAN };
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LinearFit { slope, intercept: my - slope * mx, r2 }
}

/// How a sequence of positive terms behaves in its tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailRate {
    /// Terms shrink (or grow) like `ratio^k`.
    Geometric { ratio: f64 },
    /// Terms behave like `k^(-exponent)`.
    Power { exponent: f64 },
}

/// Verdict on the series of positive `terms` (indexed from 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesVerdict {
    pub converges: bool,
    pub rate: TailRate,
}

/// Classify a series of nonnegative terms from its trailing behaviour.
///
/// The tail of `log t_k` is fitted by `a + b k - q log k`. A clearly
/// negative `b` means geometric decay (convergent), a clearly positive one
/// geometric growth; otherwise the power `q` decides, with the cut at 1.5
/// halfway between harmonic and inverse-square tails.
pub fn series_verdict(terms: &[f64]) -> SeriesVerdict {
    let n = terms.len();
    let tail_start = n / 2;
    let mut rows = Vec::new();
    for (i, &t) in terms.iter().enumerate().skip(tail_start) {
        if t > 0.0 && t.is_finite() {
            let k = (i + 1) as f64;
            rows.push((k, k.ln(), t.ln()));
        }
    }
    if rows.len() < 4 {
        let zero_tail = terms.iter().skip(tail_start).all(|&t| t == 0.0);
        return SeriesVerdict {
            converges: zero_tail,
            rate: TailRate::Geometric { ratio: if zero_tail { 0.0 } else { f64::INFINITY } },
        };
    }
    let (b, q) = joint_fit(&rows);
    if b < -GEOMETRIC_SLOPE {
        return SeriesVerdict { converges: true, rate: TailRate::Geometric { ratio: b.exp() } };
    }
    if b > GEOMETRIC_SLOPE {
        return SeriesVerdict { converges: false, rate: TailRate::Geometric { ratio: b.exp() } };
    }
    // no geometric trend: refit as a pure power
    let xs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let exponent = -linear_fit(&xs, &ys).slope;
    let _ = q;
    SeriesVerdict { converges: exponent > 1.5, rate: TailRate::Power { exponent } }
}

/// Per-index log slope below which a tail counts as geometric.
const GEOMETRIC_SLOPE: f64 = 0.005;

/// Least squares for `y = a + b k - q log k`; returns `(b, q)`.
fn joint_fit(rows: &[(f64, f64, f64)]) -> (f64, f64) {
    let n = rows.len() as f64;
    let mk = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let ml = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let my = rows.iter().map(|r| r.2).sum::<f64>() / n;
    let (mut skk, mut sll, mut skl, mut sky, mut sly) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(k, l, y) in rows {
        let (dk, dl, dy) = (k - mk, l - ml, y - my);
        skk += dk * dk;
        sll += dl * dl;
        skl += dk * dl;
        sky += dk * dy;
        sly += dl * dy;
    }
    let det = skk * sll - skl * skl;
    if det.abs() <= 1e-12 * skk * sll {
        return (sky / skk, 0.0);
    }
    let b = (sky * sll - sly * skl) / det;
    let c = (skk * sly - skl * sky) / det;
    (b, -c)
}
