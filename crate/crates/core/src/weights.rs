//! Boundary weights `ω` on `(0, π]` and growth gauges `h`, with grid
//! certificates for the regularity hypotheses used by the estimates.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use crate::circle_sets::TWO_PI;
use crate::error::{LabError, Result};
use crate::quad::{integrate, linear_fit, series_verdict, Tolerance};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Growth gauge `h` on `(0, 2π]`.
#[derive(Clone)]
pub enum GrowthGauge {
    /// `h(t) = t^p`.
    Power { p: f64 },
    /// `h(t) = t log^k(2πe/t)`.
    TLog { k: f64 },
    /// `h(t) = c t^p`.
    ScaledPower { c: f64, p: f64 },
    Custom(RealFn),
}

impl fmt::Debug for GrowthGauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthGauge::Power { p } => write!(f, "t^{p}"),
            GrowthGauge::TLog { k } => write!(f, "t log^{k}(2πe/t)"),
            GrowthGauge::ScaledPower { c, p } => write!(f, "{c} t^{p}"),
            GrowthGauge::Custom(_) => write!(f, "custom"),
        }
    }
}

const TLOG_SCALE: f64 = TWO_PI * E;

impl GrowthGauge {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            GrowthGauge::Power { p } => t.powf(*p),
            GrowthGauge::TLog { k } => t * (TLOG_SCALE / t).ln().powf(*k),
            GrowthGauge::ScaledPower { c, p } => c * t.powf(*p),
            GrowthGauge::Custom(h) => h(t),
        }
    }

    /// `∫_a^b ds/h(s)` for `0 < a ≤ b ≤ 2π`.
    pub fn inverse_integral(&self, a: f64, b: f64) -> f64 {
        if a >= b {
            return 0.0;
        }
        let power = |p: f64, c: f64| {
            if (p - 1.0).abs() < 1e-14 {
                (b / a).ln() / c
            } else {
                (b.powf(1.0 - p) - a.powf(1.0 - p)) / ((1.0 - p) * c)
            }
        };
        match self {
            GrowthGauge::Power { p } => power(*p, 1.0),
            GrowthGauge::ScaledPower { c, p } => power(*p, *c),
            GrowthGauge::TLog { k } => {
                let ua = (TLOG_SCALE / a).ln();
                let ub = (TLOG_SCALE / b).ln();
                if (k - 1.0).abs() < 1e-14 {
                    (ua / ub).ln()
                } else {
                    (ua.powf(1.0 - k) - ub.powf(1.0 - k)) / (1.0 - k)
                }
            }
            GrowthGauge::Custom(h) => {
                // s = e^u
                integrate(|u| u.exp() / h(u.exp()), a.ln(), b.ln(), Tolerance::new(1e-12, 0.0)).value
            }
        }
    }

    /// Whether `∫_0 ds/h(s)` diverges.
    pub fn diverges_at_zero(&self) -> bool {
        match self {
            GrowthGauge::Power { p } | GrowthGauge::ScaledPower { p, .. } => *p >= 1.0,
            GrowthGauge::TLog { k } => *k <= 1.0,
            GrowthGauge::Custom(_) => {
                let terms: Vec<f64> = (0..40)
                    .map(|j| self.inverse_integral(10f64.powi(-j - 1), 10f64.powi(-j)))
                    .collect();
                !series_verdict(&terms).converges
            }
        }
    }

    /// Whether `h(t)/t^σ` is nondecreasing on the log grid `(t_min, 2π]`.
    pub fn ratio_increasing(&self, sigma: f64, t_min: f64, points: usize) -> bool {
        let vals: Vec<f64> = log_grid(t_min, TWO_PI, points).iter().map(|&t| self.eval(t) / t.powf(sigma)).collect();
        vals.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12))
    }

    /// Whether `h(t)/t^σ` is nonincreasing on the log grid `(t_min, 2π]`.
    pub fn ratio_decreasing(&self, sigma: f64, t_min: f64, points: usize) -> bool {
        let vals: Vec<f64> = log_grid(t_min, TWO_PI, points).iter().map(|&t| self.eval(t) / t.powf(sigma)).collect();
        vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
    }
}

/// Parameters of the weight, kept for closed forms and reporting.
#[derive(Clone, Debug)]
pub enum WeightKind {
    Power { alpha: f64 },
    Constant { c: f64 },
    /// `log^{-σ}(scale/t)`.
    LogPower { sigma: f64, scale: f64 },
    /// `c_η t^α` on `(0, η]`, `(∫_t^{2π} ds/h)^{-σ}` on `(η, π]`.
    CapacityLog { alpha: f64, sigma: f64, eta: f64, c_eta: f64 },
    /// `log(e + ∫_t^π ds/h)`.
    PolarLog,
    Product,
    Custom,
}

/// A boundary weight with its derivative.
#[derive(Clone)]
pub struct Weight {
    kind: WeightKind,
    eval: RealFn,
    deriv: RealFn,
    log_eval: Option<RealFn>,
    at_zero: f64,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({:?})", self.kind)
    }
}

impl Weight {
    /// `ω(t) = t^α`.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(LabError::InvalidParameter(format!("power weight needs alpha > 0, got {alpha}")));
        }
        Ok(Weight {
            kind: WeightKind::Power { alpha },
            eval: Arc::new(move |t| t.powf(alpha)),
            deriv: Arc::new(move |t| alpha * t.powf(alpha - 1.0)),
            log_eval: Some(Arc::new(move |t| alpha * t.ln())),
            at_zero: 0.0,
        })
    }

    /// The identity weight `ω(t) = t`.
    pub fn identity() -> Self {
        Self::power(1.0).expect("alpha = 1 is valid")
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(LabError::InvalidParameter("constant weight must be positive".into()));
        }
        let lc = c.ln();
        Ok(Weight {
            kind: WeightKind::Constant { c },
            eval: Arc::new(move |_| c),
            deriv: Arc::new(|_| 0.0),
            log_eval: Some(Arc::new(move |_| lc)),
            at_zero: c,
        })
    }

    /// `ω(t) = log^{-σ}(scale/t)` with `scale > π`.
    pub fn log_power(sigma: f64, scale: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(scale > PI) {
            return Err(LabError::InvalidParameter("log weight needs sigma > 0 and scale > π".into()));
        }
        Ok(Weight {
            kind: WeightKind::LogPower { sigma, scale },
            eval: Arc::new(move |t| (scale / t).ln().powf(-sigma)),
            deriv: Arc::new(move |t| sigma / t * (scale / t).ln().powf(-sigma - 1.0)),
            log_eval: Some(Arc::new(move |t| -sigma * (scale / t).ln().ln())),
            at_zero: 0.0,
        })
    }

    /// `c_η t^α` for `t ≤ η` and `(∫_t^{2π} ds/h)^{-σ}` for `η < t ≤ π`, with
    /// `c_η` chosen for continuity at `η`.
    pub fn capacity_log(h: GrowthGauge, alpha: f64, sigma: f64, eta: f64) -> Result<Self> {
        if !h.diverges_at_zero() {
            return Err(LabError::GaugeIntegrable(format!("∫_0 ds/h(s) is finite for h = {h:?}")));
        }
        if !(alpha > 0.0 && sigma > 0.0 && eta > 0.0 && eta < PI) {
            return Err(LabError::InvalidParameter("need alpha, sigma > 0 and eta in (0, π)".into()));
        }
        let outer = {
            let h = h.clone();
            move |t: f64| h.inverse_integral(t, TWO_PI).powf(-sigma)
        };
        let c_eta = outer(eta) / eta.powf(alpha);
        let h_d = h.clone();
        let outer_eval = outer.clone();
        Ok(Weight {
            kind: WeightKind::CapacityLog { alpha, sigma, eta, c_eta },
            eval: Arc::new(move |t| if t <= eta { c_eta * t.powf(alpha) } else { outer_eval(t) }),
            deriv: Arc::new(move |t| {
                if t <= eta {
                    c_eta * alpha * t.powf(alpha - 1.0)
                } else {
                    let g = h_d.inverse_integral(t, TWO_PI);
                    sigma * g.powf(-sigma - 1.0) / h_d.eval(t)
                }
            }),
            log_eval: None,
            at_zero: 0.0,
        })
    }

    /// `ω(t) = log(e + ∫_t^π ds/h)`, unbounded at 0 when `∫_0 ds/h` diverges.
    pub fn polar_log(h: GrowthGauge) -> Result<Self> {
        if !h.diverges_at_zero() {
            return Err(LabError::GaugeIntegrable(format!("∫_0 ds/h(s) is finite for h = {h:?}")));
        }
        let g = {
            let h = h.clone();
            move |t: f64| if t < PI { h.inverse_integral(t, PI) } else { -h.inverse_integral(PI, t) }
        };
        let g_eval = g.clone();
        let h_for_deriv = move |t: f64| -1.0 / (h.eval(t) * (E + g(t)));
        Ok(Weight {
            kind: WeightKind::PolarLog,
            eval: Arc::new(move |t| (E + g_eval(t)).ln()),
            deriv: Arc::new(h_for_deriv),
            log_eval: None,
            at_zero: f64::INFINITY,
        })
    }

    /// Pointwise product `ω₁ω₂`.
    pub fn product(a: &Weight, b: &Weight) -> Weight {
        let (ea, eb, da, db) = (a.eval.clone(), b.eval.clone(), a.deriv.clone(), b.deriv.clone());
        let (ea2, eb2) = (a.eval.clone(), b.eval.clone());
        let (la, lb) = (a.clone(), b.clone());
        Weight {
            kind: WeightKind::Product,
            eval: Arc::new(move |t| ea(t) * eb(t)),
            deriv: Arc::new(move |t| da(t) * eb2(t) + ea2(t) * db(t)),
            log_eval: Some(Arc::new(move |t| la.log_value(t) + lb.log_value(t))),
            at_zero: a.at_zero * b.at_zero,
        }
    }

    /// User-supplied `ω` and `ω'`; `at_zero` is the limit `ω(0⁺)`.
    pub fn custom<F, G>(eval: F, deriv: G, at_zero: f64) -> Weight
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Weight { kind: WeightKind::Custom, eval: Arc::new(eval), deriv: Arc::new(deriv), log_eval: None, at_zero }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.at_zero;
        }
        (self.eval)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }

    /// `log ω(t)`, accurate where `ω(t)` itself would underflow.
    pub fn log_value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.at_zero.ln();
        }
        match &self.log_eval {
            Some(l) => l(t),
            None => (self.eval)(t).ln(),
        }
    }

    /// `ω(0⁺)`.
    pub fn at_zero(&self) -> f64 {
        self.at_zero
    }

    /// The exponent when `ω` is a pure power.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            WeightKind::Power { alpha } => Some(alpha),
            _ => None,
        }
    }
}

/// Points `t_min · (t_max/t_min)^{i/n}`, `i = 0..=n`.
pub fn log_grid(t_min: f64, t_max: f64, intervals: usize) -> Vec<f64> {
    let (la, lb) = (t_min.ln(), t_max.ln());
    (0..=intervals).map(|i| (la + (lb - la) * i as f64 / intervals as f64).exp()).collect()
}

/// Outcome of one grid check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Check {
    HoldsOnGrid,
    ViolatedAt(f64),
}

impl Check {
    pub fn holds(&self) -> bool {
        matches!(self, Check::HoldsOnGrid)
    }
}

/// Direction of a function sampled on a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    /// Direction changes; first reversal at the given `t`.
    Neither(f64),
}

impl Monotonicity {
    pub fn nondecreasing(&self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::Increasing)
    }

    pub fn nonincreasing(&self) -> bool {
        matches!(self, Monotonicity::Constant | Monotonicity::Decreasing)
    }
}

/// Range of a ratio over the grid and whether it stays comparable to a
/// constant (log-log drift below 0.05 toward 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioReport {
    pub min: f64,
    pub max: f64,
    pub drift: f64,
    pub comparable: bool,
}

/// Grid certificate for the regularity hypotheses on a weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub gamma: f64,
    pub grid_points: usize,
    pub t_min: f64,
    pub increasing: Check,
    /// `ω(t^γ)` concave.
    pub concave_power: Check,
    /// `ω(t^γ)` convex.
    pub convex_power: Check,
    /// Direction of `tω'(t)/ω(t)`.
    pub log_derivative: Monotonicity,
    /// Direction of `t|ω'(t)|ω(t)`.
    pub weighted_derivative: Monotonicity,
    /// `xω'(x) / (x²ω'(x²))`.
    pub derivative_ratio: RatioReport,
    /// `xω(x) / (x²ω'(x²))`.
    pub value_ratio: RatioReport,
    /// Largest relative gap between `ω'` and centered differences of `ω`.
    pub derivative_mismatch: f64,
}

impl CertificateReport {
    /// The hypotheses of the sharp two-sided estimate: increasing, `ω(t^γ)`
    /// concave and `tω'/ω` nondecreasing.
    pub fn sharp_hypotheses_hold(&self) -> bool {
        self.increasing.holds() && self.concave_power.holds() && self.log_derivative.nondecreasing()
    }
}

fn monotonicity(ts: &[f64], vals: &[f64]) -> Monotonicity {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-9 * scale;
    let (min, max) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if max - min <= tol {
        return Monotonicity::Constant;
    }
    let up = vals.windows(2).position(|w| w[1] < w[0] - tol);
    let down = vals.windows(2).position(|w| w[1] > w[0] + tol);
    match (up, down) {
        (None, _) => Monotonicity::Increasing,
        (_, None) => Monotonicity::Decreasing,
        (Some(i), Some(j)) => Monotonicity::Neither(ts[i.max(j) + 1]),
    }
}

fn ratio_report(xs: &[f64], ratios: &[f64]) -> RatioReport {
    let (min, max) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let half = xs.len() / 2;
    let lx: Vec<f64> = xs[..half.max(2)].iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ratios[..half.max(2)].iter().map(|r| r.abs().ln()).collect();
    let ok = ly.iter().all(|v| v.is_finite());
    let drift = if ok { linear_fit(&lx, &ly).slope } else { f64::INFINITY };
    RatioReport { min, max, drift, comparable: ok && drift.abs() < 0.05 && min > 0.0 }
}

/// Default smallest grid point.
pub const DEFAULT_T_MIN: f64 = 1e-10;

/// Certify `w` on a logarithmic grid of `intervals` steps over `(1e-10, π]`.
pub fn certify(w: &Weight, gamma: f64, intervals: usize) -> CertificateReport {
    certify_with(w, gamma, intervals, DEFAULT_T_MIN)
}

pub fn certify_with(w: &Weight, gamma: f64, intervals: usize, t_min: f64) -> CertificateReport {
    let intervals = intervals.max(64);
    let ts = log_grid(t_min, PI, intervals);
    let values: Vec<f64> = ts.iter().map(|&t| w.value(t)).collect();
    let increasing = match values.windows(2).position(|v| v[1] <= v[0]) {
        None => Check::HoldsOnGrid,
        Some(i) => Check::ViolatedAt(ts[i + 1]),
    };

    // ω(t^γ) through g'(s) = γ s^{γ-1} ω'(s^γ), s = t^{1/γ}
    let slopes: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| {
            let s = t.powf(1.0 / gamma);
            (s, gamma * s.powf(gamma - 1.0) * w.derivative(t))
        })
        .collect();
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs());
    let concave_power = match slopes.windows(2).position(|p| p[1].1 > p[0].1 + tol(p[0].1, p[1].1)) {
        None => Check::HoldsOnGrid,
        Some(i) => Check::ViolatedAt(ts[i + 1]),
    };
    let convex_power = match slopes.windows(2).position(|p| p[1].1 < p[0].1 - tol(p[0].1, p[1].1)) {
        None => Check::HoldsOnGrid,
        Some(i) => Check::ViolatedAt(ts[i + 1]),
    };

    let log_der: Vec<f64> = ts.iter().zip(&values).map(|(&t, &v)| t * w.derivative(t) / v).collect();
    let weighted: Vec<f64> = ts.iter().zip(&values).map(|(&t, &v)| t * w.derivative(t).abs() * v).collect();

    let xs: Vec<f64> = log_grid(t_min.sqrt(), 1.0, intervals);
    let d_ratio: Vec<f64> = xs.iter().map(|&x| x * w.derivative(x) / (x * x * w.derivative(x * x))).collect();
    let v_ratio: Vec<f64> = xs.iter().map(|&x| x * w.value(x) / (x * x * w.derivative(x * x))).collect();

    let mut mismatch = 0.0f64;
    for &t in &ts[1..ts.len() - 1] {
        let h = t * 1e-5;
        let fd = (w.value(t + h) - w.value(t - h)) / (2.0 * h);
        let d = w.derivative(t);
        let scale = d.abs().max(fd.abs());
        if scale > 0.0 {
            mismatch = mismatch.max((fd - d).abs() / scale);
        }
    }

    CertificateReport {
        gamma,
        grid_points: ts.len(),
        t_min,
        increasing,
        concave_power,
        convex_power,
        log_derivative: monotonicity(&ts, &log_der),
        weighted_derivative: monotonicity(&ts, &weighted),
        derivative_ratio: ratio_report(&xs, &d_ratio),
        value_ratio: ratio_report(&xs, &v_ratio),
        derivative_mismatch: mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_weight_log_derivative_is_alpha() {
        let w = Weight::power(0.3).unwrap();
        for &t in &[1e-8, 1e-3, 0.5, 3.0] {
            assert!((t * w.derivative(t) / w.value(t) - 0.3).abs() < 1e-14);
        }
        let r = certify(&w, 3.0, 64);
        assert_eq!(r.log_derivative, Monotonicity::Constant);
        assert!(r.sharp_hypotheses_hold());
        assert!(r.derivative_mismatch < 1e-6);
    }

    #[test]
    fn power_concavity_flag() {
        let w = Weight::power(0.6).unwrap();
        let r = certify(&w, 2.5, 64);
        assert!(!r.concave_power.holds());
        assert!(r.convex_power.holds());
    }

    #[test]
    fn power_ratio_is_unbounded() {
        // x ω'(x) / (x² ω'(x²)) = x^{-α}
        let w = Weight::power(0.3).unwrap();
        let r = certify(&w, 3.0, 128);
        assert!(!r.derivative_ratio.comparable);
        assert!((r.derivative_ratio.drift + 0.3).abs() < 1e-6);
        assert!((r.derivative_ratio.max - 1e-5f64.powf(-0.3)).abs() < 1e-6 * r.derivative_ratio.max);
    }

    #[test]
    fn log_weight_log_derivative_direction() {
        let sigma = 0.5;
        let w = Weight::log_power(sigma, E * PI).unwrap();
        let r = certify(&w, 3.0, 64);
        // tω'/ω = σ / log(eπ/t), decreasing as t ↓ 0, i.e. increasing in t
        assert_eq!(r.log_derivative, Monotonicity::Increasing);
        assert!(r.increasing.holds());
        assert!(r.derivative_mismatch < 1e-6);
    }

    #[test]
    fn constant_weight_not_increasing() {
        let w = Weight::constant(2.0).unwrap();
        let r = certify(&w, 3.0, 64);
        assert!(!r.increasing.holds());
        assert!(!r.sharp_hypotheses_hold());
    }

    #[test]
    fn capacity_log_with_linear_gauge() {
        let sigma = 0.7;
        let eta = 0.1;
        let w = Weight::capacity_log(GrowthGauge::Power { p: 1.0 }, 0.5, sigma, eta).unwrap();
        for &t in &[0.2, 1.0, 3.0] {
            let expected = (TWO_PI / t).ln().powf(-sigma);
            assert!((w.value(t) - expected).abs() < 1e-13);
        }
        let left = w.value(eta * (1.0 - 1e-12));
        let right = w.value(eta * (1.0 + 1e-12));
        assert!((left - right).abs() < 1e-10);
        let r = certify(&w, 2.0, 256);
        assert!(r.derivative_mismatch < 1e-4, "{}", r.derivative_mismatch);
    }

    #[test]
    fn integrable_gauge_rejected() {
        let err = Weight::capacity_log(GrowthGauge::TLog { k: 2.0 }, 0.5, 0.5, 0.1).unwrap_err();
        assert!(matches!(err, LabError::GaugeIntegrable(_)));
        assert!(GrowthGauge::TLog { k: 1.0 }.diverges_at_zero());
        assert!(!GrowthGauge::Power { p: 0.5 }.diverges_at_zero());
        let custom = GrowthGauge::Custom(Arc::new(|t: f64| t * (TLOG_SCALE / t).ln().powi(2)));
        assert!(!custom.diverges_at_zero());
        let custom = GrowthGauge::Custom(Arc::new(|t: f64| t));
        assert!(custom.diverges_at_zero());
    }

    #[test]
    fn gauge_integrals_closed_form() {
        let h = GrowthGauge::TLog { k: 2.0 };
        let custom = GrowthGauge::Custom(Arc::new(|t: f64| t * (TLOG_SCALE / t).ln().powi(2)));
        let (a, b) = (1e-6, 2.0);
        assert!((h.inverse_integral(a, b) - custom.inverse_integral(a, b)).abs() < 1e-10);
        let p = GrowthGauge::Power { p: 0.5 };
        assert!((p.inverse_integral(0.25, 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_weight_grows_at_zero() {
        let w = Weight::polar_log(GrowthGauge::Power { p: 1.0 }).unwrap();
        assert!((w.value(PI) - 1.0).abs() < 1e-14);
        assert!(w.value(1e-8) > w.value(1e-4));
        let t = 0.3;
        let expected = -1.0 / (t * (E + (PI / t).ln()));
        assert!((w.derivative(t) - expected).abs() < 1e-6 * expected.abs());
    }

    #[test]
    fn product_weight() {
        let a = Weight::power(0.2).unwrap();
        let b = Weight::power(0.3).unwrap();
        let p = Weight::product(&a, &b);
        let t = 0.4;
        assert!((p.value(t) - t.powf(0.5)).abs() < 1e-14);
        assert!((p.derivative(t) - 0.5 * t.powf(-0.5)).abs() < 1e-13);
        assert!((p.log_value(1e-200) - 0.5 * (1e-200f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn violation_survives_refinement() {
        let w = Weight::power(0.6).unwrap();
        let coarse = certify(&w, 2.5, 64);
        let fine = certify(&w, 2.5, 128);
        assert!(!coarse.concave_power.holds() && !fine.concave_power.holds());
    }
}
