//! Scenario files and the operation runner behind the `dirlab` binary.
//!
//! A scenario is a TOML document naming a set, a weight, a measure, a growth
//! gauge, quadrature overrides and a pipeline of operations:
//!
//! ```toml
//! name = "cantor-band"
//! pipeline = ["set.stats", "dirichlet.local"]
//!
//! [set]
//! kind = "cantor"
//! ratio = 0.3333333333333333
//! depth = 12
//!
//! [weight]
//! kind = "power"
//! alpha = 0.3
//! ```
//!
//! Every operation yields a summary (key-value lines) and usually a table,
//! written as CSV with a header row.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::capacity::{cantor_capacity_series, cyclicity_check, energy_divergence, polarity_check, CapacityVerdict};
use crate::carleson::{
    ars_boundary_test, cantor_gauge, cn_sequence, inverse_log_gauge, multiplier_measure, multiplier_verdict, necessary_log_test,
    one_box_test, ArcFamily, ArcTestReport, LogKernel,
};
use crate::circle_sets::{
    build_cantor, build_point_sequence, build_theta_sequence, CantorSpec, CircleSet, Provenance, RatioRule, SequenceKind,
};
use crate::error::{LabError, Result};
use crate::local_dirichlet::{dirichlet_energy, dirichlet_mu, located_in_gap, rs_local, MeasureIntegral, QuadConfig};
use crate::measures::BoundaryMeasure;
use crate::outer_functions::{carleson_check, OuterDistanceFunction};
use crate::quad::linear_fit;
use crate::set_classes::{beta_exponent, carleson_test, k_test, l_test, ArcScan, ClassReport, Verdict, ZetaGrid};
use crate::weights::{GrowthGauge, Weight};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// Constant ratio, an explicit ratio list, or a named rule.
    Cantor {
        ratio: Option<f64>,
        ratios: Option<Vec<f64>>,
        rule: Option<NamedRule>,
        depth: usize,
    },
    Point,
    Points {
        angles: Vec<f64>,
    },
    Sequence {
        #[serde(default)]
        side: Side,
        gamma: f64,
        count: usize,
    },
    Theta {
        alpha: f64,
        beta: f64,
        count: usize,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum NamedRule {
    SuperExponential,
    Exponential,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Symmetric,
    #[default]
    OneSided,
}

impl Default for SetSpec {
    fn default() -> Self {
        SetSpec::Cantor { ratio: Some(1.0 / 3.0), ratios: None, rule: None, depth: 12 }
    }
}

impl SetSpec {
    pub fn cantor_spec(&self) -> Option<Result<CantorSpec>> {
        let SetSpec::Cantor { ratio, ratios, rule, depth } = self else {
            return None;
        };
        let rule = match (ratio, ratios, rule) {
            (Some(r), None, None) => RatioRule::Constant(*r),
            (None, Some(v), None) => RatioRule::Listed(v.clone()),
            (None, None, Some(NamedRule::SuperExponential)) => RatioRule::SuperExponential,
            (None, None, Some(NamedRule::Exponential)) => RatioRule::Exponential,
            _ => return Some(Err(LabError::Config("cantor set needs exactly one of ratio, ratios, rule".into()))),
        };
        Some(Ok(CantorSpec { ratios: rule, depth: *depth }))
    }

    pub fn build(&self) -> Result<CircleSet> {
        if let Some(spec) = self.cantor_spec() {
            return build_cantor(&spec?);
        }
        match self {
            SetSpec::Point => Ok(CircleSet::point()),
            SetSpec::Points { angles } => CircleSet::from_points(angles),
            SetSpec::Sequence { side, gamma, count } => {
                let kind = match side {
                    Side::Symmetric => SequenceKind::Symmetric,
                    Side::OneSided => SequenceKind::OneSided,
                };
                build_point_sequence(kind, *gamma, *count)
            }
            SetSpec::Theta { alpha, beta, count } => build_theta_sequence(*alpha, *beta, *count),
            SetSpec::Cantor { .. } => unreachable!("handled above"),
        }
    }

    /// `log 2 / log(1/ξ)` for constant-ratio Cantor sets.
    pub fn dimension(&self) -> Option<f64> {
        match self {
            SetSpec::Cantor { ratio: Some(r), ratios: None, rule: None, .. } => Some(2f64.ln() / (1.0 / r).ln()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Power { alpha: f64 },
    Identity,
    Constant { value: f64 },
    LogPower { sigma: f64, scale: f64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Power { alpha: 0.3 }
    }
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        match *self {
            WeightSpec::Power { alpha } => Weight::power(alpha),
            WeightSpec::Identity => Ok(Weight::identity()),
            WeightSpec::Constant { value } => Weight::constant(value),
            WeightSpec::LogPower { sigma, scale } => Weight::log_power(sigma, scale),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `|dζ|/2π`.
    Lebesgue,
    /// `|dζ|`.
    ArcLength,
    PointMass { theta: f64, mass: f64 },
    /// `dist(ζ,E)^a |dζ|`.
    DistPower { a: f64 },
    /// `dist ω'(dist)² |dζ|` for the scenario weight.
    Multiplier,
}

impl MeasureSpec {
    pub fn build(&self, set: &Arc<CircleSet>, w: &Weight) -> BoundaryMeasure {
        match *self {
            MeasureSpec::Lebesgue => BoundaryMeasure::lebesgue(),
            MeasureSpec::ArcLength => BoundaryMeasure::arc_length(),
            MeasureSpec::PointMass { theta, mass } => BoundaryMeasure::point_mass(theta, mass),
            MeasureSpec::DistPower { a } => BoundaryMeasure::dist_power(set.clone(), a),
            MeasureSpec::Multiplier => multiplier_measure(set.clone(), w),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeSpec {
    /// `t^p`.
    Power { p: f64 },
    /// `t log^k(2πe/t)`.
    TLog { k: f64 },
    /// `c t^p`.
    Scaled { c: f64, p: f64 },
    /// Mass profile of the multiplier measure at Cantor gap scales.
    Cantor,
    /// `1/log(e/t)`.
    InverseLog,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub enforce_trust: Option<bool>,
    pub zeta_nodes: Option<usize>,
    pub skip_generations: Option<usize>,
}

impl QuadOverrides {
    pub fn apply(&self, mut cfg: QuadConfig) -> QuadConfig {
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            cfg.max_subdivisions = v;
        }
        if let Some(v) = self.enforce_trust {
            cfg.enforce_trust = v;
        }
        if let Some(v) = self.zeta_nodes {
            cfg.zeta_nodes = v;
        }
        if let Some(v) = self.skip_generations {
            cfg.skip_generations = v;
        }
        cfg
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ZetaPlacement {
    /// One mid-gap point per dyadic distance band.
    #[default]
    Midgap,
    /// Points at dyadic distances inside the largest gap.
    Edge,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    #[default]
    Log,
    LogPlus,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub zeta: ZetaPlacement,
    /// Any of `carleson`, `k`, `l1`, `l2`.
    pub classes: Vec<String>,
    pub terms: usize,
    pub indices: Vec<u64>,
    pub alphas: Vec<f64>,
    pub kernel: KernelChoice,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            zeta: ZetaPlacement::Midgap,
            classes: ["carleson", "k", "l1", "l2"].map(String::from).to_vec(),
            terms: 60,
            indices: Vec::new(),
            alphas: Vec::new(),
            kernel: KernelChoice::Log,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
pub enum Op {
    #[serde(rename = "set.build")]
    SetBuild,
    #[serde(rename = "set.stats")]
    SetStats,
    #[serde(rename = "class.test")]
    ClassTest,
    #[serde(rename = "dirichlet.local")]
    DirichletLocal,
    #[serde(rename = "dirichlet.energy")]
    DirichletEnergy,
    #[serde(rename = "dirichlet.mu")]
    DirichletMu,
    #[serde(rename = "dirichlet.threshold")]
    DirichletThreshold,
    #[serde(rename = "carleson.ars")]
    CarlesonArs,
    #[serde(rename = "carleson.onebox")]
    CarlesonOnebox,
    #[serde(rename = "carleson.cn")]
    CarlesonCn,
    #[serde(rename = "carleson.verdict")]
    CarlesonVerdict,
    #[serde(rename = "capacity.series")]
    CapacitySeries,
    #[serde(rename = "capacity.polar")]
    CapacityPolar,
    #[serde(rename = "capacity.cyclic")]
    CapacityCyclic,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::SetBuild => "set.build",
            Op::SetStats => "set.stats",
            Op::ClassTest => "class.test",
            Op::DirichletLocal => "dirichlet.local",
            Op::DirichletEnergy => "dirichlet.energy",
            Op::DirichletMu => "dirichlet.mu",
            Op::DirichletThreshold => "dirichlet.threshold",
            Op::CarlesonArs => "carleson.ars",
            Op::CarlesonOnebox => "carleson.onebox",
            Op::CarlesonCn => "carleson.cn",
            Op::CarlesonVerdict => "carleson.verdict",
            Op::CapacitySeries => "capacity.series",
            Op::CapacityPolar => "capacity.polar",
            Op::CapacityCyclic => "capacity.cyclic",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub pipeline: Vec<Op>,
    pub set: SetSpec,
    pub weight: WeightSpec,
    pub measure: Option<MeasureSpec>,
    pub gauge: Option<GaugeSpec>,
    pub quad: QuadOverrides,
    pub params: Params,
    pub output: OutputSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: "scenario".into(),
            pipeline: Vec::new(),
            set: SetSpec::default(),
            weight: WeightSpec::default(),
            measure: None,
            gauge: None,
            quad: QuadOverrides::default(),
            params: Params::default(),
            output: OutputSpec::default(),
        }
    }
}

/// Parse a scenario, then apply `key.path=value` overrides (values in TOML
/// syntax; bare words are taken as strings; `key.path=` removes the key).
pub fn parse_scenario(text: &str, overrides: &[String]) -> Result<Scenario> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.message().to_string()))?;
    for (section, default) in [("set", DEFAULT_SET), ("weight", DEFAULT_WEIGHT)] {
        if !table.contains_key(section) {
            table.insert(section.into(), toml::Value::Table(default.parse().expect("valid default")));
        }
    }
    for o in overrides {
        let (path, raw) = o.split_once('=').ok_or_else(|| LabError::Config(format!("override `{o}` is not key=value")))?;
        let raw = raw.trim();
        set_path(&mut table, path.trim(), (!raw.is_empty()).then(|| parse_value(raw)))?;
    }
    Scenario::deserialize(toml::Value::Table(table)).map_err(|e| LabError::Config(e.message().to_string()))
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

const DEFAULT_SET: &str = "kind = \"cantor\"\nratio = 0.3333333333333333\ndepth = 12";
const DEFAULT_WEIGHT: &str = "kind = \"power\"\nalpha = 0.3";

/// Set a dotted key (an empty value removes it). Changing `kind` clears the other keys of that table,
/// since they belong to the previous variant.
fn set_path(table: &mut toml::Table, path: &str, value: Option<toml::Value>) -> Result<()> {
    let mut keys: Vec<&str> = path.split('.').collect();
    let last = keys.pop().filter(|k| !k.is_empty()).ok_or_else(|| LabError::Config(format!("empty key in `{path}`")))?;
    let mut cur = table;
    for k in keys {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| LabError::Config(format!("`{k}` is not a table")))?;
    }
    let Some(value) = value else {
        cur.remove(last);
        return Ok(());
    };
    if last == "kind" && cur.get("kind") != Some(&value) {
        cur.clear();
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Built-in scenarios, by name.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

const BUNDLED: &[(&str, &str)] = &[
    (
        "cantor-alpha0.3",
        r#"name = "cantor-alpha0.3"
pipeline = ["set.stats", "dirichlet.local"]
[set]
kind = "cantor"
ratio = 0.3333333333333333
depth = 14
[weight]
kind = "power"
alpha = 0.3
"#,
    ),
    (
        "one-sided-log2",
        r#"name = "one-sided-log2"
pipeline = ["class.test"]
[set]
kind = "sequence"
side = "one_sided"
gamma = 1.0
count = 100000
[params]
classes = ["l2"]
"#,
    ),
    (
        "cantor-threshold",
        r#"name = "cantor-threshold"
pipeline = ["dirichlet.threshold"]
[set]
kind = "cantor"
ratio = 0.3333333333333333
depth = 12
"#,
    ),
];

/// A CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| LabError::Config(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| LabError::Config(format!("cannot write {}: {e}", path.display())))
    }

    /// Column `name` parsed as numbers.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.header.iter().position(|h| *h == name) else {
            return Vec::new();
        };
        self.rows.iter().map(|r| r[i].parse().unwrap_or(f64::NAN)).collect()
    }
}

/// Shortest round-trip formatting.
fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Completed,
    HypothesesNotMet(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    pub op: Op,
    pub summary: Vec<(String, String)>,
    pub table: Option<Table>,
    pub status: Status,
}

impl StepOutput {
    fn new(op: Op) -> Self {
        StepOutput { op, summary: Vec::new(), table: None, status: Status::Completed }
    }

    fn put(&mut self, key: &str, value: impl fmt::Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn not_met(&mut self, reason: impl Into<String>) {
        let reason = reason.into();
        self.put("hypotheses_not_met", &reason);
        self.status = Status::HypothesesNotMet(reason);
    }
}

/// Objects constructed once per run.
pub struct Context {
    pub scenario: Scenario,
    pub set: Arc<CircleSet>,
    pub weight: Weight,
    pub quad: QuadConfig,
}

impl Context {
    pub fn new(scenario: Scenario) -> Result<Self> {
        let set = Arc::new(scenario.set.build()?);
        let weight = scenario.weight.build()?;
        let quad = scenario.quad.apply(QuadConfig::default());
        quad.validate()?;
        Ok(Context { scenario, set, weight, quad })
    }

    fn f(&self) -> OuterDistanceFunction {
        OuterDistanceFunction::new(self.weight.clone(), self.set.clone())
    }

    fn measure_or(&self, default: MeasureSpec) -> BoundaryMeasure {
        self.scenario.measure.as_ref().unwrap_or(&default).build(&self.set, &self.weight)
    }

    fn gauge(&self, default: Option<GaugeSpec>) -> Result<GrowthGauge> {
        let spec = self.scenario.gauge.clone().or(default).ok_or_else(|| LabError::Config("this operation needs a [gauge]".into()))?;
        Ok(match spec {
            GaugeSpec::Power { p } => GrowthGauge::Power { p },
            GaugeSpec::TLog { k } => GrowthGauge::TLog { k },
            GaugeSpec::Scaled { c, p } => GrowthGauge::ScaledPower { c, p },
            GaugeSpec::Cantor => cantor_gauge(&self.set, &self.weight),
            GaugeSpec::InverseLog => inverse_log_gauge(),
        })
    }

    fn l_order(&self) -> u32 {
        if self.weight.power_exponent().is_some() {
            1
        } else {
            2
        }
    }

    pub fn run(&self, op: Op) -> Result<StepOutput> {
        match op {
            Op::SetBuild => Ok(self.set_build()),
            Op::SetStats => Ok(self.set_stats()),
            Op::ClassTest => self.class_test(),
            Op::DirichletLocal => self.dirichlet_local(),
            Op::DirichletEnergy => self.dirichlet_energy(),
            Op::DirichletMu => self.dirichlet_mu(),
            Op::DirichletThreshold => self.dirichlet_threshold(),
            Op::CarlesonArs => Ok(self.carleson_ars()),
            Op::CarlesonOnebox => self.carleson_onebox(),
            Op::CarlesonCn => self.carleson_cn(),
            Op::CarlesonVerdict => self.carleson_verdict(),
            Op::CapacitySeries => self.capacity_series(),
            Op::CapacityPolar => self.capacity_polar(),
            Op::CapacityCyclic => self.capacity_cyclic(),
        }
    }

    fn set_build(&self) -> StepOutput {
        let mut out = StepOutput::new(Op::SetBuild);
        let mut t = Table::new(&["gap_start", "gap_length", "generation", "unresolved"]);
        for (s, l, g, u) in self.set.gap_rows() {
            t.push(vec![num(s), num(l), g.to_string(), u.to_string()]);
        }
        out.put("gaps", self.set.gaps().len());
        out.put("truncation_error", num(self.set.truncation_error()));
        out.put("trusted_floor", num(self.set.trusted_floor()));
        out.table = Some(t);
        out
    }

    fn set_stats(&self) -> StepOutput {
        let mut out = StepOutput::new(Op::SetStats);
        let mut t = Table::new(&["t", "sublevel_measure", "gap_counting", "t_times_count"]);
        let mut violations = 0;
        for k in 0..100 {
            let x = 2.0 * 10f64.powf(-6.0 * k as f64 / 99.0);
            let m = self.set.sublevel_measure(x);
            let n = self.set.gap_counting(x);
            if x * n as f64 > m + 1e-12 {
                violations += 1;
            }
            t.push(vec![num(x), num(m), n.to_string(), num(x * n as f64)]);
        }
        out.put("gaps", self.set.gaps().len());
        out.put("complete_generations", self.set.complete_generations());
        out.put("truncation_error", num(self.set.truncation_error()));
        if let Some(d) = self.scenario.set.dimension() {
            out.put("dimension", num(d));
        }
        out.put("beta_exponent", num(beta_exponent(&self.set)));
        let c = carleson_check(&self.set, &Weight::identity());
        out.put("log_dist_integrable", c.finite);
        out.put("counting_bound_violations", violations);
        out.table = Some(t);
        out
    }

    fn class_test(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::ClassTest);
        let mut t = Table::new(&["class", "scale", "value", "running"]);
        for name in &self.scenario.params.classes {
            let report: ClassReport = match name.to_ascii_lowercase().as_str() {
                "carleson" => carleson_test(&self.set),
                "k" => k_test(&self.set, &ArcScan::default()),
                "l1" => l_test(&self.set, 1, &ZetaGrid::default()),
                "l2" => l_test(&self.set, 2, &ZetaGrid::default()),
                other => return Err(LabError::Config(format!("unknown class `{other}`"))),
            };
            let c = report.class.name();
            for r in &report.rows {
                t.push(vec![c.to_string(), num(r.scale), num(r.value), num(r.running)]);
            }
            out.put(&format!("{c}.verdict"), report.verdict.as_str());
            out.put(&format!("{c}.constant"), num(report.constant));
            out.put(&format!("{c}.growth_exponent"), num(report.growth_exponent));
        }
        out.table = Some(t);
        Ok(out)
    }

    /// Evaluation points with their target scale.
    fn zeta_points(&self) -> Vec<f64> {
        let set = &self.set;
        let gaps = set.gaps();
        let mut out = Vec::new();
        match self.scenario.params.zeta {
            ZetaPlacement::Midgap => {
                for k in 2..48 {
                    let d = PI * 0.5f64.powi(k);
                    if let Some(j) = (0..gaps.len()).find(|&j| !gaps[j].unresolved && gaps[j].half() >= d && gaps[j].half() < 2.0 * d) {
                        out.push(located_in_gap(set, j, gaps[j].half(), false).theta());
                    }
                }
            }
            ZetaPlacement::Edge => {
                let j = (0..gaps.len()).max_by(|&a, &b| gaps[a].length.total_cmp(&gaps[b].length).then(b.cmp(&a))).expect("a set has a gap");
                for k in 2..48 {
                    let d = PI * 0.5f64.powi(k);
                    if d < gaps[j].half() {
                        out.push(located_in_gap(set, j, d, false).theta());
                    }
                }
            }
        }
        out
    }

    fn dirichlet_local(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::DirichletLocal);
        let f = self.f();
        let mut t = Table::new(&["theta", "delta", "total", "over_i", "over_gamma", "over_sigma", "ratio_to_model"]);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut skipped = 0;
        for theta in self.zeta_points() {
            let b = match rs_local(&f, theta, &self.quad) {
                Ok(b) => b,
                Err(LabError::Untrusted { .. }) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let delta = self.set.dist(theta);
            let model = self.weight.value(delta).powi(2) / delta;
            let ratio = b.total / model;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            if delta < 0.1 {
                xs.push((1.0 / delta).ln().ln());
                ys.push(ratio.ln());
            }
            t.push(vec![num(theta), num(delta), num(b.total), num(b.over_i), num(b.over_gamma), num(b.over_sigma), num(ratio)]);
        }
        out.put("points", t.rows.len());
        out.put("untrusted_skipped", skipped);
        out.put("ratio_min", num(lo));
        out.put("ratio_max", num(hi));
        out.put("ratio_spread", num(hi / lo));
        if xs.len() >= 3 {
            out.put("loglog_exponent", num(linear_fit(&xs, &ys).slope));
        }
        out.table = Some(t);
        Ok(out)
    }

    fn energy_table(m: &MeasureIntegral, out: &mut StepOutput) {
        let mut t = Table::new(&["generation", "gaps", "value"]);
        for g in &m.generations {
            t.push(vec![g.generation.to_string(), g.gaps.to_string(), num(g.value)]);
        }
        out.put("finite", m.finite);
        out.put("value", num(m.value));
        out.put("partial", num(m.partial));
        out.put("trend_ratio", num(m.trend_ratio));
        out.put("atoms_part", num(m.atoms_part));
        out.table = Some(t);
    }

    fn dirichlet_energy(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::DirichletEnergy);
        let m = dirichlet_energy(&self.f(), &self.quad)?;
        Self::energy_table(&m, &mut out);
        Ok(out)
    }

    fn dirichlet_mu(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::DirichletMu);
        let mu = self.measure_or(MeasureSpec::Lebesgue);
        let m = dirichlet_mu(&self.f(), &mu, &self.quad)?;
        Self::energy_table(&m, &mut out);
        Ok(out)
    }

    /// Energy finiteness of `f_α` over an α grid (default: around `dim/2`).
    fn dirichlet_threshold(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::DirichletThreshold);
        let predicted = self.scenario.set.dimension().map(|d| d / 2.0);
        let alphas: Vec<f64> = match (&self.scenario.params.alphas[..], predicted) {
            ([], Some(p)) => [0.8, 0.9, 0.95, 1.05, 1.1, 1.2].iter().map(|s| s * p).collect(),
            ([], None) => return Err(LabError::Config("dirichlet.threshold needs params.alphas".into())),
            (a, _) => a.to_vec(),
        };
        let mut t = Table::new(&["alpha", "finite", "trend_ratio", "value"]);
        let (mut below, mut above) = (f64::NEG_INFINITY, f64::INFINITY);
        for &a in &alphas {
            let f = OuterDistanceFunction::power(a, self.set.clone())?;
            let m = dirichlet_energy(&f, &self.quad)?;
            if m.finite {
                above = above.min(a);
            } else {
                below = below.max(a);
            }
            t.push(vec![num(a), m.finite.to_string(), num(m.trend_ratio), num(m.value)]);
        }
        if let Some(p) = predicted {
            out.put("predicted", num(p));
        }
        out.put("largest_divergent_alpha", num(below));
        out.put("smallest_finite_alpha", num(above));
        out.put("monotone", below < above);
        out.table = Some(t);
        Ok(out)
    }

    fn kernel(&self) -> LogKernel {
        match self.scenario.params.kernel {
            KernelChoice::Log => LogKernel::Plain,
            KernelChoice::LogPlus => LogKernel::Positive,
        }
    }

    fn arc_report(out: &mut StepOutput, r: &ArcTestReport) {
        let mut t = Table::new(&["arc_start", "arc_length", "mass", "energy", "ratio"]);
        for row in &r.rows {
            t.push(vec![num(row.arc.start), num(row.arc.length), num(row.mass), num(row.energy), num(row.ratio)]);
        }
        out.put("sup_ratio", num(r.sup_ratio));
        out.put("verdict", r.verdict.as_str());
        out.put("growth_exponent", num(r.growth_exponent));
        if let Some(w) = r.witness {
            out.put("witness", format!("start {} length {}", num(w.start), num(w.length)));
        }
        out.table = Some(t);
    }

    fn carleson_ars(&self) -> StepOutput {
        let mut out = StepOutput::new(Op::CarlesonArs);
        let mu = self.measure_or(MeasureSpec::Multiplier);
        let r = ars_boundary_test(&mu, &ArcFamily::anchored(self.set.clone()), self.kernel());
        Self::arc_report(&mut out, &r);
        out
    }

    fn carleson_onebox(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CarlesonOnebox);
        let mu = self.measure_or(MeasureSpec::Multiplier);
        let default = matches!(self.set.provenance(), Provenance::Cantor { .. }).then_some(GaugeSpec::Cantor);
        let phi = self.gauge(default)?;
        let r = one_box_test(&mu, &phi, &ArcFamily::anchored(self.set.clone()));
        let mut t = Table::new(&["arc_start", "arc_length", "mass", "ratio"]);
        for row in &r.rows {
            t.push(vec![num(row.arc.start), num(row.arc.length), num(row.mass), num(row.ratio)]);
        }
        out.put("sup_ratio", num(r.sup_ratio));
        out.put("ratio_bounded", r.ratio_bounded.as_str());
        out.put("integral_converges", r.integral.converges);
        out.put("holds", r.holds);
        if let Some(c) = r.failing_clause {
            out.put("failing_clause", c);
        }
        out.table = Some(t);
        Ok(out)
    }

    fn carleson_cn(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CarlesonCn);
        let mu = self.measure_or(MeasureSpec::Multiplier);
        if matches!(self.set.provenance(), Provenance::ThetaSequence { .. }) {
            let indices: Vec<u64> = if self.scenario.params.indices.is_empty() {
                (4..=12).map(|k| 10f64.powf(k as f64 / 2.0).round() as u64).collect()
            } else {
                self.scenario.params.indices.clone()
            };
            let r = cn_sequence(&mu, &self.set, &indices)?;
            let mut t = Table::new(&["n", "length", "mass", "product"]);
            for row in &r.rows {
                t.push(vec![row.n.to_string(), num(row.length), num(row.mass), num(row.product)]);
            }
            out.put("exponent", num(r.exponent));
            out.put("verdict", r.verdict.as_str());
            out.table = Some(t);
        } else {
            let r = necessary_log_test(&mu, &ArcFamily::anchored(self.set.clone()));
            Self::arc_report(&mut out, &r);
        }
        Ok(out)
    }

    fn carleson_verdict(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CarlesonVerdict);
        let order = self.l_order();
        let l = l_test(&self.set, order, &ZetaGrid::default());
        out.put("l_class", l.class.name());
        out.put("l_verdict", l.verdict.as_str());
        if l.verdict != Verdict::Pass {
            out.not_met(format!("E not certified in {}", l.class.name()));
            return Ok(out);
        }
        let v = multiplier_verdict(&self.weight, self.set.clone(), &l, &ArcFamily::anchored(self.set.clone()))?;
        out.put("in_dirichlet", v.in_dirichlet.as_str());
        out.put("membership_integral", num(v.membership_integral));
        out.put("multiplier", v.multiplier.as_str());
        out.put("necessary", v.necessary.verdict.as_str());
        if let Some(b) = &v.one_box {
            out.put("one_box_holds", b.holds);
        }
        if let Some(e) = &v.energy {
            out.put("energy_verdict", e.verdict.as_str());
        }
        out.put("justification", &v.justification);
        let mut t = Table::new(&["test", "scale", "value", "running"]);
        for (name, r) in [("necessary", Some(&v.necessary)), ("energy", v.energy.as_ref())] {
            for s in r.map(|r| &r.scales[..]).unwrap_or(&[]) {
                t.push(vec![name.to_string(), num(s.scale), num(s.value), num(s.running)]);
            }
        }
        out.table = Some(t);
        Ok(out)
    }

    fn capacity_series(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CapacitySeries);
        let spec = self.scenario.set.cantor_spec().ok_or_else(|| LabError::Config("capacity.series needs a cantor set".into()))??;
        let terms = self.scenario.params.terms;
        let r = cantor_capacity_series(&spec, terms)?;
        let doubled = cantor_capacity_series(&spec, 2 * terms)?;
        let mut t = Table::new(&["n", "partial_sum"]);
        for &(n, s) in &r.trajectory {
            t.push(vec![(n as u64).to_string(), num(s)]);
        }
        out.put("verdict", &r.verdict);
        out.put("verdict_doubled", &doubled.verdict);
        out.put("stable", r.verdict == doubled.verdict);
        out.put("polar", r.verdict.polar());
        out.table = Some(t);
        Ok(out)
    }

    fn capacity_polar(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CapacityPolar);
        let mu = self.measure_or(MeasureSpec::Lebesgue);
        let energy = energy_divergence(&self.set, &BoundaryMeasure::lebesgue());
        let mut t = Table::new(&["t", "partial_integral"]);
        for &(x, s) in &energy.trajectory {
            t.push(vec![num(x), num(s)]);
        }
        out.put("energy_divergence", &energy.verdict);
        let h = self.gauge(Some(GaugeSpec::Power { p: 1.0 }))?;
        let r = polarity_check(&self.set, &mu, &h);
        for c in &r.clauses {
            out.put(&format!("clause[{}]", c.name), if c.detail.is_empty() { c.holds.to_string() } else { format!("{} ({})", c.holds, c.detail) });
        }
        out.put("polarity", &r.verdict);
        out.table = Some(t);
        if let CapacityVerdict::HypothesesNotMet(c) = &r.verdict {
            out.not_met(c.clone());
        }
        Ok(out)
    }

    fn capacity_cyclic(&self) -> Result<StepOutput> {
        let mut out = StepOutput::new(Op::CapacityCyclic);
        let mu = self.measure_or(MeasureSpec::Lebesgue);
        let h = self.gauge(Some(GaugeSpec::Power { p: 1.0 }))?;
        let r = cyclicity_check(&self.f(), &mu, &h, &self.quad)?;
        let mut t = Table::new(&["clause", "holds", "detail"]);
        for c in &r.clauses {
            t.push(vec![c.name.to_string(), c.holds.to_string(), c.detail.clone()]);
        }
        out.put("verdict", r.verdict());
        out.table = Some(t);
        if let Some(c) = r.failing_clause() {
            out.not_met(c.name);
        }
        Ok(out)
    }
}

/// Outcome of a whole pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub steps: Vec<StepOutput>,
    pub written: Vec<PathBuf>,
}

impl RunReport {
    pub fn hypotheses_met(&self) -> bool {
        self.steps.iter().all(|s| s.status == Status::Completed)
    }

    pub fn step(&self, op: Op) -> Option<&StepOutput> {
        self.steps.iter().find(|s| s.op == op)
    }

    /// Plain-text summary, one `op.key = value` line per entry.
    pub fn summary(&self) -> String {
        let mut s = format!("scenario = {}\n", self.name);
        for step in &self.steps {
            for (k, v) in &step.summary {
                s.push_str(&format!("{}.{} = {}\n", step.op, k, v));
            }
        }
        s
    }
}

/// Run `ops` (or the scenario pipeline when `ops` is empty), writing one CSV
/// per table into `out_dir` when given.
pub fn run(scenario: Scenario, ops: &[Op], out_dir: Option<&Path>) -> Result<RunReport> {
    let ops: Vec<Op> = if ops.is_empty() { scenario.pipeline.clone() } else { ops.to_vec() };
    if ops.is_empty() {
        return Err(LabError::Config("empty pipeline".into()));
    }
    let out_dir = out_dir.map(Path::to_path_buf).or_else(|| scenario.output.dir.clone());
    let name = scenario.name.clone();
    let ctx = Context::new(scenario)?;
    let mut steps = Vec::new();
    let mut written = Vec::new();
    for op in ops {
        let step = ctx.run(op)?;
        if let (Some(dir), Some(table)) = (&out_dir, &step.table) {
            std::fs::create_dir_all(dir).map_err(|e| LabError::Config(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(format!("{name}.{op}.csv"));
            table.write(&path)?;
            written.push(path);
        }
        steps.push(step);
    }
    Ok(RunReport { name, steps, written })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_overrides() {
        let text = "name = \"t\"\npipeline = [\"set.build\"]\n[set]\nkind = \"cantor\"\nratio = 0.25\ndepth = 4\n";
        let s = parse_scenario(text, &["set.depth=6".into(), "weight.kind=identity".into(), "quad.rel_tol=1e-6".into()]).unwrap();
        let r = parse_scenario(text, &["set.ratio=".into(), "set.rule=exponential".into()]).unwrap();
        assert_eq!(r.set, SetSpec::Cantor { ratio: None, ratios: None, rule: Some(NamedRule::Exponential), depth: 4 });
        let d = parse_scenario("", &["set.depth=3".into()]).unwrap();
        assert_eq!(d.set, SetSpec::Cantor { ratio: Some(1.0 / 3.0), ratios: None, rule: None, depth: 3 });
        assert_eq!(s.set, SetSpec::Cantor { ratio: Some(0.25), ratios: None, rule: None, depth: 6 });
        assert_eq!(s.weight, WeightSpec::Identity);
        assert_eq!(s.quad.rel_tol, Some(1e-6));
        assert_eq!(s.pipeline, vec![Op::SetBuild]);
    }

    #[test]
    fn rejects_unknown_keys_and_ambiguous_cantor() {
        assert!(matches!(parse_scenario("colour = 1", &[]), Err(LabError::Config(_))));
        assert!(matches!(parse_scenario("[set]\nkind = \"torus\"", &[]), Err(LabError::Config(_))));
        let s = parse_scenario("[set]\nkind = \"cantor\"\nratio = 0.2\nrule = \"exponential\"\ndepth = 3", &[]).unwrap();
        assert!(matches!(s.set.build(), Err(LabError::Config(_))));
    }

    #[test]
    fn bundled_scenarios_parse() {
        for n in bundled_names() {
            let s = parse_scenario(bundled(n).unwrap(), &[]).unwrap();
            assert_eq!(s.name, n);
            assert!(!s.pipeline.is_empty());
        }
    }

    #[test]
    fn set_build_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_scenario("name = \"c\"\n[set]\nkind = \"cantor\"\nratio = 0.25\ndepth = 3", &[]).unwrap();
        let r = run(s, &[Op::SetBuild], Some(dir.path())).unwrap();
        let text = std::fs::read_to_string(&r.written[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("gap_start,gap_length,generation,unresolved"));
        assert_eq!(lines.count(), 7 + 8);
    }

    #[test]
    fn cyclic_point_and_failing_cantor_clause() {
        let point = parse_scenario("[set]\nkind = \"point\"", &[]).unwrap();
        let r = run(point, &[Op::CapacityCyclic], None).unwrap();
        assert!(r.hypotheses_met(), "{}", r.summary());
        let cantor = parse_scenario("[set]\nkind = \"cantor\"\nratio = 0.3333333333333333\ndepth = 12", &[]).unwrap();
        let r = run(cantor, &[Op::CapacityCyclic], None).unwrap();
        assert_eq!(r.steps[0].status, Status::HypothesesNotMet("mu(E_t) = O(h(t))".into()));
    }

    #[test]
    fn local_table_for_point_set_matches_model() {
        // f = (1-z)^{0.3}: D_ζ ~ c δ^{-0.4} as δ -> 0
        let s = parse_scenario("[set]\nkind = \"point\"\n[params]\nzeta = \"edge\"", &[]).unwrap();
        let r = run(s, &[Op::DirichletLocal], None).unwrap();
        let ratios = r.steps[0].table.as_ref().unwrap().column("ratio_to_model");
        assert!(ratios.len() > 30);
        let fine = &ratios[20..];
        let (lo, hi) = fine.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        let spread = hi / lo;
        assert!(spread < 1.01, "{spread} {ratios:?}");
    }
}
