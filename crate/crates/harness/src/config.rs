//! Experiment configuration: flat `key = value` sections, one per experiment.
//!
//! ```toml
//! [decay]
//! id = "dispersion"
//! kappa = 1.0
//! n_max = 8
//! ```
//!
//! A scalar key given as an array expands the section into the Cartesian
//! product of its values (members `decay_0`, `decay_1`, … in row-major order
//! over the expanded keys sorted by name). Keys that are lists by nature (`kappa`,
//! `dt_ladder`, `n_ladder`) never expand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use kv_core::diffusion_dispersion::{DDConfig, RootChoice};
use kv_core::solver::Scheme;
use kv_core::stored_energy::{builtin_models, StoredEnergyModel};
use sha2::{Digest, Sha256};
use toml::{Spanned, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    EnergyIdentity,
    EnergyConservation,
    H1Propagation,
    ModulatedInequality,
    GalerkinCauchy,
    RegularityMonitor,
    Dispersion,
    OscillationOracle,
    WeakLimits,
    DdEquivalence,
    MmsConvergence,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 11] = [
        ExperimentId::EnergyIdentity,
        ExperimentId::EnergyConservation,
        ExperimentId::H1Propagation,
        ExperimentId::ModulatedInequality,
        ExperimentId::GalerkinCauchy,
        ExperimentId::RegularityMonitor,
        ExperimentId::Dispersion,
        ExperimentId::OscillationOracle,
        ExperimentId::WeakLimits,
        ExperimentId::DdEquivalence,
        ExperimentId::MmsConvergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::EnergyIdentity => "energy_identity",
            ExperimentId::EnergyConservation => "energy_conservation",
            ExperimentId::H1Propagation => "h1_propagation",
            ExperimentId::ModulatedInequality => "modulated_inequality",
            ExperimentId::GalerkinCauchy => "galerkin_cauchy",
            ExperimentId::RegularityMonitor => "regularity_monitor",
            ExperimentId::Dispersion => "dispersion",
            ExperimentId::OscillationOracle => "oscillation_oracle",
            ExperimentId::WeakLimits => "weak_limits",
            ExperimentId::DdEquivalence => "dd_equivalence",
            ExperimentId::MmsConvergence => "mms_convergence",
        }
    }

    /// Keys accepted in a section with this id, beyond `id`, `seed`,
    /// `output_dir` and `plot`.
    fn keys(self) -> &'static [&'static str] {
        use ExperimentId::*;
        match self {
            EnergyIdentity | EnergyConservation => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "record_every", "record_interval", "n", "t_end",
                "profile", "amplitude", "mean", "blowup_threshold", "dt_ladder", "tolerance", "min_order",
            ],
            H1Propagation => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "record_every", "n", "dt", "t_end", "profile",
                "amplitude", "mean", "blowup_threshold",
            ],
            ModulatedInequality | RegularityMonitor => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "record_every", "n", "dt", "t_end", "profile",
                "amplitude", "mean", "blowup_threshold", "tolerance",
            ],
            GalerkinCauchy => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "record_every", "dt", "t_end", "profile",
                "amplitude", "mean", "blowup_threshold", "n_ladder", "tolerance",
            ],
            Dispersion => &["scheme", "record_every", "dt", "t_end", "kappa", "n_max", "tolerance"],
            OscillationOracle => &["a", "b", "theta", "n", "samples", "tolerance"],
            WeakLimits => &["a", "b", "theta", "time", "n_ladder", "tolerance"],
            DdEquivalence => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "record_every", "record_interval", "n", "t_end",
                "profile", "amplitude", "mean", "blowup_threshold", "dt_ladder", "delta", "a", "root_choice",
                "tolerance", "min_order",
            ],
            MmsConvergence => &[
                "model", "dim", "mu", "alpha", "scheme", "epsilon", "n", "dt", "t_end", "n_ladder", "dt_ladder",
                "sharpness", "tolerance", "min_order",
            ],
        }
    }
}

impl FromStr for ExperimentId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| {
            let known: Vec<&str> = ExperimentId::ALL.iter().map(|id| id.name()).collect();
            format!("unknown experiment id `{s}` (known: {})", known.join(", "))
        })
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const COMMON_KEYS: [&str; 4] = ["id", "seed", "output_dir", "plot"];
const LIST_KEYS: [&str; 3] = ["kappa", "dt_ladder", "n_ladder"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub section: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(s) = &self.section {
            write!(f, "[{s}] ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Model selection: one model, or every semiconvex built-in.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelChoice {
    One(StoredEnergyModel),
    Builtin,
}

impl ModelChoice {
    pub fn models(&self) -> Vec<StoredEnergyModel> {
        match self {
            ModelChoice::One(m) => vec![m.clone()],
            ModelChoice::Builtin => builtin_models().into_iter().filter(|m| m.semiconvexity().is_finite()).collect(),
        }
    }
}

/// Resolved parameters; keys that do not apply to the experiment keep their
/// defaults and are left out of the echo.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub model: ModelChoice,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub record_every: usize,
    /// Time between diagnostic records on ladder runs; overrides
    /// `record_every` so every rung samples the same times.
    pub record_interval: Option<f64>,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub profile: String,
    pub amplitude: f64,
    pub mean: f64,
    pub blowup_threshold: Option<f64>,
    /// Strictly decreasing.
    pub dt_ladder: Vec<f64>,
    /// Strictly increasing.
    pub n_ladder: Vec<usize>,
    pub kappa: Vec<f64>,
    pub n_max: u32,
    pub delta: f64,
    /// Capillarity coefficient for dd_equivalence, lower phase strain for the
    /// oscillation experiments.
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub root_choice: RootChoice,
    pub time: f64,
    pub samples: usize,
    pub sharpness: f64,
    pub tolerance: f64,
    pub min_order: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub id: ExperimentId,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub plot: bool,
    pub params: Params,
    echo: Vec<(String, String)>,
}

impl ExperimentSpec {
    /// Spec with every default filled in.
    pub fn with_defaults(name: &str, id: ExperimentId) -> ExperimentSpec {
        let table = BTreeMap::from([("id".to_string(), Value::String(id.name().into()))]);
        build(name, &table).expect("defaults are valid")
    }

    /// `key = value` lines of the applicable parameters, in key order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.echo {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    /// First 16 hex digits of the SHA-256 of the echo.
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.echo().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn dd_config(&self) -> kv_core::Result<DDConfig> {
        let p = &self.params;
        DDConfig::new(p.epsilon, p.delta, p.a, p.root_choice)
    }
}

type Section = BTreeMap<String, Spanned<Value>>;

/// Parses a configuration document into validated specs, sections in name
/// order with array-valued scalars expanded.
pub fn parse_config(text: &str) -> Result<Vec<ExperimentSpec>, ConfigError> {
    let doc: BTreeMap<String, Spanned<Section>> = toml::from_str(text).map_err(|e| {
        let message = if e.message().contains("expected a map") {
            "top-level keys must be sections".to_string()
        } else {
            e.message().to_string()
        };
        ConfigError { line: e.span().map(|s| line_of(text, s.start)), section: None, message }
    })?;
    let mut specs = Vec::new();
    for (name, section) in doc {
        let line = line_of(text, section.span().start);
        specs.extend(expand_section(text, &name, line, section.get_ref())?);
    }
    Ok(specs)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn expand_section(text: &str, name: &str, line: usize, section: &Section) -> Result<Vec<ExperimentSpec>, ConfigError> {
    let lines: BTreeMap<String, usize> =
        section.iter().map(|(k, v)| (k.clone(), line_of(text, v.span().start))).collect();
    let err = |key: Option<&str>, message: String| ConfigError {
        line: Some(key.and_then(|k| lines.get(k).copied()).unwrap_or(line)),
        section: Some(name.to_string()),
        message,
    };
    let plain: BTreeMap<String, Value> = section.iter().map(|(k, v)| (k.clone(), v.get_ref().clone())).collect();
    let axes: Vec<(&String, &Vec<Value>)> = plain
        .iter()
        .filter(|(k, _)| !LIST_KEYS.contains(&k.as_str()))
        .filter_map(|(k, v)| v.as_array().map(|a| (k, a)))
        .collect();
    if let Some((k, _)) = axes.iter().find(|(_, a)| a.is_empty()) {
        return Err(err(Some(k), format!("sweep axis `{k}` is empty")));
    }
    let members: usize = axes.iter().map(|(_, a)| a.len()).product();
    let mut specs = Vec::with_capacity(members);
    for m in 0..members {
        let mut table = plain.clone();
        let mut rest = m;
        for (k, values) in axes.iter().rev() {
            table.insert((*k).clone(), values[rest % values.len()].clone());
            rest /= values.len();
        }
        let member = if axes.is_empty() { name.to_string() } else { format!("{name}_{m}") };
        specs.push(build(&member, &table).map_err(|(key, msg)| err(key.as_deref(), msg))?);
    }
    Ok(specs)
}

type BuildError = (Option<String>, String);

struct Reader<'a> {
    table: &'a BTreeMap<String, Value>,
}

impl Reader<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    fn float(&self, key: &str, default: f64) -> Result<f64, BuildError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => as_float(v).ok_or_else(|| (Some(key.into()), format!("`{key}` must be a number"))),
        }
    }

    fn opt_float(&self, key: &str) -> Result<Option<f64>, BuildError> {
        self.get(key).map(|_| self.float(key, 0.0)).transpose()
    }

    fn uint(&self, key: &str, default: u64) -> Result<u64, BuildError> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(_) => Err((Some(key.into()), format!("`{key}` must be a non-negative integer"))),
        }
    }

    fn string(&self, key: &str, default: &str) -> Result<String, BuildError> {
        match self.get(key) {
            None => Ok(default.into()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err((Some(key.into()), format!("`{key}` must be a string"))),
        }
    }

    fn floats(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, BuildError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| as_float(v).ok_or_else(|| (Some(key.into()), format!("`{key}` entries must be numbers"))))
                .collect(),
            Some(v) => as_float(v).map(|x| vec![x]).ok_or_else(|| (Some(key.into()), format!("`{key}` must be a number or a list"))),
        }
    }

    fn uints(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, BuildError> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Integer(i) if *i >= 1 => Ok(*i as usize),
                    _ => Err((Some(key.into()), format!("`{key}` entries must be positive integers"))),
                })
                .collect(),
            Some(_) => Err((Some(key.into()), format!("`{key}` must be a list of positive integers"))),
        }
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Float(x) => format!("{x:e}"),
        Value::Array(a) => format!("[{}]", a.iter().map(fmt_value).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn build(name: &str, table: &BTreeMap<String, Value>) -> Result<ExperimentSpec, BuildError> {
    let r = Reader { table };
    let id: ExperimentId = match r.get("id") {
        None => return Err((None, "missing `id`".into())),
        Some(Value::String(s)) => s.parse().map_err(|e| (Some("id".to_string()), e))?,
        Some(_) => return Err((Some("id".into()), "`id` must be a string".into())),
    };
    let allowed = id.keys();
    if let Some(k) = table.keys().find(|k| !COMMON_KEYS.contains(&k.as_str()) && !allowed.contains(&k.as_str())) {
        return Err((Some(k.clone()), format!("unknown key `{k}` for experiment `{id}`")));
    }
    let bad = |key: &str, msg: String| Err((Some(key.to_string()), msg));
    use ExperimentId::*;

    let scheme_name = r.string("scheme", "IF_RK4")?;
    let scheme: Scheme = scheme_name.parse().map_err(|e: kv_core::Error| (Some("scheme".to_string()), e.to_string()))?;
    let default_model = if matches!(id, H1Propagation | ModulatedInequality) { "builtin" } else { "quartic" };
    let model_id = r.string("model", default_model)?;
    let mut model_params = BTreeMap::new();
    for key in ["dim", "mu", "alpha"] {
        if let Some(x) = r.opt_float(key)? {
            model_params.insert(key.to_string(), x);
        }
    }
    let model = if model_id == "builtin" {
        if !model_params.is_empty() {
            return bad("model", "`builtin` takes no model parameters".into());
        }
        ModelChoice::Builtin
    } else {
        ModelChoice::One(
            StoredEnergyModel::from_id(&model_id, &model_params).map_err(|e| (Some("model".to_string()), e.to_string()))?,
        )
    };
    let dim = match &model {
        ModelChoice::One(m) => m.dim(),
        ModelChoice::Builtin => 2,
    };

    let default_n = match id {
        OscillationOracle => 8,
        DdEquivalence | MmsConvergence => 32,
        _ => 64,
    };
    let default_dt = match id {
        Dispersion => 1e-5,
        GalerkinCauchy => 0.01,
        MmsConvergence => 0.0025,
        _ => 0.005,
    };
    let default_dt_ladder: &[f64] = match (id, scheme) {
        (DdEquivalence, _) => &[0.02, 0.01, 0.005],
        (MmsConvergence, Scheme::IfRk4) => &[0.05, 0.025, 0.0125],
        (MmsConvergence, Scheme::ImexCnab2) => &[0.01, 0.005, 0.0025],
        (_, Scheme::IfRk4) => &[0.01, 0.005, 0.0025],
        (_, Scheme::ImexCnab2) => &[0.002, 0.001, 0.0005],
    };
    let default_n_ladder: &[usize] = match id {
        WeakLimits => &[4, 8, 16, 32, 64],
        MmsConvergence => &[4, 8, 16, 32],
        _ => &[8, 16, 32, 64],
    };
    let default_tolerance = match id {
        EnergyIdentity | EnergyConservation | H1Propagation | ModulatedInequality | Dispersion => 1e-6,
        GalerkinCauchy | DdEquivalence => 1e-8,
        RegularityMonitor => 1e3,
        OscillationOracle => 1e-12,
        WeakLimits => 1e-3,
        MmsConvergence => 1e-10,
    };
    let default_min_order = match (id, scheme) {
        (MmsConvergence, s) => s.order() as f64 - 0.2,
        (DdEquivalence, _) => 1.8,
        (_, Scheme::IfRk4) => 3.5,
        (_, Scheme::ImexCnab2) => 1.8,
    };

    let params = Params {
        model,
        scheme,
        epsilon: r.float("epsilon", 1.0)?,
        record_every: r.uint("record_every", 10)? as usize,
        record_interval: r.opt_float("record_interval")?,
        n: r.uint("n", default_n)? as usize,
        dt: r.float("dt", default_dt)?,
        t_end: r.float("t_end", if id == MmsConvergence { 0.5 } else { 1.0 })?,
        profile: r.string("profile", if dim == 1 { "smooth_1d" } else { "smooth_2d" })?,
        amplitude: r.float("amplitude", 1.0)?,
        mean: r.float("mean", 1.0)?,
        blowup_threshold: r.opt_float("blowup_threshold")?,
        dt_ladder: r.floats("dt_ladder", default_dt_ladder)?,
        n_ladder: r.uints("n_ladder", default_n_ladder)?,
        kappa: r.floats("kappa", &[0.25, 1.0, 4.0])?,
        n_max: r.uint("n_max", 8)? as u32,
        delta: r.float("delta", 0.001)?,
        a: r.float("a", 1.0)?,
        b: r.float("b", 3.0)?,
        theta: r.float("theta", 0.5)?,
        root_choice: r
            .string("root_choice", "minus")?
            .parse()
            .map_err(|e: kv_core::Error| (Some("root_choice".to_string()), e.to_string()))?,
        time: r.float("time", 1.0)?,
        samples: r.uint("samples", 10_000)? as usize,
        sharpness: r.float("sharpness", 3.0)?,
        tolerance: r.float("tolerance", default_tolerance)?,
        min_order: r.float("min_order", default_min_order)?,
    };

    let p = &params;
    let positive = |key: &str, x: f64| -> Result<(), BuildError> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err((Some(key.to_string()), format!("{key} must be > 0, got {x}")))
        }
    };
    let applies = |key: &str| allowed.contains(&key);
    if applies("dt") {
        positive("dt", p.dt)?;
    }
    if applies("epsilon") {
        positive("epsilon", p.epsilon)?;
    }
    if applies("t_end") {
        positive("t_end", p.t_end)?;
    }
    if applies("record_every") && p.record_every == 0 {
        return bad("record_every", "record_every must be >= 1".into());
    }
    if let Some(ri) = p.record_interval {
        positive("record_interval", ri)?;
    }
    if applies("n") && p.n == 0 {
        return bad("n", "n must be >= 1".into());
    }
    if applies("tolerance") {
        positive("tolerance", p.tolerance)?;
    }
    if applies("dt_ladder") {
        if p.dt_ladder.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad("dt_ladder", "dt_ladder entries must be > 0".into());
        }
        if p.dt_ladder.windows(2).any(|w| w[1] >= w[0]) {
            return bad("dt_ladder", format!("dt_ladder must be strictly decreasing, got {:?}", p.dt_ladder));
        }
        if id != MmsConvergence && p.dt_ladder.len() < 2 {
            return bad("dt_ladder", "dt_ladder needs at least two entries".into());
        }
    }
    if applies("n_ladder") {
        if p.n_ladder.windows(2).any(|w| w[1] <= w[0]) {
            return bad("n_ladder", format!("n_ladder must be strictly increasing, got {:?}", p.n_ladder));
        }
        if id != MmsConvergence && p.n_ladder.len() < 2 {
            return bad("n_ladder", "n_ladder needs at least two entries".into());
        }
        if id == WeakLimits && p.n_ladder.windows(2).any(|w| w[1] != 2 * w[0]) {
            return bad("n_ladder", "weak-limit ladder must double at each step".into());
        }
    }
    if applies("kappa") && (p.kappa.is_empty() || p.kappa.iter().any(|&k| !(k > 0.0 && k.is_finite()))) {
        return bad("kappa", "kappa values must be > 0".into());
    }
    if applies("n_max") && p.n_max == 0 {
        return bad("n_max", "n_max must be >= 1".into());
    }
    if applies("theta") && !(p.theta > 0.0 && p.theta < 1.0) {
        return bad("theta", format!("theta must lie in (0, 1), got {}", p.theta));
    }
    if id == WeakLimits && !(1.0..=2.0).contains(&p.time) {
        return bad("time", format!("time must lie in [1, 2], got {}", p.time));
    }
    if applies("samples") && p.samples < 2 {
        return bad("samples", "samples must be >= 2".into());
    }
    if applies("sharpness") && !(p.sharpness > 1.0) {
        return bad("sharpness", format!("sharpness must exceed 1, got {}", p.sharpness));
    }
    let expected_profile = if dim == 1 { "smooth_1d" } else { "smooth_2d" };
    if applies("profile") && p.profile != expected_profile {
        return bad("profile", format!("profile `{}` does not match a {dim}-D model", p.profile));
    }
    if id == DdEquivalence {
        DDConfig::new(p.epsilon, p.delta, p.a, p.root_choice).map_err(|e| (Some("delta".to_string()), e.to_string()))?;
    }

    let seed = r.uint("seed", 0)?;
    let output_dir = match r.get("output_dir") {
        None => None,
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(_) => return bad("output_dir", "output_dir must be a non-empty string".into()),
    };
    let plot = match r.get("plot") {
        None => true,
        Some(Value::Boolean(b)) => *b,
        Some(_) => return bad("plot", "plot must be true or false".into()),
    };

    let echo = echo_lines(id, p, seed);
    Ok(ExperimentSpec { name: name.to_string(), id, seed, output_dir, plot, params, echo })
}

fn echo_lines(id: ExperimentId, p: &Params, seed: u64) -> Vec<(String, String)> {
    let mut out = vec![("id".to_string(), id.name().to_string()), ("seed".to_string(), seed.to_string())];
    let f = |x: f64| format!("{x:e}");
    let list = |xs: &[f64]| fmt_value(&Value::Array(xs.iter().map(|&x| Value::Float(x)).collect()));
    for &key in id.keys() {
        let value = match key {
            "model" => match &p.model {
                ModelChoice::Builtin => "builtin".into(),
                ModelChoice::One(m) => format!("{m:?}"),
            },
            // folded into the model echo
            "dim" | "mu" | "alpha" => continue,
            "scheme" => p.scheme.to_string(),
            "epsilon" => f(p.epsilon),
            "record_every" => p.record_every.to_string(),
            "record_interval" => p.record_interval.map_or("none".into(), f),
            "n" => p.n.to_string(),
            "dt" => f(p.dt),
            "t_end" => f(p.t_end),
            "profile" => p.profile.clone(),
            "amplitude" => f(p.amplitude),
            "mean" => f(p.mean),
            "blowup_threshold" => p.blowup_threshold.map_or("default".into(), f),
            "dt_ladder" => list(&p.dt_ladder),
            "n_ladder" => format!("{:?}", p.n_ladder),
            "kappa" => list(&p.kappa),
            "n_max" => p.n_max.to_string(),
            "delta" => f(p.delta),
            "a" => f(p.a),
            "b" => f(p.b),
            "theta" => f(p.theta),
            "root_choice" => p.root_choice.name().into(),
            "time" => f(p.time),
            "samples" => p.samples.to_string(),
            "sharpness" => f(p.sharpness),
            "tolerance" => f(p.tolerance),
            "min_order" => f(p.min_order),
            other => unreachable!("key `{other}` has no echo"),
        };
        out.push((key.to_string(), value));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_dispersion_gets_defaults() {
        let specs = parse_config("[d]\nid = \"dispersion\"\nkappa = 1\nn_max = 8\n").unwrap();
        assert_eq!(specs.len(), 1);
        let p = &specs[0].params;
        assert_eq!(p.scheme, Scheme::IfRk4);
        assert_eq!(p.epsilon, 1.0);
        assert_eq!(p.record_every, 10);
        assert_eq!(p.kappa, vec![1.0]);
        assert_eq!(p.n_max, 8);
    }

    #[test]
    fn zero_dt_names_the_constraint() {
        let e = parse_config("[r]\nid = \"regularity_monitor\"\ndt = 0\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert!(e.message.contains("dt must be > 0"), "{e}");
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let e = parse_config("[r]\nid = \"weak_limits\"\n\nkappa = 1\n").unwrap_err();
        assert_eq!(e.line, Some(4));
        assert!(e.to_string().contains("unknown key `kappa`"), "{e}");
    }

    #[test]
    fn syntax_error_carries_line() {
        let e = parse_config("[a]\nid = \"dispersion\"\nx =\n").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn monotone_ladders() {
        let ok = parse_config("[g]\nid = \"galerkin_cauchy\"\nn_ladder = [8, 16, 32]\n").unwrap();
        assert_eq!(ok[0].params.n_ladder, vec![8, 16, 32]);
        let e = parse_config("[g]\nid = \"galerkin_cauchy\"\nn_ladder = [8, 32, 16]\n").unwrap_err();
        assert!(e.message.contains("strictly increasing"));
        let e = parse_config("[e]\nid = \"energy_identity\"\ndt_ladder = [0.01, 0.02]\n").unwrap_err();
        assert!(e.message.contains("strictly decreasing"));
    }

    #[test]
    fn array_scalars_expand_into_a_grid() {
        let text = "[dd]\nid = \"dd_equivalence\"\nepsilon = [0.1, 0.2, 0.4]\ndelta = [0.0001, 0.0002, 0.0004]\na = [0.5, 1.0]\n";
        let specs = parse_config(text).unwrap();
        assert_eq!(specs.len(), 18);
        assert_eq!(specs[0].name, "dd_0");
        // `a` is the slowest axis (keys in name order)
        assert_eq!(specs[0].params.a, 0.5);
        assert_eq!(specs[9].params.a, 1.0);
        assert_eq!(specs[1].params.epsilon, 0.2);
        assert_eq!(specs[3].params.delta, 0.0002);
        let hashes: std::collections::BTreeSet<_> = specs.iter().map(|s| s.config_hash()).collect();
        assert_eq!(hashes.len(), 18);
    }

    #[test]
    fn inadmissible_capillarity_is_rejected() {
        let e = parse_config("[dd]\nid = \"dd_equivalence\"\nepsilon = 0.1\ndelta = 0.01\na = 1.0\n").unwrap_err();
        assert!(e.message.contains("A <= 1/4") || e.message.contains("discriminant"), "{e}");
    }

    #[test]
    fn hash_ignores_formatting_but_not_values() {
        let a = parse_config("[x]\nid = \"dispersion\"\nkappa = 1\n").unwrap();
        let b = parse_config("# note\n[y]\nkappa = 1.0\nid = \"dispersion\"\n").unwrap();
        let c = parse_config("[x]\nid = \"dispersion\"\nkappa = 2\n").unwrap();
        assert_eq!(a[0].config_hash(), b[0].config_hash());
        assert_ne!(a[0].config_hash(), c[0].config_hash());
    }

    #[test]
    fn every_id_has_valid_defaults() {
        for id in ExperimentId::ALL {
            let spec = ExperimentSpec::with_defaults("x", id);
            assert_eq!(spec.id, id);
            assert!(spec.echo().starts_with("amplitude") || spec.echo().contains("id = "));
        }
    }

    #[test]
    fn non_section_top_level_is_rejected() {
        let e = parse_config("id = \"dispersion\"\n").unwrap_err();
        assert!(e.message.contains("must be sections"), "{e}");
    }
}
