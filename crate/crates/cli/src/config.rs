//! Experiment configuration: JSON in, a typed config or the full list of
//! problems out.

use std::fmt;
use std::path::Path;

use kset_core::curves::{Curve, CurveFamily};
use kset_core::dist::DistributionSpec;
use kset_core::generators::Generator;
use kset_core::scalar::parse_rational;
use kset_core::tc::scaling::ScalingStatistic;
use kset_core::tc::BodySpec;
use kset_core::Rational;
use num_traits::{One, Signed};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    KEdges,
    Chains,
    Expected,
    CurveIntersect,
    Question1,
    TcCount,
    TcScaling,
    Growth,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::KEdges,
        Kind::Chains,
        Kind::Expected,
        Kind::CurveIntersect,
        Kind::Question1,
        Kind::TcCount,
        Kind::TcScaling,
        Kind::Growth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::KEdges => "kedges",
            Kind::Chains => "chains",
            Kind::Expected => "expected",
            Kind::CurveIntersect => "curve-intersect",
            Kind::Question1 => "question1",
            Kind::TcCount => "tc-count",
            Kind::TcScaling => "tc-scaling",
            Kind::Growth => "growth",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Fields each kind reads beyond the common ones, required first.
    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Kind::KEdges => (&["n"], &["generator"]),
            Kind::Chains => (&["n"], &["k", "generator", "lines"]),
            Kind::Expected => (&["distribution", "n", "k"], &["pairs"]),
            Kind::CurveIntersect => (&["curve", "n", "k"], &["generator"]),
            Kind::Question1 => (&["n", "r", "budget"], &["k", "generators", "families"]),
            Kind::TcCount => (&["body", "n"], &["half_side", "grid_bits"]),
            Kind::TcScaling => (&["n"], &["rho", "half_side", "grid_bits", "statistic"]),
            Kind::Growth => (&["body", "n"], &["half_side", "grid_bits"]),
        }
    }
}

const COMMON: [&str; 5] = ["experiment", "seed", "trials", "output", "workers"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub seed: u64,
    pub trials: usize,
    pub output: Option<String>,
    pub workers: Option<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    /// Fixed level for question1; drawn per trial when absent.
    pub fixed_k: Option<usize>,
    pub r: Vec<usize>,
    pub pairs: usize,
    pub lines: usize,
    pub budget: usize,
    pub generator: Generator,
    pub generators: Vec<Generator>,
    pub families: Vec<CurveFamily>,
    pub distribution: Option<DistributionSpec>,
    pub body: Option<BodySpec>,
    pub curve: Option<Curve>,
    pub rho: Rational,
    pub half_side: Option<Rational>,
    pub grid_bits: Option<u32>,
    pub statistic: ScalingStatistic,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config file not found: {0}")]
    FileNotFound(String),
    #[error("cannot read {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("invalid config {path}: {}", .violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    ConfigInvalid { path: String, violations: Vec<Violation> },
}

pub fn read_json(path: &Path) -> Result<Value, ConfigError> {
    let shown = path.display().to_string();
    if !path.exists() {
        return Err(ConfigError::FileNotFound(shown));
    }
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable { path: shown.clone(), message: e.to_string() })?;
    serde_json::from_str(&text).map_err(|e| ConfigError::ConfigInvalid {
        path: shown,
        violations: vec![Violation { field: "<document>".into(), message: e.to_string() }],
    })
}

struct Checker<'a> {
    obj: &'a Map<String, Value>,
    out: Vec<Violation>,
}

impl<'a> Checker<'a> {
    fn bad(&mut self, field: &str, message: impl Into<String>) {
        self.out.push(Violation { field: field.into(), message: message.into() });
    }

    fn uint(&mut self, field: &str, min: u64) -> Option<u64> {
        let v = self.obj.get(field)?;
        match v.as_u64() {
            Some(x) if x >= min => Some(x),
            Some(_) => {
                self.bad(field, format!("{field} ≥ {min}"));
                None
            }
            None => {
                self.bad(field, format!("expected a non-negative integer, found {v}"));
                None
            }
        }
    }

    fn grid(&mut self, field: &str, min: u64) -> Vec<usize> {
        let Some(v) = self.obj.get(field) else { return Vec::new() };
        let Some(items) = v.as_array() else {
            self.bad(field, "expected an array of integers");
            return Vec::new();
        };
        if items.is_empty() {
            self.bad(field, "grid must be non-empty");
        }
        let mut out = Vec::new();
        for (i, x) in items.iter().enumerate() {
            match x.as_u64() {
                Some(x) if x >= min => out.push(x as usize),
                _ => self.bad(&format!("{field}[{i}]"), format!("expected an integer ≥ {min}, found {x}")),
            }
        }
        out
    }

    fn rational(&mut self, field: &str) -> Option<Rational> {
        let v = self.obj.get(field)?;
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => {
                self.bad(field, format!("expected a rational, found {other}"));
                return None;
            }
        };
        match parse_rational(&text) {
            Ok(r) if r.is_positive() => Some(r),
            Ok(_) => {
                self.bad(field, format!("{field} > 0"));
                None
            }
            Err(e) => {
                self.bad(field, e.to_string());
                None
            }
        }
    }

    fn typed<T: DeserializeOwned>(&mut self, field: &str) -> Option<T> {
        let v = self.obj.get(field)?;
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.bad(field, e.to_string());
                None
            }
        }
    }
}

fn parse_curve_terms(c: &mut Checker<'_>) -> Option<Curve> {
    let v = c.obj.get("curve")?;
    let Some(items) = v.as_array() else {
        c.bad("curve", "expected an array of [i, j, coefficient] terms");
        return None;
    };
    let mut terms = Vec::new();
    for (idx, t) in items.iter().enumerate() {
        let field = format!("curve[{idx}]");
        let parsed = t.as_array().filter(|a| a.len() == 3).and_then(|a| {
            let i = a[0].as_u64()? as usize;
            let j = a[1].as_u64()? as usize;
            let text = match &a[2] {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return None,
            };
            Some((i, j, parse_rational(&text).ok()?))
        });
        match parsed {
            Some(term) => terms.push(term),
            None => c.bad(&field, format!("expected [i, j, coefficient], found {t}")),
        }
    }
    let curve = Curve::from_terms(terms);
    if curve.is_zero() {
        c.bad("curve", "the zero polynomial does not define a curve");
        return None;
    }
    Some(curve)
}

/// Checks a config document. `expected` is the subcommand being run, if
/// any. Every problem found is reported.
pub fn validate(value: &Value, expected: Option<Kind>) -> Result<ExperimentConfig, Vec<Violation>> {
    let Some(obj) = value.as_object() else {
        return Err(vec![Violation { field: "<document>".into(), message: "expected a JSON object".into() }]);
    };
    let mut c = Checker { obj, out: Vec::new() };

    let kind = match obj.get("experiment") {
        None => {
            c.bad("experiment", "missing");
            None
        }
        Some(Value::String(s)) => match Kind::parse(s) {
            Some(k) => Some(k),
            None => {
                let known: Vec<&str> = Kind::ALL.iter().map(|k| k.as_str()).collect();
                c.bad("experiment", format!("unknown experiment kind `{s}` (expected one of {})", known.join(", ")));
                None
            }
        },
        Some(other) => {
            c.bad("experiment", format!("expected a string, found {other}"));
            None
        }
    };
    if let (Some(k), Some(e)) = (kind, expected) {
        if k != e {
            c.bad("experiment", format!("config describes `{}` but `{}` was requested", k.as_str(), e.as_str()));
        }
    }
    if !obj.contains_key("seed") {
        c.bad("seed", "missing (a seed is required)");
    }
    let seed = c.uint("seed", 0);
    let trials = c.uint("trials", 1).unwrap_or(1) as usize;
    let output = match obj.get("output") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => {
            c.bad("output", format!("expected a path string, found {other}"));
            None
        }
    };
    let workers = c.uint("workers", 1).map(|w| w as usize);

    let check_kind = kind.or(expected);
    if let Some(kind) = check_kind {
        let (required, optional) = kind.fields();
        for f in required {
            if !obj.contains_key(*f) {
                c.bad(f, format!("required by experiment `{}`", kind.as_str()));
            }
        }
        for key in obj.keys() {
            let key = key.as_str();
            if COMMON.contains(&key) || required.contains(&key) || optional.contains(&key) {
                continue;
            }
            let used_elsewhere = Kind::ALL.iter().any(|k| {
                let (r, o) = k.fields();
                r.contains(&key) || o.contains(&key)
            });
            if used_elsewhere {
                c.bad(key, format!("not used by experiment `{}`", kind.as_str()));
            } else {
                c.bad(key, "unknown field");
            }
        }
    }

    let min_n = match check_kind {
        Some(Kind::Growth | Kind::TcCount) => 1,
        Some(Kind::Expected) => 2,
        _ => 3,
    };
    let n = c.grid("n", min_n);
    // question1 takes one fixed level; elsewhere k is a grid
    let (k, fixed_k) = if check_kind == Some(Kind::Question1) {
        (Vec::new(), c.uint("k", 0).map(|k| k as usize))
    } else {
        (c.grid("k", 0), None)
    };
    let r = c.grid("r", 1);
    let pairs = c.uint("pairs", 1).unwrap_or(100_000) as usize;
    let lines = c.uint("lines", 1).unwrap_or(20) as usize;
    let budget = c.uint("budget", 1).unwrap_or(1) as usize;
    let grid_bits = c.uint("grid_bits", 1).map(|b| b as u32);
    if let Some(b) = grid_bits {
        if b > 40 {
            c.bad("grid_bits", "grid_bits ≤ 40");
        }
    }
    let generator = c.typed("generator").unwrap_or(Generator::Uniform);
    let generators: Vec<Generator> = c.typed("generators").unwrap_or_else(|| Generator::ALL.to_vec());
    let families: Vec<CurveFamily> = c.typed("families").unwrap_or_else(|| CurveFamily::ALL.to_vec());
    if generators.is_empty() {
        c.bad("generators", "grid must be non-empty");
    }
    if families.is_empty() {
        c.bad("families", "grid must be non-empty");
    }
    let statistic = c.typed("statistic").unwrap_or(ScalingStatistic::Sets);
    let distribution: Option<DistributionSpec> = c.typed("distribution");
    if let Some(d) = &distribution {
        if let Err(e) = d.validate() {
            c.bad("distribution", e.to_string());
        } else if !d.has_closed_form() {
            c.bad("distribution", "the formula method needs a closed-form halfplane measure");
        }
    }
    let body: Option<BodySpec> = c.typed("body");
    if let Some(b) = &body {
        if let Err(e) = b.validate() {
            c.bad("body", e.to_string());
        }
    }
    let curve = parse_curve_terms(&mut c);
    let rho = c.rational("rho").unwrap_or_else(Rational::one);
    let half_side = c.rational("half_side");

    if check_kind == Some(Kind::Expected) && !n.is_empty() && !k.is_empty() {
        let admissible = n.iter().any(|&n| k.iter().any(|&k| k <= (n - 2) / 2));
        if !admissible {
            c.bad("k", "no (n, k) pair in the grids satisfies k ≤ (n−2)/2");
        }
    }
    if matches!(check_kind, Some(Kind::Chains | Kind::CurveIntersect)) {
        let max_n = n.iter().copied().max().unwrap_or(0);
        for (i, &kv) in k.iter().enumerate() {
            if max_n >= 2 && kv > max_n - 2 {
                c.bad(&format!("k[{i}]"), format!("k ≤ n−2 fails for every n in the grid (k = {kv})"));
            }
        }
    }
    if let Some(kv) = fixed_k {
        if n.iter().any(|&n| kv > n - 2) {
            c.bad("k", format!("k ≤ n−2 fails for some n in the grid (k = {kv})"));
        }
    }
    if check_kind == Some(Kind::TcCount) || check_kind == Some(Kind::Growth) {
        if n.iter().any(|&n| n > kset_core::tc::SET_LIMIT) {
            c.bad("n", format!("n ≤ {}", kset_core::tc::SET_LIMIT));
        }
    }

    if !c.out.is_empty() {
        return Err(c.out);
    }
    Ok(ExperimentConfig {
        kind: kind.expect("checked"),
        seed: seed.expect("checked"),
        trials,
        output,
        workers,
        n,
        k,
        fixed_k,
        r,
        pairs,
        lines,
        budget,
        generator,
        generators,
        families,
        distribution,
        body,
        curve,
        rho,
        half_side,
        grid_bits,
        statistic,
    })
}
