use kset_core::scalar::format_f64;

/// Outcome of a bound check attached to a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    None,
    Satisfied,
    /// Within noise of the bound either way.
    Inconclusive,
    Violation,
}

impl Check {
    pub fn exact(ok: bool) -> Check {
        if ok {
            Check::Satisfied
        } else {
            Check::Violation
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Check::None => "",
            Check::Satisfied => "true",
            Check::Inconclusive => "inconclusive",
            Check::Violation => "VIOLATION",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => format_f64(*v),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Value {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Value {
        Value::Float(v)
    }
}

/// One statistic at one grid coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub experiment: &'static str,
    pub source: String,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub r: Option<usize>,
    pub trial: Option<usize>,
    pub statistic: &'static str,
    pub value: Value,
    pub stderr: Option<f64>,
    pub bound: Option<Value>,
    pub check: Check,
    pub seed: u64,
}

pub const HEADER: &str = "experiment,source,n,k,r,trial,statistic,value,stderr,bound,satisfied,seed";

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultRecord {
    pub fn new(experiment: &'static str, source: impl Into<String>, statistic: &'static str, value: impl Into<Value>, seed: u64) -> Self {
        ResultRecord {
            experiment,
            source: source.into(),
            n: None,
            k: None,
            r: None,
            trial: None,
            statistic,
            value: value.into(),
            stderr: None,
            bound: None,
            check: Check::None,
            seed,
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    pub fn trial(mut self, t: usize) -> Self {
        self.trial = Some(t);
        self
    }

    pub fn stderr(mut self, se: f64) -> Self {
        self.stderr = Some(se);
        self
    }

    pub fn bound(mut self, b: impl Into<Value>, check: Check) -> Self {
        self.bound = Some(b.into());
        self.check = check;
        self
    }

    pub fn csv_row(&self) -> String {
        [
            self.experiment.to_string(),
            self.source.clone(),
            opt(self.n),
            opt(self.k),
            opt(self.r),
            opt(self.trial),
            self.statistic.to_string(),
            self.value.render(),
            self.stderr.map(format_f64).unwrap_or_default(),
            self.bound.as_ref().map(Value::render).unwrap_or_default(),
            self.check.as_str().to_string(),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

pub fn to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
