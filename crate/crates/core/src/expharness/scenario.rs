//! Scenario descriptions and their `key=value` text format.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// Default tolerance of `approx` expectations.
pub const DEFAULT_TOLERANCE: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Images and energies of `P(A, B)` for one-dimensional grid sets.
    Growth,
    /// Images of a planar set under three maps forming a 3-web.
    Web,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Growth => "growth",
            Kind::Web => "web",
        }
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "growth" => Ok(Kind::Growth),
            "web" => Ok(Kind::Web),
            _ => Err(format!("unknown kind '{s}' (expected growth or web)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    /// `|measured - target| <= tolerance`
    Approx,
    /// `measured <= target + tolerance`
    Le,
    /// `measured >= target - tolerance`
    Ge,
    Lt,
    Gt,
}

impl Comparator {
    pub fn name(self) -> &'static str {
        match self {
            Comparator::Approx => "approx",
            Comparator::Le => "le",
            Comparator::Ge => "ge",
            Comparator::Lt => "lt",
            Comparator::Gt => "gt",
        }
    }

    pub fn holds(self, measured: f64, target: f64, tol: f64) -> bool {
        match self {
            Comparator::Approx => (measured - target).abs() <= tol,
            Comparator::Le => measured <= target + tol,
            Comparator::Ge => measured >= target - tol,
            Comparator::Lt => measured < target,
            Comparator::Gt => measured > target,
        }
    }
}

impl FromStr for Comparator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "approx" => Comparator::Approx,
            "le" => Comparator::Le,
            "ge" => Comparator::Ge,
            "lt" => Comparator::Lt,
            "gt" => Comparator::Gt,
            _ => return Err(format!("unknown comparator '{s}'")),
        })
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    /// Stated in the source mathematics.
    #[serde(rename = "PAPER")]
    Paper,
    /// Follows immediately from definitions.
    #[serde(rename = "TRIVIAL")]
    Trivial,
    /// Computed independently and frozen.
    #[serde(rename = "DERIVED")]
    Derived,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Paper => "PAPER",
            Provenance::Trivial => "TRIVIAL",
            Provenance::Derived => "DERIVED",
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "PAPER" => Ok(Provenance::Paper),
            "TRIVIAL" => Ok(Provenance::Trivial),
            "DERIVED" => Ok(Provenance::Derived),
            _ => Err(format!("unknown provenance '{s}' (expected PAPER, TRIVIAL or DERIVED)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub metric: String,
    pub comparator: Comparator,
    pub target: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
}

impl Expectation {
    pub fn new(metric: &str, comparator: Comparator, target: f64, provenance: Provenance) -> Self {
        let tolerance = if comparator == Comparator::Approx {
            DEFAULT_TOLERANCE
        } else {
            0.0
        };
        Expectation {
            metric: metric.to_string(),
            comparator,
            target,
            tolerance,
            provenance,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.metric, self.comparator.name(), self.target)?;
        if self.tolerance != 0.0 {
            write!(f, " tol={}", self.tolerance)?;
        }
        write!(f, " {}", self.provenance.name())
    }
}

impl FromStr for Expectation {
    type Err = String;

    /// `<metric> <comparator> <target> [tol=<t>] <PROVENANCE>`
    fn from_str(s: &str) -> Result<Self, String> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() != 4 && toks.len() != 5 {
            return Err(format!("expectation '{s}' must read '<metric> <cmp> <target> [tol=<t>] <PROVENANCE>'"));
        }
        let comparator: Comparator = toks[1].parse()?;
        let target = parse_f64(toks[2])?;
        let provenance: Provenance = toks[toks.len() - 1].parse()?;
        let mut e = Expectation::new(toks[0], comparator, target, provenance);
        if toks.len() == 5 {
            let t = toks[3]
                .strip_prefix("tol=")
                .ok_or(format!("expected tol=<t>, found '{}'", toks[3]))?;
            let tol = parse_f64(t)?;
            if tol < 0.0 {
                return Err(format!("tolerance {tol} is negative"));
            }
            e.tolerance = tol;
        }
        Ok(e)
    }
}

/// Parses a decimal or a fraction `a/b`.
pub fn parse_f64(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad number '{s}'"))?;
            a / b
        }
        None => s.trim().parse().map_err(|_| format!("bad number '{s}'"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

/// A named, parameterized experiment with expected outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub params: BTreeMap<String, String>,
    pub expectations: Vec<Expectation>,
}

impl Scenario {
    pub fn new(name: &str, kind: Kind) -> Self {
        Scenario {
            name: name.to_string(),
            kind,
            params: BTreeMap::new(),
            expectations: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn expect(mut self, e: Expectation) -> Self {
        self.expectations.push(e);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("schema={SCHEMA_VERSION}\nname={}\nkind={}\n", self.name, self.kind.name());
        for (k, v) in &self.params {
            s.push_str(&format!("{k}={v}\n"));
        }
        for e in &self.expectations {
            s.push_str(&format!("expect={e}\n"));
        }
        s
    }

    /// Parses the `key=value` format; `#` starts a comment line.
    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut schema = None;
        let mut name = None;
        let mut kind = None;
        let mut params = BTreeMap::new();
        let mut expectations = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| HarnessError::Parse { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "schema" => {
                    let v: u32 = value.parse().map_err(|_| err(format!("bad schema '{value}'")))?;
                    if v != SCHEMA_VERSION {
                        return Err(err(format!("unsupported schema {v} (expected {SCHEMA_VERSION})")));
                    }
                    schema = Some(v);
                }
                "name" => {
                    if value.is_empty() || !value.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                        return Err(err(format!("bad scenario name '{value}'")));
                    }
                    name = Some(value.to_string());
                }
                "kind" => kind = Some(value.parse::<Kind>().map_err(err)?),
                "expect" => expectations.push(value.parse::<Expectation>().map_err(err)?),
                _ => {
                    if params.insert(key.to_string(), value.to_string()).is_some() {
                        return Err(err(format!("duplicate key '{key}'")));
                    }
                }
            }
        }
        let missing = |what: &str| HarnessError::Parse {
            line: 0,
            message: format!("missing '{what}'"),
        };
        if schema.is_none() {
            return Err(missing("schema"));
        }
        let s = Scenario {
            name: name.ok_or_else(|| missing("name"))?,
            kind: kind.ok_or_else(|| missing("kind"))?,
            params,
            expectations,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks parameter names and that every expectation names a metric this
    /// kind of scenario produces.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let known: &[&str] = match self.kind {
            Kind::Growth => super::run::GROWTH_PARAMS,
            Kind::Web => super::run::WEB_PARAMS,
        };
        if let Some(k) = self.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(HarnessError::InvalidParameter {
                key: k.clone(),
                message: format!("not a parameter of {} scenarios", self.kind.name()),
            });
        }
        let metrics = super::run::metric_names(self);
        for e in &self.expectations {
            if !metrics.iter().any(|m| *m == e.metric) {
                return Err(HarnessError::UnknownMetric {
                    metric: e.metric.clone(),
                    scenario: self.name.clone(),
                });
            }
        }
        Ok(())
    }
}
