use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::{Number, Value};

use super::scenario::{Expectation, Kind};
use crate::gridset::ExponentFit;

/// Significant digits used when printing floating-point values.
pub const DEFAULT_PRECISION: usize = 6;

/// Per-scale measurements; one row per scale, first column `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&v| format_sig(v, precision)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Two-column `k value` data for one column, `#`-commented header.
    pub fn to_gnuplot(&self, column: &str, precision: usize) -> Option<String> {
        let c = self.columns.iter().position(|n| n == column)?;
        let mut s = format!("# {} {}\n", self.columns[0], column);
        for r in &self.rows {
            writeln!(s, "{} {}", format_sig(r[0], precision), format_sig(r[c], precision)).unwrap();
        }
        Some(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub expectation: Expectation,
    /// `None` if the run did not produce the metric.
    pub measured: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    /// Cells, cell pairs or sample points processed.
    pub cells: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: String,
    pub kind: Kind,
    pub params: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    pub fits: BTreeMap<String, ExponentFit>,
    pub metrics: BTreeMap<String, f64>,
    pub outcomes: Vec<Outcome>,
    pub stats: Stats,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json_value(&self, precision: usize) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut v, precision);
        v
    }

    pub fn to_json(&self, precision: usize) -> String {
        serde_json::to_string_pretty(&self.to_json_value(precision)).expect("report serializes")
    }

    pub fn to_text(&self, precision: usize) -> String {
        let mut s = format!("scenario {} ({})\n", self.scenario, self.kind.name());
        for t in &self.tables {
            writeln!(s, "\n[{}]", t.name).unwrap();
            s.push_str(&t.to_csv(precision).replace(',', "\t"));
        }
        s.push_str("\n[fits]\n");
        for (name, f) in &self.fits {
            writeln!(
                s,
                "{name}\tslope={}\tintercept={}\tresidual={}",
                format_sig(f.slope, precision),
                format_sig(f.intercept, precision),
                format_sig(f.residual, precision)
            )
            .unwrap();
        }
        s.push_str("\n[metrics]\n");
        for (name, v) in &self.metrics {
            writeln!(s, "{name}\t{}", format_sig(*v, precision)).unwrap();
        }
        s.push_str("\n[expectations]\n");
        for o in &self.outcomes {
            let m = o.measured.map_or("missing".to_string(), |m| format_sig(m, precision));
            writeln!(s, "{}\t{}\tmeasured={m}", if o.passed { "PASS" } else { "FAIL" }, o.expectation).unwrap();
        }
        s
    }

    /// Gnuplot data files `<scenario>_<table>_<column>.dat` for every
    /// non-`k` column.
    pub fn gnuplot_files(&self, precision: usize) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for t in &self.tables {
            for c in t.columns.iter().skip(1) {
                if let Some(d) = t.to_gnuplot(c, precision) {
                    out.push((format!("{}_{}_{}.dat", self.scenario, t.name, c), d));
                }
            }
        }
        out
    }
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reads back as the rounded value.
pub fn format_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let r = round_sig(v, digits);
    if r == 0.0 {
        return "0".to_string();
    }
    r.to_string()
}

fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.max(1) - 1, v).parse().unwrap_or(v)
}

fn round_floats(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().unwrap_or(0.0), digits);
            *v = if r.fract() == 0.0 && r.abs() < 9.0e15 {
                Value::Number(Number::from(r as i64))
            } else {
                Number::from_f64(r).map_or(Value::Null, Value::Number)
            };
        }
        Value::Array(a) => a.iter_mut().for_each(|x| round_floats(x, digits)),
        Value::Object(o) => o.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}
