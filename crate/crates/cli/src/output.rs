use serde_json::{Map, Number, Value};

use explab_core::expharness::{format_sig, Report};

use crate::args::Format;

#[derive(Clone, Debug)]
pub enum Val {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    List(Vec<u64>),
}

impl Val {
    fn json(&self, precision: usize) -> Value {
        match self {
            Val::Int(n) => i64::try_from(*n).map_or_else(|_| Value::String(n.to_string()), |n| n.into()),
            Val::Float(v) => {
                let r: f64 = format_sig(*v, precision).parse().unwrap_or(*v);
                Number::from_f64(r).map_or(Value::Null, Value::Number)
            }
            Val::Text(s) => Value::String(s.clone()),
            Val::Bool(b) => Value::Bool(*b),
            Val::List(v) => v.iter().map(|&n| Value::from(n)).collect(),
        }
    }

    fn plain(&self, precision: usize) -> String {
        match self {
            Val::Int(n) => n.to_string(),
            Val::Float(v) => format_sig(*v, precision),
            Val::Text(s) => s.clone(),
            Val::Bool(b) => b.to_string(),
            Val::List(v) => v.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
        }
    }
}

/// Named values with an optional block appended to text output.
#[derive(Debug, Default)]
pub struct Record {
    pub fields: Vec<(&'static str, Val)>,
    pub body: Option<String>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn with(mut self, key: &'static str, v: Val) -> Self {
        self.fields.push((key, v));
        self
    }

    pub fn int(self, key: &'static str, v: impl Into<i128>) -> Self {
        self.with(key, Val::Int(v.into()))
    }

    pub fn float(self, key: &'static str, v: f64) -> Self {
        self.with(key, Val::Float(v))
    }

    pub fn text(self, key: &'static str, v: impl ToString) -> Self {
        self.with(key, Val::Text(v.to_string()))
    }

    pub fn body(mut self, b: String) -> Self {
        self.body = Some(b);
        self
    }
}

#[derive(Debug)]
pub enum Output {
    Record(Record),
    Rows { columns: Vec<&'static str>, rows: Vec<Vec<Val>> },
    Report(Box<Report>),
}

fn csv_cell(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

impl Output {
    pub fn render(&self, format: Format, precision: usize) -> String {
        match (self, format) {
            (Output::Report(r), Format::Json) => r.to_json(precision) + "\n",
            (Output::Report(r), Format::Text) => r.to_text(precision),
            (Output::Report(r), Format::Csv) => r.table("main").map_or_else(String::new, |t| t.to_csv(precision)),
            (Output::Record(rec), Format::Json) => {
                let obj: Map<String, Value> =
                    rec.fields.iter().map(|(k, v)| (k.to_string(), v.json(precision))).collect();
                serde_json::to_string_pretty(&Value::Object(obj)).expect("json") + "\n"
            }
            (Output::Record(rec), Format::Csv) => {
                let head: Vec<&str> = rec.fields.iter().map(|(k, _)| *k).collect();
                let row: Vec<String> = rec.fields.iter().map(|(_, v)| csv_cell(v.plain(precision))).collect();
                format!("{}\n{}\n", head.join(","), row.join(","))
            }
            (Output::Record(rec), Format::Text) => {
                let mut s: String = rec
                    .fields
                    .iter()
                    .map(|(k, v)| format!("{k}: {}\n", v.plain(precision)))
                    .collect();
                if let Some(b) = &rec.body {
                    s.push_str(b);
                    if !b.ends_with('\n') {
                        s.push('\n');
                    }
                }
                s
            }
            (Output::Rows { columns, rows }, Format::Json) => {
                let arr: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        Value::Object(
                            columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json(precision))).collect(),
                        )
                    })
                    .collect();
                serde_json::to_string_pretty(&Value::Array(arr)).expect("json") + "\n"
            }
            (Output::Rows { columns, rows }, f) => {
                let sep = if f == Format::Csv { "," } else { "\t" };
                let mut s = columns.join(sep) + "\n";
                for r in rows {
                    let cells: Vec<String> = r
                        .iter()
                        .map(|v| if f == Format::Csv { csv_cell(v.plain(precision)) } else { v.plain(precision) })
                        .collect();
                    s.push_str(&cells.join(sep));
                    s.push('\n');
                }
                s
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_formats() {
        let r = Output::Record(Record::new().int("count", 6).float("ratio", 2.0f64.sqrt()).text("poly", "x, y"));
        assert_eq!(r.render(Format::Csv, 3), "count,ratio,poly\n6,1.41,\"x, y\"\n");
        assert_eq!(r.render(Format::Text, 3), "count: 6\nratio: 1.41\npoly: x, y\n");
        let v: Value = serde_json::from_str(&r.render(Format::Json, 3)).unwrap();
        assert_eq!(v["ratio"], 1.41);
        assert_eq!(v["count"], 6);
    }

    #[test]
    fn rows_formats() {
        let r = Output::Rows {
            columns: vec!["name", "n"],
            rows: vec![vec![Val::Text("a".into()), Val::Int(1)], vec![Val::Text("b".into()), Val::Int(2)]],
        };
        assert_eq!(r.render(Format::Csv, 6), "name,n\na,1\nb,2\n");
        assert_eq!(r.render(Format::Text, 6), "name\tn\na\t1\nb\t2\n");
    }
}
