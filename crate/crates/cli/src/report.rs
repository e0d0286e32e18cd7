//! Tabular reports and their JSON-lines / CSV renderings.

use std::io::{self, Write};

use hyperell_core::lfunctions::rational_to_f64;
use hyperell_core::BigRational;
use serde_json::{Map, Value as Json};

/// One cell. Rationals expand to a `name` column holding `num/den` and a
/// `name_float` column.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i128),
    /// Arbitrary-size integer, kept as decimal text.
    BigInt(String),
    Float(f64),
    Rational(BigRational),
    Text(String),
}

impl Value {
    pub fn rational(r: &BigRational) -> Self {
        Value::Rational(r.clone())
    }

    pub fn opt_float(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::Float)
    }

    pub fn opt_bool(x: Option<bool>) -> Self {
        x.map_or(Value::Null, Value::Bool)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::Int(v as i128)
            }
        }
    )*};
}
int_value!(i8, i32, i64, u32, u64, usize, u128);

/// Floats go through serde_json's shortest round-trip formatting; non-finite
/// values become the strings `inf`, `-inf` and `nan`.
fn float_json(x: f64) -> Json {
    serde_json::Number::from_f64(x).map_or_else(
        || {
            Json::String(
                if x.is_nan() {
                    "nan"
                } else if x > 0.0 {
                    "inf"
                } else {
                    "-inf"
                }
                .into(),
            )
        },
        Json::Number,
    )
}

fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Expanded `(column, json)` cells for one value.
fn cells(name: &str, v: &Value) -> Vec<(String, Json)> {
    match v {
        Value::Null => vec![(name.into(), Json::Null)],
        Value::Bool(b) => vec![(name.into(), Json::Bool(*b))],
        Value::Int(i) => vec![(
            name.into(),
            i64::try_from(*i).map_or_else(|_| Json::String(i.to_string()), Json::from),
        )],
        Value::BigInt(s) => vec![(name.into(), Json::String(s.clone()))],
        Value::Float(x) => vec![(name.into(), float_json(*x))],
        Value::Rational(r) => vec![
            (name.into(), Json::String(rational_text(r))),
            (format!("{name}_float"), float_json(rational_to_f64(r))),
        ],
        Value::Text(s) => vec![(name.into(), Json::String(s.clone()))],
    }
}

fn csv_text(j: &Json) -> String {
    match j {
        Json::Null => String::new(),
        Json::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A named table with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    /// Column headers after rational expansion. Rational-ness of a column is
    /// taken from its first non-null cell.
    fn expanded_columns(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in self.columns.iter().enumerate() {
            out.push(c.clone());
            if self.is_rational_column(i) {
                out.push(format!("{c}_float"));
            }
        }
        out
    }

    fn is_rational_column(&self, i: usize) -> bool {
        self.rows
            .iter()
            .map(|r| &r[i])
            .find(|v| !matches!(v, Value::Null))
            .is_some_and(|v| matches!(v, Value::Rational(_)))
    }

    fn expanded_row(&self, row: &[Value]) -> Vec<(String, Json)> {
        let mut out = Vec::new();
        for (i, (c, v)) in self.columns.iter().zip(row).enumerate() {
            if matches!(v, Value::Null) && self.is_rational_column(i) {
                out.push((c.clone(), Json::Null));
                out.push((format!("{c}_float"), Json::Null));
            } else {
                out.extend(cells(c, v));
            }
        }
        out
    }
}

/// Output of one command: provenance plus tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub q: u64,
    pub n: usize,
    /// Echo of the effective configuration, in a fixed key order.
    pub config: Vec<(String, Json)>,
    pub tables: Vec<Table>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub const TOOL: &str = "hyperell";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

impl Report {
    pub fn new(command: &str, q: u64, n: usize) -> Self {
        Self {
            command: command.into(),
            q,
            n,
            config: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn meta(&self) -> Json {
        let mut m = Map::new();
        m.insert("record".into(), "meta".into());
        m.insert("tool".into(), TOOL.into());
        m.insert("version".into(), VERSION.into());
        m.insert("command".into(), self.command.clone().into());
        m.insert("q".into(), self.q.into());
        m.insert("n".into(), self.n.into());
        let cfg: Map<String, Json> = self.config.iter().cloned().collect();
        m.insert("config".into(), Json::Object(cfg));
        Json::Object(m)
    }

    pub fn emit(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => self.emit_json(out),
            Format::Csv => self.emit_csv(out),
        }
    }

    /// One JSON object per line: the meta record, then every row tagged with
    /// its table name under `record`.
    pub fn emit_json(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "{}", self.meta())?;
        for t in &self.tables {
            for row in &t.rows {
                let mut m = Map::new();
                m.insert("record".into(), Json::String(t.name.clone()));
                m.extend(t.expanded_row(row));
                writeln!(out, "{}", Json::Object(m))?;
            }
        }
        Ok(())
    }

    /// `# meta <json>` first; with several tables each is introduced by a
    /// `# table <name>` line. Empty tables still get their header.
    pub fn emit_csv(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# meta {}", self.meta())?;
        let several = self.tables.len() > 1;
        for t in &self.tables {
            if several {
                writeln!(out, "# table {}", t.name)?;
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(t.expanded_columns())?;
            for row in &t.rows {
                w.write_record(t.expanded_row(row).iter().map(|(_, j)| csv_text(j)))?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.write_all(&bytes)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperell_core::BigInt;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rational_rendering() {
        let c = cells("value", &Value::rational(&rat(149, 144)));
        assert_eq!(c[0], ("value".into(), Json::String("149/144".into())));
        let f = c[1].1.as_f64().unwrap();
        assert!((f - 1.0347).abs() < 1e-4);
        assert_eq!(c[1].0, "value_float");
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut r = Report::new("x", 5, 3);
        r.tables.push(Table::new("t", &["a", "b"]));
        let mut buf = Vec::new();
        r.emit_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("# meta {"));
        assert_eq!(lines[1], "a,b");
    }

    #[test]
    fn json_and_csv_agree() {
        let mut r = Report::new("x", 5, 3);
        let mut t = Table::new("t", &["k", "v", "ok", "x", "s"]);
        t.push(vec![1u32.into(), Value::rational(&rat(-3, 7)), true.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![2u32.into(), Value::Null, false.into(), f64::INFINITY.into(), Value::Null]);
        r.tables.push(t);
        let mut js = Vec::new();
        r.emit_json(&mut js).unwrap();
        let mut cs = Vec::new();
        r.emit_csv(&mut cs).unwrap();
        let cs = String::from_utf8(cs).unwrap();
        let body: String = cs.lines().skip(1).map(|l| format!("{l}\n")).collect();
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(header, ["k", "v", "v_float", "ok", "x", "s"]);
        let json_rows: Vec<Json> = String::from_utf8(js)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        for (rec, j) in rd.records().zip(&json_rows) {
            let rec = rec.unwrap();
            for (h, cell) in header.iter().zip(rec.iter()) {
                assert_eq!(csv_text(&j[h.as_str()]), cell, "{h}");
            }
        }
        assert_eq!(json_rows[0]["v"], "-3/7");
        assert_eq!(json_rows[1]["x"], "inf");
    }
}
