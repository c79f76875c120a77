//! Report rendering. A report is a metadata header, a summary of named
//! values and a list of tables; it renders to CSV (comment-prefixed header,
//! one block per table) or to a single JSON document.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `%.12g`: 12 significant digits, trailing zeros trimmed, exponent form
/// outside `[1e-5, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_g(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => {
                let s = fmt_g(*x);
                s.parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::String(s), Value::Number)
            }
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub subcommand: String,
    pub seed: u64,
    pub params: Vec<(String, String)>,
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        Report { subcommand: subcommand.into(), seed, params: Vec::new(), summary: Vec::new(), tables: Vec::new() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    pub fn value(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# bellctx {VERSION}").unwrap();
        writeln!(out, "# subcommand: {}", self.subcommand).unwrap();
        writeln!(out, "# seed: {}", self.seed).unwrap();
        for (k, v) in &self.params {
            writeln!(out, "# param {k}: {v}").unwrap();
        }
        let mut blocks = Vec::new();
        if !self.summary.is_empty() {
            let mut t = Table::new("summary", &["quantity", "value"]);
            for (k, v) in &self.summary {
                t.push(vec![Cell::Text(k.clone()), v.clone()]);
            }
            blocks.push(t);
        }
        blocks.extend(self.tables.iter().cloned());
        for t in &blocks {
            out.push('\n');
            writeln!(out, "# table: {}", t.name).unwrap();
            writeln!(out, "{}", t.columns.join(",")).unwrap();
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        out
    }

    fn json(&self) -> String {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let tables: Map<String, Value> = self
            .tables
            .iter()
            .map(|t| {
                let rows: Vec<Value> = t.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                (t.name.clone(), json!({ "columns": t.columns, "rows": rows }))
            })
            .collect();
        let doc = json!({
            "metadata": {
                "tool": "bellctx",
                "version": VERSION,
                "subcommand": self.subcommand,
                "seed": self.seed,
                "params": params,
            },
            "summary": summary,
            "tables": tables,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable report");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_g(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-0.25), "-0.25");
        assert_eq!(fmt_g(1e-7), "1e-07");
        assert_eq!(fmt_g(1.5e15), "1.5e+15");
        assert_eq!(fmt_g(123456.0), "123456");
        assert_eq!(fmt_g(-1e-20), "-1e-20");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(-0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::new("demo", 7);
        r.param("grid", "0,1");
        r.value("joint exists", "feasible");
        let mut t = Table::new("rows", &["x", "y"]);
        t.push(vec![1.0.into(), "a,b".into()]);
        r.tables.push(t);
        let s = r.render(Format::Csv);
        assert!(s.starts_with("# bellctx "));
        assert!(s.contains("# seed: 7\n"));
        assert!(s.contains("joint exists,feasible\n"));
        assert!(s.contains("1,\"a,b\"\n"));
        let j: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(j["metadata"]["seed"], 7);
        assert_eq!(j["summary"]["joint exists"], "feasible");
    }
}
