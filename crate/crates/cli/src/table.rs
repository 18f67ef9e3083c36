//! Row tables with CSV and JSON encodings that agree value for value.

use std::io::Write;

use anyhow::Result;
use serde_json::{Map, Value};

/// Significant digits kept for every floating-point cell.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Decimal text of a rounded value; non-finite values become `inf`, `-inf`
/// or `nan`.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(round_sig(*x)),
            Cell::Num(x) => Value::from(format_num(*x)),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra top-level JSON members (not representable as rows).
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), extra: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, command: &str) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let mut obj = Map::new();
        obj.insert("command".into(), Value::from(command));
        obj.insert("columns".into(), Value::from(self.columns.clone()));
        obj.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.extra {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(format_num(0.1 + 0.2), "0.3");
        assert_eq!(format_num(0.15625), "0.15625");
        assert_eq!(format_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_num(1e-20), "1e-20");
        assert_eq!(format_num(f64::INFINITY), "inf");
        assert_eq!(format_num(-0.0), "0");
        assert_eq!(format_num(2.0f64.sqrt() * 1e6), "1414213.56237");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["a", "b", "c", "d"]);
        t.push(vec![Cell::from(1.0 / 7.0), Cell::from(3usize), Cell::from(true), Cell::from(f64::NAN)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let json = t.to_json("x");
        let row = &json["rows"][0];
        let first: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(row["a"].as_f64().unwrap(), first);
        assert_eq!(row["d"], "nan");
    }
}
