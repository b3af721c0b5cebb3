//! Tabular output as CSV or JSON, with a fixed float format.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Twelve significant digits; lowercase scientific notation when
/// `|x| < 1e-4` or `|x| ≥ 1e6`; trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string().to_lowercase();
    }
    // the exponent after rounding to 12 digits decides the layout
    let s = format!("{x:.11e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent present");
    let scientific = x.abs() < 1e-4 || x.abs() >= 1e6;
    if scientific {
        return format!("{}e{exponent}", trim_zeros(mantissa));
    }
    let magnitude: i32 = exponent.parse().expect("integer exponent");
    let decimals = (11 - magnitude).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            // round through the text form so JSON and CSV carry the same digits
            Cell::Float(x) => format_float(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Json::Null, Json::Number),
            Cell::Int(n) => Json::from(*n),
            Cell::Bool(b) => Json::Bool(*b),
            Cell::Empty => Json::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, mut out: impl Write) -> Result<()> {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let object: Map<String, Json> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(name, cell)| (name.to_string(), cell.json()))
                    .collect();
                Json::Object(object)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(15.681709850755), "15.6817098508");
        assert_eq!(format_float(7.0), "7");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(-2.5), "-2.5");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_float(1.25e-5), "1.25e-5");
        assert_eq!(format_float(1e-4), "0.0001");
        assert_eq!(format_float(123456.7), "123456.7");
        assert_eq!(format_float(1e6), "1e6");
        assert_eq!(format_float(-3.0e7), "-3e7");
        assert_eq!(format_float(9.9999999999999), "10");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["k", "x", "ok", "maybe"]);
        t.push(vec![
            3u64.into(),
            (1.0f64 / 3.0).into(),
            true.into(),
            Cell::from(None::<f64>),
        ]);
        let mut csv = Vec::new();
        t.write(Format::Csv, &mut csv).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "k,x,ok,maybe\n3,0.333333333333,true,\n"
        );

        let mut json = Vec::new();
        t.write(Format::Json, &mut json).unwrap();
        let parsed: Json = serde_json::from_slice(&json).unwrap();
        assert_eq!(parsed[0]["x"], Json::from(0.333333333333));
        assert_eq!(parsed[0]["maybe"], Json::Null);
        let keys: Vec<_> = parsed[0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["k", "x", "ok", "maybe"]);
    }
}
