//! Row-oriented output tables with CSV and JSON writers.
//!
//! Reals are written in scientific notation with 17 significant digits, which
//! round-trips every finite `f64`. Non-finite reals become `NaN`/`inf`/`-inf`
//! in CSV and `null` in JSON.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Null, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
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

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::OutOfRange(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column, `None` for non-numeric cells.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| Error::OutOfRange(format!("csv output failed: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::OutOfRange(format!("csv output failed: {e}")))?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::OutOfRange(format!("json output failed: {e}"));
        serde_json::to_writer_pretty(&mut out, &self.to_json())
            .map_err(|e| Error::OutOfRange(format!("json output failed: {e}")))?;
        out.write_all(b"\n").map_err(io)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("writers emit utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["phi", "n", "ok", "label", "missing"]);
        t.push(vec![0.1.into(), 3usize.into(), true.into(), "a,b".into(), Cell::Null])
            .unwrap();
        t.push(vec![
            f64::NAN.into(),
            0usize.into(),
            false.into(),
            "c".into(),
            None.into(),
        ])
        .unwrap();
        t
    }

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 5e-324, f64::MAX, -2.5e-10, 0.0] {
            assert_eq!(format_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    proptest::proptest! {
        #[test]
        fn any_finite_real_round_trips(bits in proptest::prelude::any::<u64>()) {
            let x = f64::from_bits(bits);
            proptest::prop_assume!(x.is_finite());
            proptest::prop_assert_eq!(format_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "phi,n,ok,label,missing");
        assert_eq!(lines[1], "1.0000000000000001e-1,3,true,\"a,b\",");
        assert_eq!(lines[2], "NaN,0,false,c,");
    }

    #[test]
    fn json_objects_share_field_names() {
        let v = sample().to_json();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        let keys: Vec<_> = rows[0].as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["phi", "n", "ok", "label", "missing"]);
        assert_eq!(rows[0]["phi"], Value::from(0.1));
        assert!(rows[1]["phi"].is_null());
    }

    #[test]
    fn width_mismatch_rejected() {
        let mut t = Table::new(["a"]);
        assert!(t.push(vec![1.0.into(), 2.0.into()]).is_err());
    }

    #[test]
    fn column_extraction() {
        let t = sample();
        assert_eq!(t.column("n").unwrap(), vec![Some(3.0), Some(0.0)]);
        assert!(t.column("nope").is_none());
    }
}
