//! Tabular output: fixed 12-significant-digit floats, CSV or JSON, and
//! atomic file writes.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::args::Format;
use crate::error::CliError;

const SIGNIFICANT: usize = 12;

/// `%.12g`: 12 significant digits, trailing zeros dropped, scientific
/// notation outside `[1e-4, 1e12)`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A column header. Logarithmic quantities carry the power of the log
/// unit, so `--bits` can rescale them and rename the header.
#[derive(Debug, Clone)]
pub struct Column {
    name: String,
    log_power: i32,
}

impl Column {
    pub fn plain(name: &str) -> Self {
        Self {
            name: name.into(),
            log_power: 0,
        }
    }

    /// A quantity measured in nats to the given power.
    pub fn nats(name: &str, power: i32) -> Self {
        Self {
            name: name.into(),
            log_power: power,
        }
    }

    fn header(&self, bits: bool) -> String {
        if self.log_power == 0 {
            return self.name.clone();
        }
        let unit = if bits { "bits" } else { "nats" };
        if self.log_power == 1 {
            format!("{}_{unit}", self.name)
        } else {
            format!("{}_{unit}{}", self.name, self.log_power)
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn scaled(&self, col: usize, x: f64, bits: bool) -> f64 {
        let p = self.columns[col].log_power;
        if bits && p != 0 {
            x / std::f64::consts::LN_2.powi(p)
        } else {
            x
        }
    }

    pub fn to_csv(&self, bits: bool) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.header(bits)))?;
        for row in &self.rows {
            let fields: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, cell)| match cell {
                    Cell::Num(x) => format_float(self.scaled(i, *x, bits)),
                    Cell::Int(x) => x.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Empty => String::new(),
                })
                .collect();
            w.write_record(&fields)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    pub fn to_json(&self, bits: bool) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (i, cell) in row.iter().enumerate() {
                    let v = match cell {
                        Cell::Num(x) => json_number(self.scaled(i, *x, bits)),
                        Cell::Int(x) => Value::from(*x),
                        Cell::Text(s) => Value::from(s.clone()),
                        Cell::Bool(b) => Value::from(*b),
                        Cell::Empty => Value::Null,
                    };
                    obj.insert(self.columns[i].header(bits), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format, bits: bool) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(bits),
            Format::Json => render_json(&self.to_json(bits)),
        }
    }
}

/// Rounds to 12 significant digits; non-finite values become null.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format_float(x).parse().expect("formatted float parses");
    Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn render_json(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path` through a temporary file in the same directory, so a
/// failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(std::f64::consts::LN_2), "0.69314718056");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(9.0), "9");
        assert_eq!(format_float(-1234.5), "-1234.5");
        assert_eq!(format_float(1.5e-5), "1.5e-05");
        assert_eq!(format_float(1e-4), "0.0001");
        assert_eq!(format_float(123456789012.0), "123456789012");
        assert_eq!(format_float(1.0e12), "1e+12");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(0.1 + 0.2), "0.3");
    }

    #[test]
    fn bits_rescale_by_power() {
        let mut t = Table::new(vec![Column::plain("n"), Column::nats("H", 1), Column::nats("V", 2)]);
        let l = std::f64::consts::LN_2;
        t.push(vec![Cell::Int(3), Cell::Num(l), Cell::Num(l * l)]);
        let csv = String::from_utf8(t.to_csv(true).unwrap()).unwrap();
        assert_eq!(csv, "n,H_bits,V_bits2\n3,1,1\n");
        let csv = String::from_utf8(t.to_csv(false).unwrap()).unwrap();
        assert_eq!(csv, "n,H_nats,V_nats2\n3,0.69314718056,0.480453013918\n");
    }

    #[test]
    fn json_numbers_are_rounded() {
        assert_eq!(json_number(0.1 + 0.2), Value::from(0.3));
        assert_eq!(json_number(f64::INFINITY), Value::Null);
    }
}
