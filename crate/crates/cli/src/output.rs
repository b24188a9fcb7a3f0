//! CSV (with a `#` metadata header) and JSON writers.

use serde_json::{json, Map, Value};

use crate::experiments::{Cell, Dataset};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`], trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(i) => json!(i),
        Cell::Float(x) => format_float(*x)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Text(s) => json!(s),
        Cell::Missing => Value::Null,
    }
}

pub fn to_csv(d: &Dataset) -> Result<Vec<u8>, csv::Error> {
    let mut out = Vec::new();
    for (k, v) in &d.metadata {
        out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&d.columns)?;
    for row in &d.rows {
        w.write_record(row.iter().map(cell_text))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn to_json(d: &Dataset) -> Vec<u8> {
    let metadata: Map<String, Value> = d.metadata.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let rows: Vec<Value> = d
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(cell_json).collect()))
        .collect();
    let doc = json!({ "metadata": metadata, "columns": d.columns, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values are serializable");
    s.push('\n');
    s.into_bytes()
}
