//! Tabular output shared by the coverage, cube-coverage and quantization
//! commands: one [`SweepRow`] per evaluated `(delta, r)`, written as CSV with
//! a fixed header or as JSON with run metadata.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// CSV header, in column order.
pub const CSV_HEADER: [&str; 9] = ["delta", "value", "stderr", "method", "d", "n", "r", "scheme", "seed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    /// Coverage, or normalized quantization error.
    pub value: f64,
    pub stderr: f64,
    /// `mc`, `approx1`, `approx2`, `closed-form`, ...
    pub method: String,
    pub d: usize,
    pub n: usize,
    /// Ball or cube radius; absent for quantization rows.
    pub r: Option<f64>,
    /// `s1` ... `s7`, or `cube-uniform`.
    pub scheme: String,
    pub seed: u64,
}

/// Run metadata stored next to the rows in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub test_points: u64,
    pub replications: u32,
    pub version: String,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, test_points: u64, replications: u32) -> Self {
        Self {
            command: command.to_string(),
            seed,
            test_points,
            replications,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub provenance: Provenance,
    pub rows: Vec<SweepRow>,
}

/// `x` with 17 significant digits in the style of C's `%.17g`; parsing the
/// result gives back `x` exactly.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant), sign, exp.abs())
    }
}

fn csv_err(e: csv::Error) -> Error {
    invalid(format!("csv: {e}"))
}

/// Rows as CSV text with [`CSV_HEADER`].
pub fn to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record([
            format_g17(row.delta),
            format_g17(row.value),
            format_g17(row.stderr),
            row.method.clone(),
            row.d.to_string(),
            row.n.to_string(),
            row.r.map(format_g17).unwrap_or_default(),
            row.scheme.clone(),
            row.seed.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| invalid(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| invalid(format!("csv: {e}")))
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let s = rec.get(i).ok_or_else(|| invalid(format!("missing column {}", CSV_HEADER[i])))?;
    s.parse().map_err(|_| invalid(format!("bad value '{s}' in column {}", CSV_HEADER[i])))
}

/// Parses CSV written by [`to_csv`].
pub fn from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_HEADER) {
        return Err(invalid(format!("unexpected header: {}", header.iter().collect::<Vec<_>>().join(","))));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let radius = rec.get(6).unwrap_or("");
            Ok(SweepRow {
                delta: parse_field(&rec, 0)?,
                value: parse_field(&rec, 1)?,
                stderr: parse_field(&rec, 2)?,
                method: parse_field(&rec, 3)?,
                d: parse_field(&rec, 4)?,
                n: parse_field(&rec, 5)?,
                r: if radius.is_empty() { None } else { Some(parse_field(&rec, 6)?) },
                scheme: parse_field(&rec, 7)?,
                seed: parse_field(&rec, 8)?,
            })
        })
        .collect()
}

pub fn to_json(output: &SweepOutput) -> Result<String> {
    serde_json::to_string_pretty(output).map_err(|e| invalid(format!("json: {e}")))
}

pub fn from_json(text: &str) -> Result<SweepOutput> {
    serde_json::from_str(text).map_err(|e| invalid(format!("json: {e}")))
}

/// Parses `a:b:step` into the inclusive list `a, a + step, ..., b`.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || invalid(format!("expected start:stop:step, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let (a, b, step) = (v[0], v[1], v[2]);
    if !(a.is_finite() && b.is_finite() && step > 0.0 && b >= a) {
        return Err(invalid(format!("range '{spec}' needs finite start <= stop and step > 0")));
    }
    let m = ((b - a) / step + 1e-9).floor() as usize;
    if m > 1_000_000 {
        return Err(invalid(format!("range '{spec}' has too many points")));
    }
    // multiply rather than accumulate, and snap to the decimal grid
    Ok((0..=m).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect())
}
