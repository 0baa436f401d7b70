//! CSV and JSON rendering.

use std::fmt::Write as _;

use crate::error::CliError;

/// Shortest round-trip decimal, switching to exponent notation outside
/// `[1e-5, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// A CSV column of per-step values.
pub struct Column {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// Per-step table with an `m` column followed by `columns`. Rows run over
/// the shortest column. Non-finite values are a numerical failure.
pub fn trace_csv(columns: &[Column]) -> Result<String, CliError> {
    let rows = columns.iter().map(|c| c.values.len()).min().unwrap_or(0);
    for c in columns {
        if let Some(m) = c.values[..rows].iter().position(|v| !v.is_finite()) {
            return Err(CliError::Numerical(format!("non-finite `{}` at m = {m}", c.name)));
        }
    }
    let mut out = String::from("m");
    for c in columns {
        out.push(',');
        out.push_str(c.name);
    }
    out.push('\n');
    for m in 0..rows {
        write!(out, "{m}").unwrap();
        for c in columns {
            out.push(',');
            out.push_str(&format_float(c.values[m]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `serde_json` would silently write `null` for these.
pub fn finite(x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numerical(format!("non-finite value {x}")))
    }
}
