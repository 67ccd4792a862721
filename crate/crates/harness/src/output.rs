//! CSV and metadata files for a [`RegretCurve`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::RegretCurve;

pub const CSV_HEADER: &str = "arm,horizon,mean_pulls,se_pulls,is_optimal,target_inv_M,fitted_slope,slope_se";

/// `printf("%.*g", digits, x)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format_sig(v, 9)).unwrap_or_default()
}

/// The CSV text: one row per `(arm, horizon)`, sorted.
pub fn csv_string(curve: &RegretCurve) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut arms: Vec<_> = curve.arms.iter().collect();
    arms.sort_by_key(|a| a.arm);
    for arm in arms {
        let mut points: Vec<_> = arm.points.iter().collect();
        points.sort_by_key(|p| p.horizon);
        for p in points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                arm.arm,
                p.horizon,
                format_sig(p.mean_pulls, 9),
                format_sig(p.se_pulls, 9),
                arm.is_optimal,
                opt(arm.target_inv_m),
                opt(arm.slope.map(|s| s.slope)),
                opt(arm.slope.map(|s| s.se)),
            )
            .expect("writing to a String");
        }
    }
    out
}

/// Path of the JSON metadata written next to `csv_path`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    csv_path.with_file_name(name)
}

/// Writes the CSV and its metadata sidecar.
pub fn emit_csv(curve: &RegretCurve, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, csv_string(curve)).map_err(|e| HarnessError::io(path, e))?;
    let meta_path = metadata_path(path);
    let meta = serde_json::to_string_pretty(&curve.metadata).expect("metadata serializes");
    std::fs::write(&meta_path, meta + "\n").map_err(|e| HarnessError::io(meta_path, e))
}
