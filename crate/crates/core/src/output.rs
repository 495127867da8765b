//! Deterministic text encodings: density CSVs, rate estimates as JSON lines
//! or CSV, and chain trajectories.
//!
//! Floats are written with 15 significant digits in the style of C's
//! `%.15g`, independent of locale. JSON records carry values rounded to 15
//! significant digits and then printed in shortest round-trip form.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::chain::ChainStep;
use crate::density::DensityGrid;
use crate::mc::RateEstimate;
use crate::Result;

const SIG_DIGITS: i32 = 15;

/// `%.15g`: fixed notation for decimal exponents in `-4..15`, scientific
/// otherwise, trailing zeros removed.
pub fn fmt_sig15(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS).contains(&exp) {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `v` rounded to 15 significant digits.
pub fn round_sig15(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", (SIG_DIGITS - 1) as usize, v)
        .parse()
        .expect("round trip of formatted float")
}

pub fn density_csv(grid: &DensityGrid) -> String {
    let mut out = String::from("abscissa,value\n");
    for (x, v) in grid.abscissae().zip(&grid.values) {
        out.push_str(&fmt_sig15(x));
        out.push(',');
        out.push_str(&fmt_sig15(*v));
        out.push('\n');
    }
    out
}

pub fn write_density_csv(path: &Path, grid: &DensityGrid) -> Result<()> {
    std::fs::write(path, density_csv(grid))?;
    Ok(())
}

/// One JSON object, without a trailing newline.
pub fn estimate_json(e: &RateEstimate) -> Result<String> {
    let rounded = RateEstimate {
        value: round_sig15(e.value),
        std_error: round_sig15(e.std_error),
        ..e.clone()
    };
    Ok(serde_json::to_string(&rounded)?)
}

pub const ESTIMATE_CSV_HEADER: &str = "family,method,value,uncertainty,n_steps,n_shards,seed";

pub fn estimate_csv_row(e: &RateEstimate) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        e.family,
        e.method,
        fmt_sig15(e.value),
        fmt_sig15(e.std_error),
        e.n_steps,
        e.n_shards,
        e.seed
    )
}

/// Appends one JSON line per estimate, creating the file if needed.
pub fn append_json_lines(path: &Path, estimates: &[RateEstimate]) -> Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = BufWriter::new(file);
    for e in estimates {
        writeln!(w, "{}", estimate_json(e)?)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a CSV of estimates, header included, replacing any existing file.
pub fn write_estimates_csv(path: &Path, estimates: &[RateEstimate]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{ESTIMATE_CSV_HEADER}")?;
    for e in estimates {
        writeln!(w, "{}", estimate_csv_row(e))?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `n,lambda,delta` for `n = 1, 2, ...`.
pub fn write_trajectory_csv(path: &Path, steps: impl IntoIterator<Item = ChainStep>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "n,lambda,delta")?;
    for (i, s) in steps.into_iter().enumerate() {
        writeln!(
            w,
            "{},{},{}",
            i + 1,
            fmt_sig15(s.lambda),
            fmt_sig15(s.delta)
        )?;
    }
    w.flush()?;
    Ok(())
}
