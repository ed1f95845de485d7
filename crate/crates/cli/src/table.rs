//! Small parsing and formatting helpers: grid/list syntax and the
//! CSV/number conventions shared by every subcommand.
//!
//! All floats are printed with Rust's shortest-roundtrip `Display`, so
//! identical inputs produce byte-identical output. CSV is RFC-4180
//! style with '.' decimals and LF endings; every field here is numeric
//! or a fixed word, so no quoting is ever needed.

use crate::CliError;
use quadgap_core::C64;

/// Parse "v", "lo:hi:count" (linear) or "lo:hi:count:log" (geometric,
/// endpoints inclusive in both cases).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Domain(format!("grid '{spec}': {msg}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("'{s}' is not a number")))
    };
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, count] | [lo, hi, count, _] => {
            let log = match parts.get(3) {
                None => false,
                Some(&"log") => true,
                Some(other) => return Err(bad(&format!("unknown suffix '{other}'"))),
            };
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| bad(&format!("'{count}' is not a count")))?;
            if n == 0 {
                return Err(bad("count must be at least 1"));
            }
            if n == 1 {
                return Ok(vec![lo]);
            }
            if log && (lo <= 0.0 || hi <= 0.0) {
                return Err(bad("log spacing needs positive endpoints"));
            }
            let step = if log {
                (hi / lo).powf(1.0 / (n - 1) as f64)
            } else {
                (hi - lo) / (n - 1) as f64
            };
            Ok((0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else if log {
                        lo * step.powi(i as i32)
                    } else {
                        lo + step * i as f64
                    }
                })
                .collect())
        }
        _ => Err(bad("expected 'v', 'lo:hi:count' or 'lo:hi:count:log'")),
    }
}

/// Parse a comma-separated float list, e.g. "1,0.5,-2".
pub fn parse_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Domain(format!("list '{spec}': '{s}' is not a number")))
        })
        .collect()
}

/// Complex scalar as "re+imi" / "re-imi", shortest-roundtrip parts.
pub fn fmt_c(z: C64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

/// Optional float as a CSV field; absent values print empty.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&std::path::Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
