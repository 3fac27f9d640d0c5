//! Grid syntax shared by `--threshold` and `--rho`.
//!
//! A grid is either `start:stop:logN`, `start:stop:linN` (N points including
//! both ends) or a comma list. Values must be strictly increasing.

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPoint {
    Value(f64),
    /// Optimize ρ separately at each threshold.
    Optimal,
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let values = if text.contains(':') {
        parse_range(text)?
    } else {
        text.split(',').map(parse_number).collect::<Result<Vec<_>>>()?
    };
    check_increasing(&values, text)?;
    Ok(values)
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::usage(format!("`{s}` is not a finite number"))),
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, spacing] = parts[..] else {
        return Err(CliError::usage(format!("range `{text}` must look like start:stop:logN or start:stop:linN")));
    };
    let (start, stop) = (parse_number(start)?, parse_number(stop)?);
    let spacing = spacing.trim();
    let (log, count) = if let Some(n) = spacing.strip_prefix("log") {
        (true, n)
    } else if let Some(n) = spacing.strip_prefix("lin") {
        (false, n)
    } else {
        return Err(CliError::usage(format!("spacing `{spacing}` must be logN or linN")));
    };
    let n: usize = count
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::usage(format!("point count in `{spacing}` must be a positive integer")))?;
    if n == 1 {
        if start != stop {
            return Err(CliError::usage(format!("range `{text}` has one point but start != stop")));
        }
        return Ok(vec![start]);
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err(CliError::usage(format!("log range `{text}` needs positive ends")));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let f = k as f64 / last;
            match (k, log) {
                (0, _) => start,
                (k, _) if k == n - 1 => stop,
                (_, true) => start * (stop / start).powf(f),
                (_, false) => start + (stop - start) * f,
            }
        })
        .collect())
}

fn check_increasing(values: &[f64], text: &str) -> Result<()> {
    if values.is_empty() {
        return Err(CliError::usage("empty grid"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::usage(format!("grid `{text}` is not strictly increasing")));
    }
    Ok(())
}

/// Thresholds in linear units. With `db`, the grid is read in dB first.
pub fn parse_thresholds(text: &str, db: bool) -> Result<Vec<f64>> {
    let grid = parse_grid(text)?;
    let values: Vec<f64> = if db {
        grid.iter().map(|d| 10f64.powf(d / 10.0)).collect()
    } else {
        grid
    };
    if let Some(bad) = values.iter().find(|&&t| !(t > 0.0 && t.is_finite())) {
        return Err(CliError::usage(format!("threshold {bad} must be positive")));
    }
    Ok(values)
}

/// Policy values in `[0, 1]`, optionally with the keyword `optimal` in the list.
pub fn parse_rho(text: &str) -> Result<Vec<RhoPoint>> {
    let text = text.trim();
    let mut out = Vec::new();
    let mut numeric = Vec::new();
    let mut optimal = false;
    let items: Vec<&str> = if text.contains(':') { vec![text] } else { text.split(',').collect() };
    for item in items {
        if item.trim() == "optimal" {
            if optimal {
                return Err(CliError::usage("`optimal` listed twice"));
            }
            optimal = true;
            out.push(RhoPoint::Optimal);
            continue;
        }
        for v in parse_grid(item)? {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::usage(format!("rho {v} outside [0, 1]")));
            }
            numeric.push(v);
            out.push(RhoPoint::Value(v));
        }
    }
    if !numeric.is_empty() {
        check_increasing(&numeric, text)?;
    }
    Ok(out)
}
