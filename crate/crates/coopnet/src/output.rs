//! CSV rows: `T,rho,method,dpc,coverage,stderr_or_errbound,runtime_ms`.

use std::io::Write;

use coopnet_core::Dpc;

use crate::error::Result;

pub const HEADER: [&str; 7] = ["T", "rho", "method", "dpc", "coverage", "stderr_or_errbound", "runtime_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub threshold: f64,
    pub rho: f64,
    pub method: &'static str,
    pub dpc: Dpc,
    pub coverage: f64,
    pub error: f64,
    pub runtime_ms: f64,
}

pub fn dpc_label(dpc: Dpc) -> &'static str {
    match dpc {
        Dpc::Off => "false",
        Dpc::FullCoop => "true",
        Dpc::BothTerms => "both",
    }
}

/// Ten significant digits, positional where that stays short.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..10).contains(&exp) {
        format!("{:.*}", (9 - exp).max(0) as usize, x)
    } else {
        sci
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[Row], timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let runtime = if timing { sig10(r.runtime_ms) } else { "0".to_string() };
        w.write_record([
            sig10(r.threshold),
            sig10(r.rho),
            r.method.to_string(),
            dpc_label(r.dpc).to_string(),
            sig10(r.coverage),
            sig10(r.error),
            runtime,
        ])?;
    }
    w.flush()?;
    Ok(())
}
