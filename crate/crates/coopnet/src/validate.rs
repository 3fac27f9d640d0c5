//! Invariant checks behind `coopnet validate`.

use coopnet_core::channel::{z_laplace, z_mean, ZLaplaceParams};
use coopnet_core::interference::{interference_laplace, interference_mean};
use coopnet_core::{coverage_probability, optimize_rho, reference_nocoop_coverage, Complex64, Dpc};
use rayon::prelude::*;

use crate::cli::RunSpec;
use crate::grid::RhoPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::new(name, false, format!("error: {err}"))
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}", self.name, self.detail)
    }
}

const R1: f64 = 0.3;
const R2: f64 = 0.5;
const FD_STEP: f64 = 1e-6;

fn transforms(spec: &RunSpec, rhos: &[f64]) -> Vec<Check> {
    let p = &spec.params;
    let mut out = Vec::new();
    let zero = Complex64::new(0.0, 0.0);
    match ZLaplaceParams::from_distances(R1, R2, p.p, p.beta) {
        Err(e) => out.push(Check::failed("z transform", e)),
        Ok(zp) => {
            let at0 = z_laplace(zero, &zp).map(|v| (v - 1.0).norm());
            out.push(match at0 {
                Ok(d) => Check::new("z transform at 0", d < 1e-12, format!("|L_Z(0) - 1| = {d:.1e}")),
                Err(e) => Check::failed("z transform at 0", e),
            });
            let slope = z_laplace(Complex64::new(FD_STEP, 0.0), &zp).map(|v| (1.0 - v.re) / FD_STEP);
            out.push(match slope {
                Ok(s) => {
                    let rel = (s / z_mean(&zp) - 1.0).abs();
                    Check::new("z mean from slope", rel < 1e-3, format!("relative error {rel:.1e}"))
                }
                Err(e) => Check::failed("z mean from slope", e),
            });
        }
    }
    // Equal distances: a lone station against half the coherent pair.
    let mut worst = f64::INFINITY;
    let mut err = None;
    for mu in [0.1, 1.0, 16.0] {
        let zp = ZLaplaceParams::new(mu, mu).expect("positive");
        for k in 0..30 {
            let s = 10f64.powf(-3.0 + 6.0 * k as f64 / 29.0);
            match z_laplace(Complex64::new(s / 2.0, 0.0), &zp) {
                Ok(lz) => worst = worst.min(1.0 / (1.0 + s / mu) - lz.re),
                Err(e) => err = Some(e),
            }
        }
    }
    out.push(match err {
        Some(e) => Check::failed("exponential dominates half z", e),
        None => Check::new("exponential dominates half z", worst >= 0.0, format!("min margin {worst:.2e}")),
    });
    for &rho in rhos {
        let name = format!("interference transform at rho={rho}");
        let checks = interference_laplace(zero, rho, R2, p).and_then(|l0| {
            let l = interference_laplace(Complex64::new(FD_STEP, 0.0), rho, R2, p)?;
            Ok(((l0 - 1.0).norm(), (1.0 - l.re) / FD_STEP / interference_mean(R2, p)? - 1.0))
        });
        out.push(match checks {
            Ok((d, rel)) => Check::new(
                name,
                d < 1e-12 && rel.abs() < 1e-3,
                format!("|L_I(0) - 1| = {d:.1e}, slope vs mean {:.1e}", rel.abs()),
            ),
            Err(e) => Check::failed(name, e),
        });
    }
    out
}

fn coverage_checks(spec: &RunSpec, rhos: &[f64]) -> Vec<Check> {
    let ts = &spec.thresholds;
    let at = |t: f64| spec.params.with_threshold(t).expect("validated threshold");
    let per_t: Vec<Check> = ts
        .par_iter()
        .map(|&t| {
            let name = format!("rho=1 matches the nearest-station reference at T={t}");
            let pair = coverage_probability(&at(t), 1.0, Dpc::Off)
                .and_then(|c| Ok((c.coverage, reference_nocoop_coverage(&at(t))?)));
            match pair {
                Ok((a, b)) => Check::new(name, (a - b).abs() <= 1e-3, format!("{a:.6} vs {b:.6}")),
                Err(e) => Check::failed(name, e),
            }
        })
        .collect();
    let mut out = per_t;
    for &rho in rhos {
        let values = ts
            .par_iter()
            .map(|&t| {
                let off = coverage_probability(&at(t), rho, Dpc::Off)?.coverage;
                let on = coverage_probability(&at(t), rho, Dpc::FullCoop)?.coverage;
                Ok((off, on))
            })
            .collect::<coopnet_core::Result<Vec<(f64, f64)>>>();
        match values {
            Err(e) => out.push(Check::failed(format!("coverage at rho={rho}"), e)),
            Ok(v) => {
                let rising = v.windows(2).filter(|w| w[1].0 > w[0].0 + 1e-6).count();
                out.push(Check::new(
                    format!("coverage decreases in T at rho={rho}"),
                    rising == 0,
                    format!("{rising} increasing step(s) over {} thresholds", v.len()),
                ));
                let worst = v.iter().map(|(off, on)| on - off).fold(f64::INFINITY, f64::min);
                out.push(Check::new(
                    format!("cancellation never lowers coverage at rho={rho}"),
                    worst >= -1e-6,
                    format!("min gain {worst:.2e}"),
                ));
            }
        }
    }
    let t = ts[0];
    out.push(match optimize_rho(&at(t), spec.dpc) {
        Ok(o) => Check::new(
            format!("optimum at least the rho=1 coverage at T={t}"),
            o.gain_vs_nocoop >= -1e-6,
            format!("rho*={:.4}, gain {:.4}", o.rho_star, o.gain_vs_nocoop),
        ),
        Err(e) => Check::failed("optimum", e),
    });
    out
}

pub fn run_checks(spec: &RunSpec) -> Vec<Check> {
    let rhos: Vec<f64> = spec
        .rho
        .iter()
        .filter_map(|r| match r {
            RhoPoint::Value(v) => Some(*v),
            RhoPoint::Optimal => None,
        })
        .collect();
    let mut out = transforms(spec, &rhos);
    out.extend(coverage_checks(spec, &rhos));
    out
}
