//! Choice of the policy parameter ρ that maximises coverage.

use alloc::vec::Vec;

use crate::coverage::{coverage_probability_with, Dpc, InversionSettings};
use crate::error::Result;
use crate::interference::SystemParams;
#[allow(unused_imports)]
use crate::real::Real;

/// Points of the coarse ρ grid, `0, 0.05, ..., 1`.
pub const GRID_POINTS: usize = 21;
/// Final bracket width of the golden-section refinement.
pub const RHO_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoOptimum {
    pub rho_star: f64,
    pub coverage_at_star: f64,
    /// `q(ρ*) - q(1)`.
    pub gain_vs_nocoop: f64,
    /// Largest analytic error bound among the evaluations.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Maximises a unimodal `f` on `[a, b]` until the bracket is narrower than
/// `tol`. Returns every evaluated `(x, f(x))`.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut seen = Vec::new();
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    seen.push((c, fc));
    seen.push((d, fd));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            seen.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            seen.push((d, fd));
        }
    }
    Ok(seen)
}

/// Coarse grid over `[0, 1]`, then golden section inside the two grid cells
/// around the best grid point. The best of all evaluated points wins, so
/// `ρ = 1` (a grid point) is never beaten by a worse refinement.
pub fn optimize_rho(params: &SystemParams, dpc: Dpc) -> Result<RhoOptimum> {
    optimize_rho_with(params, dpc, &InversionSettings::default())
}

pub fn optimize_rho_with(params: &SystemParams, dpc: Dpc, settings: &InversionSettings) -> Result<RhoOptimum> {
    let mut error_estimate: f64 = 0.0;
    let mut evaluations = 0;
    let mut eval = |rho: f64| -> Result<f64> {
        let r = coverage_probability_with(params, rho, dpc, settings)?;
        error_estimate = error_estimate.max(r.error_estimate);
        evaluations += 1;
        Ok(r.coverage)
    };
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let mut points = Vec::with_capacity(GRID_POINTS + 16);
    for k in 0..GRID_POINTS {
        let rho = if k + 1 == GRID_POINTS { 1.0 } else { k as f64 * step };
        points.push((rho, eval(rho)?));
    }
    let at_one = points[GRID_POINTS - 1].1;
    let best = (0..GRID_POINTS).fold(0, |b, k| if points[k].1 > points[b].1 { k } else { b });
    let lo = if best == 0 { 0.0 } else { points[best - 1].0 };
    let hi = if best + 1 == GRID_POINTS { 1.0 } else { points[best + 1].0 };
    points.extend(golden_section_max(&mut eval, lo, hi, RHO_TOLERANCE)?);
    let (rho_star, coverage_at_star) = points
        .iter()
        .copied()
        .fold((1.0, at_one), |acc, p| if p.1 > acc.1 { p } else { acc });
    Ok(RhoOptimum {
        rho_star,
        coverage_at_star,
        gain_vs_nocoop: coverage_at_star - at_one,
        error_estimate,
        evaluations,
    })
}
