//! Coverage probability at a typical location under the geometric policy.
//!
//! With `u = λπ r2²` and `v = (r1/r2)²` the neighbour-distance density
//! becomes `u e^-u du dv`, `v` uniform on `[0, 1]`; the policy serves alone
//! for `v <= ρ²`. Both conditional kernels then depend on `r2` only through
//! the factor `e^{-2u Ẽ}` and the noise term, which lets the `u` integral be
//! taken innermost.
//!
//! The cooperative part is a Fourier inversion over `s`, folded onto
//! `[0, ∞)` and truncated on doubling panels once a certified tail bound
//! drops below the tail tolerance.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::channel::{z_laplace, z_modulus_bound, ZLaplaceParams};
use crate::error::{check_positive, Error, Result};
use crate::interference::{
    boundary_modulus_bound, interference_laplace, interference_laplace_dpc, mark_laplace, unit_exponent,
    unit_exponent_floor, MarkModel, SystemParams, RADIAL_TOLERANCE,
};
use crate::quad::{try_integrate, Estimate, Tolerance};
#[allow(unused_imports)]
use crate::real::Real;

/// Where dirty-paper cancellation of the second station is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dpc {
    #[default]
    Off,
    /// Cancellation for cooperative users only.
    FullCoop,
    /// Cancellation in both terms, including users served alone.
    BothTerms,
}

impl Dpc {
    pub fn from_flags(enabled: bool, both_terms: bool) -> Self {
        match (enabled, both_terms) {
            (false, _) => Dpc::Off,
            (true, false) => Dpc::FullCoop,
            (true, true) => Dpc::BothTerms,
        }
    }

    pub fn is_enabled(self) -> bool {
        self != Dpc::Off
    }

    fn in_nocoop(self) -> bool {
        self == Dpc::BothTerms
    }

    fn in_fullcoop(self) -> bool {
        self != Dpc::Off
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Served-alone plus cooperative terms of the analytic integral.
    Analytic,
    /// Classical nearest-station integral, valid at `ρ = 1` only.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub evaluations: usize,
    /// Largest second-neighbour distance integrated over.
    pub r2_max: f64,
    /// Inversion cutoff in units of `r2^β / p`.
    pub s_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageResult {
    pub coverage: f64,
    pub method: Method,
    /// Absolute error bound.
    pub error_estimate: f64,
    pub diagnostics: Diagnostics,
}

/// Knobs of the analytic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings {
    /// Truncation of `u = λπ r2²`.
    pub outer_limit: f64,
    /// Largest admissible inversion cutoff, in units of `r2^β / p`.
    pub s_cap: f64,
    /// Target for the certified inversion tail.
    pub tail_tolerance: f64,
    pub outer: Tolerance,
    pub kernel: Tolerance,
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self {
            outer_limit: 30.0,
            s_cap: 1e4,
            tail_tolerance: 1e-6,
            outer: Tolerance::new(1e-7, 1e-7).with_max_panels(200),
            kernel: Tolerance::new(1e-10, 1e-7).with_max_panels(400),
        }
    }
}

/// Rounding slack tolerated outside `[0, 1]` before a result is rejected.
pub const CLAMP_SLACK: f64 = 1e-6;

pub(crate) fn clamp_probability(value: f64) -> Result<f64> {
    if !value.is_finite() || value < -CLAMP_SLACK || value > 1.0 + CLAMP_SLACK {
        return Err(Error::CoverageOutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn check_pair(r1: f64, r2: f64) -> Result<()> {
    check_positive("r1", r1)?;
    check_positive("r2", r2)?;
    if r1 > r2 {
        return Err(Error::InvalidParameter {
            name: "r1",
            value: r1,
            reason: "closest distance exceeds the second closest",
        });
    }
    Ok(())
}

fn imag(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// `P[g1 r1^-β p > T (σ² + I)]` for a user served by its closest station.
pub fn conditional_coverage_nocoop(r1: f64, r2: f64, rho: f64, params: &SystemParams, dpc: Dpc) -> Result<f64> {
    check_pair(r1, r2)?;
    MarkModel::new(rho)?;
    let s = params.threshold * r1.powf(params.beta) / params.p;
    let lt = if dpc.in_nocoop() {
        interference_laplace_dpc(Complex64::new(s, 0.0), rho, r2, params)?
    } else {
        interference_laplace(Complex64::new(s, 0.0), rho, r2, params)?
    };
    clamp_probability((-s * params.sigma2).exp() * lt.re)
}

/// Result of a folded inversion integral `2 ∫_0^∞ Re f`.
struct Inversion {
    value: f64,
    error: f64,
    tail: f64,
    cutoff: f64,
    evaluations: usize,
}

/// Integrates `2 ∫_0^∞ f(s) ds`, `f` being the real part of the integrand,
/// on `[0, S]`, `[S, 2S]`, `[2S, 4S]`, ...
///
/// `term(s)` must bound `sup |f(s')| s'` over `s' ∈ [s, 2s]` and be
/// nonincreasing, so the part beyond the current cutoff `C` is at most
/// `2 ln 2 Σ_k term(2^k C)`. The first panel is integrated in `w` with
/// `s = S w^k` to absorb an `s^{1/k - 1}` singularity at the origin.
/// Fails once the cutoff passes `cap`.
fn fold_inversion<F, B>(
    mut f: F,
    mut term: B,
    first: f64,
    first_power: f64,
    cap: f64,
    settings: &InversionSettings,
) -> Result<Inversion>
where
    F: FnMut(f64) -> Result<f64>,
    B: FnMut(f64) -> Result<f64>,
{
    let tol = &settings.outer;
    let head = try_integrate(
        |w: f64| {
            let s = first * w.powf(first_power);
            Ok(f(s)? * (first * first_power * w.powf(first_power - 1.0)))
        },
        0.0,
        1.0,
        &[],
        tol,
    )?;
    let mut total = head.value;
    let mut error = head.error;
    let mut evaluations = head.evaluations;

    // terms[k] = term(first 2^k), filled lazily.
    let mut terms: Vec<f64> = Vec::new();
    let mut panel = 0usize;
    loop {
        let mut tail = 0.0;
        let mut k = panel;
        loop {
            while terms.len() <= k {
                let s = first * 2f64.powf(terms.len() as f64);
                terms.push(term(s)?);
            }
            let t = terms[k];
            tail += t;
            if t <= 1e-4 * settings.tail_tolerance || k >= panel + 200 {
                if k > panel {
                    // Geometric remainder from the last observed ratio.
                    let r = t / terms[k - 1];
                    tail += if r < 1.0 { t * r / (1.0 - r) } else { f64::INFINITY };
                }
                break;
            }
            k += 1;
        }
        let tail = 2.0 * LN_2 * tail;
        let cutoff = first * 2f64.powf(panel as f64);
        if tail <= settings.tail_tolerance {
            return Ok(Inversion {
                value: 2.0 * total,
                error: 2.0 * error,
                tail,
                cutoff,
                evaluations,
            });
        }
        if cutoff >= cap {
            return Err(Error::TruncationCap {
                s_max: cutoff,
                tail_bound: tail,
                partial_sum: 2.0 * total,
            });
        }
        let est: Estimate<f64> = try_integrate(&mut f, cutoff, 2.0 * cutoff, &[], tol)?;
        total += est.value;
        error += est.error;
        evaluations += est.evaluations;
        panel += 1;
    }
}

/// `P[Z/2 > T (σ² + I)]` for a user served jointly by both stations, by
/// inverting `∫ e^{-2iπσ²s} L_I(2iπs) (L_Z(-iπs/T) - 1) / (2iπs) ds`.
///
/// The `-1` half contributes exactly `1/2`; the rest decays with `L_Z`
/// alone, so the cutoff does not depend on how fast `L_I` falls off.
pub fn conditional_coverage_fullcoop(r1: f64, r2: f64, rho: f64, params: &SystemParams, dpc: Dpc) -> Result<f64> {
    conditional_coverage_fullcoop_with(r1, r2, rho, params, dpc, &InversionSettings::default()).map(|e| e.value)
}

pub fn conditional_coverage_fullcoop_with(
    r1: f64,
    r2: f64,
    rho: f64,
    params: &SystemParams,
    dpc: Dpc,
    settings: &InversionSettings,
) -> Result<Estimate<f64>> {
    check_pair(r1, r2)?;
    MarkModel::new(rho)?;
    let t = params.threshold;
    let zp = ZLaplaceParams::from_distances(r1, r2, params.p, params.beta)?;
    let scale = r2.powf(params.beta) / params.p;
    let integrand = |s: f64| -> Result<f64> {
        let arg = imag(2.0 * PI * s);
        let li = if dpc.in_fullcoop() {
            interference_laplace_dpc(arg, rho, r2, params)?
        } else {
            interference_laplace(arg, rho, r2, params)?
        };
        let lz = z_laplace(imag(-PI * s / t), &zp)?;
        let noise = imag(-2.0 * PI * params.sigma2 * s).exp();
        Ok((noise * li * lz / arg).re)
    };
    let density_scale = 2.0 * PI * params.lambda * r2 * r2;
    let term = |s: f64| -> Result<f64> {
        let y = 2.0 * PI * s / scale;
        let mut a = (-density_scale * unit_exponent_floor(y, rho, params.beta)?).exp();
        if !dpc.in_fullcoop() {
            a *= boundary_modulus_bound(y, rho);
        }
        Ok(a * z_modulus_bound(PI * s / t, &zp) / (2.0 * PI))
    };
    // L_Z starts to fall off near s = T r1^β / p, the noise phase turns over near 1/σ².
    let first = scale.min(t * zp.mu1()).min(1.0 / params.sigma2);
    let inv = fold_inversion(integrand, term, first, 1.0, settings.s_cap * scale, settings)?;
    Ok(Estimate {
        value: clamp_probability(0.5 + inv.value)?,
        error: inv.error + inv.tail,
        evaluations: inv.evaluations,
    })
}

/// `∫_0^U u e^{-a u} e^{-i c u^k} du` with `Re a > 0`, `0 ≤ arg a < π/2`.
///
/// Fast phases are integrated along `u = r e^{-iπ/(2k)}`, where the phase
/// turns into the decay `e^{-c r^k}`. Both exponentials decay inside that
/// sector, and extending to infinity moves the value by less than
/// `e^{-U}(1 + U)`.
fn radial_weight(a: Complex64, c: f64, k: f64, limit: f64, tol: &Tolerance) -> Result<Estimate<Complex64>> {
    let upper = limit.min(45.0 / a.re);
    if c == 0.0 {
        let au = a * upper;
        let value = (Complex64::new(1.0, 0.0) - (-au).exp() * (au + 1.0)) / (a * a);
        return Ok(Estimate {
            value,
            error: 0.0,
            evaluations: 0,
        });
    }
    if c * upper.powf(k) <= 8.0 * PI {
        return try_integrate(
            |u: f64| Ok(u * (-(a * u) - imag(c * u.powf(k))).exp()),
            0.0,
            upper,
            &[],
            tol,
        );
    }
    let turn = Complex64::from_polar(1.0, -PI / (2.0 * k));
    let b = a * turn;
    let reach = (45.0 / c).powf(1.0 / k).min(45.0 / b.re);
    let est = try_integrate(|r: f64| Ok(r * (-(b * r) - c * r.powf(k)).exp()), 0.0, reach, &[], tol)?;
    Ok(Estimate {
        value: turn * turn * est.value,
        error: est.error + (-limit).exp() * (1.0 + limit),
        evaluations: est.evaluations,
    })
}

/// Served-alone part: `∫_0^{ρ²} dv L_J(q) ∫_0^U u e^{-u(1 + 2Ẽ(q))} e^{-κ v^k u^k} du`
/// with `q = T v^k`, `k = β/2`.
fn nocoop_term(params: &SystemParams, rho: f64, dpc: Dpc, settings: &InversionSettings) -> Result<Estimate<f64>> {
    let top = rho * rho;
    if top == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let k = 0.5 * params.beta;
    let t = params.threshold;
    let kappa = t * params.sigma2 / (params.p * (params.lambda * PI).powf(k));
    // Noise starts to dominate the inner integral below this v.
    let knee = kappa.powf(-1.0 / k);
    let breaks = [knee];
    let mut inner_evals = 0;
    let est = try_integrate(
        |v: f64| -> Result<f64> {
            let vk = v.powf(k);
            let q = Complex64::new(t * vk, 0.0);
            let e = unit_exponent(q, rho, params.beta, &RADIAL_TOLERANCE)?;
            let boundary = if dpc.in_nocoop() { 1.0 } else { mark_laplace(q, rho)?.re };
            let a = 1.0 + 2.0 * e.value.re;
            let c = kappa * vk;
            // Both exponents exceed 45 beyond this point.
            let upper = settings.outer_limit.min(45.0 / a);
            let upper = if c > 0.0 { upper.min((45.0 / c).powf(1.0 / k)) } else { upper };
            let w = if c == 0.0 {
                let au = a * upper;
                (1.0 - (-au).exp() * (au + 1.0)) / (a * a)
            } else {
                let r = try_integrate(|u: f64| Ok(u * (-a * u - c * u.powf(k)).exp()), 0.0, upper, &[], &settings.kernel)?;
                inner_evals += r.evaluations;
                r.value
            };
            inner_evals += e.evaluations;
            Ok(boundary * w)
        },
        0.0,
        top,
        if knee < top { &breaks } else { &[] },
        &settings.outer,
    )?;
    Ok(Estimate {
        value: est.value,
        error: est.error,
        evaluations: est.evaluations + inner_evals,
    })
}

/// `∫_{lo}^1 min(1, κ v^k) dv`.
fn clipped_power_integral(kappa: f64, k: f64, lo: f64) -> f64 {
    let knee = kappa.powf(-1.0 / k);
    let pow = |v: f64| kappa * v.powf(k + 1.0) / (k + 1.0);
    if knee <= lo {
        1.0 - lo
    } else if knee >= 1.0 {
        pow(1.0) - pow(lo)
    } else {
        pow(knee) - pow(lo) + 1.0 - knee
    }
}

/// Cooperative part. In the scaled variable `t = s p / r2^β` the inversion
/// integrand factorises into pieces independent of `r2`, and the split
/// `L_Z - 1 = L_Z + (-1)` turns the `-1` piece into the constant `1/2` per
/// unit of cooperative mass:
/// `(1-ρ²) m / 2 + 2 Re ∫_0^∞ L_J(2iπt) N(t) W(t) / (2iπt) dt`,
/// `N(t) = ∫_{ρ²}^1 L_Z(-iπt/T; v^k, 1) dv`,
/// `W(t) = ∫_0^U u e^{-u(1 + 2Ẽ(2iπt))} e^{-2iπσ² t (u/λπ)^k / p} du`.
fn fullcoop_term(params: &SystemParams, rho: f64, dpc: Dpc, settings: &InversionSettings) -> Result<(Inversion, f64)> {
    let lo = rho * rho;
    if lo >= 1.0 {
        return Ok((
            Inversion {
                value: 0.0,
                error: 0.0,
                tail: 0.0,
                cutoff: 0.0,
                evaluations: 0,
            },
            0.0,
        ));
    }
    let beta = params.beta;
    let k = 0.5 * beta;
    let t = params.threshold;
    let u_max = settings.outer_limit;
    let mass = 1.0 - (-u_max).exp() * (1.0 + u_max);
    let noise_rate = 2.0 * PI * params.sigma2 / (params.p * (params.lambda * PI).powf(k));
    let mut inner_evals = 0usize;
    let integrand = |tt: f64| -> Result<f64> {
        let y = 2.0 * PI * tt;
        let q = imag(y);
        let e = unit_exponent(q, rho, beta, &RADIAL_TOLERANCE)?;
        let boundary = if dpc.in_fullcoop() {
            Complex64::new(1.0, 0.0)
        } else {
            mark_laplace(q, rho)?
        };
        let zs = imag(-PI * tt / t);
        let knee = (PI * tt / t).powf(-1.0 / k);
        let breaks = [knee];
        let n = try_integrate(
            |v: f64| z_laplace(zs, &ZLaplaceParams::new(v.powf(k), 1.0)?),
            lo,
            1.0,
            if knee > lo && knee < 1.0 { &breaks } else { &[] },
            &settings.kernel,
        )?;
        let w = radial_weight(2.0 * e.value + 1.0, noise_rate * tt, k, u_max, &settings.kernel)?;
        inner_evals += e.evaluations + n.evaluations + w.evaluations;
        // Only the real part survives folding; the imaginary part carries a
        // non-integrable 1/t at the origin.
        Ok((boundary * n.value * w.value / q).re)
    };
    let term = |tt: f64| -> Result<f64> {
        let y = 2.0 * PI * tt;
        let floor = unit_exponent_floor(y, rho, beta)?;
        let mut bound = clipped_power_integral(2.0 * t / (PI * tt), k, lo);
        if !dpc.in_fullcoop() {
            bound *= boundary_modulus_bound(y, rho);
        }
        let damp = 1.0 + 2.0 * floor;
        Ok(bound / (damp * damp * 2.0 * PI))
    };
    // Interference, L_Z and noise phase vary on scales 1, T and 1/noise_rate.
    let first = t.min(1.0).min(1.0 / noise_rate);
    let mut inv = fold_inversion(integrand, term, first, k, settings.s_cap, settings)?;
    inv.evaluations += inner_evals;
    Ok((inv, 0.5 * (1.0 - lo) * mass))
}

/// Coverage probability of a typical location under policy `ρ`.
pub fn coverage_probability(params: &SystemParams, rho: f64, dpc: Dpc) -> Result<CoverageResult> {
    coverage_probability_with(params, rho, dpc, &InversionSettings::default())
}

pub fn coverage_probability_with(
    params: &SystemParams,
    rho: f64,
    dpc: Dpc,
    settings: &InversionSettings,
) -> Result<CoverageResult> {
    let params = SystemParams::new(params.lambda, params.beta, params.p, params.sigma2, params.threshold)?;
    MarkModel::new(rho)?;
    let nc = nocoop_term(&params, rho, dpc, settings)?;
    let (fc, half_mass) = fullcoop_term(&params, rho, dpc, settings)?;
    let u_max = settings.outer_limit;
    let dropped = (-u_max).exp() * (1.0 + u_max);
    let coverage = clamp_probability(nc.value + half_mass + fc.value)?;
    Ok(CoverageResult {
        coverage,
        method: Method::Analytic,
        error_estimate: nc.error + fc.error + fc.tail + dropped,
        diagnostics: Diagnostics {
            evaluations: nc.evaluations + fc.evaluations,
            r2_max: (u_max / (params.lambda * PI)).sqrt(),
            s_max: fc.cutoff,
        },
    })
}
