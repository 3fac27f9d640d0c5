//! Shot-noise interference seen by a typical location whose second closest
//! station sits at distance `r2`.
//!
//! Every station outside the ball carries an independent mark: with
//! probability ρ² its user is served alone (exponential power, mean `p`),
//! otherwise the pair emits coherently and, under the far-field
//! approximation, the mark is `(G1 + G2)/2` (Gamma(2, p/2), also mean `p`).

use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_positive, Error, Result};
use crate::quad::{try_integrate, Estimate, Tolerance};
#[allow(unused_imports)]
use crate::real::Real;
use crate::rng;

/// Network and link-budget constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Base-station intensity λ (per m²).
    pub lambda: f64,
    /// Path-loss exponent β (> 2).
    pub beta: f64,
    /// Per-user transmit power `p`.
    pub p: f64,
    /// Noise power σ².
    pub sigma2: f64,
    /// SINR threshold `T` (linear).
    pub threshold: f64,
}

impl SystemParams {
    pub fn new(lambda: f64, beta: f64, p: f64, sigma2: f64, threshold: f64) -> Result<Self> {
        check_positive("lambda", lambda)?;
        check_positive("p", p)?;
        check_positive("threshold", threshold)?;
        if !(beta.is_finite() && beta > 2.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "path-loss exponent must exceed 2",
            });
        }
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                value: sigma2,
                reason: "noise power must be finite and >= 0",
            });
        }
        Ok(Self {
            lambda,
            beta,
            p,
            sigma2,
            threshold,
        })
    }

    /// λ = 1, β = 4, p = 1, σ² = 1, T = 1.
    pub fn reference() -> Self {
        Self {
            lambda: 1.0,
            beta: 4.0,
            p: 1.0,
            sigma2: 1.0,
            threshold: 1.0,
        }
    }

    pub fn with_threshold(self, threshold: f64) -> Result<Self> {
        Self::new(self.lambda, self.beta, self.p, self.sigma2, threshold)
    }

    /// Path gain `d^-β` from a squared distance.
    #[inline]
    pub(crate) fn path_gain_sq(&self, d2: f64) -> f64 {
        if self.beta == 4.0 {
            1.0 / (d2 * d2)
        } else {
            d2.powf(-0.5 * self.beta)
        }
    }
}

/// Mark law of one interfering station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkModel {
    rho: f64,
}

impl MarkModel {
    pub fn new(rho: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&rho) {
            Ok(Self { rho })
        } else {
            Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
                reason: "must lie in [0, 1]",
            })
        }
    }

    /// Probability of the single-station (exponential) mark.
    pub fn exponential_weight(&self) -> f64 {
        self.rho * self.rho
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, p: f64) -> f64 {
        if rng::unit(rng) < self.exponential_weight() {
            rng::exponential(rng, p)
        } else {
            0.5 * (rng::exponential(rng, p) + rng::exponential(rng, p))
        }
    }
}

const POLE_GUARD: f64 = 1e-12;

fn guarded(den: Complex64) -> Result<Complex64> {
    let d = den.norm();
    if d < POLE_GUARD {
        Err(Error::PoleProximity { distance: d })
    } else {
        Ok(den)
    }
}

/// Laplace transform of one mark at distance `x = s r^-β p` (scaled).
pub(crate) fn mark_laplace(x: Complex64, rho: f64) -> Result<Complex64> {
    let w = rho * rho;
    let one = Complex64::new(1.0, 0.0);
    let exp_den = guarded(one + x)?;
    let gam_den = guarded(one + x * 0.5)?;
    Ok(w / exp_den + (1.0 - w) / (gam_den * gam_den))
}

/// `L_J(s, ρ, r) = ρ²/(1 + s r^-β p) + (1-ρ²)/(1 + s r^-β p/2)²`.
pub fn lj(s: Complex64, rho: f64, r: f64, params: &SystemParams) -> Result<Complex64> {
    check_positive("r", r)?;
    MarkModel::new(rho)?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    mark_laplace(s * (r.powf(-params.beta) * params.p), rho)
}

/// Radial quadrature tolerance for the shot-noise exponent.
pub const RADIAL_TOLERANCE: Tolerance = Tolerance::new(1e-15, 1e-8);

/// Dimensionless exponent `Ẽ(q) = ∫_1^∞ (1 - L_J(q w^-β)) w dw`, where `q`
/// is `s p r2^-β`; the shot-noise exponent is `r2² Ẽ(q)`.
///
/// With `w^-β = v^m`, `m = β/(β-2)`, this is `q/(β-2) ∫_0^1 φ(q v^m) dv` where
/// `φ(x) = ρ²/(1+x) + (1-ρ²)(1 + x/4)/(1 + x/2)²` is bounded on `[0, 1]`,
/// so no radial truncation is involved.
pub(crate) fn unit_exponent(q: Complex64, rho: f64, beta: f64, tol: &Tolerance) -> Result<Estimate<Complex64>> {
    if !(q.re.is_finite() && q.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if q == Complex64::new(0.0, 0.0) {
        return Ok(Estimate {
            value: q,
            error: 0.0,
            evaluations: 0,
        });
    }
    let m = beta / (beta - 2.0);
    let w = rho * rho;
    let one = Complex64::new(1.0, 0.0);
    let phi = |v: f64| -> Result<Complex64> {
        let x = q * v.powf(m);
        let exp_den = guarded(one + x)?;
        let gam_den = guarded(one + x * 0.5)?;
        Ok(w / exp_den + (1.0 - w) * (one + x * 0.25) / (gam_den * gam_den))
    };
    // Where the mark transform turns over.
    let knee = q.norm().powf(-1.0 / m);
    let breaks = [knee];
    let inner = try_integrate(phi, 0.0, 1.0, if knee < 1.0 { &breaks } else { &[] }, tol)?;
    let scale = q / (beta - 2.0);
    Ok(Estimate {
        value: inner.value * scale,
        error: inner.error * scale.norm(),
        evaluations: inner.evaluations,
    })
}

/// A lower bound on `Re Ẽ(i y')` valid for every `y' >= y >= 0`.
///
/// `Re(1 - L_J(i x))` is `ρ² x²/(1+x²) + (1-ρ²) f(x²/4)` with
/// `f(z) = 1 - (1-z)/(1+z)²`; `f` rises to 9/8 at `z = 3` and then falls back
/// towards 1, so `min(f, 1)` on `[0, 1]` continued by 1 is a nondecreasing
/// minorant.
pub(crate) fn unit_exponent_floor(y: f64, rho: f64, beta: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let m = beta / (beta - 2.0);
    let w = rho * rho;
    let psi = |v: f64| -> Result<f64> {
        let x = y * v.powf(m);
        let z = 0.25 * x * x;
        let gamma_part = if z < 1.0 {
            // (1 - (1-z)/(1+z)²)/x without cancellation.
            x * 0.25 * (3.0 + z) / ((1.0 + z) * (1.0 + z))
        } else {
            1.0 / x
        };
        Ok(w * x / (1.0 + x * x) + (1.0 - w) * gamma_part)
    };
    let breaks = [y.powf(-1.0 / m), (2.0 / y).powf(1.0 / m)];
    let mut b = [0.0; 2];
    let mut n = 0;
    for k in breaks {
        if k > 0.0 && k < 1.0 && (n == 0 || k > b[n - 1]) {
            b[n] = k;
            n += 1;
        }
    }
    let est = try_integrate(psi, 0.0, 1.0, &b[..n], &Tolerance::new(1e-14, 1e-6))?;
    // Give back the quadrature error so the result stays a lower bound.
    Ok((y / (beta - 2.0) * (est.value - est.error)).max(0.0))
}

/// Upper bound on `|L_J(i y)|` for real `y >= 0`; nonincreasing in `y`.
pub(crate) fn boundary_modulus_bound(y: f64, rho: f64) -> f64 {
    let w = rho * rho;
    w / (1.0 + y * y).sqrt() + (1.0 - w) / (1.0 + 0.25 * y * y)
}

/// `∫_{r2}^∞ (1 - L_J(s, ρ, r)) r dr`, evaluated without radial truncation.
pub fn shot_noise_exponent(
    s: Complex64,
    rho: f64,
    r2: f64,
    params: &SystemParams,
    tol: &Tolerance,
) -> Result<Estimate<Complex64>> {
    check_positive("r2", r2)?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let q = s * (params.p * r2.powf(-params.beta));
    let e = unit_exponent(q, rho, params.beta, tol)?;
    let r2sq = r2 * r2;
    Ok(Estimate {
        value: e.value * r2sq,
        error: e.error * r2sq,
        evaluations: e.evaluations,
    })
}

/// Laplace transform of the interference, boundary station included.
pub fn interference_laplace(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<Complex64> {
    let boundary = lj(s, rho, r2, params)?;
    Ok(boundary * interference_laplace_dpc(s, rho, r2, params)?)
}

/// Laplace transform of the interference with the second closest station's
/// contribution removed.
pub fn interference_laplace_dpc(s: Complex64, rho: f64, r2: f64, params: &SystemParams) -> Result<Complex64> {
    MarkModel::new(rho)?;
    let e = shot_noise_exponent(s, rho, r2, params, &RADIAL_TOLERANCE)?;
    Ok((-2.0 * PI * params.lambda * e.value).exp())
}

/// `E[I] = p (β - 2 + 2πλ r2²) / ((β - 2) r2^β)`, the same for every ρ.
pub fn interference_mean(r2: f64, params: &SystemParams) -> Result<f64> {
    check_positive("r2", r2)?;
    let beta = params.beta;
    if !(beta > 2.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "mean interference diverges for beta <= 2",
        });
    }
    Ok(params.p / ((beta - 2.0) * r2.powf(beta)) * (beta - 2.0 + 2.0 * PI * params.lambda * r2 * r2))
}

/// Expected number of explicitly drawn outer interferers; the remainder of
/// the plane contributes its (exact) mean.
pub const OUTER_ATOMS: f64 = 128.0;

/// One draw of the interference, split into the boundary station's term and
/// everything farther away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceDraw {
    pub boundary: f64,
    pub outer: f64,
}

impl InterferenceDraw {
    pub fn total(&self) -> f64 {
        self.boundary + self.outer
    }
}

/// Mean interference from stations beyond radius `sqrt(r_sq)`.
pub(crate) fn far_field_mean(r_sq: f64, params: &SystemParams) -> f64 {
    let beta = params.beta;
    2.0 * PI * params.lambda * params.p * r_sq.powf(1.0 - 0.5 * beta) / (beta - 2.0)
}

pub fn draw_interference<R: Rng + ?Sized>(rng: &mut R, marks: &MarkModel, r2: f64, params: &SystemParams) -> InterferenceDraw {
    let boundary = marks.draw(rng, params.p) * params.path_gain_sq(r2 * r2);
    let scale = params.lambda * PI;
    let start = scale * r2 * r2;
    let stop = start + OUTER_ATOMS;
    let mut u = start;
    let mut outer = 0.0;
    loop {
        u += rng::exponential(rng, 1.0);
        if u > stop {
            break;
        }
        outer += marks.draw(rng, params.p) * params.path_gain_sq(u / scale);
    }
    outer += far_field_mean(stop / scale, params);
    InterferenceDraw { boundary, outer }
}

/// One interference draw: boundary station at exactly `r2` plus a Poisson
/// field of marked stations outside the ball.
pub fn sample_interference(rho: f64, r2: f64, params: &SystemParams, seed: u64) -> Result<f64> {
    check_positive("r2", r2)?;
    let marks = MarkModel::new(rho)?;
    Ok(draw_interference(&mut rng::stream(seed, 0), &marks, r2, params).total())
}
