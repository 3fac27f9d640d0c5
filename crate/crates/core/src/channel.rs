//! Rayleigh fading, the cooperative beneficial-signal algebra, and the
//! coherent fading variable `Z = (√(G1 r1^-β) + √(G2 r2^-β))²` with its
//! closed-form Laplace transform.

use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_positive, Error, Result};
use crate::geometry::Action;
#[allow(unused_imports)]
use crate::real::Real;
use crate::rng;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// One fading realization: power gain and channel phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    pub power: f64,
    pub phase: f64,
}

pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R, mean_power: f64) -> FadingDraw {
    FadingDraw {
        power: rng::exponential(rng, mean_power),
        phase: rng::phase(rng),
    }
}

/// Exponential power with mean `mean_power` and uniform phase on `[0, 2π)`.
pub fn sample_fading(mean_power: f64, seed: u64) -> Result<FadingDraw> {
    check_positive("mean_power", mean_power)?;
    Ok(draw_fading(&mut rng::stream(seed, 0), mean_power))
}

/// Received useful power when a fraction `a` of the per-user power `p` is
/// sent as a common message from both stations:
/// `h1 (1-a) p + h2 a p + 2 a p √(h1 h2) cos(Δθ)`.
pub fn beneficial_signal(a: f64, p: f64, h1: f64, h2: f64, phase_diff: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&a) {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "power split must lie in [0, 1/2]",
        });
    }
    if !(h1 >= 0.0 && h2 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "h",
            value: h1.min(h2),
            reason: "channel gains must be non-negative",
        });
    }
    Ok(h1 * (1.0 - a) * p + h2 * a * p + 2.0 * a * p * (h1 * h2).sqrt() * phase_diff.cos())
}

/// Best power split for phase-aligned transmission. The coherent signal is
/// affine in `a`, so only the endpoints matter; a zero slope stays `NoCoop`.
pub fn optimal_split(h1: f64, h2: f64) -> Action {
    let slope = h2 - h1 + 2.0 * (h1 * h2).sqrt();
    if slope > 0.0 {
        Action::FullCoop
    } else {
        Action::NoCoop
    }
}

/// Rate parameters `μi = ri^β / p` of the two exponential path gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZLaplaceParams {
    mu1: f64,
    mu2: f64,
}

impl ZLaplaceParams {
    pub fn new(mu1: f64, mu2: f64) -> Result<Self> {
        Ok(Self {
            mu1: check_positive("mu1", mu1)?,
            mu2: check_positive("mu2", mu2)?,
        })
    }

    pub fn from_distances(r1: f64, r2: f64, p: f64, beta: f64) -> Result<Self> {
        check_positive("r1", r1)?;
        check_positive("r2", r2)?;
        check_positive("p", p)?;
        Self::new(r1.powf(beta) / p, r2.powf(beta) / p)
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }
}

/// Principal-branch complex arctangent, `atan z = (i/2)(ln(1 - iz) - ln(1 + iz))`.
pub fn atan_principal(z: Complex64) -> Complex64 {
    let iz = I * z;
    (I * 0.5) * ((Complex64::new(1.0, 0.0) - iz).ln() - (Complex64::new(1.0, 0.0) + iz).ln())
}

/// Laplace transform `E[exp(-s Z)]` of the coherent fading variable.
///
/// Valid for any `s` with `Re(1 + (1/μ1 + 1/μ2) s) > 0`, which covers the
/// closed right half-plane and the imaginary axis.
pub fn z_laplace(s: Complex64, params: &ZLaplaceParams) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let (mu1, mu2) = (params.mu1, params.mu2);
    let arg = 1.0 + (1.0 / mu1 + 1.0 / mu2) * s;
    if arg.re <= 0.0 {
        return Err(Error::BranchCut { re: arg.re });
    }
    if s == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let g = arg.sqrt();
    let c = (1.0 / (mu1 * mu2)).sqrt();
    let ratio = (mu1 / mu2).sqrt();
    let angles = atan_principal(g * ratio) + atan_principal(g / ratio) - PI;
    Ok((g + s * c * angles) / (g * g * g))
}

/// `E[Z] = (π/2 + (μ1 + μ2)/√(μ1 μ2)) / √(μ1 μ2)`.
pub fn z_mean(params: &ZLaplaceParams) -> f64 {
    let root = (params.mu1 * params.mu2).sqrt();
    (PI / 2.0 + (params.mu1 + params.mu2) / root) / root
}

/// Upper bound on `|L_Z(i ω)|`.
///
/// Given the weaker path, `Z` has a unimodal density bounded by the
/// stronger path's rate, so the usual total-variation bound gives
/// `2 min(μ1, μ2) / |ω|`.
pub(crate) fn z_modulus_bound(omega: f64, params: &ZLaplaceParams) -> f64 {
    let b = 2.0 * params.mu1.min(params.mu2) / omega.abs();
    if b < 1.0 {
        b
    } else {
        1.0
    }
}

/// Coherent sum of two independent path gains with mean-`p` exponential fading.
pub fn draw_z<R: Rng + ?Sized>(rng: &mut R, r1: f64, r2: f64, p: f64, beta: f64) -> f64 {
    let g1 = rng::exponential(rng, p);
    let g2 = rng::exponential(rng, p);
    coherent_sum(g1 * r1.powf(-beta), g2 * r2.powf(-beta))
}

#[inline]
pub(crate) fn coherent_sum(h1: f64, h2: f64) -> f64 {
    let root = h1.sqrt() + h2.sqrt();
    root * root
}

pub fn sample_z(r1: f64, r2: f64, p: f64, beta: f64, seed: u64) -> Result<f64> {
    check_positive("r1", r1)?;
    check_positive("r2", r2)?;
    check_positive("p", p)?;
    Ok(draw_z(&mut rng::stream(seed, 0), r1, r2, p, beta))
}
