//! Classical nearest-station coverage, computed directly in the closest
//! distance `r1` with every farther station an exponential-mark interferer.

use core::f64::consts::PI;

use crate::coverage::{clamp_probability, CoverageResult, Diagnostics, Method};
use crate::error::Result;
use crate::interference::SystemParams;
use crate::quad::{integrate, Estimate, Tolerance};
#[allow(unused_imports)]
use crate::real::Real;

/// `C(T) = ∫_1^∞ w / (1 + w^β / T) dw`, integrated in `τ = 1/w`.
fn interference_factor(t: f64, beta: f64) -> Result<Estimate<f64>> {
    let tol = Tolerance::new(1e-13, 1e-11).with_max_panels(2000);
    integrate(
        |tau: f64| t * tau.powf(beta - 3.0) / (1.0 + t * tau.powf(beta)),
        0.0,
        1.0,
        &tol,
    )
}

/// `P[g r1^-β p > T (σ² + I)]` for a user always served by its closest station:
/// `∫_0^∞ e^{-x (1 + 2 C(T))} e^{-T σ² (x/(πλ))^{β/2} / p} dx` with `x = λπ r1²`.
pub fn reference_nocoop_coverage(params: &SystemParams) -> Result<f64> {
    Ok(reference_nocoop_result(params)?.coverage)
}

/// Same value with an error bound and evaluation count.
pub fn reference_nocoop_result(params: &SystemParams) -> Result<CoverageResult> {
    let params = SystemParams::new(params.lambda, params.beta, params.p, params.sigma2, params.threshold)?;
    let t = params.threshold;
    let factor = interference_factor(t, params.beta)?;
    let rate = 1.0 + 2.0 * factor.value;
    let noise = t * params.sigma2 / params.p;
    let scale = 1.0 / (PI * params.lambda);
    let half_beta = 0.5 * params.beta;
    // e^{-rate x} is below 1e-16 past this point.
    let upper = 37.0 / rate;
    let tol = Tolerance::new(1e-12, 1e-10);
    let est = integrate(
        |x: f64| (-rate * x - noise * (x * scale).powf(half_beta)).exp(),
        0.0,
        upper,
        &tol,
    )?;
    // d/d(rate) of the integral is bounded by ∫ x e^{-rate x} dx = 1/rate².
    let error = est.error + 2.0 * factor.error / (rate * rate) + 1e-16;
    Ok(CoverageResult {
        coverage: clamp_probability(est.value)?,
        method: Method::Reference,
        error_estimate: error,
        diagnostics: Diagnostics {
            evaluations: est.evaluations + factor.evaluations,
            r2_max: 0.0,
            s_max: 0.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_beta_four_closed_form() {
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let p = SystemParams::new(1.0, 4.0, 1.0, 0.0, t).unwrap();
            let r = t.sqrt();
            let exact = 1.0 / (1.0 + r * (PI / 2.0 - (1.0 / r).atan()));
            assert!((reference_nocoop_coverage(&p).unwrap() - exact).abs() < 1e-9, "T={t}");
        }
    }

    #[test]
    fn vanishing_threshold_gives_full_coverage() {
        let p = SystemParams::reference().with_threshold(1e-10).unwrap();
        assert!((reference_nocoop_coverage(&p).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn factor_at_other_exponents() {
        // β = 3: C(T) = ∫_0^1 T/(1 + T τ³) dτ; T → 0 gives T.
        let c = interference_factor(1e-6, 3.0).unwrap().value;
        assert!((c / 1e-6 - 1.0).abs() < 1e-5);
        // β = 6, T = 1: with y = τ², (1/2)∫_0^1 y/(1 + y³) dy.
        let f = |y: f64| {
            let r3 = 3f64.sqrt();
            0.5 * (-(1.0 + y).ln() / 3.0 + (y * y - y + 1.0).ln() / 6.0 + ((2.0 * y - 1.0) / r3).atan() / r3)
        };
        let c = interference_factor(1.0, 6.0).unwrap().value;
        let exact = f(1.0) - f(0.0);
        assert!((c - exact).abs() < 1e-10, "{c} vs {exact}");
    }
}
