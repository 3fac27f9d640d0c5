use coopnet_core::channel::{z_laplace, ZLaplaceParams};
use coopnet_core::coverage::{conditional_coverage_fullcoop, conditional_coverage_nocoop};
use coopnet_core::interference::lj;
use coopnet_core::simulator::{simulate_coverage_curve, tally};
use coopnet_core::{coverage_probability, Complex64, Dpc, SimConfig, SimMode, SystemParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coverage_is_a_probability_decreasing_in_threshold(
        rho in 0.0f64..=1.0,
        t in 0.05f64..8.0,
        factor in 1.05f64..3.0,
        dpc in prop_oneof![Just(Dpc::Off), Just(Dpc::FullCoop), Just(Dpc::BothTerms)],
    ) {
        let p = SystemParams::reference();
        let lo = coverage_probability(&p.with_threshold(t).unwrap(), rho, dpc).unwrap();
        let hi = coverage_probability(&p.with_threshold(t * factor).unwrap(), rho, dpc).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo.coverage));
        prop_assert!(lo.error_estimate.is_finite() && lo.error_estimate >= 0.0);
        prop_assert!(hi.coverage < lo.coverage);
    }

    #[test]
    fn kernels_are_probabilities_and_cancellation_helps(
        r1 in 0.05f64..2.0,
        gap in 1.0f64..3.0,
        rho in 0.0f64..1.0,
        t in 0.05f64..5.0,
        sigma2 in 0.0f64..2.0,
    ) {
        let p = SystemParams::new(1.0, 4.0, 1.0, sigma2, t).unwrap();
        let r2 = r1 * gap;
        let alone = conditional_coverage_nocoop(r1, r2, rho, &p, Dpc::Off).unwrap();
        let off = conditional_coverage_fullcoop(r1, r2, rho, &p, Dpc::Off).unwrap();
        let on = conditional_coverage_fullcoop(r1, r2, rho, &p, Dpc::FullCoop).unwrap();
        for v in [alone, off, on] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(on >= off - 1e-6, "{on} < {off}");
    }

    #[test]
    fn cancellation_never_lowers_simulated_coverage(
        rho in 0.0f64..1.0,
        t in 0.05f64..5.0,
        seed in 0u64..1_000,
    ) {
        let p = SystemParams::reference();
        let off = SimConfig::new(SimMode::ShotNoise, p, rho, Dpc::Off, 2_000, seed).unwrap();
        let on = SimConfig { dpc: Dpc::FullCoop, ..off };
        let a = simulate_coverage_curve(&off, &[t]).unwrap()[0];
        let b = simulate_coverage_curve(&on, &[t]).unwrap()[0];
        prop_assert!(b.coverage >= a.coverage);
    }
}

proptest! {
    #[test]
    fn z_transform_is_bounded_on_the_right_half_plane(
        mu1 in 1e-3f64..1e3,
        mu2 in 1e-3f64..1e3,
        re in 0.0f64..1e3,
        im in -1e3f64..1e3,
    ) {
        let zp = ZLaplaceParams::new(mu1, mu2).unwrap();
        let v = z_laplace(Complex64::new(re, im), &zp).unwrap();
        prop_assert!(v.norm() <= 1.0 + 1e-12, "{v}");
    }

    #[test]
    fn tallies_merge_independently_of_the_split(
        n in 1u64..400,
        cut in 0.0f64..1.0,
        seed in 0u64..1_000,
        mode in prop_oneof![Just(SimMode::ShotNoise), Just(SimMode::FullVoronoi)],
    ) {
        let p = SystemParams::reference();
        let cfg = SimConfig::new(mode, p, 0.6, Dpc::Off, n, seed).unwrap();
        let ts = [0.3, 1.0, 4.0];
        let k = (cut * n as f64) as u64;
        let mut parts = tally(&cfg, &ts, k..n).unwrap();
        parts.merge(&tally(&cfg, &ts, 0..k).unwrap());
        prop_assert_eq!(parts, tally(&cfg, &ts, 0..n).unwrap());
    }
}

#[test]
fn radial_integrand_decays_like_a_power() {
    let p = SystemParams::reference();
    for beta in [3.0, 4.0, 5.5] {
        let p = SystemParams { beta, ..p };
        for rho in [0.0, 0.5, 1.0] {
            let g = |r: f64| (1.0 - lj(Complex64::new(1.0, 0.0), rho, r, &p).unwrap().re) * r;
            for r in [50.0, 200.0] {
                let ratio = g(r) / g(2.0 * r);
                let expected = 2f64.powf(beta - 1.0);
                assert!((ratio / expected - 1.0).abs() < 1e-3, "β={beta} ρ={rho} r={r}: {ratio}");
            }
        }
    }
}
