//! One PASS/FAIL line per acceptance criterion. Failures are reported, not
//! raised, so the rest of the workspace suite is unaffected.

use std::f64::consts::PI;
use std::time::Instant;

use coopnet_core::channel::{z_laplace, z_mean, ZLaplaceParams};
use coopnet_core::coverage::conditional_coverage_fullcoop;
use coopnet_core::geometry::two_nearest;
use coopnet_core::interference::{interference_laplace, interference_mean};
use coopnet_core::rng::{exponential, stream, unit, StreamRng};
use coopnet_core::simulator::{measure_policy_fraction, simulate_coverage_curve};
use coopnet_core::{
    coverage_probability, optimize_rho, reference_nocoop_coverage, Complex64, Dpc, PointPattern, SimConfig, SimMode,
    SystemParams, Window,
};

const GRID_T: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
const GRID_RHO: [f64; 3] = [0.0, 0.5, 1.0];

fn preset(t: f64) -> SystemParams {
    SystemParams::new(1.0, 4.0, 1.0, 1.0, t).unwrap()
}

fn sweep() -> Vec<f64> {
    (0..21).map(|k| 10f64.powf(-1.0 + k as f64 / 10.0)).collect()
}

struct Report {
    passed: usize,
    failed: Vec<u32>,
}

impl Report {
    fn record(&mut self, id: u32, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(id);
        }
    }
}

fn gains(dpc: Dpc, ts: &[f64]) -> Vec<(f64, f64, f64)> {
    ts.iter()
        .map(|&t| {
            let o = optimize_rho(&preset(t), dpc).unwrap();
            (t, o.rho_star, 100.0 * o.gain_vs_nocoop)
        })
        .collect()
}

fn peak(g: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    *g.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap()
}

fn c1(r: &mut Report) {
    let start = Instant::now();
    let g = gains(Dpc::Off, &sweep());
    let secs = start.elapsed().as_secs_f64();
    let window: Vec<_> = g.iter().copied().filter(|x| (0.1..=0.5).contains(&x.0)).collect();
    let (t, rho, gain) = peak(&window);
    r.record(
        1,
        (6.0..=14.0).contains(&gain) && secs < 600.0,
        format!("max gain {gain:.2} pp at T={t:.3} (rho*={rho:.3}), sweep took {secs:.1} s"),
    );
}

fn c2(r: &mut Report) {
    let mut ts: Vec<f64> = sweep().into_iter().filter(|&t| t >= 2.0).collect();
    ts.extend([2.0, 5.0]);
    let g = gains(Dpc::Off, &ts);
    let bad: Vec<String> = g
        .iter()
        .filter(|(_, rho, gain)| (rho - 1.0).abs() > 1e-3 || *gain > 0.5)
        .map(|(t, rho, gain)| format!("T={t:.3}: rho*={rho:.4}, gain {gain:.2} pp"))
        .collect();
    let detail = if bad.is_empty() {
        format!("rho*=1 at all {} thresholds", g.len())
    } else {
        format!("{} of {} thresholds off: {}", bad.len(), g.len(), bad.join("; "))
    };
    r.record(2, bad.is_empty(), detail);
}

fn c3(r: &mut Report) {
    let g = gains(Dpc::FullCoop, &sweep());
    let (t, rho, gain) = peak(&g);
    let everywhere = g.iter().all(|x| x.2 > 0.0);
    r.record(
        3,
        (12.0..=22.0).contains(&gain) && (0.1..=0.5).contains(&t) && everywhere,
        format!("peak {gain:.2} pp at T={t:.3} (rho*={rho:.3}), positive at every T: {everywhere}"),
    );
}

fn c4(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut misses = Vec::new();
    for rho in GRID_RHO {
        for dpc in [Dpc::Off, Dpc::FullCoop] {
            if rho == 1.0 && dpc.is_enabled() {
                continue;
            }
            let cfg = SimConfig::new(SimMode::ShotNoise, preset(1.0), rho, dpc, 1_000_000, 4).unwrap();
            let sim = simulate_coverage_curve(&cfg, &GRID_T).unwrap();
            for (k, &t) in GRID_T.iter().enumerate() {
                let exact = coverage_probability(&preset(t), rho, dpc).unwrap().coverage;
                let z = (sim[k].coverage - exact).abs() / sim[k].stderr;
                worst = worst.max(z);
                if z > 3.0 {
                    misses.push(format!("rho={rho} T={t} {dpc:?}: {z:.2} sigma"));
                }
            }
        }
    }
    r.record(4, misses.is_empty(), format!("worst deviation {worst:.2} sigma {}", misses.join("; ")));
}

fn c5(r: &mut Report) {
    let mut worst = (0.0f64, String::new());
    let mut misses = Vec::new();
    for rho in GRID_RHO {
        let shot = SimConfig::new(SimMode::ShotNoise, preset(1.0), rho, Dpc::Off, 1_000_000, 5).unwrap();
        let full = SimConfig::new(SimMode::FullVoronoi, preset(1.0), rho, Dpc::Off, 20_000, 6).unwrap();
        let a = simulate_coverage_curve(&shot, &GRID_T).unwrap();
        let b = simulate_coverage_curve(&full, &GRID_T).unwrap();
        for (k, &t) in GRID_T.iter().enumerate() {
            let d = b[k].coverage - a[k].coverage;
            let sigma = a[k].stderr.hypot(b[k].stderr);
            let label = format!("rho={rho} T={t}: full {:.4} vs shot {:.4}", b[k].coverage, a[k].coverage);
            if d.abs() > worst.0 {
                worst = (d.abs(), label.clone());
            }
            if d.abs() > (3.0 * sigma).max(0.02) {
                misses.push(label);
            }
        }
    }
    let detail = if misses.is_empty() {
        format!("largest gap {:.4} ({})", worst.0, worst.1)
    } else {
        format!("{} of 15 points off: {}", misses.len(), misses.join("; "))
    };
    r.record(5, misses.is_empty(), detail);
}

/// Interference at the origin: a marked station at `r2` plus a Poisson field
/// beyond it, drawn by radial arrivals and closed with the mean of the rest.
fn brute_interference(rng: &mut StreamRng, rho: f64, r2: f64, beta: f64) -> f64 {
    let mark = |rng: &mut StreamRng| {
        if unit(rng) < rho * rho {
            exponential(rng, 1.0)
        } else {
            0.5 * (exponential(rng, 1.0) + exponential(rng, 1.0))
        }
    };
    let mut total = mark(rng) * r2.powf(-beta);
    let mut area = PI * r2 * r2;
    let stop = area + 256.0;
    loop {
        area += exponential(rng, 1.0);
        if area > stop {
            break;
        }
        total += mark(rng) * (area / PI).powf(-beta / 2.0);
    }
    let r_stop_sq = stop / PI;
    total + 2.0 * PI * r_stop_sq.powf(1.0 - beta / 2.0) / (beta - 2.0)
}

fn c6(r: &mut Report) {
    let zero = Complex64::new(0.0, 0.0);
    let h = 1e-6;
    let mut notes = Vec::new();
    let mut ok = true;
    let zp = ZLaplaceParams::from_distances(0.3, 0.5, 1.0, 4.0).unwrap();
    let z0 = (z_laplace(zero, &zp).unwrap() - 1.0).norm();
    let z_rel = ((1.0 - z_laplace(Complex64::new(h, 0.0), &zp).unwrap().re) / h / z_mean(&zp) - 1.0).abs();
    ok &= z0 < 1e-12 && z_rel < 1e-3;
    notes.push(format!("L_Z(0) off by {z0:.0e}, slope {z_rel:.1e} rel"));

    let mut margin = f64::INFINITY;
    for mu in [0.1, 1.0, 16.0] {
        let zp = ZLaplaceParams::new(mu, mu).unwrap();
        for k in 0..30 {
            let s = 10f64.powf(-3.0 + 6.0 * k as f64 / 29.0);
            let half_z = z_laplace(Complex64::new(s / 2.0, 0.0), &zp).unwrap().re;
            margin = margin.min(1.0 / (1.0 + s / mu) - half_z);
        }
    }
    ok &= margin >= 0.0;
    notes.push(format!("ordering margin {margin:.1e}"));

    let p = preset(1.0);
    let r2 = 0.5;
    let mean = interference_mean(r2, &p).unwrap();
    let n = 400_000;
    for (k, rho) in GRID_RHO.into_iter().enumerate() {
        let l0 = (interference_laplace(zero, rho, r2, &p).unwrap() - 1.0).norm();
        let slope = (1.0 - interference_laplace(Complex64::new(h, 0.0), rho, r2, &p).unwrap().re) / h;
        let rel = (slope / mean - 1.0).abs();
        let mut rng = stream(66, k as u64);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let i = brute_interference(&mut rng, rho, r2, 4.0);
            s1 += i;
            s2 += i * i;
        }
        let m = s1 / n as f64;
        let se = ((s2 / n as f64 - m * m) / n as f64).sqrt();
        let z = (m - mean).abs() / se;
        ok &= l0 < 1e-12 && rel < 1e-3 && z < 3.0;
        notes.push(format!("rho={rho}: L_I(0) off by {l0:.0e}, slope {rel:.1e} rel, MC mean {z:.2} sigma"));
    }
    r.record(6, ok, notes.join(", "));
}

fn c7(r: &mut Report) {
    let mut ok = true;
    let mut notes = Vec::new();
    let n = 10_000_000u64;
    let rho = 0.5;
    for (k, (r1, r2, t)) in [(0.3, 0.4, 1.0), (0.5, 0.55, 0.2), (0.2, 1.0, 2.0)].into_iter().enumerate() {
        let p = preset(t);
        let exact = conditional_coverage_fullcoop(r1, r2, rho, &p, Dpc::Off).unwrap();
        let mut rng = stream(77, k as u64);
        let mut hits = 0u64;
        for _ in 0..n {
            let a = (exponential(&mut rng, 1.0) * r1.powf(-4.0)).sqrt();
            let b = (exponential(&mut rng, 1.0) * r2.powf(-4.0)).sqrt();
            let z = (a + b) * (a + b);
            let i = brute_interference(&mut rng, rho, r2, 4.0);
            if z / 2.0 > t * (1.0 + i) {
                hits += 1;
            }
        }
        let q = hits as f64 / n as f64;
        let se = (q * (1.0 - q) / n as f64).sqrt();
        let dev = (q - exact).abs() / se;
        ok &= dev < 3.0;
        notes.push(format!("({r1}, {r2}, {t}): {exact:.5} vs {q:.5} ({dev:.2} sigma)"));
    }
    r.record(7, ok, notes.join(", "));
}

fn c8(r: &mut Report) {
    let worst = GRID_T
        .iter()
        .map(|&t| {
            let a = coverage_probability(&preset(t), 1.0, Dpc::Off).unwrap().coverage;
            (a - reference_nocoop_coverage(&preset(t)).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    r.record(8, worst <= 1e-3, format!("largest difference {worst:.1e}"));
}

fn c9(r: &mut Report) {
    let n = 200_000u64;
    let window = Window::centered_with_area(100.0).unwrap();
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 0..n {
        let pattern = PointPattern::sample(1.0, window, &mut stream(99, k)).unwrap();
        let r2 = two_nearest(&pattern, window.center()).unwrap().r2;
        s1 += r2;
        s2 += r2 * r2;
    }
    let m = s1 / n as f64;
    let se = ((s2 / n as f64 - m * m) / n as f64).sqrt();
    let dev = (m - 0.75).abs() / se;
    let mut ok = dev < 3.0;
    let mut notes = vec![format!("E[r2] {m:.5} ({dev:.2} sigma)")];
    for rho in [0.2, 0.5, 0.9] {
        let cfg = SimConfig::new(SimMode::FullVoronoi, preset(1.0), rho, Dpc::Off, 100_000, 98).unwrap();
        let f = measure_policy_fraction(&cfg).unwrap();
        let dev = (f.fraction - rho * rho).abs() / f.stderr;
        ok &= dev < 3.0;
        notes.push(format!("P[alone] at rho={rho} {:.4} ({dev:.2} sigma)", f.fraction));
    }
    r.record(9, ok, notes.join(", "));
}

fn main() {
    let mut report = Report {
        passed: 0,
        failed: Vec::new(),
    };
    let criteria: [fn(&mut Report); 9] = [c1, c2, c3, c4, c5, c6, c7, c8, c9];
    for c in criteria {
        c(&mut report);
    }
    println!("{} of 9 criteria pass; failing: {:?}", report.passed, report.failed);
}
