//! Monte Carlo coverage at the typical location.
//!
//! `ShotNoise` draws the two neighbour distances and a marked Poisson field
//! outside `r2`, exactly the model behind the analytic integral.
//! `FullVoronoi` drops a Poisson pattern in a window, places every other
//! station's user uniformly in its cell and lets each of them apply the
//! policy to its own neighbours.
//!
//! Every realization uses its own stream `(seed, index)` and one SINR draw is
//! compared against all thresholds, so curves over `T` are coupled.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;

use rand::Rng;

use crate::channel::{coherent_sum, draw_z};
use crate::coverage::Dpc;
use crate::error::{check_positive, Error, Result};
use crate::geometry::{
    action_for_distances, sample_in_cell, sample_neighbor_distances, two_nearest, Action, Point, PointPattern,
    Window,
};
use crate::interference::{draw_interference, MarkModel, SystemParams};
use crate::quad::{integrate, Tolerance};
#[allow(unused_imports)]
use crate::real::Real;
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    ShotNoise,
    FullVoronoi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mode: SimMode,
    pub realizations: u64,
    pub window: Window,
    pub seed: u64,
    pub params: SystemParams,
    pub rho: f64,
    pub dpc: Dpc,
    /// Add the mean interference of stations outside the window
    /// (`FullVoronoi` only).
    pub far_field_correction: bool,
}

/// Smallest expected number of stations in a `FullVoronoi` window.
pub const MIN_EXPECTED_ATOMS: f64 = 10.0;

impl SimConfig {
    /// Window of half-extent `5/√λ` around the origin, far-field mean added.
    pub fn new(mode: SimMode, params: SystemParams, rho: f64, dpc: Dpc, realizations: u64, seed: u64) -> Result<Self> {
        let window = Window::new(Point::ORIGIN, 5.0 / params.lambda.sqrt())?;
        let config = Self {
            mode,
            realizations,
            window,
            seed,
            params,
            rho,
            dpc,
            far_field_correction: true,
        };
        config.validate()?;
        Ok(config)
    }

    /// Square window holding 20 stations on average, with no far-field term.
    pub fn with_compact_window(self) -> Result<Self> {
        let window = Window::centered_with_area(20.0 / self.params.lambda)?;
        let config = Self {
            window,
            far_field_correction: false,
            ..self
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_window(self, window: Window) -> Result<Self> {
        let config = Self { window, ..self };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        SystemParams::new(
            self.params.lambda,
            self.params.beta,
            self.params.p,
            self.params.sigma2,
            self.params.threshold,
        )?;
        MarkModel::new(self.rho)?;
        if self.realizations == 0 {
            return Err(Error::InvalidParameter {
                name: "realizations",
                value: 0.0,
                reason: "at least one realization is required",
            });
        }
        let expected = self.params.lambda * self.window.area();
        if self.mode == SimMode::FullVoronoi && expected < MIN_EXPECTED_ATOMS {
            return Err(Error::InvalidParameter {
                name: "window",
                value: expected,
                reason: "expected station count in the window is below 10",
            });
        }
        Ok(())
    }

    fn cancels(&self, action: Action) -> bool {
        match action {
            Action::NoCoop => self.dpc == Dpc::BothTerms,
            Action::FullCoop => self.dpc.is_enabled(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub coverage: f64,
    /// `√(q̂(1-q̂)/n)`.
    pub stderr: f64,
    /// Realizations with at least two stations.
    pub n_effective: u64,
}

impl SimEstimate {
    fn from_counts(hits: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewAtoms { found: 0 });
        }
        let q = hits as f64 / n as f64;
        Ok(Self {
            coverage: q,
            stderr: (q * (1.0 - q) / n as f64).sqrt(),
            n_effective: n,
        })
    }
}

/// Hit counts per threshold over a range of realizations. Tallies of
/// disjoint ranges add up exactly, whatever the split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    pub hits: Vec<u64>,
    pub effective: u64,
}

impl Tally {
    pub fn empty(thresholds: usize) -> Self {
        Self {
            hits: vec![0; thresholds],
            effective: 0,
        }
    }

    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.hits.iter_mut().zip(&other.hits) {
            *a += b;
        }
        self.effective += other.effective;
    }

    pub fn estimates(&self) -> Result<Vec<SimEstimate>> {
        self.hits
            .iter()
            .map(|&h| SimEstimate::from_counts(h, self.effective))
            .collect()
    }
}

/// Signal and interference of one shot-noise draw at given distances.
fn shot_noise_parts<R: Rng + ?Sized>(rng: &mut R, config: &SimConfig, marks: &MarkModel, r1: f64, r2: f64) -> (f64, f64) {
    let params = &config.params;
    let action = action_for_distances(r1, r2, config.rho);
    let signal = match action {
        Action::NoCoop => rng::exponential(rng, params.p) * params.path_gain_sq(r1 * r1),
        Action::FullCoop => 0.5 * draw_z(rng, r1, r2, params.p, params.beta),
    };
    // Same draw sequence with and without cancellation keeps runs coupled.
    let field = draw_interference(rng, marks, r2, params);
    let interference = if config.cancels(action) {
        field.outer
    } else {
        field.total()
    };
    (signal, interference)
}

/// Mean interference of stations outside a square of half-extent `h`
/// centred on the receiver: `8 λ p h^{2-β}/(β-2) ∫_0^{π/4} cos^{β-2} θ dθ`.
pub fn outside_square_mean(half_extent: f64, params: &SystemParams) -> Result<f64> {
    check_positive("half_extent", half_extent)?;
    let beta = params.beta;
    let angular = integrate(|t: f64| t.cos().powf(beta - 2.0), 0.0, PI / 4.0, &Tolerance::new(1e-14, 1e-12))?;
    Ok(8.0 * params.lambda * params.p * half_extent.powf(2.0 - beta) / (beta - 2.0) * angular.value)
}

/// Per-realization state that does not depend on the realization.
struct Prepared {
    far_field: f64,
    marks: MarkModel,
}

fn prepare(config: &SimConfig) -> Result<Prepared> {
    config.validate()?;
    let marks = MarkModel::new(config.rho)?;
    let far_field = if config.mode == SimMode::FullVoronoi && config.far_field_correction {
        outside_square_mean(config.window.half_extent(), &config.params)?
    } else {
        0.0
    };
    Ok(Prepared { far_field, marks })
}

fn full_voronoi_parts(rng: &mut StreamRng, config: &SimConfig, far_field: f64) -> Result<(f64, f64, Action)> {
    let params = &config.params;
    let pattern = PointPattern::sample(params.lambda, config.window, rng)?;
    let origin = config.window.center();
    let pair = two_nearest(&pattern, origin)?;
    let action = action_for_distances(pair.r1, pair.r2, config.rho);
    let gain = |d2: f64| params.path_gain_sq(d2);
    let atoms = pattern.atoms();
    let h1 = rng::exponential(rng, params.p) * gain(pair.r1 * pair.r1);
    let signal = match action {
        Action::NoCoop => h1,
        Action::FullCoop => {
            let h2 = rng::exponential(rng, params.p) * gain(pair.r2 * pair.r2);
            0.5 * coherent_sum(h1, h2)
        }
    };
    let silenced = if config.cancels(action) {
        Some(pair.second_index)
    } else {
        None
    };
    let mut interference = far_field;
    for (j, &station) in atoms.iter().enumerate() {
        if j == pair.first_index {
            continue;
        }
        let user = match sample_in_cell(&pattern, j, rng) {
            Ok(u) => u,
            // Coincident stations: the lower index owns the cell.
            Err(Error::EmptyCell { .. }) => continue,
            Err(e) => return Err(e),
        };
        let own = two_nearest(&pattern, user)?;
        let emit = |k: usize| silenced != Some(k);
        match action_for_distances(own.r1, own.r2, config.rho) {
            Action::NoCoop => {
                let h = rng::exponential(rng, params.p) * gain(station.dist2(origin));
                if emit(j) {
                    interference += h;
                }
            }
            Action::FullCoop => {
                let partner = own.second_index;
                let ha = 0.5 * rng::exponential(rng, params.p) * gain(station.dist2(origin));
                let hb = 0.5 * rng::exponential(rng, params.p) * gain(atoms[partner].dist2(origin));
                let theta = rng::phase(rng);
                match (emit(j), emit(partner)) {
                    (true, true) => interference += ha + hb + 2.0 * (ha * hb).sqrt() * theta.cos(),
                    (true, false) => interference += ha,
                    (false, true) => interference += hb,
                    (false, false) => {}
                }
            }
        }
    }
    Ok((signal, interference, action))
}

fn sinr_with(config: &SimConfig, prepared: &Prepared, index: u64) -> Result<f64> {
    let mut rng = rng::stream(config.seed, index);
    let (signal, interference) = match config.mode {
        SimMode::ShotNoise => {
            let (r1, r2) = sample_neighbor_distances(&mut rng, config.params.lambda);
            shot_noise_parts(&mut rng, config, &prepared.marks, r1, r2)
        }
        SimMode::FullVoronoi => {
            let (s, i, _) = full_voronoi_parts(&mut rng, config, prepared.far_field)?;
            (s, i)
        }
    };
    Ok(signal / (config.params.sigma2 + interference))
}

/// SINR of realization `index`. Fails with `TooFewAtoms` when the window
/// holds fewer than two stations.
pub fn simulate_sinr_once(config: &SimConfig, index: u64) -> Result<f64> {
    sinr_with(config, &prepare(config)?, index)
}

/// Hits per threshold over the realizations in `range`.
pub fn tally(config: &SimConfig, thresholds: &[f64], range: Range<u64>) -> Result<Tally> {
    let prepared = prepare(config)?;
    for &t in thresholds {
        check_positive("threshold", t)?;
    }
    let mut out = Tally::empty(thresholds.len());
    for index in range {
        let sinr = match sinr_with(config, &prepared, index) {
            Ok(v) => v,
            Err(Error::TooFewAtoms { .. }) => continue,
            Err(e) => return Err(e),
        };
        out.effective += 1;
        for (h, &t) in out.hits.iter_mut().zip(thresholds) {
            if sinr > t {
                *h += 1;
            }
        }
    }
    Ok(out)
}

/// Coverage estimates at several thresholds from the same realizations.
pub fn simulate_coverage_curve(config: &SimConfig, thresholds: &[f64]) -> Result<Vec<SimEstimate>> {
    tally(config, thresholds, 0..config.realizations)?.estimates()
}

/// Fraction of realizations with SINR above `config.params.threshold`.
pub fn simulate_coverage(config: &SimConfig) -> Result<SimEstimate> {
    let mut v = simulate_coverage_curve(config, &[config.params.threshold])?;
    Ok(v.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyFraction {
    pub fraction: f64,
    pub stderr: f64,
    pub n_effective: u64,
}

/// Share of `FullVoronoi` realizations in which the typical location is
/// served alone.
pub fn measure_policy_fraction(config: &SimConfig) -> Result<PolicyFraction> {
    config.validate()?;
    if config.mode != SimMode::FullVoronoi {
        return Err(Error::InvalidParameter {
            name: "mode",
            value: 0.0,
            reason: "policy fraction is measured on full patterns",
        });
    }
    let (mut alone, mut n) = (0u64, 0u64);
    for index in 0..config.realizations {
        let mut rng = rng::stream(config.seed, index);
        let pattern = PointPattern::sample(config.params.lambda, config.window, &mut rng)?;
        let pair = match two_nearest(&pattern, config.window.center()) {
            Ok(p) => p,
            Err(Error::TooFewAtoms { .. }) => continue,
            Err(e) => return Err(e),
        };
        n += 1;
        if action_for_distances(pair.r1, pair.r2, config.rho) == Action::NoCoop {
            alone += 1;
        }
    }
    let e = SimEstimate::from_counts(alone, n)?;
    Ok(PolicyFraction {
        fraction: e.coverage,
        stderr: e.stderr,
        n_effective: e.n_effective,
    })
}
