//! Base-station point patterns, nearest-two-neighbour queries, uniform
//! user placement inside 1-Voronoi cells, and the geometric ρ-policy.
//!
//! Cells are never built as polygons. Everything reduces to nearest-neighbour
//! predicates, so correctness does not depend on any tessellation code.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{check_positive, Error, Result};
#[allow(unused_imports)]
use crate::real::Real;
use crate::rng::{self, StreamRng};

/// A point in the plane (metres).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned square observation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    center: Point,
    half_extent: f64,
}

impl Window {
    pub fn new(center: Point, half_extent: f64) -> Result<Self> {
        check_positive("half_extent", half_extent)?;
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { center, half_extent })
    }

    /// Square window centred at the origin with the given area.
    pub fn centered_with_area(area: f64) -> Result<Self> {
        check_positive("area", area)?;
        Self::new(Point::ORIGIN, 0.5 * area.sqrt())
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn area(&self) -> f64 {
        let side = 2.0 * self.half_extent;
        side * side
    }

    pub fn contains(&self, p: Point) -> bool {
        (p.x - self.center.x).abs() <= self.half_extent && (p.y - self.center.y).abs() <= self.half_extent
    }

    fn uniform_point(&self, rng: &mut StreamRng) -> Point {
        let h = self.half_extent;
        Point::new(
            self.center.x + h * (2.0 * rng::unit(rng) - 1.0),
            self.center.y + h * (2.0 * rng::unit(rng) - 1.0),
        )
    }
}

/// One realization of base-station positions inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    atoms: Vec<Point>,
    intensity: f64,
    window: Window,
}

impl PointPattern {
    pub fn new(atoms: Vec<Point>, intensity: f64, window: Window) -> Result<Self> {
        check_positive("intensity", intensity)?;
        if let Some(outside) = atoms.iter().find(|p| !window.contains(**p)) {
            return Err(Error::InvalidParameter {
                name: "atoms",
                value: outside.x.hypot(outside.y),
                reason: "atom lies outside the window",
            });
        }
        Ok(Self {
            atoms,
            intensity,
            window,
        })
    }

    /// Homogeneous Poisson pattern drawn from an existing stream.
    pub fn sample(intensity: f64, window: Window, rng: &mut StreamRng) -> Result<Self> {
        check_positive("intensity", intensity)?;
        let mean = intensity * window.area();
        let count = Poisson::new(mean)
            .map_err(|_| Error::InvalidParameter {
                name: "intensity * area",
                value: mean,
                reason: "not a valid Poisson mean",
            })?
            .sample(rng) as usize;
        let atoms = (0..count).map(|_| window.uniform_point(rng)).collect();
        Ok(Self {
            atoms,
            intensity,
            window,
        })
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Index of the closest atom; ties go to the lower index.
    pub fn nearest(&self, location: Point) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, a) in self.atoms.iter().enumerate() {
            let d = a.dist2(location);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Homogeneous Poisson point pattern with intensity `intensity` in `window`,
/// deterministic in `seed`.
pub fn sample_ppp(intensity: f64, window: Window, seed: u64) -> Result<PointPattern> {
    PointPattern::sample(intensity, window, &mut rng::stream(seed, 0))
}

/// First and second closest atoms to a location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborPair {
    pub first_index: usize,
    pub second_index: usize,
    pub r1: f64,
    pub r2: f64,
}

/// Two nearest atoms to `location`, ties broken by lower atom index.
pub fn two_nearest(pattern: &PointPattern, location: Point) -> Result<NeighborPair> {
    if pattern.len() < 2 {
        return Err(Error::TooFewAtoms { found: pattern.len() });
    }
    // (index, squared distance), kept ordered by (distance, index).
    let mut first = (usize::MAX, f64::INFINITY);
    let mut second = (usize::MAX, f64::INFINITY);
    for (i, a) in pattern.atoms.iter().enumerate() {
        let d = a.dist2(location);
        if d < first.1 {
            second = first;
            first = (i, d);
        } else if d < second.1 {
            second = (i, d);
        }
    }
    Ok(NeighborPair {
        first_index: first.0,
        second_index: second.0,
        r1: first.1.sqrt(),
        r2: second.1.sqrt(),
    })
}

/// Joint density of the distances to the two closest atoms of a planar
/// Poisson process, `(2λπ)² r1 r2 exp(−λπ r2²)` on `0 < r1 ≤ r2`, zero elsewhere.
pub fn joint_distance_pdf(r1: f64, r2: f64, intensity: f64) -> f64 {
    if !(r1 > 0.0 && r1 <= r2) || !(intensity > 0.0) {
        return 0.0;
    }
    let c = 2.0 * intensity * PI;
    c * c * r1 * r2 * (-intensity * PI * r2 * r2).exp()
}

/// Mean distance to the second closest atom, `3 / (4√λ)`.
pub fn expected_r2(intensity: f64) -> Result<f64> {
    check_positive("intensity", intensity)?;
    Ok(3.0 / (4.0 * intensity.sqrt()))
}

/// Draw `(r1, r2)` from the joint density by mapping to the unit-rate
/// process in `λπr²` coordinates: the first two points are `E1` and `E1+E2`.
pub fn sample_neighbor_distances<R: Rng + ?Sized>(rng: &mut R, intensity: f64) -> (f64, f64) {
    let e1 = rng::exponential(rng, 1.0);
    let e2 = rng::exponential(rng, 1.0);
    let scale = intensity * PI;
    ((e1 / scale).sqrt(), ((e1 + e2) / scale).sqrt())
}

/// Global policy parameter ρ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    rho: f64,
}

impl PolicyParams {
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

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Serving decision for one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    /// Served by the closest station alone (power split `a = 0`).
    NoCoop,
    /// Coherent service from both closest stations (power split `a = 1/2`).
    FullCoop,
}

impl Action {
    pub fn power_split(self) -> f64 {
        match self {
            Action::NoCoop => 0.0,
            Action::FullCoop => 0.5,
        }
    }
}

/// `NoCoop` iff `r1 ≤ ρ r2`.
#[inline]
pub fn action_for_distances(r1: f64, r2: f64, rho: f64) -> Action {
    if r1 <= rho * r2 {
        Action::NoCoop
    } else {
        Action::FullCoop
    }
}

pub fn policy_action(pair: &NeighborPair, policy: &PolicyParams) -> Action {
    action_for_distances(pair.r1, pair.r2, policy.rho)
}

/// Probability that a typical location does not ask for cooperation: ρ².
pub fn no_coop_probability(policy: &PolicyParams) -> f64 {
    policy.rho * policy.rho
}

const MAX_CELL_ATTEMPTS: usize = 1 << 20;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Index of the 60° wedge around the origin containing direction `(dx, dy)`;
/// wedge `k` covers angles `[kπ/3, (k+1)π/3)`.
fn wedge(dx: f64, dy: f64) -> usize {
    if dy >= 0.0 {
        if dy < SQRT_3 * dx {
            0
        } else if dy < -SQRT_3 * dx {
            2
        } else {
            1
        }
    } else if dy >= SQRT_3 * dx {
        3
    } else if dy >= -SQRT_3 * dx {
        5
    } else {
        4
    }
}

/// Bounding box `[x0, x1] × [y0, y1]` of the disc sector of radius `r`
/// spanning wedge `k`, relative to its apex.
fn wedge_box(k: usize, r: f64) -> [f64; 4] {
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let lo = k as f64 * PI / 3.0;
    let hi = lo + PI / 3.0;
    let mut take = |a: f64| {
        let (s, c) = (a.sin(), a.cos());
        x0 = x0.min(r * c);
        x1 = x1.max(r * c);
        y0 = y0.min(r * s);
        y1 = y1.max(r * s);
    };
    take(lo);
    take(hi);
    for q in 0..4 {
        let a = q as f64 * PI / 2.0;
        if a > lo && a < hi {
            take(a);
        }
    }
    [x0, x1, y0, y1]
}

/// Box containing atom `index`'s cell clipped to the window, and the radius
/// around the atom that contains it.
///
/// If a 60° wedge around the atom holds another atom at distance `d`, any
/// point of that wedge farther than `d` is strictly closer to that atom, so
/// the cell's part in the wedge lies within `d`. Empty wedges are bounded by
/// the window.
fn cell_bounds(atoms: &[Point], index: usize, window: &Window) -> ([f64; 4], f64) {
    let z = atoms[index];
    let mut nearest = [f64::INFINITY; 6];
    for (j, q) in atoms.iter().enumerate() {
        if j == index {
            continue;
        }
        let (dx, dy) = (q.x - z.x, q.y - z.y);
        let d2 = dx * dx + dy * dy;
        if d2 == 0.0 {
            continue;
        }
        let k = wedge(dx, dy);
        if d2 < nearest[k] {
            nearest[k] = d2;
        }
    }
    let (c, h) = (window.center(), window.half_extent());
    let far_x = (z.x - (c.x - h)).abs().max((c.x + h - z.x).abs());
    let far_y = (z.y - (c.y - h)).abs().max((c.y + h - z.y).abs());
    let window_reach = far_x.hypot(far_y);
    let mut bounds = [0.0f64; 4];
    let mut reach = 0.0f64;
    for (k, &d2) in nearest.iter().enumerate() {
        let r = d2.sqrt().min(window_reach);
        reach = reach.max(r);
        let b = wedge_box(k, r);
        bounds[0] = bounds[0].min(b[0]);
        bounds[1] = bounds[1].max(b[1]);
        bounds[2] = bounds[2].min(b[2]);
        bounds[3] = bounds[3].max(b[3]);
    }
    let clipped = [
        (z.x + bounds[0]).max(c.x - h),
        (z.x + bounds[1]).min(c.x + h),
        (z.y + bounds[2]).max(c.y - h),
        (z.y + bounds[3]).min(c.y + h),
    ];
    (clipped, reach)
}

/// Uniform location inside the intersection of atom `index`'s 1-Voronoi cell
/// with the window, drawn from an existing stream.
pub fn sample_in_cell(pattern: &PointPattern, index: usize, rng: &mut StreamRng) -> Result<Point> {
    let atoms = pattern.atoms();
    if index >= atoms.len() {
        return Err(Error::NoSuchAtom {
            atom: index,
            len: atoms.len(),
        });
    }
    let z = atoms[index];
    // A lower-indexed duplicate owns the whole cell.
    if pattern.nearest(z) != Some(index) {
        return Err(Error::EmptyCell { atom: index });
    }
    let ([x0, x1, y0, y1], reach) = cell_bounds(atoms, index, pattern.window());
    // Anything closer to a candidate point than `z` is within twice the reach.
    let limit = 4.0 * reach * reach * (1.0 + 1e-12);
    let rivals: Vec<(usize, Point)> = atoms
        .iter()
        .copied()
        .enumerate()
        .filter(|&(j, q)| j != index && q.dist2(z) <= limit)
        .collect();
    for _ in 0..MAX_CELL_ATTEMPTS {
        let p = Point::new(x0 + (x1 - x0) * rng::unit(rng), y0 + (y1 - y0) * rng::unit(rng));
        let own = p.dist2(z);
        let taken = rivals.iter().any(|&(j, q)| {
            let d = q.dist2(p);
            d < own || (d == own && j < index)
        });
        if !taken {
            return Ok(p);
        }
    }
    Err(Error::EmptyCell { atom: index })
}

/// Uniform location in atom `atom_index`'s cell (clipped to the window),
/// deterministic in `seed`.
pub fn sample_user_in_cell(pattern: &PointPattern, atom_index: usize, seed: u64) -> Result<Point> {
    sample_in_cell(pattern, atom_index, &mut rng::stream(seed, atom_index as u64))
}
