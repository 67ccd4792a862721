//! Brute-force references for `M_f(ρ)` and the sup-form index, plus the
//! analytic lemma bounds used by the statistical tests.
//!
//! The searches only ever call the family's divergence and score. Each family
//! supplies a chart: an optional outer coordinate `x` scanned on a grid, and an
//! inner coordinate `y` along which the score is nondecreasing and the
//! divergence is unimodal.

mod families;
pub mod lemmas;
pub mod search;

use crate::error::{Error, Result};
use search::{bisect, golden_min, linspace};

pub use lemmas::{
    chernoff_bound, correlation, gamma_cdf, ks_critical_value, ks_statistic, normal_tail_bound, pareto_cdf, range_cdf,
    ChernoffKind, Tail,
};

/// Score threshold for `M`, or divergence radius for the index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Score(f64),
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
}

/// Where and how finely to search around one reference density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyGrid {
    pub outer: Option<Axis>,
    /// Window holding the divergence minimizer along each inner line.
    pub inner_window: Axis,
    /// Edge of the family along the inner coordinate (may be infinite).
    pub inner_limit: f64,
    /// Initial stride when walking outward along the inner coordinate.
    pub inner_step: f64,
    pub resolution: usize,
}

pub const DEFAULT_RESOLUTION: usize = 64;

/// Strict `s(g) > ρ` realized with this margin.
pub const SCORE_MARGIN: f64 = 1e-12;

/// A family the oracles can search.
pub trait OracleFamily {
    type Params;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64;
    fn score_of(&self, g: &Self::Params) -> f64;
    fn grid(&self, f: &Self::Params, target: Target) -> FamilyGrid;
    /// The member at chart coordinates `(x, y)`. `x` is ignored by one-dimensional charts.
    fn member(&self, f: &Self::Params, x: f64, y: f64) -> Self::Params;
}

/// Optimizer location and value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    pub value: f64,
    pub outer: Option<f64>,
    /// Whether the outer optimum sits on the first or last grid point.
    pub on_grid_boundary: bool,
}

struct Line<'a, F: OracleFamily> {
    family: &'a F,
    f: &'a F::Params,
    grid: &'a FamilyGrid,
    x: f64,
}

impl<F: OracleFamily> Line<'_, F> {
    fn kl(&self, y: f64) -> f64 {
        let v = self.family.divergence(self.f, &self.family.member(self.f, self.x, y));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    fn score(&self, y: f64) -> f64 {
        self.family.score_of(&self.family.member(self.f, self.x, y))
    }

    fn argmin_kl(&self) -> (f64, f64) {
        let w = self.grid.inner_window;
        let hi = w.hi.min(self.grid.inner_limit);
        let pts: Vec<f64> = linspace(w.lo, hi, self.grid.resolution).collect();
        let vals: Vec<f64> = pts.iter().map(|&y| self.kl(y)).collect();
        let k = first_best(&vals, |a, b| a < b);
        let lo = pts[k.saturating_sub(1)];
        let hi = pts[(k + 1).min(pts.len() - 1)];
        let (y, v) = golden_min(|y| self.kl(y), lo, hi);
        if vals[k] <= v {
            (pts[k], vals[k])
        } else {
            (y, v)
        }
    }

    /// Walks up from `start` until `pred` fails or the family edge is reached.
    /// Returns `Ok(bad)` with a failing point, or `Err(limit)` if it held up to the edge.
    fn walk(&self, start: f64, mut pred: impl FnMut(f64) -> bool) -> std::result::Result<f64, f64> {
        let limit = self.grid.inner_limit;
        let mut step = self.grid.inner_step;
        for _ in 0..200 {
            let y = (start + step).min(limit);
            if !pred(y) {
                return Ok(y);
            }
            if y >= limit {
                return Err(limit);
            }
            step *= 2.0;
        }
        Err(start + step)
    }

    /// `sup { s(g) : I(f, g) < δ }` along this line.
    fn sup_score(&self, delta: f64) -> Option<f64> {
        let (y0, k0) = self.argmin_kl();
        if !(k0 < delta) {
            return None;
        }
        match self.walk(y0, |y| self.kl(y) < delta) {
            Err(edge) => Some(self.score(edge)),
            Ok(bad) => Some(self.score(bisect(y0, bad, |y| self.kl(y) < delta))),
        }
    }

    /// `inf { I(f, g) : s(g) ≥ ρ + margin }` along this line.
    fn inf_kl(&self, rho: f64) -> Option<f64> {
        let thr = rho + SCORE_MARGIN;
        let (y0, k0) = self.argmin_kl();
        if self.score(y0) >= thr {
            return Some(k0);
        }
        let good = match self.walk(y0, |y| self.score(y) < thr) {
            Ok(good) => good,
            Err(_) => return None,
        };
        let y = bisect(good, y0, |y| self.score(y) >= thr);
        Some(self.kl(y))
    }
}

/// First index whose value beats all others under `better` (ties go to the
/// lower parameter value).
fn first_best(vals: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut k = 0;
    for (i, &v) in vals.iter().enumerate() {
        if better(v, vals[k]) {
            k = i;
        }
    }
    k
}

/// Grid scan over the outer coordinate then golden refinement around the best
/// grid point. `h` returns `None` where the line has no feasible member.
fn optimize_outer(grid: &FamilyGrid, maximize: bool, h: impl Fn(f64) -> Option<f64>) -> Option<OracleSolution> {
    let sign = if maximize { -1.0 } else { 1.0 };
    let cost = |x: f64| h(x).map_or(f64::INFINITY, |v| sign * v);
    let Some(axis) = grid.outer else {
        return h(0.0).map(|value| OracleSolution {
            value,
            outer: None,
            on_grid_boundary: false,
        });
    };
    let pts: Vec<f64> = linspace(axis.lo, axis.hi, grid.resolution).collect();
    let vals: Vec<f64> = pts.iter().map(|&x| cost(x)).collect();
    let k = first_best(&vals, |a, b| a < b);
    if vals[k] == f64::INFINITY {
        return None;
    }
    let lo = pts[k.saturating_sub(1)];
    let hi = pts[(k + 1).min(pts.len() - 1)];
    let (x, v) = golden_min(cost, lo, hi);
    let (x, v) = if vals[k] <= v { (pts[k], vals[k]) } else { (x, v) };
    Some(OracleSolution {
        value: sign * v,
        outer: Some(x),
        on_grid_boundary: k == 0 || k + 1 == pts.len(),
    })
}

/// `M_f(ρ) = inf { I(f, g) : s(g) > ρ }` by search.
pub fn m_oracle<F: OracleFamily>(family: &F, f: &F::Params, rho: f64) -> Result<f64> {
    m_oracle_solution(family, f, rho, DEFAULT_RESOLUTION).map(|s| s.value)
}

pub fn m_oracle_solution<F: OracleFamily>(
    family: &F,
    f: &F::Params,
    rho: f64,
    resolution: usize,
) -> Result<OracleSolution> {
    if !rho.is_finite() {
        return Err(Error::domain("rho", rho, "finite reals"));
    }
    if rho <= family.score_of(f) {
        return Ok(OracleSolution {
            value: 0.0,
            outer: None,
            on_grid_boundary: false,
        });
    }
    let grid = FamilyGrid {
        resolution,
        ..family.grid(f, Target::Score(rho))
    };
    optimize_outer(&grid, false, |x| {
        Line {
            family,
            f,
            grid: &grid,
            x,
        }
        .inf_kl(rho)
    })
    .ok_or(Error::Unattainable(rho))
}

/// `C_f(δ) = sup { s(g) : I(f, g) < δ }` by search. With `δ = ln n / (t - d̃(t))`
/// this is the index.
pub fn index_oracle<F: OracleFamily>(family: &F, fhat: &F::Params, radius: f64) -> Result<f64> {
    index_oracle_solution(family, fhat, radius, DEFAULT_RESOLUTION).map(|s| s.value)
}

pub fn index_oracle_solution<F: OracleFamily>(
    family: &F,
    fhat: &F::Params,
    radius: f64,
    resolution: usize,
) -> Result<OracleSolution> {
    if !(radius > 0.0) {
        return Err(Error::domain("radius", radius, "(0, inf)"));
    }
    let grid = FamilyGrid {
        resolution,
        ..family.grid(fhat, Target::Radius(radius))
    };
    let sol = optimize_outer(&grid, true, |x| {
        Line {
            family,
            f: fhat,
            grid: &grid,
            x,
        }
        .sup_score(radius)
    });
    // fhat itself is always inside the ball.
    Ok(sol.unwrap_or(OracleSolution {
        value: family.score_of(fhat),
        outer: None,
        on_grid_boundary: false,
    }))
}
