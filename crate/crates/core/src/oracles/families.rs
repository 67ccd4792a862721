//! Charts for the shipped families. Windows are chosen wide enough to hold
//! every optimizer the acceptance grids can produce.

use super::{Axis, FamilyGrid, OracleFamily, Target, DEFAULT_RESOLUTION};
use crate::coverage::{CoverageModel, SupportSet};
use crate::interval::{IntervalModel, IntervalParams};
use crate::model::BanditModel;
use crate::normal::{NormalMeanModel, NormalParams, NormalThresholdModel, NormalVarianceModel};
use crate::pareto::{ParetoModel, ParetoParams};

fn grid(outer: Option<Axis>, window: (f64, f64), limit: f64, step: f64) -> FamilyGrid {
    FamilyGrid {
        outer,
        inner_window: Axis {
            lo: window.0,
            hi: window.1,
        },
        inner_limit: limit,
        inner_step: step,
        resolution: DEFAULT_RESOLUTION,
    }
}

/// `x = ln(β̃/β) ≤ 0`, `y = ln(α/α̃)`. The edge `α̃ = ℓ` is part of the chart so
/// that an unbounded score is reported as `∞`.
impl OracleFamily for ParetoModel<f64> {
    type Params = ParetoParams<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        self.score(g)
    }

    fn grid(&self, f: &Self::Params, _target: Target) -> FamilyGrid {
        let span = 4.0;
        let limit = if self.floor() > 0.0 {
            (f.alpha / self.floor()).ln()
        } else {
            f64::INFINITY
        };
        let top = 2.0 + (1.0 + span * f.alpha).ln();
        grid(Some(Axis { lo: -span, hi: 0.0 }), (-2.0, top), limit, 1.0)
    }

    fn member(&self, f: &Self::Params, x: f64, y: f64) -> Self::Params {
        let limit = self.grid(f, Target::Radius(1.0)).inner_limit;
        let alpha = if y >= limit { self.floor() } else { f.alpha * (-y).exp() };
        ParetoParams {
            alpha,
            beta: f.beta * x.exp(),
        }
    }
}

/// `T = S ∪ [c, c + w]` with `x = c` and `y = w`.
impl OracleFamily for CoverageModel {
    type Params = SupportSet<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        BanditModel::<f64>::score(self, g)
    }

    fn grid(&self, _f: &Self::Params, _target: Target) -> FamilyGrid {
        grid(Some(Axis { lo: 0.0, hi: 1.0 }), (0.0, 1.0), 1.0, 0.05)
    }

    fn member(&self, f: &Self::Params, x: f64, y: f64) -> Self::Params {
        let (a, b) = (x.clamp(0.0, 1.0), (x + y).clamp(0.0, 1.0));
        if b <= a {
            return f.clone();
        }
        union_with(f, a, b)
    }
}

fn union_with(s: &SupportSet<f64>, a: f64, b: f64) -> SupportSet<f64> {
    let mut pieces: Vec<(f64, f64)> = s.intervals().to_vec();
    pieces.push((a, b));
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    SupportSet::new(merged).expect("union of valid pieces is valid")
}

/// `ã = a - x (b - a)`, `b̃ = b + y (b - a)`.
impl OracleFamily for IntervalModel<f64> {
    type Params = IntervalParams<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        self.score(g)
    }

    fn grid(&self, _f: &Self::Params, target: Target) -> FamilyGrid {
        let span = match target {
            Target::Radius(delta) => delta.exp_m1().min(100.0),
            Target::Score(_) => 4.0,
        };
        grid(Some(Axis { lo: 0.0, hi: span }), (0.0, 1.0), f64::INFINITY, 1.0)
    }

    fn member(&self, f: &Self::Params, x: f64, y: f64) -> Self::Params {
        let w = f.width();
        IntervalParams {
            low: f.low - x * w,
            high: f.high + y * w,
        }
    }
}

/// `x = ln(σ̃/σ)`, `y = (μ̃ - μ)/σ`.
impl OracleFamily for NormalMeanModel {
    type Params = NormalParams<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        self.score(g)
    }

    fn grid(&self, f: &Self::Params, target: Target) -> FamilyGrid {
        let top = match target {
            Target::Radius(delta) => 2.0 * delta + 1.0,
            Target::Score(rho) => (((rho - f.mu) / f.sigma).powi(2)).ln_1p() + 1.0,
        };
        grid(Some(Axis { lo: -1.0, hi: top }), (-1.0, 1.0), f64::INFINITY, 1.0)
    }

    fn member(&self, f: &Self::Params, x: f64, y: f64) -> Self::Params {
        NormalParams {
            mu: f.mu + y * f.sigma,
            sigma: f.sigma * x.exp(),
        }
    }
}

/// One-dimensional: `y = ln(σ/σ̃)` at the common mean.
impl OracleFamily for NormalVarianceModel {
    type Params = NormalParams<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        self.score(g)
    }

    fn grid(&self, _f: &Self::Params, _target: Target) -> FamilyGrid {
        grid(None, (-2.0, 2.0), f64::INFINITY, 1.0)
    }

    fn member(&self, f: &Self::Params, _x: f64, y: f64) -> Self::Params {
        NormalParams {
            mu: f.mu,
            sigma: f.sigma * (-y).exp(),
        }
    }
}

/// One-dimensional: `y = (μ̃ - μ)/σ_i` with `σ_i` known.
impl OracleFamily for NormalThresholdModel<f64> {
    type Params = NormalParams<f64>;

    fn divergence(&self, f: &Self::Params, g: &Self::Params) -> f64 {
        self.kl(f, g)
    }

    fn score_of(&self, g: &Self::Params) -> f64 {
        self.score(g)
    }

    fn grid(&self, _f: &Self::Params, _target: Target) -> FamilyGrid {
        grid(None, (-2.0, 2.0), f64::INFINITY, 1.0)
    }

    fn member(&self, f: &Self::Params, _x: f64, y: f64) -> Self::Params {
        NormalParams {
            mu: f.mu + y * f.sigma,
            sigma: f.sigma,
        }
    }
}
