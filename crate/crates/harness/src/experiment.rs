//! Seeded replications, aggregation, and the `1/M` targets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use ucblab_core::engine::simulate;
use ucblab_core::oracles::{m_oracle, OracleFamily};
use ucblab_core::BanditModel;

use crate::config::{ExperimentConfig, Scenario, TargetMode};
use crate::error::{HarnessError, Result};
use crate::slope::{fit_slope, SlopeFit};
use crate::with_scenario;

/// Above this many initial-phase rounds the smallest horizon is left out of
/// the slope fit.
pub const INITIAL_PHASE_EXCLUSION: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub horizon: u64,
    pub mean_pulls: f64,
    pub se_pulls: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmCurve {
    pub arm: usize,
    pub is_optimal: bool,
    /// `1 / M_{f_i}(s*)`; absent for optimal arms.
    pub target_inv_m: Option<f64>,
    pub slope: Option<SlopeFit>,
    pub points: Vec<CurvePoint>,
}

impl ArmCurve {
    pub fn mean_at(&self, horizon: u64) -> Option<f64> {
        self.points.iter().find(|p| p.horizon == horizon).map(|p| p.mean_pulls)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveMetadata {
    pub family: String,
    pub seed: u64,
    pub replications: u64,
    pub horizons: Vec<u64>,
    pub slope_horizons: Vec<u64>,
    pub excluded_smallest_horizon: bool,
    pub n0: u64,
    pub arm_count: usize,
    pub s_star: f64,
    pub target_mode: TargetMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretCurve {
    pub arms: Vec<ArmCurve>,
    pub metadata: CurveMetadata,
}

impl RegretCurve {
    /// Mean sub-optimal activations `T^o(n)` at each horizon.
    pub fn suboptimal_means(&self) -> Vec<(u64, f64)> {
        self.metadata
            .horizons
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let total = self.arms.iter().filter(|a| !a.is_optimal).map(|a| a.points[k].mean_pulls).sum();
                (n, total)
            })
            .collect()
    }
}

/// Pull counts of one replication, `[checkpoint][arm]`.
pub fn replicate<M: BanditModel<f64>>(model: &M, arms: &[M::Params], horizons: &[u64], seed: u64) -> Result<Vec<Vec<u64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pulls = simulate(model, arms, horizons, &mut rng, |_, _| {})?;
    for (n, p) in horizons.iter().zip(&pulls) {
        debug_assert_eq!(p.iter().sum::<u64>(), *n);
    }
    Ok(pulls)
}

/// Runs every replication (on `workers` threads if given) and aggregates.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>) -> Result<RegretCurve> {
    let scenario = config.scenario()?;
    let per_rep = run_replications(&scenario, config, workers)?;
    aggregate(&scenario, config, &per_rep)
}

fn run_replications(scenario: &Scenario, config: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<Vec<Vec<u64>>>> {
    let work = || -> Result<Vec<Vec<Vec<u64>>>> {
        with_scenario!(scenario, |model, arms| {
            (0..config.replications)
                .into_par_iter()
                .map(|r| replicate(model, arms, &config.horizons, config.seed.wrapping_add(r)))
                .collect()
        })
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| HarnessError::Verification(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Mean and standard error from exact integer sums, so the result does not
/// depend on how replications were split across workers.
fn mean_se(values: impl Iterator<Item = u64>, count: u64) -> (f64, f64) {
    let (mut sum, mut sumsq) = (0u128, 0u128);
    for v in values {
        sum += v as u128;
        sumsq += (v as u128) * (v as u128);
    }
    let r = count as f64;
    let mean = sum as f64 / r;
    if count < 2 {
        return (mean, 0.0);
    }
    let num = (count as u128) * sumsq - sum * sum;
    let var = num as f64 / (r * (r - 1.0));
    (mean, (var / r).sqrt())
}

fn targets<M, P>(model: &M, arms: &[P], mode: TargetMode) -> Result<(f64, Vec<Option<f64>>)>
where
    M: BanditModel<f64, Params = P> + OracleFamily<Params = P>,
    P: Clone + std::fmt::Debug + PartialEq + Send + Sync,
{
    let scores: Vec<f64> = arms.iter().map(|a| model.score(a)).collect();
    let s_star = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::with_capacity(arms.len());
    for (i, (arm, &s)) in arms.iter().zip(&scores).enumerate() {
        if s == s_star {
            out.push(None);
            continue;
        }
        let m = match mode {
            TargetMode::ClosedForm => model.m(arm, s_star)?,
            TargetMode::Oracle => m_oracle(model, arm, s_star)?,
        };
        if !(m > 0.0 && m.is_finite()) {
            return Err(HarnessError::Verification(format!(
                "arm {i}: M = {m} at s* = {s_star}; a sub-optimal arm needs a positive finite target"
            )));
        }
        out.push(Some(1.0 / m));
    }
    Ok((s_star, out))
}

/// `1/M` targets and `s*` for a validated scenario.
pub fn scenario_targets(scenario: &Scenario, mode: TargetMode) -> Result<(f64, Vec<Option<f64>>)> {
    with_scenario!(scenario, |model, arms| targets(model, arms, mode))
}

/// Horizons used by the slope fit.
pub fn slope_horizons(horizons: &[u64], n0: u64, arm_count: usize) -> (Vec<u64>, bool) {
    let exclude = n0 * arm_count as u64 > INITIAL_PHASE_EXCLUSION && horizons.len() > 3;
    if exclude {
        (horizons[1..].to_vec(), true)
    } else {
        (horizons.to_vec(), false)
    }
}

fn aggregate(scenario: &Scenario, config: &ExperimentConfig, per_rep: &[Vec<Vec<u64>>]) -> Result<RegretCurve> {
    let (s_star, targets) = scenario_targets(scenario, config.target_mode)?;
    let (fit_horizons, excluded) = slope_horizons(&config.horizons, scenario.n0(), scenario.arm_count());
    let reps = per_rep.len() as u64;
    let mut arms = Vec::with_capacity(targets.len());
    for (i, target) in targets.iter().enumerate() {
        let points: Vec<CurvePoint> = config
            .horizons
            .iter()
            .enumerate()
            .map(|(k, &horizon)| {
                let (mean_pulls, se_pulls) = mean_se(per_rep.iter().map(|rep| rep[k][i]), reps);
                CurvePoint {
                    horizon,
                    mean_pulls,
                    se_pulls,
                }
            })
            .collect();
        let slope = match target {
            Some(_) if fit_horizons.len() >= 3 => {
                let pts: Vec<(f64, f64)> = points
                    .iter()
                    .filter(|p| fit_horizons.contains(&p.horizon))
                    .map(|p| ((p.horizon as f64).ln(), p.mean_pulls))
                    .collect();
                Some(fit_slope(&pts)?)
            }
            _ => None,
        };
        arms.push(ArmCurve {
            arm: i,
            is_optimal: target.is_none(),
            target_inv_m: *target,
            slope,
            points,
        });
    }
    Ok(RegretCurve {
        arms,
        metadata: CurveMetadata {
            family: scenario.family().to_string(),
            seed: config.seed,
            replications: config.replications,
            horizons: config.horizons.clone(),
            slope_horizons: fit_horizons,
            excluded_smallest_horizon: excluded,
            n0: scenario.n0(),
            arm_count: scenario.arm_count(),
            s_star,
            target_mode: config.target_mode,
        },
    })
}
