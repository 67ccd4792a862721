//! The family-independent allocation loop: an initial phase of `n0` pulls per
//! arm, then argmax-index selection with uniform tie breaking.

use std::collections::BTreeMap;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::BanditModel;
use crate::scalar::Real;

/// Controller state after `clock` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState<S> {
    pub clock: u64,
    pub pulls: Vec<u64>,
    pub stats: Vec<S>,
    pub n0: u64,
}

impl<S> PolicyState<S> {
    pub fn new<T, M>(model: &M, arms: &[M::Params]) -> Self
    where
        T: Real,
        M: BanditModel<T, Stats = S>,
    {
        PolicyState {
            clock: 0,
            pulls: vec![0; arms.len()],
            stats: arms.iter().map(|a| model.new_stats(a)).collect(),
            n0: model.n0(),
        }
    }

    pub fn arm_count(&self) -> usize {
        self.pulls.len()
    }

    /// Number of rounds spent in the initial phase, `n0 · N`.
    pub fn initial_rounds(&self) -> u64 {
        self.n0 * self.arm_count() as u64
    }

    pub fn in_initial_phase(&self) -> bool {
        self.clock < self.initial_rounds()
    }
}

/// One index evaluation: arm `arm` with `t` pulls at global time `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRequest {
    pub arm: usize,
    pub n: u64,
    pub t: u64,
}

impl IndexRequest {
    pub fn evaluate<T: Real, M: BanditModel<T>>(&self, model: &M, stats: &M::Stats) -> Result<T> {
        let dt = model.d_tilde(self.t);
        if self.t <= dt {
            return Err(Error::Precondition(format!(
                "arm {} has t = {} <= d~(t) = {dt}",
                self.arm, self.t
            )));
        }
        match model.index(stats, self.n) {
            // An undefined estimate forces exploration of that arm.
            Err(Error::Degenerate(_)) => Ok(T::infinity()),
            other => other,
        }
    }
}

/// Picks the next arm.
///
/// During the initial phase the indices are ignored and the arms are cycled
/// round-robin (lowest index among the least-pulled arms). Afterwards an
/// argmax of `indices` is returned, exact ties broken uniformly at random.
pub fn select_arm<T, S, R>(state: &PolicyState<S>, indices: &[T], rng: &mut R) -> Result<usize>
where
    T: Real,
    R: Rng + ?Sized,
{
    let arms = state.arm_count();
    if arms == 0 {
        return Err(Error::NoArms);
    }
    if state.in_initial_phase() {
        let fewest = *state.pulls.iter().min().expect("nonempty");
        return Ok(state.pulls.iter().position(|&p| p == fewest).expect("min exists"));
    }
    if indices.len() != arms {
        return Err(Error::Precondition(format!(
            "{} indices for {arms} arms",
            indices.len()
        )));
    }
    argmax_uniform(indices, rng)
}

/// Argmax with uniform tie breaking over exactly equal maxima.
pub fn argmax_uniform<T: Real, R: Rng + ?Sized>(values: &[T], rng: &mut R) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::NoArms);
    }
    let mut best = T::neg_infinity();
    let mut first = 0;
    let mut ties = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::NanIndex(i));
        }
        if v > best || i == 0 {
            best = v;
            first = i;
            ties = 1;
        } else if v == best {
            ties += 1;
        }
    }
    if ties == 1 {
        return Ok(first);
    }
    let pick = rng.random_range(0..ties);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == best)
        .nth(pick)
        .map(|(i, _)| i)
        .expect("tie set nonempty"))
}

/// Records a reward for `arm` and advances the clock.
pub fn observe<T, M>(model: &M, state: &mut PolicyState<M::Stats>, arm: usize, reward: T) -> Result<()>
where
    T: Real,
    M: BanditModel<T>,
{
    if arm >= state.arm_count() {
        return Err(Error::Precondition(format!(
            "arm {arm} out of range for {} arms",
            state.arm_count()
        )));
    }
    if !reward.is_finite() {
        return Err(Error::domain("reward", reward.f64(), "finite reals"));
    }
    model.update(&mut state.stats[arm], reward)?;
    state.pulls[arm] += 1;
    state.clock += 1;
    Ok(())
}

/// Fills `out` with every arm's index at the current clock.
pub fn compute_indices<T, M>(model: &M, state: &PolicyState<M::Stats>, out: &mut Vec<T>) -> Result<()>
where
    T: Real,
    M: BanditModel<T>,
{
    out.clear();
    for (arm, (stats, &t)) in state.stats.iter().zip(&state.pulls).enumerate() {
        let request = IndexRequest { arm, n: state.clock, t };
        out.push(request.evaluate(model, stats)?);
    }
    Ok(())
}

/// Draws one reward from `arm` by inverse-transform sampling.
pub fn draw<T, M, R>(model: &M, arm: &M::Params, rng: &mut R) -> Result<T>
where
    T: Real,
    M: BanditModel<T>,
    R: Rng + ?Sized,
{
    let u: f64 = rng.sample(Open01);
    let mut u = T::c(u);
    if u >= T::one() {
        // f32 rounding of an f64 uniform just below one.
        u = T::one() - T::epsilon();
    }
    model.quantile(arm, u)
}

/// `true` for arms attaining the best score among `arms`.
pub fn optimal_set<T: Real, M: BanditModel<T>>(model: &M, arms: &[M::Params]) -> Vec<bool> {
    let scores: Vec<T> = arms.iter().map(|a| model.score(a)).collect();
    let best = scores.iter().copied().fold(T::neg_infinity(), T::max);
    scores.iter().map(|&s| s == best).collect()
}

/// Runs the policy until the last checkpoint, calling `on_round(arm, reward)`
/// after every round, and returns the per-arm pull counts at each checkpoint.
pub fn simulate<T, M, R, F>(
    model: &M,
    arms: &[M::Params],
    checkpoints: &[u64],
    rng: &mut R,
    mut on_round: F,
) -> Result<Vec<Vec<u64>>>
where
    T: Real,
    M: BanditModel<T>,
    R: Rng + ?Sized,
    F: FnMut(usize, T),
{
    if arms.len() < 2 {
        return Err(Error::Precondition(format!(
            "at least two arms are required, got {}",
            arms.len()
        )));
    }
    for arm in arms {
        model.validate(arm)?;
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("checkpoints must be strictly increasing".into()));
    }
    let horizon = *checkpoints.last().ok_or_else(|| Error::Precondition("no checkpoints".into()))?;
    let mut state = PolicyState::new(model, arms);
    if horizon < state.initial_rounds() {
        return Err(Error::Precondition(format!(
            "horizon {horizon} is shorter than the initial phase n0*N = {}",
            state.initial_rounds()
        )));
    }

    let mut snapshots = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = checkpoints.iter().peekable();
    let mut indices = Vec::with_capacity(arms.len());
    while state.clock < horizon {
        if !state.in_initial_phase() {
            compute_indices(model, &state, &mut indices)?;
        }
        let arm = select_arm(&state, &indices, rng)?;
        let reward = draw(model, &arms[arm], rng)?;
        observe(model, &mut state, arm, reward)?;
        on_round(arm, reward);
        while next_checkpoint.peek().is_some_and(|&&c| c == state.clock) {
            snapshots.push(state.pulls.clone());
            next_checkpoint.next();
        }
    }
    // Checkpoints at clock 0 are never hit by the loop.
    while snapshots.len() < checkpoints.len() {
        snapshots.insert(0, vec![0; arms.len()]);
    }
    Ok(snapshots)
}

/// Full record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub selections: Vec<u32>,
    pub rewards: Vec<T>,
    /// Sub-optimal activations `T^o(n)` at each checkpoint `n`.
    pub suboptimal_counts: BTreeMap<u64, u64>,
}

/// Powers of ten up to `horizon`, followed by `horizon` itself.
pub fn decade_checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |c| c.checked_mul(10))
        .take_while(|&c| c < horizon)
        .collect();
    out.push(horizon);
    out
}

/// Runs `horizon` rounds seeded by `seed` and records the complete trace.
pub fn run_horizon<T, M>(model: &M, arms: &[M::Params], horizon: u64, seed: u64) -> Result<Trace<T>>
where
    T: Real,
    M: BanditModel<T>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checkpoints = decade_checkpoints(horizon);
    let optimal = optimal_set(model, arms);
    let mut selections = Vec::with_capacity(horizon as usize);
    let mut rewards = Vec::with_capacity(horizon as usize);
    let snapshots = simulate(model, arms, &checkpoints, &mut rng, |arm, reward| {
        selections.push(arm as u32);
        rewards.push(reward);
    })?;
    let suboptimal_counts = checkpoints
        .iter()
        .zip(&snapshots)
        .map(|(&n, pulls)| {
            let sub = pulls
                .iter()
                .zip(&optimal)
                .filter(|(_, &opt)| !opt)
                .map(|(&p, _)| p)
                .sum();
            (n, sub)
        })
        .collect();
    Ok(Trace {
        selections,
        rewards,
        suboptimal_counts,
    })
}
