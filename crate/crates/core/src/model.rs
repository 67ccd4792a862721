//! The contract every concrete family implements: ground truth (sampling,
//! score, divergence, `M`) on one side and the controller's view (statistics,
//! estimator, index) on the other.

use std::fmt::Debug;

use crate::error::Result;
use crate::scalar::Real;

/// A family of distributions `F` with a score functional `s`, together with
/// the index policy that learns it.
pub trait BanditModel<T: Real>: Send + Sync {
    /// Parameters of one member of the family.
    type Params: Clone + Debug + PartialEq + Send + Sync;
    /// Per-arm running statistics.
    type Stats: Clone + Debug + PartialEq + Send;

    fn name(&self) -> &'static str;

    /// Initial-phase pulls per arm.
    fn n0(&self) -> u64;

    /// Inflation `d̃(t)` in the index radius `ln n / (t - d̃(t))`.
    fn d_tilde(&self, t: u64) -> u64;

    /// Checks that `arm` is a legal ground-truth member of the family.
    fn validate(&self, arm: &Self::Params) -> Result<()>;

    fn score(&self, arm: &Self::Params) -> T;

    /// Inverse distribution function, used to draw rewards from uniforms.
    fn quantile(&self, arm: &Self::Params, u: T) -> Result<T>;

    /// Kullback-Leibler divergence `I(f, g)`; `+∞` when `f` puts mass outside
    /// the support of `g`.
    fn kl(&self, f: &Self::Params, g: &Self::Params) -> T;

    /// `M_f(ρ) = inf { I(f, g) : s(g) > ρ }` in closed form.
    fn m(&self, f: &Self::Params, rho: T) -> Result<T>;

    /// Fresh statistics for an arm. Only what the controller is assumed to
    /// know about the arm (e.g. a known variance) may be read from `arm`.
    fn new_stats(&self, arm: &Self::Params) -> Self::Stats;

    fn update(&self, stats: &mut Self::Stats, x: T) -> Result<()>;

    fn count(&self, stats: &Self::Stats) -> u64;

    /// Plug-in estimate `f̂_t`.
    fn estimate(&self, stats: &Self::Stats) -> Result<Self::Params>;

    /// Closed-form index `u(n, t)` evaluated at an estimate.
    fn index_at(&self, fhat: &Self::Params, n: u64, t: u64) -> Result<T>;

    /// Index of an arm with statistics `stats` at global time `n`.
    fn index(&self, stats: &Self::Stats, n: u64) -> Result<T> {
        let fhat = self.estimate(stats)?;
        self.index_at(&fhat, n, self.count(stats))
    }

    /// Radius `ln n / (t - d̃(t))` of the divergence ball behind the index.
    fn index_radius(&self, n: u64, t: u64) -> Result<T> {
        let dt = self.d_tilde(t);
        if t <= dt {
            return Err(crate::Error::Precondition(format!(
                "index requested with t = {t} <= d~(t) = {dt}"
            )));
        }
        Ok(T::from_u64_lossy(n).ln() / T::from_u64_lossy(t - dt))
    }
}
