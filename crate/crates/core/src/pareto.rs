//! Pareto arms `f(x) = α β^α / x^{1+α}` on `[β, ∞)` with separable scores
//! `s(α, β) = a(α) b(β)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::BanditModel;
use crate::scalar::Real;
use crate::specfun::l_minus;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoParams<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> ParetoParams<T> {
    /// Parameters valid in the unrestricted family (`α > 0`, `β > 0`).
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha.is_finite() && beta > T::zero() && beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "pareto needs alpha > 0 and beta > 0, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(ParetoParams { alpha, beta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreTag {
    Mean,
    TailExponent,
    Median,
    Custom,
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// `s(α, β) = a(α) b(β)` with `a` decreasing and invertible, `b` nondecreasing.
#[derive(Clone)]
pub struct SeparableScore<T> {
    a: ScalarFn<T>,
    a_inverse: ScalarFn<T>,
    b: ScalarFn<T>,
    tag: ScoreTag,
    /// Natural floor `ℓ`: `a(α) → ∞` as `α → ℓ⁺`.
    floor: T,
    /// Open range `(lo, hi)` of `a` over `α > ℓ`.
    range: (T, T),
}

impl<T: Real> fmt::Debug for SeparableScore<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparableScore")
            .field("tag", &self.tag)
            .field("floor", &self.floor)
            .field("range", &self.range)
            .finish()
    }
}

impl<T: Real> SeparableScore<T> {
    /// Expected value on `F_1`: `a(α) = α/(α-1)`, `b(β) = β`.
    pub fn mean() -> Self {
        SeparableScore {
            a: Arc::new(|al: T| al / (al - T::one())),
            a_inverse: Arc::new(|y: T| y / (y - T::one())),
            b: Arc::new(|be: T| be),
            tag: ScoreTag::Mean,
            floor: T::one(),
            range: (T::one(), T::infinity()),
        }
    }

    /// Tail exponent on `F_0`: `a(α) = 1/α`, `b = 1`.
    pub fn tail_exponent() -> Self {
        SeparableScore {
            a: Arc::new(|al: T| al.recip()),
            a_inverse: Arc::new(|y: T| y.recip()),
            b: Arc::new(|_| T::one()),
            tag: ScoreTag::TailExponent,
            floor: T::zero(),
            range: (T::zero(), T::infinity()),
        }
    }

    /// Median on `F_0`: `a(α) = 2^{1/α}`, `b(β) = β`.
    pub fn median() -> Self {
        SeparableScore {
            a: Arc::new(|al: T| T::c(2.0).powf(al.recip())),
            a_inverse: Arc::new(|y: T| T::LN_2() / y.ln()),
            b: Arc::new(|be: T| be),
            tag: ScoreTag::Median,
            floor: T::zero(),
            range: (T::one(), T::infinity()),
        }
    }

    /// Registers a custom score. The pair `(a, a_inverse)` is checked for
    /// round-trip consistency and monotonicity on a probe grid over
    /// `α ∈ (floor, floor + 50]`, and `b` for positivity and monotonicity.
    pub fn custom<A, AI, B>(a: A, a_inverse: AI, b: B, floor: T, range: (T, T)) -> Result<Self>
    where
        A: Fn(T) -> T + Send + Sync + 'static,
        AI: Fn(T) -> T + Send + Sync + 'static,
        B: Fn(T) -> T + Send + Sync + 'static,
    {
        if !(floor >= T::zero() && floor.is_finite() && range.0 < range.1) {
            return Err(Error::InvalidParams("custom score needs floor >= 0 and lo < hi".into()));
        }
        let mut prev_a = T::infinity();
        for k in 1..=64 {
            let alpha = floor + T::c(50.0 * k as f64 / 64.0);
            let y = a(alpha);
            if !(y > range.0 && y < range.1) || !(y > T::zero()) {
                return Err(Error::InvalidParams(format!(
                    "a({alpha}) = {y} is outside the declared range"
                )));
            }
            if !(y < prev_a) {
                return Err(Error::InvalidParams(format!("a is not decreasing at alpha = {alpha}")));
            }
            prev_a = y;
            let back = a(a_inverse(y));
            if !((back - y).abs() <= T::c(1e-10) * y.abs().max(T::one())) {
                return Err(Error::InvalidParams(format!(
                    "a(a_inverse({y})) = {back} does not round-trip"
                )));
            }
        }
        let mut prev_b = T::zero();
        for k in 1..=64 {
            let beta = T::c(0.25 * k as f64);
            let v = b(beta);
            if !(v > T::zero()) || v < prev_b {
                return Err(Error::InvalidParams(format!(
                    "b must be positive and nondecreasing, b({beta}) = {v}"
                )));
            }
            prev_b = v;
        }
        Ok(SeparableScore {
            a: Arc::new(a),
            a_inverse: Arc::new(a_inverse),
            b: Arc::new(b),
            tag: ScoreTag::Custom,
            floor,
            range,
        })
    }

    pub fn tag(&self) -> ScoreTag {
        self.tag
    }

    pub fn floor(&self) -> T {
        self.floor
    }

    pub fn range(&self) -> (T, T) {
        self.range
    }

    pub fn a(&self, alpha: T) -> T {
        (self.a)(alpha)
    }

    pub fn b(&self, beta: T) -> T {
        (self.b)(beta)
    }

    /// `a⁻¹(y)`, rejecting `y` outside the open score range.
    pub fn a_inverse(&self, y: T) -> Result<T> {
        if !(y > self.range.0 && y < self.range.1) {
            return Err(Error::ScoreRange {
                value: y.f64(),
                lo: self.range.0.f64(),
                hi: self.range.1.f64(),
            });
        }
        Ok((self.a_inverse)(y))
    }

    pub fn eval(&self, p: &ParetoParams<T>) -> T {
        self.a(p.alpha) * self.b(p.beta)
    }
}

/// `β (1-u)^{-1/α}`.
pub fn pareto_quantile<T: Real>(params: &ParetoParams<T>, u: T) -> Result<T> {
    if !(u > T::zero() && u < T::one()) {
        return Err(Error::domain("u", u.f64(), "(0, 1)"));
    }
    Ok(params.beta * (-(-u).ln_1p() / params.alpha).exp())
}

/// Sufficient statistics for the Pareto estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoStats<T> {
    pub count: u64,
    /// `β̂_t`, the sample minimum.
    pub min_sample: T,
    /// `Σ ln(X_n / β̂_t)`, kept relative to the current minimum.
    pub log_sum: T,
}

impl<T: Real> Default for ParetoStats<T> {
    fn default() -> Self {
        ParetoStats {
            count: 0,
            min_sample: T::infinity(),
            log_sum: T::zero(),
        }
    }
}

impl<T: Real> ParetoStats<T> {
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let mut s = Self::default();
        for &x in samples {
            s.push(x)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, x: T) -> Result<()> {
        if !(x > T::zero() && x.is_finite()) {
            return Err(Error::domain("pareto sample", x.f64(), "(0, inf)"));
        }
        if self.count == 0 {
            self.min_sample = x;
        } else if x < self.min_sample {
            // Re-anchor the existing terms at the new minimum.
            self.log_sum = self.log_sum + T::from_u64_lossy(self.count) * (self.min_sample / x).ln();
            self.min_sample = x;
        } else {
            self.log_sum = self.log_sum + (x / self.min_sample).ln();
        }
        self.count += 1;
        Ok(())
    }
}

/// `β̂ = min X`, `α̂ = (t-1) / Σ ln(X/β̂)`.
pub fn pareto_estimate<T: Real>(stats: &ParetoStats<T>) -> Result<ParetoParams<T>> {
    if stats.count < 2 {
        return Err(Error::Precondition(format!(
            "pareto estimate needs t >= 2, got {}",
            stats.count
        )));
    }
    if !(stats.log_sum > T::zero()) {
        return Err(Error::Degenerate("all pareto samples are equal"));
    }
    Ok(ParetoParams {
        alpha: T::from_u64_lossy(stats.count - 1) / stats.log_sum,
        beta: stats.min_sample,
    })
}

/// `I(f, g) = α̃/α - ln(α̃/α) - 1 + α̃ ln(β/β̃)` if `β̃ ≤ β`, else `∞`.
pub fn pareto_kl<T: Real>(f: &ParetoParams<T>, g: &ParetoParams<T>) -> T {
    if g.beta > f.beta {
        return T::infinity();
    }
    let ratio = g.alpha / f.alpha;
    ratio - ratio.ln() - T::one() + g.alpha * (f.beta / g.beta).ln()
}

/// `M_f(ρ)`: zero up to `s(f)`, then `r - ln r - 1` with `r = a⁻¹(ρ/b(β))/α`.
pub fn pareto_m<T: Real>(f: &ParetoParams<T>, rho: T, score: &SeparableScore<T>) -> Result<T> {
    if !rho.is_finite() {
        return Err(Error::domain("rho", rho.f64(), "finite reals"));
    }
    if rho <= score.eval(f) {
        return Ok(T::zero());
    }
    let r = score.a_inverse(rho / score.b(f.beta))? / f.alpha;
    Ok(r - r.ln() - T::one())
}

/// UCB-PARETO index from an estimate `(α̂, β̂)` with `t` samples at time `n`.
pub fn pareto_index_at<T: Real>(fhat: &ParetoParams<T>, n: u64, t: u64, score: &SeparableScore<T>) -> Result<T> {
    if t < 3 {
        return Err(Error::Precondition(format!("pareto index needs t >= 3, got {t}")));
    }
    if n < 1 {
        return Err(Error::Precondition("pareto index needs n >= 1".into()));
    }
    let radius = T::from_u64_lossy(n).ln() / T::from_u64_lossy(t - 2);
    let w = fhat.alpha * l_minus(radius)?;
    if w <= score.floor() {
        return Ok(T::infinity());
    }
    Ok(score.b(fhat.beta) * score.a(w))
}

pub fn pareto_index<T: Real>(stats: &ParetoStats<T>, n: u64, score: &SeparableScore<T>) -> Result<T> {
    if stats.count < 3 {
        return Err(Error::Precondition(format!(
            "pareto index needs t >= 3, got {}",
            stats.count
        )));
    }
    pareto_index_at(&pareto_estimate(stats)?, n, stats.count, score)
}

/// Pareto family `F_ℓ` under a separable score; `ℓ` is the score's floor.
#[derive(Debug, Clone)]
pub struct ParetoModel<T: Real> {
    pub score: SeparableScore<T>,
}

impl<T: Real> ParetoModel<T> {
    pub fn new(score: SeparableScore<T>) -> Self {
        ParetoModel { score }
    }

    pub fn floor(&self) -> T {
        self.score.floor()
    }
}

impl<T: Real> BanditModel<T> for ParetoModel<T> {
    type Params = ParetoParams<T>;
    type Stats = ParetoStats<T>;

    fn name(&self) -> &'static str {
        "pareto"
    }

    fn n0(&self) -> u64 {
        3
    }

    fn d_tilde(&self, _t: u64) -> u64 {
        2
    }

    fn validate(&self, arm: &ParetoParams<T>) -> Result<()> {
        ParetoParams::new(arm.alpha, arm.beta)?;
        if arm.alpha <= self.floor() {
            return Err(Error::InvalidParams(format!(
                "alpha = {} must exceed the family floor {}",
                arm.alpha,
                self.floor()
            )));
        }
        Ok(())
    }

    fn score(&self, arm: &ParetoParams<T>) -> T {
        self.score.eval(arm)
    }

    fn quantile(&self, arm: &ParetoParams<T>, u: T) -> Result<T> {
        pareto_quantile(arm, u)
    }

    fn kl(&self, f: &ParetoParams<T>, g: &ParetoParams<T>) -> T {
        pareto_kl(f, g)
    }

    fn m(&self, f: &ParetoParams<T>, rho: T) -> Result<T> {
        pareto_m(f, rho, &self.score)
    }

    fn new_stats(&self, _arm: &ParetoParams<T>) -> ParetoStats<T> {
        ParetoStats::default()
    }

    fn update(&self, stats: &mut ParetoStats<T>, x: T) -> Result<()> {
        stats.push(x)
    }

    fn count(&self, stats: &ParetoStats<T>) -> u64 {
        stats.count
    }

    fn estimate(&self, stats: &ParetoStats<T>) -> Result<ParetoParams<T>> {
        pareto_estimate(stats)
    }

    fn index_at(&self, fhat: &ParetoParams<T>, n: u64, t: u64) -> Result<T> {
        pareto_index_at(fhat, n, t, &self.score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, LN_2};

    fn p(alpha: f64, beta: f64) -> ParetoParams<f64> {
        ParetoParams::new(alpha, beta).unwrap()
    }

    #[test]
    fn quantile_values() {
        assert_abs_diff_eq!(pareto_quantile(&p(1.0, 1.0), 0.5).unwrap(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(pareto_quantile(&p(2.0, 3.0), 0.75).unwrap(), 6.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pareto_quantile(&p(2.0, 3.0), 1e-15).unwrap(), 3.0, epsilon = 1e-13);
        assert!(pareto_quantile(&p(2.0, 3.0), 0.0).is_err());
        assert!(pareto_quantile(&p(2.0, 3.0), 1.0).is_err());
    }

    #[test]
    fn estimator_by_hand() {
        let e = pareto_estimate(&ParetoStats::from_samples(&[1.0, E]).unwrap()).unwrap();
        assert_abs_diff_eq!(e.beta, 1.0);
        assert_abs_diff_eq!(e.alpha, 1.0, epsilon = 1e-14);
        let e = pareto_estimate(&ParetoStats::from_samples(&[2.0 * E, 2.0, 2.0 * E]).unwrap()).unwrap();
        assert_abs_diff_eq!(e.beta, 2.0);
        assert_abs_diff_eq!(e.alpha, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn estimator_is_scale_equivariant() {
        let xs = [1.3, 4.0, 2.2, 1.01, 9.5];
        let base = pareto_estimate(&ParetoStats::from_samples(&xs).unwrap()).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * 7.5).collect();
        let s = pareto_estimate(&ParetoStats::from_samples(&scaled).unwrap()).unwrap();
        assert_abs_diff_eq!(s.beta, 7.5 * base.beta, epsilon = 1e-12);
        assert_abs_diff_eq!(s.alpha, base.alpha, epsilon = 1e-12);
    }

    #[test]
    fn estimator_rejects_degenerate_and_short() {
        let s = ParetoStats::from_samples(&[3.0, 3.0, 3.0]).unwrap();
        assert!(matches!(pareto_estimate(&s), Err(Error::Degenerate(_))));
        let s = ParetoStats::from_samples(&[3.0]).unwrap();
        assert!(matches!(pareto_estimate(&s), Err(Error::Precondition(_))));
    }

    #[test]
    fn kl_values() {
        assert_eq!(pareto_kl(&p(2.0, 3.0), &p(2.0, 3.0)), 0.0);
        assert_eq!(pareto_kl(&p(1.0, 1.0), &p(1.0, 2.0)), f64::INFINITY);
        assert_abs_diff_eq!(pareto_kl(&p(2.0, 2.0), &p(1.0, 1.0)), 2.0 * LN_2 - 0.5, epsilon = 1e-15);
    }

    #[test]
    fn m_values() {
        let tail = SeparableScore::tail_exponent();
        let f = p(2.0, 1.0);
        assert_eq!(pareto_m(&f, tail.eval(&f), &tail).unwrap(), 0.0);
        assert_abs_diff_eq!(pareto_m(&f, 1.0, &tail).unwrap(), LN_2 - 0.5, epsilon = 1e-15);
        let mean = SeparableScore::mean();
        let m = pareto_m(&p(3.0, 1.0), 2.0, &mean).unwrap();
        assert_abs_diff_eq!(m, 2.0 / 3.0 - (2.0f64 / 3.0).ln() - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m, 0.0721319, epsilon = 1e-6);
    }

    #[test]
    fn custom_score_out_of_range_errors() {
        // a(α) = 1 + 1/α on ℓ = 0; range (1, ∞).
        let score = SeparableScore::custom(
            |al: f64| 1.0 + al.recip(),
            |y: f64| (y - 1.0).recip(),
            |_| 1.0,
            0.0,
            (1.0, f64::INFINITY),
        )
        .unwrap();
        assert!(matches!(score.a_inverse(0.5), Err(Error::ScoreRange { .. })));
        assert!(pareto_m(&p(2.0, 1.0), 2.0, &score).is_ok());
    }

    #[test]
    fn custom_score_rejects_bad_inverse() {
        let bad = SeparableScore::custom(
            |al: f64| al.recip(),
            |y: f64| 2.0 / y,
            |_| 1.0,
            0.0,
            (0.0, f64::INFINITY),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn builtin_scores_blow_up_at_floor() {
        for score in [SeparableScore::<f64>::mean(), SeparableScore::tail_exponent()] {
            let l = score.floor();
            assert!(score.a(l + 1e-6) >= 1e3 * score.a(l + 1.0));
            for k in 1..50 {
                let y = 1.0 + k as f64 * 0.37;
                if y > score.range().0 {
                    assert_abs_diff_eq!(score.a(score.a_inverse(y).unwrap()), y, epsilon = 1e-10 * y);
                }
            }
        }
        let median = SeparableScore::<f64>::median();
        assert_abs_diff_eq!(median.a(median.a_inverse(1.7).unwrap()), 1.7, epsilon = 1e-12);
    }

    #[test]
    fn index_zero_exploration_and_floor() {
        let tail = SeparableScore::tail_exponent();
        let u = pareto_index_at(&p(2.0, 1.0), 1, 5, &tail).unwrap();
        assert_abs_diff_eq!(u, 0.5, epsilon = 1e-15);
        // ℓ = 1 (mean score): α̂ L⁻(ln n / (t-2)) = 0.9 lands on the infinite branch.
        let mean = SeparableScore::mean();
        let alpha_hat = 0.9 / l_minus(100f64.ln()).unwrap();
        let u = pareto_index_at(&p(alpha_hat, 1.0), 100, 3, &mean).unwrap();
        assert_eq!(u, f64::INFINITY);
    }

    #[test]
    fn index_monotone_in_n() {
        let score = SeparableScore::median();
        let fhat = p(2.5, 1.5);
        let mut prev = score.eval(&fhat);
        for n in [1u64, 2, 10, 100, 10_000, 1_000_000] {
            let u = pareto_index_at(&fhat, n, 12, &score).unwrap();
            assert!(u >= prev);
            prev = u;
        }
    }

    #[test]
    fn incremental_log_sum_matches_direct() {
        let xs = [5.0, 3.0, 7.0, 1.5, 2.0, 1.2, 8.0];
        let s = ParetoStats::from_samples(&xs).unwrap();
        let min = 1.2;
        let direct: f64 = xs.iter().map(|x: &f64| (x / min).ln()).sum();
        assert_abs_diff_eq!(s.log_sum, direct, epsilon = 1e-13);
        assert_eq!(s.min_sample, min);
    }
}
