//! Uniform arms on a single interval `[a, b]` under a score increasing in
//! both endpoints.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::BanditModel;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalParams<T> {
    pub low: T,
    pub high: T,
}

impl<T: Real> IntervalParams<T> {
    pub fn new(low: T, high: T) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low < high) {
            return Err(Error::InvalidParams(format!(
                "interval needs finite low < high, got [{low}, {high}]"
            )));
        }
        Ok(IntervalParams { low, high })
    }

    pub fn width(&self) -> T {
        self.high - self.low
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalScoreTag {
    Mean,
    Custom,
}

/// `s(a, b)`, continuous and increasing in each endpoint.
#[derive(Clone)]
pub struct MonotoneScore2D<T> {
    eval: Arc<dyn Fn(T, T) -> T + Send + Sync>,
    tag: IntervalScoreTag,
}

impl<T: Real> fmt::Debug for MonotoneScore2D<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneScore2D").field("tag", &self.tag).finish()
    }
}

impl<T: Real> MonotoneScore2D<T> {
    /// `(a + b) / 2`.
    pub fn mean() -> Self {
        MonotoneScore2D {
            eval: Arc::new(|a: T, b: T| (a + b) / T::c(2.0)),
            tag: IntervalScoreTag::Mean,
        }
    }

    /// Registers a custom score after spot-checking monotonicity on a 32×32
    /// grid of `a < b` in `[-4, 4]` with step `h = 1e-3`.
    pub fn custom<F>(f: F) -> Result<Self>
    where
        F: Fn(T, T) -> T + Send + Sync + 'static,
    {
        let h = T::c(1e-3);
        for i in 0..32 {
            for j in 0..32 {
                let a = T::c(-4.0 + 8.0 * i as f64 / 31.0);
                let b = T::c(-4.0 + 8.0 * j as f64 / 31.0);
                if !(a + h < b) {
                    continue;
                }
                let base = f(a, b);
                if !(f(a, b + h) > base && f(a + h, b) > base) {
                    return Err(Error::InvalidParams(format!(
                        "score is not increasing in both endpoints near ({a}, {b})"
                    )));
                }
            }
        }
        Ok(MonotoneScore2D {
            eval: Arc::new(f),
            tag: IntervalScoreTag::Custom,
        })
    }

    pub fn tag(&self) -> IntervalScoreTag {
        self.tag
    }

    pub fn eval(&self, low: T, high: T) -> T {
        (self.eval)(low, high)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalStats<T> {
    pub count: u64,
    pub sample_min: T,
    pub sample_max: T,
}

impl<T: Real> Default for IntervalStats<T> {
    fn default() -> Self {
        IntervalStats {
            count: 0,
            sample_min: T::infinity(),
            sample_max: T::neg_infinity(),
        }
    }
}

impl<T: Real> IntervalStats<T> {
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        let mut s = Self::default();
        for &x in samples {
            s.push(x)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, x: T) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::domain("interval sample", x.f64(), "finite reals"));
        }
        self.count += 1;
        self.sample_min = self.sample_min.min(x);
        self.sample_max = self.sample_max.max(x);
        Ok(())
    }
}

/// `(min X, max X)`.
pub fn interval_estimate<T: Real>(stats: &IntervalStats<T>) -> Result<IntervalParams<T>> {
    if stats.count < 2 {
        return Err(Error::Precondition(format!(
            "interval estimate needs t >= 2, got {}",
            stats.count
        )));
    }
    if stats.sample_min == stats.sample_max {
        return Err(Error::Degenerate("all interval samples are equal"));
    }
    Ok(IntervalParams {
        low: stats.sample_min,
        high: stats.sample_max,
    })
}

/// `ln((b̃ - ã) / (b - a))` when `[a, b] ⊆ [ã, b̃]`, else `∞`.
pub fn interval_kl<T: Real>(f: &IntervalParams<T>, g: &IntervalParams<T>) -> T {
    if g.low <= f.low && f.high <= g.high {
        (g.width() / f.width()).ln()
    } else {
        T::infinity()
    }
}

/// Smallest `b̃ ≥ b` with `s(a, b̃) ≥ ρ`, located by doubling the span and
/// bisecting to `1e-12` relative width.
fn right_endpoint_for<T: Real>(f: &IntervalParams<T>, rho: T, score: &MonotoneScore2D<T>) -> Result<T> {
    let width = f.width();
    let mut lo = f.high;
    let mut span = width;
    let mut hi = f.high + span;
    let mut doublings = 0;
    while score.eval(f.low, hi) < rho {
        lo = hi;
        span = span * T::c(2.0);
        hi = f.high + span;
        doublings += 1;
        if doublings > 60 || !hi.is_finite() {
            return Err(Error::Unattainable(rho.f64()));
        }
    }
    let tol = T::c(1e-12) * hi.abs().max(T::one());
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / T::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if score.eval(f.low, mid) >= rho {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `M_f(ρ) = ln(b̃*(ρ) - a) - ln(b - a)` past the current score, else 0.
pub fn interval_m<T: Real>(f: &IntervalParams<T>, rho: T, score: &MonotoneScore2D<T>) -> Result<T> {
    if !rho.is_finite() {
        return Err(Error::domain("rho", rho.f64(), "finite reals"));
    }
    if rho <= score.eval(f.low, f.high) {
        return Ok(T::zero());
    }
    let b_star = right_endpoint_for(f, rho, score)?;
    Ok(((b_star - f.low) / f.width()).ln())
}

/// UCB-UNIFORM: `s(â, â + n^{1/(t-2)} (b̂ - â))`.
pub fn interval_index_at<T: Real>(fhat: &IntervalParams<T>, n: u64, t: u64, score: &MonotoneScore2D<T>) -> Result<T> {
    if t < 3 {
        return Err(Error::Precondition(format!("interval index needs t >= 3, got {t}")));
    }
    let stretch = (T::from_u64_lossy(n).ln() / T::from_u64_lossy(t - 2)).exp();
    Ok(score.eval(fhat.low, fhat.low + stretch * fhat.width()))
}

pub fn interval_index<T: Real>(stats: &IntervalStats<T>, n: u64, score: &MonotoneScore2D<T>) -> Result<T> {
    if stats.count < 3 {
        return Err(Error::Precondition(format!(
            "interval index needs t >= 3, got {}",
            stats.count
        )));
    }
    interval_index_at(&interval_estimate(stats)?, n, stats.count, score)
}

#[derive(Debug, Clone)]
pub struct IntervalModel<T: Real> {
    pub score: MonotoneScore2D<T>,
}

impl<T: Real> IntervalModel<T> {
    pub fn new(score: MonotoneScore2D<T>) -> Self {
        IntervalModel { score }
    }
}

impl<T: Real> BanditModel<T> for IntervalModel<T> {
    type Params = IntervalParams<T>;
    type Stats = IntervalStats<T>;

    fn name(&self) -> &'static str {
        "interval"
    }

    fn n0(&self) -> u64 {
        3
    }

    fn d_tilde(&self, _t: u64) -> u64 {
        2
    }

    fn validate(&self, arm: &IntervalParams<T>) -> Result<()> {
        IntervalParams::new(arm.low, arm.high).map(|_| ())
    }

    fn score(&self, arm: &IntervalParams<T>) -> T {
        self.score.eval(arm.low, arm.high)
    }

    fn quantile(&self, arm: &IntervalParams<T>, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::domain("u", u.f64(), "(0, 1)"));
        }
        Ok(arm.low + u * arm.width())
    }

    fn kl(&self, f: &IntervalParams<T>, g: &IntervalParams<T>) -> T {
        interval_kl(f, g)
    }

    fn m(&self, f: &IntervalParams<T>, rho: T) -> Result<T> {
        interval_m(f, rho, &self.score)
    }

    fn new_stats(&self, _arm: &IntervalParams<T>) -> IntervalStats<T> {
        IntervalStats::default()
    }

    fn update(&self, stats: &mut IntervalStats<T>, x: T) -> Result<()> {
        stats.push(x)
    }

    fn count(&self, stats: &IntervalStats<T>) -> u64 {
        stats.count
    }

    fn estimate(&self, stats: &IntervalStats<T>) -> Result<IntervalParams<T>> {
        interval_estimate(stats)
    }

    fn index_at(&self, fhat: &IntervalParams<T>, n: u64, t: u64) -> Result<T> {
        interval_index_at(fhat, n, t, &self.score)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn iv(a: f64, b: f64) -> IntervalParams<f64> {
        IntervalParams::new(a, b).unwrap()
    }

    #[test]
    fn estimate_examples() {
        let s = IntervalStats::from_samples(&[0.2, 0.7, 0.4]).unwrap();
        assert_eq!(interval_estimate(&s).unwrap(), iv(0.2, 0.7));
        let shifted = IntervalStats::from_samples(&[3.0 * 0.2 - 1.0, 3.0 * 0.7 - 1.0, 3.0 * 0.4 - 1.0]).unwrap();
        let e = interval_estimate(&shifted).unwrap();
        assert_abs_diff_eq!(e.low, 3.0 * 0.2 - 1.0);
        assert_abs_diff_eq!(e.high, 3.0 * 0.7 - 1.0);
        let same = IntervalStats::from_samples(&[0.3, 0.3]).unwrap();
        assert!(matches!(interval_estimate(&same), Err(Error::Degenerate(_))));
    }

    #[test]
    fn kl_examples() {
        assert_eq!(interval_kl(&iv(0.0, 1.0), &iv(0.0, 1.0)), 0.0);
        assert_abs_diff_eq!(interval_kl(&iv(0.0, 1.0), &iv(0.0, 2.0)), LN_2, epsilon = 1e-15);
        assert_eq!(interval_kl(&iv(0.0, 1.0), &iv(0.5, 2.0)), f64::INFINITY);
    }

    #[test]
    fn m_examples() {
        let mean = MonotoneScore2D::mean();
        assert_eq!(interval_m(&iv(0.0, 0.8), 0.4, &mean).unwrap(), 0.0);
        assert_abs_diff_eq!(interval_m(&iv(0.0, 0.8), 0.5, &mean).unwrap(), (1.0f64 / 0.8).ln(), epsilon = 1e-11);
        assert_abs_diff_eq!(interval_m(&iv(0.0, 1.0), 1.0, &mean).unwrap(), LN_2, epsilon = 1e-11);
    }

    #[test]
    fn m_matches_mean_closed_form_on_grid() {
        let mean = MonotoneScore2D::mean();
        for &a in &[-2.0, 0.0, 0.3, 5.0] {
            for &w in &[0.1, 1.0, 3.0] {
                for &gap in &[1e-3, 0.2, 1.0, 10.0] {
                    let f = iv(a, a + w);
                    let s_star = (2.0 * a + w) / 2.0 + gap;
                    let closed = ((2.0 * s_star - 2.0 * a) / w).ln();
                    assert_abs_diff_eq!(interval_m(&f, s_star, &mean).unwrap(), closed, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn m_is_continuous_in_rho() {
        let mean = MonotoneScore2D::mean();
        let f = iv(0.0, 1.0);
        for k in 0..50 {
            let rho = 0.5 + 0.05 * k as f64;
            let d = (interval_m(&f, rho + 1e-6, &mean).unwrap() - interval_m(&f, rho, &mean).unwrap()).abs();
            assert!(d < 1e-5, "{rho}: {d}");
        }
    }

    #[test]
    fn unattainable_score() {
        // Bounded score: s = tanh(a) + tanh(b) < 2.
        let score = MonotoneScore2D::custom(|a: f64, b: f64| a.tanh() + b.tanh()).unwrap();
        assert!(matches!(interval_m(&iv(0.0, 1.0), 3.0, &score), Err(Error::Unattainable(_))));
    }

    #[test]
    fn custom_score_must_be_monotone() {
        assert!(MonotoneScore2D::<f64>::custom(|a, b| a - b).is_err());
        assert!(MonotoneScore2D::<f64>::custom(|a, b| a + 2.0 * b).is_ok());
    }

    #[test]
    fn index_examples() {
        let mean = MonotoneScore2D::mean();
        let f = iv(0.0, 1.0);
        assert_eq!(interval_index_at(&f, 1, 5, &mean).unwrap(), 0.5);
        // n = e² rounded to 7, t = 4.
        assert_abs_diff_eq!(interval_index_at(&f, 7, 4, &mean).unwrap(), 7f64.sqrt() / 2.0, epsilon = 1e-14);
        assert!(interval_index_at(&f, 7, 2, &mean).is_err());
        let mut prev = 0.5;
        for n in [2u64, 10, 1000, 100_000] {
            let u = interval_index_at(&f, n, 9, &mean).unwrap();
            assert!(u >= prev);
            prev = u;
        }
    }
}
