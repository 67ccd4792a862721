//! Scalar special functions: the two branches of `L - ln L - 1 = δ` and the
//! standard normal distribution function and its inverse.
//!
//! Both branches are solved in the log domain, `y = ln L`, where the equation
//! reads `e^y - 1 - y = δ`. This keeps full relative precision for tiny δ
//! (where `L` is within `sqrt(2δ)` of one) and for large δ (where the lower
//! root underflows towards `e^{-1-δ}`).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A root of `L - ln L - 1 = δ` together with its residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSolution<T> {
    pub value: T,
    /// `value - ln(value) - 1 - δ`, evaluated without cancellation.
    pub residual: T,
}

/// `e^y - 1 - y`, accurate to a few ulps for all `y`.
pub fn exp_excess<T: Real>(y: T) -> T {
    if y.abs() < T::c(0.5) {
        // y²/2! + y³/3! + ...
        let mut term = y * y / T::c(2.0);
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > T::epsilon() * sum.abs() {
            term = term * y / T::c(k);
            sum = sum + term;
            k += 1.0;
        }
        sum
    } else {
        y.exp_m1() - y
    }
}

/// `L - ln L - 1` evaluated through [`exp_excess`] at `ln L`.
pub fn log_excess<T: Real>(l: T) -> T {
    exp_excess(l.ln())
}

fn check_delta<T: Real>(delta: T) -> Result<()> {
    if !delta.is_finite() || delta < T::zero() {
        return Err(Error::domain("delta", delta.f64(), "[0, inf)"));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Branch {
    Lower,
    Upper,
}

/// Solves `e^y - 1 - y = δ` for `y ≤ 0` (lower) or `y ≥ 0` (upper) by a
/// bracketed Newton iteration that falls back to bisection whenever a step
/// leaves the bracket.
fn solve_log_branch<T: Real>(delta: T, branch: Branch) -> T {
    if delta == T::zero() {
        return T::zero();
    }
    let one = T::one();
    let two = T::c(2.0);
    // phi(y) >= δ at both outer ends, phi(0) = 0 < δ.
    let (mut lo, mut hi) = match branch {
        Branch::Lower => (-(delta + one), T::zero()),
        Branch::Upper => (T::zero(), (two * (delta + two)).ln()),
    };
    let sign = if branch == Branch::Lower { -one } else { one };
    let s = sign * (two * delta).sqrt();
    let mut y = if s.abs() < one {
        s - s * s / T::c(6.0)
    } else if branch == Branch::Lower {
        -(one + delta) + (-(one + delta)).exp()
    } else {
        (delta + one + (delta + one).ln()).ln()
    };
    if !(y > lo && y < hi) {
        y = (lo + hi) / two;
    }

    for _ in 0..200 {
        let f = exp_excess(y) - delta;
        if f == T::zero() {
            return y;
        }
        // phi is decreasing on the lower branch and increasing on the upper one.
        let too_far = f > T::zero();
        match (branch, too_far) {
            (Branch::Lower, true) | (Branch::Upper, false) => lo = y,
            (Branch::Lower, false) | (Branch::Upper, true) => hi = y,
        }
        let slope = y.exp_m1();
        let mut next = y - f / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = (lo + hi) / two;
        }
        let step = (next - y).abs();
        y = next;
        if step <= T::c(2.0) * T::epsilon() * y.abs() || hi - lo <= T::epsilon() * y.abs() {
            break;
        }
    }
    y
}

fn solution<T: Real>(delta: T, y: T) -> BranchSolution<T> {
    BranchSolution {
        value: y.exp(),
        residual: exp_excess(y) - delta,
    }
}

/// Smallest positive root `L⁻(δ) ∈ (0, 1]` of `L - ln L - 1 = δ`.
pub fn l_minus<T: Real>(delta: T) -> Result<T> {
    l_minus_solution(delta).map(|s| s.value)
}

/// Largest positive root `L⁺(δ) ∈ [1, ∞)` of `L - ln L - 1 = δ`.
pub fn l_plus<T: Real>(delta: T) -> Result<T> {
    l_plus_solution(delta).map(|s| s.value)
}

pub fn l_minus_solution<T: Real>(delta: T) -> Result<BranchSolution<T>> {
    check_delta(delta)?;
    Ok(solution(delta, solve_log_branch(delta, Branch::Lower)))
}

pub fn l_plus_solution<T: Real>(delta: T) -> Result<BranchSolution<T>> {
    check_delta(delta)?;
    Ok(solution(delta, solve_log_branch(delta, Branch::Upper)))
}

/// Standard normal distribution function Φ.
pub fn norm_cdf<T: Real>(z: T) -> Result<T> {
    if z.is_nan() {
        return Err(Error::domain("z", f64::NAN, "finite reals"));
    }
    Ok(T::c(0.5) * (-z / T::SQRT_2()).erfc())
}

/// Standard normal quantile Φ⁻¹ on the open unit interval.
pub fn norm_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain("p", p.f64(), "(0, 1)"));
    }
    Ok(-T::SQRT_2() * (T::c(2.0) * p).erfc_inv())
}
