//! Closed-form distributional facts used as test oracles.

use crate::error::{Error, Result};

/// `P((b̂ - â)/(b - a) < λ) = (t(1 - λ) + λ) λ^{t-1}` for `t` uniform draws.
pub fn range_cdf(t: u64, lambda: f64) -> Result<f64> {
    if t < 2 {
        return Err(Error::Precondition(format!("range cdf needs t >= 2, got {t}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::domain("lambda", lambda, "(0, 1)"));
    }
    let t = t as f64;
    Ok((t * (1.0 - lambda) + lambda) * lambda.powf(t - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChernoffKind {
    /// `G ~ Gamma(t, 1)`, bounds `(γ e^{1-γ})^t`.
    Gamma,
    /// `U ~ χ²_t`, bounds `(u e^{1-u})^{t/2}`.
    Chi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `P(X < γ t)` with `γ ≤ 1`.
    Lower,
    /// `P(X > γ t)` with `γ ≥ 1`.
    Upper,
}

/// Chernoff bound on the requested tail.
pub fn chernoff_bound(kind: ChernoffKind, tail: Tail, t: u64, gamma: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Precondition("chernoff bound needs t >= 1".into()));
    }
    let side_ok = match tail {
        Tail::Lower => gamma > 0.0 && gamma <= 1.0,
        Tail::Upper => gamma >= 1.0 && gamma.is_finite(),
    };
    if !side_ok {
        return Err(Error::domain(
            "gamma",
            gamma,
            match tail {
                Tail::Lower => "(0, 1]",
                Tail::Upper => "[1, inf)",
            },
        ));
    }
    let power = match kind {
        ChernoffKind::Gamma => t as f64,
        ChernoffKind::Chi2 => t as f64 / 2.0,
    };
    // ln(γ e^{1-γ}) = ln γ + 1 - γ, kept in log space to avoid underflow.
    Ok((power * (gamma.ln() + 1.0 - gamma)).exp())
}

/// `P(Z > z) ≤ ½ e^{-z²/2}` for `z ≥ 0`.
pub fn normal_tail_bound(z: f64) -> Result<f64> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::domain("z", z, "[0, inf)"));
    }
    Ok(0.5 * (-0.5 * z * z).exp())
}

/// `P(X ≤ x)` for `X ~ Pareto(α, β)`.
pub fn pareto_cdf(x: f64, alpha: f64, beta: f64) -> f64 {
    if x <= beta {
        0.0
    } else {
        -(alpha * (beta / x).ln()).exp_m1()
    }
}

/// `P(G ≤ x)` for `G ~ Gamma(shape, 1)`.
pub fn gamma_cdf(x: f64, shape: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        statrs::function::gamma::gamma_lr(shape, x)
    }
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Precondition("ks statistic needs at least one sample".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("sample", f64::NAN, "non-NaN reals"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    Ok(d)
}

/// Asymptotic Kolmogorov critical value `sqrt(-ln(a/2)/2) / sqrt(m)`.
pub fn ks_critical_value(m: usize, significance: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("ks critical value needs m >= 1".into()));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::domain("significance", significance, "(0, 1)"));
    }
    Ok((-0.5 * (significance / 2.0).ln()).sqrt() / (m as f64).sqrt())
}

/// Pearson correlation of paired samples.
pub fn correlation(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.len() < 2 {
        return Err(Error::Precondition("correlation needs at least two pairs".into()));
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / n, b + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant component in correlation"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn range_cdf_examples() {
        assert_abs_diff_eq!(range_cdf(2, 0.5).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(range_cdf(5, 0.7).unwrap(), 2.2 * 0.7f64.powi(4), epsilon = 1e-15);
        assert_abs_diff_eq!(range_cdf(5, 0.7).unwrap(), 0.528220, epsilon = 1e-6);
        assert!(range_cdf(9, 1.0 - 1e-12).unwrap() > 1.0 - 1e-9);
        assert!(range_cdf(1, 0.5).is_err());
        assert!(range_cdf(3, 1.0).is_err());
    }

    #[test]
    fn range_cdf_is_the_integral_of_its_density() {
        // d/dλ of the CDF is t(t-1)(1-λ)λ^{t-2}; integrate with Simpson's rule.
        let t = 6u64;
        let dens = |l: f64| (t * (t - 1)) as f64 * (1.0 - l) * l.powi(t as i32 - 2);
        let lam: f64 = 0.63;
        let n = 2000;
        let h = lam / n as f64;
        let mut acc = dens(0.0) + dens(lam);
        for k in 1..n {
            acc += dens(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert_abs_diff_eq!(range_cdf(t, lam).unwrap(), acc * h / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn chernoff_examples() {
        for kind in [ChernoffKind::Gamma, ChernoffKind::Chi2] {
            assert_eq!(chernoff_bound(kind, Tail::Lower, 7, 1.0).unwrap(), 1.0);
            assert_eq!(chernoff_bound(kind, Tail::Upper, 7, 1.0).unwrap(), 1.0);
        }
        let g = chernoff_bound(ChernoffKind::Gamma, Tail::Lower, 10, 0.5).unwrap();
        assert_abs_diff_eq!(g, (0.5 * 0.5f64.exp()).powi(10), epsilon = 1e-15);
        assert_abs_diff_eq!(g, 0.144_935, epsilon = 1e-6);
        let c = chernoff_bound(ChernoffKind::Chi2, Tail::Upper, 10, 2.0).unwrap();
        assert_abs_diff_eq!(c, (2.0 / std::f64::consts::E).powi(5), epsilon = 1e-15);
        assert_abs_diff_eq!(c, 0.215_614, epsilon = 1e-6);
        assert!(chernoff_bound(ChernoffKind::Gamma, Tail::Lower, 10, 1.5).is_err());
        assert!(chernoff_bound(ChernoffKind::Chi2, Tail::Upper, 10, 0.5).is_err());
    }

    #[test]
    fn normal_tail_bound_dominates_exact_tail() {
        for z in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let exact = 0.5 * statrs::function::erf::erfc(z / std::f64::consts::SQRT_2);
            assert!(exact <= normal_tail_bound(z).unwrap());
        }
        assert!(normal_tail_bound(-1.0).is_err());
    }

    #[test]
    fn gamma_cdf_integer_shape_matches_poisson_sum() {
        // P(G_k ≤ x) = 1 - Σ_{j<k} e^{-x} x^j / j!.
        for k in [1u32, 3, 19] {
            for x in [0.5f64, 3.0, 19.0, 30.0] {
                let mut term = (-x).exp();
                let mut sum = 0.0;
                for j in 0..k {
                    if j > 0 {
                        term *= x / j as f64;
                    }
                    sum += term;
                }
                assert_abs_diff_eq!(gamma_cdf(x, k as f64), 1.0 - sum, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ks_examples() {
        let unif = |x: f64| x.clamp(0.0, 1.0);
        assert!(ks_statistic(&[0.3; 50], unif).unwrap() >= 0.5);
        let a = [0.1, 0.9, 0.4, 0.35, 0.77];
        let mut b = a;
        b.reverse();
        assert_eq!(ks_statistic(&a, unif).unwrap(), ks_statistic(&b, unif).unwrap());
        assert!(ks_statistic(&[], unif).is_err());
        // Perfectly spread sample: D = 1/(2m).
        let m = 10;
        let xs: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        assert_abs_diff_eq!(ks_statistic(&xs, unif).unwrap(), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(ks_critical_value(10_000, 0.01).unwrap(), 1.6276 / 100.0, epsilon = 1e-5);
    }

    #[test]
    fn pareto_cdf_examples() {
        assert_eq!(pareto_cdf(1.0, 2.0, 1.0), 0.0);
        assert_abs_diff_eq!(pareto_cdf(2.0, 2.0, 1.0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(pareto_cdf(6.0, 2.0, 3.0), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn correlation_examples() {
        let up: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        assert_abs_diff_eq!(correlation(&up).unwrap(), 1.0, epsilon = 1e-12);
        assert!(correlation(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
    }
}
