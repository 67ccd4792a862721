//! Monte Carlo checks of the distributional lemmas behind the policies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use serde::Serialize;
use ucblab_core::engine::draw;
use ucblab_core::interval::{interval_estimate, IntervalStats};
use ucblab_core::oracles::lemmas::{
    chernoff_bound, correlation, gamma_cdf, ks_critical_value, ks_statistic, normal_tail_bound, pareto_cdf,
    range_cdf, ChernoffKind, Tail,
};
use ucblab_core::pareto::{pareto_estimate, ParetoStats};
use ucblab_core::{IntervalModel, IntervalParams, MonotoneScore2D, ParetoModel, ParetoParams, SeparableScore};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    Gamma,
    Chi2,
    Normal,
    Range,
    Estimators,
}

impl std::str::FromStr for Lemma {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma" => Lemma::Gamma,
            "chi2" => Lemma::Chi2,
            "normal" => Lemma::Normal,
            "range" => Lemma::Range,
            "estimators" => Lemma::Estimators,
            other => {
                return Err(HarnessError::field(
                    "lemma",
                    format!("unknown lemma `{other}`; expected gamma, chi2, normal, range or estimators"),
                ))
            }
        })
    }
}

/// One comparison. For bounds `pass` means `empirical ≤ analytic`; for
/// distribution checks it means the statistic is inside its acceptance band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub case: String,
    pub empirical: f64,
    pub analytic: f64,
    pub pass: bool,
}

pub const CHERNOFF_T: [u64; 3] = [5, 20, 100];
pub const LOWER_GAMMAS: [f64; 2] = [0.5, 0.8];
pub const UPPER_GAMMAS: [f64; 2] = [1.5, 2.0];
pub const NORMAL_Z: [f64; 3] = [0.5, 1.0, 2.0];

pub fn verify(lemma: Lemma, draws: usize, seed: u64) -> Result<Vec<BoundCheck>> {
    if draws == 0 {
        return Err(HarnessError::field("draws", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match lemma {
        Lemma::Gamma => chernoff_checks(ChernoffKind::Gamma, draws, &mut rng),
        Lemma::Chi2 => chernoff_checks(ChernoffKind::Chi2, draws, &mut rng),
        Lemma::Normal => Ok(normal_checks(draws, &mut rng)),
        Lemma::Range => range_checks(draws, &mut rng),
        Lemma::Estimators => estimator_checks(20, 2.0, 1.0, draws, &mut rng),
    }
}

fn chernoff_checks(kind: ChernoffKind, draws: usize, rng: &mut ChaCha8Rng) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    for &t in &CHERNOFF_T {
        let sample: Vec<f64> = match kind {
            ChernoffKind::Gamma => {
                let g = Gamma::new(t as f64, 1.0).expect("valid gamma");
                (0..draws).map(|_| g.sample(rng)).collect()
            }
            ChernoffKind::Chi2 => {
                let c = ChiSquared::new(t as f64).expect("valid chi-square");
                (0..draws).map(|_| c.sample(rng)).collect()
            }
        };
        let tails = LOWER_GAMMAS
            .iter()
            .map(|&g| (Tail::Lower, g))
            .chain(UPPER_GAMMAS.iter().map(|&g| (Tail::Upper, g)));
        for (tail, g) in tails {
            let cut = g * t as f64;
            let hits = match tail {
                Tail::Lower => sample.iter().filter(|&&x| x < cut).count(),
                Tail::Upper => sample.iter().filter(|&&x| x > cut).count(),
            };
            let empirical = hits as f64 / draws as f64;
            let analytic = chernoff_bound(kind, tail, t, g)?;
            let side = if tail == Tail::Lower { "<" } else { ">" };
            out.push(BoundCheck {
                case: format!("t={t} X{side}{g}t"),
                empirical,
                analytic,
                pass: empirical <= analytic,
            });
        }
    }
    Ok(out)
}

fn normal_checks(draws: usize, rng: &mut ChaCha8Rng) -> Vec<BoundCheck> {
    let sample: Vec<f64> = (0..draws).map(|_| StandardNormal.sample(rng)).collect();
    NORMAL_Z
        .iter()
        .map(|&z| {
            let empirical = sample.iter().filter(|&&x| x > z).count() as f64 / draws as f64;
            let analytic = normal_tail_bound(z).expect("z >= 0");
            BoundCheck {
                case: format!("Z>{z}"),
                empirical,
                analytic,
                pass: empirical <= analytic,
            }
        })
        .collect()
}

/// Ratio `(b̂ - â)/(b - a)` from `t` draws of `U(a, b)`.
pub fn range_ratio<R: Rng>(t: u64, arm: &IntervalParams<f64>, rng: &mut R) -> Result<f64> {
    let model = IntervalModel::new(MonotoneScore2D::mean());
    let mut stats = IntervalStats::default();
    for _ in 0..t {
        stats.push(draw(&model, arm, rng)?)?;
    }
    let est = interval_estimate(&stats)?;
    Ok(est.width() / arm.width())
}

/// Monte Carlo frequency against the exact range CDF, within 3 binomial SE.
pub fn range_checks<R: Rng>(draws: usize, rng: &mut R) -> Result<Vec<BoundCheck>> {
    let arm = IntervalParams::new(-1.0, 3.0)?;
    let mut out = Vec::new();
    for (t, lambda) in [(5u64, 0.7), (2, 0.5)] {
        let mut hits = 0usize;
        for _ in 0..draws {
            if range_ratio(t, &arm, rng)? < lambda {
                hits += 1;
            }
        }
        let empirical = hits as f64 / draws as f64;
        let analytic = range_cdf(t, lambda)?;
        let se = (analytic * (1.0 - analytic) / draws as f64).sqrt();
        out.push(BoundCheck {
            case: format!("t={t} lambda={lambda}"),
            empirical,
            analytic,
            pass: (empirical - analytic).abs() <= 3.0 * se,
        });
    }
    Ok(out)
}

/// `((α/α̂)(t-1), β̂/β)` from one batch of `t` Pareto draws.
pub fn estimator_pair<R: Rng>(t: u64, arm: &ParetoParams<f64>, rng: &mut R) -> Result<(f64, f64)> {
    let model = ParetoModel::new(SeparableScore::tail_exponent());
    let mut stats = ParetoStats::default();
    for _ in 0..t {
        stats.push(draw(&model, arm, rng)?)?;
    }
    let est = pareto_estimate(&stats)?;
    Ok((arm.alpha / est.alpha * (t - 1) as f64, est.beta / arm.beta))
}

/// KS tests at significance 0.01 for both estimator components and their
/// correlation.
pub fn estimator_checks<R: Rng>(t: u64, alpha: f64, beta: f64, draws: usize, rng: &mut R) -> Result<Vec<BoundCheck>> {
    let arm = ParetoParams::new(alpha, beta)?;
    let pairs = (0..draws)
        .map(|_| estimator_pair(t, &arm, rng))
        .collect::<Result<Vec<_>>>()?;
    let critical = ks_critical_value(draws, 0.01)?;
    let g: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let shape = (t - 1) as f64;
    let ks_gamma = ks_statistic(&g, |x| gamma_cdf(x, shape))?;
    let ks_pareto = ks_statistic(&b, |x| pareto_cdf(x, alpha * t as f64, 1.0))?;
    let r = correlation(&pairs)?;
    Ok(vec![
        BoundCheck {
            case: format!("KS (alpha/alpha_hat)(t-1) ~ Gamma({},1)", t - 1),
            empirical: ks_gamma,
            analytic: critical,
            pass: ks_gamma < critical,
        },
        BoundCheck {
            case: format!("KS beta_hat/beta ~ Pareto({},1)", alpha * t as f64),
            empirical: ks_pareto,
            analytic: critical,
            pass: ks_pareto < critical,
        },
        BoundCheck {
            case: "|corr| < 0.05".into(),
            empirical: r.abs(),
            analytic: 0.05,
            pass: r.abs() < 0.05,
        },
    ])
}
