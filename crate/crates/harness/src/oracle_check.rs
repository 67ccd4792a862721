//! Closed-form `M` and index against the brute-force oracles on fixed
//! five-point grids.

use serde::Serialize;
use ucblab_core::oracles::{index_oracle_solution, m_oracle_solution, OracleFamily};
use ucblab_core::{
    BanditModel, CoverageModel, IntervalModel, IntervalParams, MonotoneScore2D, NormalMeanModel, NormalParams,
    NormalThresholdModel, NormalVarianceModel, ParetoModel, ParetoParams, SeparableScore, SupportSet,
};

use crate::error::{HarnessError, Result};

pub const M_TOLERANCE: f64 = 1e-6;
pub const INDEX_TOLERANCE: f64 = 1e-8;

/// `(n, t)` pairs whose radii `ln n / (t - d̃)` the index is compared at.
pub const RADIUS_CASES: [(u64, u64); 5] = [(50, 4), (100, 5), (1_000, 20), (100_000, 50), (10, 30)];
/// Offsets of `ρ` above `s(f)`, in family-specific units.
pub const RHO_STEPS: [f64; 5] = [0.05, 0.2, 0.5, 1.0, 2.5];

pub const FAMILIES: [&str; 8] = [
    "pareto_mean",
    "pareto_tail",
    "pareto_median",
    "coverage",
    "interval",
    "normal_chk",
    "normal_var",
    "normal_thr",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub family: String,
    pub m_cases: usize,
    pub index_cases: usize,
    pub m_max_abs_err: f64,
    pub index_max_abs_err: f64,
}

impl OracleReport {
    pub fn pass(&self) -> bool {
        self.m_max_abs_err <= M_TOLERANCE && self.index_max_abs_err <= INDEX_TOLERANCE
    }
}

fn compare<M, P>(
    name: &str,
    model: &M,
    arms: &[P],
    rhos: impl Fn(&P) -> Vec<f64>,
    resolution: usize,
) -> Result<OracleReport>
where
    M: BanditModel<f64, Params = P> + OracleFamily<Params = P>,
    P: Clone + std::fmt::Debug + PartialEq + Send + Sync,
{
    let mut report = OracleReport {
        family: name.to_string(),
        m_cases: 0,
        index_cases: 0,
        m_max_abs_err: 0.0,
        index_max_abs_err: 0.0,
    };
    for f in arms {
        for rho in rhos(f) {
            let exact = model.m(f, rho)?;
            let approx = m_oracle_solution(model, f, rho, resolution)?.value;
            report.m_cases += 1;
            report.m_max_abs_err = report.m_max_abs_err.max(abs_err(exact, approx));
        }
        for &(n, t) in &RADIUS_CASES {
            let exact = model.index_at(f, n, t)?;
            let approx = index_oracle_solution(model, f, model.index_radius(n, t)?, resolution)?.value;
            report.index_cases += 1;
            report.index_max_abs_err = report.index_max_abs_err.max(abs_err(exact, approx));
        }
    }
    Ok(report)
}

/// Equal infinities count as agreement.
fn abs_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        let d = (a - b).abs();
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

fn above(s: f64, scale: f64) -> Vec<f64> {
    RHO_STEPS.iter().map(|k| s + k * scale).collect()
}

/// Steps toward a score ceiling of one.
fn toward_one(s: f64) -> Vec<f64> {
    RHO_STEPS.iter().map(|k| s + (1.0 - s) * k / 3.0).collect()
}

pub fn pareto_grid() -> Vec<ParetoParams<f64>> {
    [(1.5, 1.0), (2.0, 0.5), (3.0, 2.0), (4.5, 1.0), (2.5, 3.0)]
        .iter()
        .map(|&(a, b)| ParetoParams::new(a, b).expect("valid grid"))
        .collect()
}

pub fn coverage_grid() -> Vec<SupportSet<f64>> {
    [
        vec![(0.1, 0.4)],
        vec![(0.0, 0.5)],
        vec![(0.2, 0.3), (0.6, 0.9)],
        vec![(0.05, 0.85)],
        vec![(0.5, 1.0)],
    ]
    .into_iter()
    .map(|iv| SupportSet::new(iv).expect("valid grid"))
    .collect()
}

pub fn interval_grid() -> Vec<IntervalParams<f64>> {
    [(0.0, 1.0), (-1.0, 2.0), (0.5, 0.8), (2.0, 5.0), (-3.0, -1.0)]
        .iter()
        .map(|&(a, b)| IntervalParams::new(a, b).expect("valid grid"))
        .collect()
}

pub fn normal_grid() -> Vec<NormalParams<f64>> {
    [(0.0, 1.0), (0.5, 2.0), (-1.0, 0.5), (3.0, 1.5), (0.0, 0.2)]
        .iter()
        .map(|&(m, s)| NormalParams::new(m, s).expect("valid grid"))
        .collect()
}

pub fn check_family(name: &str, resolution: usize) -> Result<OracleReport> {
    if resolution < 8 {
        return Err(HarnessError::field("grid-resolution", "must be at least 8"));
    }
    let pareto = |score: SeparableScore<f64>| {
        let model = ParetoModel::new(score);
        compare(name, &model, &pareto_grid(), |f| above(model.score(f), 0.5 * model.score(f)), resolution)
    };
    match name {
        "pareto_mean" => pareto(SeparableScore::mean()),
        "pareto_tail" => pareto(SeparableScore::tail_exponent()),
        "pareto_median" => pareto(SeparableScore::median()),
        "coverage" => compare(name, &CoverageModel::default(), &coverage_grid(), |f| toward_one(f.measure()), resolution),
        "interval" => {
            let model = IntervalModel::new(MonotoneScore2D::mean());
            compare(name, &model, &interval_grid(), |f| above(model.score(f), f.width()), resolution)
        }
        "normal_chk" => compare(name, &NormalMeanModel, &normal_grid(), |f| above(f.mu, f.sigma), resolution),
        "normal_var" => compare(
            name,
            &NormalVarianceModel,
            &normal_grid(),
            |f| {
                let s = 1.0 / (f.sigma * f.sigma);
                above(s, s)
            },
            resolution,
        ),
        "normal_thr" => {
            let model = NormalThresholdModel::new(1.0);
            compare(name, &model, &normal_grid(), |f| toward_one(model.score(f)), resolution)
        }
        other => Err(HarnessError::field(
            "family",
            format!("unknown family `{other}`; expected one of {}, or all", FAMILIES.join(", ")),
        )),
    }
}

/// `name` may be a family, `pareto` (all three scores) or `all`.
pub fn check(name: &str, resolution: usize) -> Result<Vec<OracleReport>> {
    let names: Vec<&str> = match name {
        "all" => FAMILIES.to_vec(),
        "pareto" => FAMILIES[..3].to_vec(),
        other => vec![other],
    };
    names.into_iter().map(|n| check_family(n, resolution)).collect()
}
