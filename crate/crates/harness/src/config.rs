//! TOML experiment configs.
//!
//! ```toml
//! seed = 7
//! replications = 2000
//! horizons = [1000, 10000, 100000]
//!
//! [[arms]]
//! family = "normal_chk"
//! mu = 0.5
//! sigma = 1.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use ucblab_core::{
    BanditModel, CoverageModel, IntervalModel, IntervalParams, MonotoneScore2D, NormalMeanModel, NormalParams,
    NormalThresholdModel, NormalVarianceModel, ParetoModel, ParetoParams, PartitionSchedule, SeparableScore,
    SupportSet,
};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoScoreName {
    Mean,
    TailExponent,
    Median,
}

impl ParetoScoreName {
    pub fn build(self) -> SeparableScore<f64> {
        match self {
            ParetoScoreName::Mean => SeparableScore::mean(),
            ParetoScoreName::TailExponent => SeparableScore::tail_exponent(),
            ParetoScoreName::Median => SeparableScore::median(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalScoreName {
    #[default]
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleName {
    #[default]
    Sqrt,
    Log2,
}

impl From<ScheduleName> for PartitionSchedule {
    fn from(s: ScheduleName) -> Self {
        match s {
            ScheduleName::Sqrt => PartitionSchedule::Sqrt,
            ScheduleName::Log2 => PartitionSchedule::Log2,
        }
    }
}

/// Where the `1/M` targets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    #[default]
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmSpec {
    Pareto {
        alpha: f64,
        beta: f64,
        score: ParetoScoreName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        floor_l: Option<f64>,
    },
    Coverage {
        intervals: Vec<[f64; 2]>,
    },
    Interval {
        low: f64,
        high: f64,
        #[serde(default)]
        score: IntervalScoreName,
    },
    NormalChk {
        mu: f64,
        sigma: f64,
    },
    NormalVar {
        mu: f64,
        sigma: f64,
    },
    NormalThr {
        mu: f64,
        sigma_known: f64,
    },
}

impl ArmSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ArmSpec::Pareto { .. } => "pareto",
            ArmSpec::Coverage { .. } => "coverage",
            ArmSpec::Interval { .. } => "interval",
            ArmSpec::NormalChk { .. } => "normal_chk",
            ArmSpec::NormalVar { .. } => "normal_var",
            ArmSpec::NormalThr { .. } => "normal_thr",
        }
    }
}

fn default_horizons() -> Vec<u64> {
    vec![1_000, 10_000, 100_000]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub arms: Vec<ArmSpec>,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<u64>,
    pub replications: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Threshold shared by all `normal_thr` arms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Partition schedule for `coverage` arms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_schedule: Option<ScheduleName>,
    #[serde(default)]
    pub target_mode: TargetMode,
}

/// A validated config turned into a model and its ground-truth arms.
#[derive(Debug, Clone)]
pub enum Scenario {
    Pareto(ParetoModel<f64>, Vec<ParetoParams<f64>>),
    Coverage(CoverageModel, Vec<SupportSet<f64>>),
    Interval(IntervalModel<f64>, Vec<IntervalParams<f64>>),
    NormalChk(NormalMeanModel, Vec<NormalParams<f64>>),
    NormalVar(NormalVarianceModel, Vec<NormalParams<f64>>),
    NormalThr(NormalThresholdModel<f64>, Vec<NormalParams<f64>>),
}

/// Runs `$body` with `$model` and `$arms` bound to the scenario's concrete types.
#[macro_export]
macro_rules! with_scenario {
    ($scenario:expr, |$model:ident, $arms:ident| $body:expr) => {
        match $scenario {
            $crate::config::Scenario::Pareto($model, $arms) => $body,
            $crate::config::Scenario::Coverage($model, $arms) => $body,
            $crate::config::Scenario::Interval($model, $arms) => $body,
            $crate::config::Scenario::NormalChk($model, $arms) => $body,
            $crate::config::Scenario::NormalVar($model, $arms) => $body,
            $crate::config::Scenario::NormalThr($model, $arms) => $body,
        }
    };
}

impl Scenario {
    pub fn family(&self) -> &'static str {
        match self {
            Scenario::Pareto(..) => "pareto",
            Scenario::Coverage(..) => "coverage",
            Scenario::Interval(..) => "interval",
            Scenario::NormalChk(..) => "normal_chk",
            Scenario::NormalVar(..) => "normal_var",
            Scenario::NormalThr(..) => "normal_thr",
        }
    }

    pub fn n0(&self) -> u64 {
        with_scenario!(self, |m, _a| BanditModel::<f64>::n0(m))
    }

    pub fn arm_count(&self) -> usize {
        with_scenario!(self, |_m, a| a.len())
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::ConfigParse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field and builds the scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        if self.replications == 0 {
            return Err(HarnessError::field("replications", "must be positive"));
        }
        if self.horizons.is_empty() {
            return Err(HarnessError::field("horizons", "must not be empty"));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::field("horizons", "must be strictly increasing"));
        }
        if self.arms.len() < 2 {
            return Err(HarnessError::field("arms", format!("need at least 2 arms, got {}", self.arms.len())));
        }
        let family = self.arms[0].family();
        if let Some(i) = self.arms.iter().position(|a| a.family() != family) {
            return Err(HarnessError::field(
                format!("arms[{i}].family"),
                format!("all arms must share one family; expected `{family}`"),
            ));
        }
        if self.kappa.is_some() && family != "normal_thr" {
            return Err(HarnessError::field("kappa", "only applies to normal_thr arms"));
        }
        if self.d_schedule.is_some() && family != "coverage" {
            return Err(HarnessError::field("d_schedule", "only applies to coverage arms"));
        }
        let scenario = self.build(family)?;
        let max = *self.horizons.last().expect("nonempty");
        let initial = scenario.n0() * scenario.arm_count() as u64;
        if max < initial {
            return Err(HarnessError::field(
                "horizons",
                format!("largest horizon {max} is shorter than the initial phase n0*N = {initial}"),
            ));
        }
        Ok(scenario)
    }

    fn build(&self, family: &str) -> Result<Scenario> {
        let arm_err = |i: usize, e: ucblab_core::Error| HarnessError::field(format!("arms[{i}]"), e.to_string());
        let scenario = match family {
            "pareto" => {
                let ArmSpec::Pareto { score, .. } = &self.arms[0] else { unreachable!() };
                let model = ParetoModel::new(score.build());
                let mut arms = Vec::new();
                for (i, spec) in self.arms.iter().enumerate() {
                    let ArmSpec::Pareto {
                        alpha,
                        beta,
                        score: s,
                        floor_l,
                    } = spec
                    else {
                        unreachable!()
                    };
                    if s != score {
                        return Err(HarnessError::field(
                            format!("arms[{i}].score"),
                            "all pareto arms must use the same score",
                        ));
                    }
                    if let Some(l) = floor_l {
                        if *l != model.floor() {
                            return Err(HarnessError::field(
                                format!("arms[{i}].floor_l"),
                                format!("the {s:?} score lives on floor {}, got {l}", model.floor()),
                            ));
                        }
                    }
                    arms.push(ParetoParams::new(*alpha, *beta).map_err(|e| arm_err(i, e))?);
                }
                Scenario::Pareto(model, arms)
            }
            "coverage" => {
                let model = CoverageModel {
                    schedule: self.d_schedule.unwrap_or_default().into(),
                };
                let mut arms = Vec::new();
                for (i, spec) in self.arms.iter().enumerate() {
                    let ArmSpec::Coverage { intervals } = spec else { unreachable!() };
                    let pieces = intervals.iter().map(|&[a, b]| (a, b)).collect();
                    arms.push(SupportSet::new(pieces).map_err(|e| arm_err(i, e))?);
                }
                Scenario::Coverage(model, arms)
            }
            "interval" => {
                let model = IntervalModel::new(MonotoneScore2D::mean());
                let mut arms = Vec::new();
                for (i, spec) in self.arms.iter().enumerate() {
                    let ArmSpec::Interval { low, high, .. } = spec else { unreachable!() };
                    arms.push(IntervalParams::new(*low, *high).map_err(|e| arm_err(i, e))?);
                }
                Scenario::Interval(model, arms)
            }
            "normal_chk" | "normal_var" => {
                let mut arms = Vec::new();
                for (i, spec) in self.arms.iter().enumerate() {
                    let (ArmSpec::NormalChk { mu, sigma } | ArmSpec::NormalVar { mu, sigma }) = spec else {
                        unreachable!()
                    };
                    arms.push(NormalParams::new(*mu, *sigma).map_err(|e| arm_err(i, e))?);
                }
                if family == "normal_chk" {
                    Scenario::NormalChk(NormalMeanModel, arms)
                } else {
                    if let Some(i) = arms.iter().position(|a| a.mu != arms[0].mu) {
                        return Err(HarnessError::field(format!("arms[{i}].mu"), "normal_var arms share one mean"));
                    }
                    Scenario::NormalVar(NormalVarianceModel, arms)
                }
            }
            "normal_thr" => {
                let kappa = self
                    .kappa
                    .ok_or_else(|| HarnessError::field("kappa", "required for normal_thr arms"))?;
                if !kappa.is_finite() {
                    return Err(HarnessError::field("kappa", "must be finite"));
                }
                let mut arms = Vec::new();
                for (i, spec) in self.arms.iter().enumerate() {
                    let ArmSpec::NormalThr { mu, sigma_known } = spec else { unreachable!() };
                    arms.push(NormalParams::new(*mu, *sigma_known).map_err(|e| arm_err(i, e))?);
                }
                Scenario::NormalThr(NormalThresholdModel::new(kappa), arms)
            }
            other => unreachable!("unknown family {other}"),
        };
        with_scenario!(&scenario, |model, arms| {
            for (i, arm) in arms.iter().enumerate() {
                model.validate(arm).map_err(|e| arm_err(i, e))?;
            }
        });
        Ok(scenario)
    }
}
