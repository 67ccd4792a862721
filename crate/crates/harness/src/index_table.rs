//! Index values for one fixed estimate over a grid of `(n, t)`.

use std::collections::BTreeMap;

use ucblab_core::BanditModel;

use crate::config::{ArmSpec, ExperimentConfig, Scenario, ScheduleName, TargetMode};
use crate::error::{HarnessError, Result};
use crate::output::format_sig;
use crate::with_scenario;

/// Parses `k=v,k=v`. Coverage intervals are written `intervals=0.1:0.4/0.6:0.9`.
pub fn parse_params(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| HarnessError::field("params", format!("`{pair}` is not key=value")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn to_toml_value(key: &str, raw: &str) -> Result<toml::Value> {
    if key == "intervals" {
        let pieces = raw
            .split('/')
            .map(|iv| {
                let (a, b) = iv
                    .split_once(':')
                    .ok_or_else(|| HarnessError::field("params.intervals", format!("`{iv}` is not a:b")))?;
                let a: f64 = a.parse().map_err(|_| HarnessError::field("params.intervals", format!("`{a}`")))?;
                let b: f64 = b.parse().map_err(|_| HarnessError::field("params.intervals", format!("`{b}`")))?;
                Ok(toml::Value::Array(vec![a.into(), b.into()]))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(toml::Value::Array(pieces));
    }
    Ok(match raw.parse::<f64>() {
        Ok(x) => toml::Value::Float(x),
        Err(_) => toml::Value::String(raw.to_string()),
    })
}

/// Builds a one-estimate scenario from CLI parameters. `kappa` and
/// `d_schedule` are experiment-level keys and are lifted out of the arm.
pub fn scenario_from_params(family: &str, params: &BTreeMap<String, String>) -> Result<Scenario> {
    let mut arm = toml::Table::new();
    arm.insert("family".into(), toml::Value::String(family.into()));
    let mut kappa = None;
    let mut d_schedule = None;
    for (k, v) in params {
        match k.as_str() {
            "kappa" => {
                kappa = Some(
                    v.parse::<f64>()
                        .map_err(|_| HarnessError::field("params.kappa", format!("`{v}` is not a number")))?,
                )
            }
            "d_schedule" => d_schedule = Some(v.clone()),
            _ => {
                arm.insert(k.clone(), to_toml_value(k, v)?);
            }
        }
    }
    let spec: ArmSpec = toml::Value::Table(arm)
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::field("params", e.to_string()))?;
    let d_schedule = match d_schedule.as_deref() {
        None => None,
        Some("sqrt") => Some(ScheduleName::Sqrt),
        Some("log2") => Some(ScheduleName::Log2),
        Some(other) => {
            return Err(HarnessError::field(
                "params.d_schedule",
                format!("`{other}`; expected sqrt or log2"),
            ))
        }
    };
    // A second copy of the arm satisfies the two-arm rule; only the first is used.
    let config = ExperimentConfig {
        arms: vec![spec.clone(), spec],
        horizons: vec![u64::MAX],
        replications: 1,
        seed: 0,
        output_path: None,
        kappa,
        d_schedule,
        target_mode: TargetMode::default(),
    };
    config.scenario()
}

/// CSV `n,t,index` for the first arm of `scenario`.
pub fn index_table(scenario: &Scenario, ns: &[u64], ts: &[u64]) -> Result<String> {
    let mut out = String::from("n,t,index\n");
    with_scenario!(scenario, |model, arms| {
        let fhat = &arms[0];
        for &n in ns {
            for &t in ts {
                let u = BanditModel::<f64>::index_at(model, fhat, n, t)?;
                out.push_str(&format!("{n},{t},{}\n", format_sig(u, 12)));
            }
        }
    });
    Ok(out)
}
