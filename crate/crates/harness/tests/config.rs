use ucblab_harness::config::{ArmSpec, IntervalScoreName};
use ucblab_harness::{ExperimentConfig, HarnessError, Scenario, TargetMode};

const BASE: &str = r#"
seed = 7
replications = 10
horizons = [100, 1000]

[[arms]]
family = "normal_chk"
mu = 0.5
sigma = 1.0

[[arms]]
family = "normal_chk"
mu = 0.0
sigma = 1.0
"#;

fn field_of(err: HarnessError) -> String {
    match err {
        HarnessError::ConfigField { field, .. } => field,
        other => panic!("expected a field error, got {other}"),
    }
}

#[test]
fn parses_and_builds_scenario() {
    let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    assert_eq!(cfg.target_mode, TargetMode::ClosedForm);
    assert!(matches!(cfg.scenario().unwrap(), Scenario::NormalChk(..)));
}

#[test]
fn toml_round_trip() {
    let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn round_trip_every_shipped_config() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap();
            cfg.scenario().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(cfg, ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap());
            seen += 1;
        }
    }
    assert_eq!(seen, 6);
}

#[test]
fn unknown_top_level_key_rejected() {
    let text = format!("bogus = 1\n{BASE}");
    assert!(matches!(ExperimentConfig::from_toml_str(&text), Err(HarnessError::ConfigParse(_))));
}

#[test]
fn unknown_arm_key_rejected() {
    let text = BASE.replace("mu = 0.0", "mu = 0.0\nshape = 2");
    let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
    assert!(err.to_string().contains("shape"), "{err}");
}

#[test]
fn unknown_family_rejected() {
    let text = BASE.replace("family = \"normal_chk\"\nmu = 0.0", "family = \"weibull\"\nmu = 0.0");
    assert!(ExperimentConfig::from_toml_str(&text).is_err());
}

#[test]
fn mixed_families_name_the_arm() {
    let mut cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    cfg.arms[1] = ArmSpec::Interval {
        low: 0.0,
        high: 1.0,
        score: IntervalScoreName::Mean,
    };
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "arms[1].family");
}

#[test]
fn bad_sigma_names_the_arm() {
    let cfg = ExperimentConfig::from_toml_str(&BASE.replace("sigma = 1.0\n\n[[arms]]", "sigma = -1.0\n\n[[arms]]")).unwrap();
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "arms[0]");
}

#[test]
fn horizon_rules() {
    let mut cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    cfg.horizons = vec![1000, 100];
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "horizons");
    cfg.horizons = vec![5];
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "horizons");
    cfg.horizons = vec![];
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "horizons");
}

#[test]
fn single_arm_rejected() {
    let mut cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    cfg.arms.pop();
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "arms");
}

#[test]
fn zero_replications_rejected() {
    let mut cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    cfg.replications = 0;
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "replications");
}

#[test]
fn kappa_only_for_threshold() {
    let mut cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
    cfg.kappa = Some(1.0);
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "kappa");

    let thr = r#"
seed = 1
replications = 1
horizons = [100]
[[arms]]
family = "normal_thr"
mu = 1.0
sigma_known = 1.0
[[arms]]
family = "normal_thr"
mu = 0.0
sigma_known = 1.0
"#;
    let cfg = ExperimentConfig::from_toml_str(thr).unwrap();
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "kappa");
    let cfg = ExperimentConfig::from_toml_str(&format!("kappa = 1.0\n{thr}")).unwrap();
    assert!(matches!(cfg.scenario().unwrap(), Scenario::NormalThr(..)));
}

#[test]
fn variance_arms_share_mean() {
    let text = BASE.replace("normal_chk", "normal_var");
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "arms[1].mu");
}

#[test]
fn pareto_floor_must_match_score() {
    let text = r#"
seed = 1
replications = 1
horizons = [100]
[[arms]]
family = "pareto"
alpha = 1.0
beta = 1.0
score = "tail_exponent"
floor_l = 3.0
[[arms]]
family = "pareto"
alpha = 2.0
beta = 1.0
score = "tail_exponent"
"#;
    let cfg = ExperimentConfig::from_toml_str(text).unwrap();
    assert_eq!(field_of(cfg.scenario().unwrap_err()), "arms[0].floor_l");
}
