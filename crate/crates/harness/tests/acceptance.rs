//! Acceptance suite. Every check prints one `PASS`/`FAIL` line to stderr
//! (outside libtest's capture) and then asserts.
//!
//! The slope scenarios run at full scale (2000 replications, horizons up to
//! 1e5), so build with the workspace test profile (opt-level 3).

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ucblab_harness::bounds::{self, Lemma};
use ucblab_harness::experiment::ArmCurve;
use ucblab_harness::{csv_string, oracle_check, run_experiment, ExperimentConfig, RegretCurve};

const ORACLE_BUDGET: Duration = Duration::from_secs(120);
const LEMMA_DRAWS: usize = 100_000;
const ESTIMATOR_DRAWS: usize = 10_000;
const MIN_REPLICATIONS: u64 = 2000;
const SLOPE_BAND: f64 = 0.40;
const RATIO_FACTOR: f64 = 2.0;
const UF_EXPONENT: f64 = 0.25;
const SCENARIOS: [&str; 6] = ["normal_chk", "pareto_tail", "coverage", "interval", "normal_var", "normal_thr"];
const EXPECTED_TARGETS: [f64; 6] = [8.963, 5.177, 2.128, 4.481, 6.518, 2.0];
const DETERMINISM_SCENARIO: &str = "interval";

fn report(pass: bool, name: &str, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "[{tag}] {name}: {detail}");
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.toml"))
}

fn load(name: &str) -> ExperimentConfig {
    let cfg = ExperimentConfig::load(config_path(name)).expect("acceptance config loads");
    assert!(cfg.replications >= MIN_REPLICATIONS, "{name}: too few replications");
    assert_eq!(cfg.horizons, vec![1_000, 10_000, 100_000], "{name}: horizons");
    cfg
}

static CURVES: [OnceLock<RegretCurve>; 6] = [const { OnceLock::new() }; 6];

fn curve(name: &str) -> &'static RegretCurve {
    let k = SCENARIOS.iter().position(|s| *s == name).expect("known scenario");
    CURVES[k].get_or_init(|| run_experiment(&load(name), None).expect("experiment runs"))
}

fn suboptimal_arm(curve: &RegretCurve) -> &ArmCurve {
    let sub: Vec<&ArmCurve> = curve.arms.iter().filter(|a| !a.is_optimal).collect();
    assert_eq!(sub.len(), 1, "acceptance scenarios have one sub-optimal arm");
    sub[0]
}

#[test]
fn oracle_equivalence() {
    let start = Instant::now();
    let reports = oracle_check::check("all", ucblab_core::oracles::DEFAULT_RESOLUTION).expect("oracle check runs");
    let elapsed = start.elapsed();
    let mut ok = elapsed < ORACLE_BUDGET;
    for r in &reports {
        report(
            r.pass(),
            &format!("oracle equivalence {}", r.family),
            &format!(
                "M err {:.2e} <= {:.0e} over {} cases, index err {:.2e} <= {:.0e} over {} cases",
                r.m_max_abs_err,
                oracle_check::M_TOLERANCE,
                r.m_cases,
                r.index_max_abs_err,
                oracle_check::INDEX_TOLERANCE,
                r.index_cases
            ),
        );
        ok &= r.pass();
    }
    report(elapsed < ORACLE_BUDGET, "oracle equivalence runtime", &format!("{:.1?} < {:?}", elapsed, ORACLE_BUDGET));
    assert!(ok);
}

fn bound_suite(lemma: Lemma, draws: usize, seed: u64, name: &str) {
    let checks = bounds::verify(lemma, draws, seed).expect("bound check runs");
    assert!(!checks.is_empty());
    for c in &checks {
        report(
            c.pass,
            &format!("{name} {}", c.case),
            &format!("empirical {:.6} vs analytic {:.6}", c.empirical, c.analytic),
        );
    }
    assert!(checks.iter().all(|c| c.pass));
}

#[test]
fn range_cdf_matches_monte_carlo() {
    bound_suite(Lemma::Range, LEMMA_DRAWS, 11, "range cdf");
}

#[test]
fn pareto_estimator_distributions() {
    bound_suite(Lemma::Estimators, ESTIMATOR_DRAWS, 12, "estimator distribution");
}

#[test]
fn gamma_chernoff_bounds() {
    bound_suite(Lemma::Gamma, LEMMA_DRAWS, 13, "gamma chernoff");
}

#[test]
fn chi2_chernoff_bounds() {
    bound_suite(Lemma::Chi2, LEMMA_DRAWS, 14, "chi2 chernoff");
}

#[test]
fn normal_tail_bounds() {
    bound_suite(Lemma::Normal, LEMMA_DRAWS, 15, "normal tail");
}

fn slope_scenario(name: &str) {
    let k = SCENARIOS.iter().position(|s| *s == name).unwrap();
    let curve = curve(name);
    let arm = suboptimal_arm(curve);
    let target = arm.target_inv_m.expect("sub-optimal arm has a target");
    let target_ok = (target - EXPECTED_TARGETS[k]).abs() <= 1e-3 * EXPECTED_TARGETS[k];
    report(target_ok, &format!("target {name}"), &format!("1/M = {target:.4}, expected {:.3}", EXPECTED_TARGETS[k]));

    let fit = arm.slope.expect("slope fitted");
    let rel = (fit.slope - target) / target;
    let slope_ok = rel.abs() <= SLOPE_BAND;
    report(
        slope_ok,
        &format!("slope {name}"),
        &format!("{:.3} ± {:.3} vs target {target:.3} ({:+.1}%, band ±{:.0}%)", fit.slope, fit.se, rel * 100.0, SLOPE_BAND * 100.0),
    );

    let ratios: Vec<f64> = arm.points.iter().map(|p| p.mean_pulls / (p.horizon as f64).ln()).collect();
    let last = *ratios.last().unwrap();
    let ratio_ok = last <= RATIO_FACTOR * target && last >= target / RATIO_FACTOR;
    report(
        ratio_ok,
        &format!("ratio {name}"),
        &format!("T(1e5)/ln(1e5) = {last:.3}, allowed [{:.3}, {:.3}]", target / RATIO_FACTOR, target * RATIO_FACTOR),
    );

    let gaps: Vec<f64> = ratios.iter().map(|r| (r - target).abs()).collect();
    let trend_ok = gaps.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    report(
        trend_ok,
        &format!("trend {name}"),
        &format!("T(n)/ln n at 1e3,1e4,1e5 = [{}] approaching {target:.3}", shown.join(", ")),
    );

    assert!(target_ok && slope_ok && ratio_ok && trend_ok, "{name} slope criteria");
}

#[test]
fn slope_normal_chk() {
    slope_scenario("normal_chk");
}

#[test]
fn slope_pareto_tail() {
    slope_scenario("pareto_tail");
}

#[test]
fn slope_coverage() {
    slope_scenario("coverage");
}

#[test]
fn slope_interval() {
    slope_scenario("interval");
}

#[test]
fn slope_normal_var() {
    slope_scenario("normal_var");
}

#[test]
fn slope_normal_thr() {
    slope_scenario("normal_thr");
}

#[test]
fn uniformly_fast_diagnostic() {
    let mut ok = true;
    for name in SCENARIOS {
        let means = curve(name).suboptimal_means();
        let scaled = |n: u64| {
            let (_, t) = means.iter().find(|(h, _)| *h == n).copied().unwrap();
            t / (n as f64).powf(UF_EXPONENT)
        };
        let (a, b) = (scaled(1_000), scaled(100_000));
        let pass = b < a;
        report(pass, &format!("uniformly fast {name}"), &format!("T/n^0.25: {a:.4} at 1e3 -> {b:.4} at 1e5"));
        ok &= pass;
    }
    assert!(ok);
}

#[test]
fn determinism_serial_vs_parallel() {
    let cfg = load(DETERMINISM_SCENARIO);
    let serial = csv_string(&run_experiment(&cfg, Some(1)).unwrap());
    let parallel = csv_string(&run_experiment(&cfg, Some(4)).unwrap());
    let shared = csv_string(curve(DETERMINISM_SCENARIO));
    let pass = serial == parallel && serial == shared;
    report(
        pass,
        &format!("determinism {DETERMINISM_SCENARIO}"),
        &format!("1-thread, 4-thread and default-pool CSVs byte-identical ({} bytes)", serial.len()),
    );
    assert!(pass);
}
