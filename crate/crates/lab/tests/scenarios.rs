//! Library-level checks of scenario dispatch, report shape, and verdicts
//! at fast configurations (quicker, narrower companions to the full
//! acceptance suite).

use hardy_lab::report::{RunReport, Verdict};
use hardy_lab::{
    nearest_scenario, run_scenario, run_scenario_reporting, scenario_ids, LabError, RunConfig,
};

fn find<'a>(sc: &'a hardy_lab::report::ScenarioReport, id: &str) -> &'a hardy_lab::report::Check {
    sc.checks
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("check {id} missing"))
}

#[test]
fn scenario_table_lists_six_ids_in_order() {
    assert_eq!(
        scenario_ids(),
        vec![
            "sweep-alpha",
            "theorem1",
            "lemma-hss",
            "example-s4",
            "complement-s5",
            "theorem2-witness"
        ]
    );
    assert_eq!(nearest_scenario("sweeep-alpha"), "sweep-alpha");
    assert_eq!(nearest_scenario("thm1"), "theorem1");
}

#[test]
fn unknown_scenario_is_a_config_error_with_suggestion() {
    let err = run_scenario("sweeep-alpha", &RunConfig::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("nearest match"), "message: {msg}");
    assert!(msg.contains("sweep-alpha"), "message: {msg}");
    // The reporting wrapper converts computation failures into failed
    // reports, but configuration errors still abort the run.
    assert!(run_scenario_reporting("sweeep-alpha", &RunConfig::default()).is_err());
}

#[test]
fn invalid_configs_are_rejected_before_any_work() {
    let mut cfg = RunConfig::default();
    cfg.n = 1000;
    let msg = run_scenario("lemma-hss", &cfg).unwrap_err().to_string();
    assert!(msg.contains("power of two"), "message: {msg}");

    let mut cfg = RunConfig::default();
    cfg.m = 4;
    assert!(matches!(
        run_scenario("lemma-hss", &cfg),
        Err(LabError::Config(_))
    ));
}

#[test]
fn projection_identities_report_twelve_checks() {
    let sc = run_scenario("lemma-hss", &RunConfig::default()).unwrap();
    assert!(sc.passed());
    let asserted: Vec<&str> = sc
        .checks
        .iter()
        .filter(|c| !matches!(c.verdict, Verdict::ReportOnly))
        .map(|c| c.id.as_str())
        .collect();
    // Three boundary points, two grids, two operator identities each.
    assert_eq!(asserted.len(), 12, "checks: {asserted:?}");
    assert!(sc.wall.as_nanos() > 0);
}

#[test]
fn real_quotient_scenario_passes_for_both_symbols() {
    let sc = run_scenario("theorem1", &RunConfig::default()).unwrap();
    assert!(sc.passed());
    for label in ["monomial-squared", "moebius"] {
        for suffix in ["quotient-real", "symbol-identity", "kernel-dim", "kernel-angle"] {
            let check = find(&sc, &format!("{label}-{suffix}"));
            assert!(
                !matches!(check.verdict, Verdict::Fail),
                "{}-{suffix} failed with value {}",
                label,
                check.value
            );
        }
    }
}

#[test]
fn sweep_pins_kernel_dimensions_away_from_jumps() {
    let mut cfg = RunConfig::default();
    cfg.alphas = vec![0.3, 1.0];
    let sc = run_scenario("sweep-alpha", &cfg).unwrap();
    assert!(sc.passed());
    assert_eq!(find(&sc, "alpha-0.3-dim").value, 0.0);
    assert_eq!(find(&sc, "alpha-1.0-dim").value, 1.0);
    assert!(sc.spectra.contains_key("alpha-0.3"));
}

#[test]
fn dyadic_depth_one_passes_with_kernel_spectrum() {
    let mut cfg = RunConfig::default();
    cfg.m_blaschke = 1;
    let sc = run_scenario("example-s4", &cfg).unwrap();
    assert!(sc.passed(), "checks: {:#?}", sc.checks);
    find(&sc, "membership-residual");
    find(&sc, "kernel-identity");
    assert!(matches!(
        find(&sc, "kernel-dim").verdict,
        Verdict::ReportOnly
    ));
    assert!(sc.spectra["kernel"].iter().all(|s| *s >= 0.0));
}

#[test]
fn two_step_witness_identity_passes() {
    let sc = run_scenario("theorem2-witness", &RunConfig::default()).unwrap();
    assert!(sc.passed());
    find(&sc, "witness-identity");
    find(&sc, "witness-identity-scaled");
    assert!(find(&sc, "kernel-excess").value >= 0.0);
}

#[test]
fn report_json_is_stable_in_process() {
    let cfg = RunConfig::default();
    let a = RunReport::new(
        cfg.echo(),
        vec![run_scenario("lemma-hss", &cfg).unwrap()],
    );
    let b = RunReport::new(
        cfg.echo(),
        vec![run_scenario("lemma-hss", &cfg).unwrap()],
    );
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.to_json().contains("\"schema\": \"hardy-lab/1\""));
}
