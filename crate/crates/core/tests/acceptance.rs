//! Full-size acceptance run. Each test writes one `PASS`/`FAIL` line to
//! stderr (uncaptured) and then asserts the verdict.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use lcmoments::harness::checks::{self, CheckResult};
use lcmoments::harness::report::GridRun;

const SEED: u64 = 0;

fn report(label: &str, result: &CheckResult) {
    let verdict = if result.passed { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "[{verdict}] {label}: {} ({:.2}s)", result.detail, result.seconds).unwrap();
    assert!(result.passed, "{label}: {result}");
}

fn grid() -> &'static (GridRun, f64) {
    static GRID: OnceLock<(GridRun, f64)> = OnceLock::new();
    GRID.get_or_init(|| {
        let start = Instant::now();
        let run = checks::momunc_grid(SEED, checks::GRID_SAMPLES).expect("grid runs");
        (run, start.elapsed().as_secs_f64())
    })
}

#[test]
fn gamma_p_matches_quadrature() {
    report("gamma_p exactness", &checks::gamma_quadrature());
}

#[test]
fn khintchine_optimal_constant() {
    report("khintchine optimal constant", &checks::khintchine(SEED));
}

#[test]
fn gk_solver_matches_brute_force() {
    report("gk solver vs oracle", &checks::gk_oracle(SEED));
}

#[test]
fn fourth_moment_extremality() {
    report("fourth-moment extremality", &checks::fourth_moment(SEED, checks::MOMENT4_SAMPLES));
}

#[test]
fn momunc_two_sidedness() {
    let (run, seconds) = grid();
    let mut result = checks::momunc_two_sided(run, &checks::primary_estimator);
    result.seconds += seconds;
    result.passed &= *seconds < 1800.0;
    report("momunc two-sidedness", &result);
}

#[test]
fn gaussian_band_for_flat_coefficients() {
    report(
        "gaussian band (flat exponential)",
        &checks::gaussian_band_flat(SEED, checks::BAND_SAMPLES),
    );
}

#[test]
fn lower_band_on_balls() {
    report(
        "lower band (balls)",
        &checks::lower_band_balls(SEED, checks::LOWER_BAND_SAMPLES),
    );
}

#[test]
fn upper_probe() {
    report("upper probe", &checks::upper_probe_check(&grid().0));
}

#[test]
fn negative_association() {
    report(
        "negative association",
        &checks::negative_association(SEED, checks::NA_SAMPLES),
    );
}

#[test]
fn joint_tail_and_level_set_agreement() {
    report(
        "joint-tail / level-set agreement",
        &checks::joint_tail_agreement(SEED, checks::JOINT_TAIL_SAMPLES),
    );
}

#[test]
fn report_csv_independent_of_workers() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
  "families": ["exp", "ball:q=1", "ball:q=2", "cube"],
  "profiles": ["one_hot", "flat", "geometric(0.7)", "power(1)"],
  "n_list": [4, 16],
  "p_grid": [2, 3, 4, 8, 16, 32],
  "n_samples": 100000,
  "seed": 7
}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("w{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_lcm"))
            .args(["report", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("LCM_WORKERS", workers)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(out.join("report.csv")).unwrap());
    }
    let same = outputs[0] == outputs[1];
    let result = CheckResult {
        name: "report_determinism".into(),
        passed: same && !outputs[0].is_empty(),
        detail: format!(
            "{} CSV bytes, identical for LCM_WORKERS=1 and 4: {same}",
            outputs[0].len()
        ),
        metrics: Default::default(),
        seconds: start.elapsed().as_secs_f64(),
    };
    report("determinism", &result);
}
