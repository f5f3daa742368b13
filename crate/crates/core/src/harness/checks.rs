//! Verification checks, one per acceptance property, grouped in suites.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::families::DistributionFamily;
use crate::harness::config::ExperimentConfig;
use crate::harness::oracle::{disk_negative_association, gaussian_pnorm_quadrature, gk_brute_force};
use crate::harness::report::{run_experiment, run_grid, upper_probe, GridCell, GridRun};
use crate::harness::with_workers;
use crate::montecarlo::{
    brute_force_rademacher_pnorm, estimate_joint_tail, estimate_moment4, estimate_pnorms,
    na_compare_grid, McSettings, StreamKey,
};
use crate::surrogates::{
    fourth_moment_functional, gamma_p, gk_functional, gk_moment_estimate, hitczenko_lower,
    momunc_estimate, TabulatedTail, TailFunction, MIN_TABLE_LEVEL,
};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
    pub seconds: f64,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} ({:.2}s): {}", self.name, self.seconds, self.detail)
    }
}

struct Check {
    name: &'static str,
    start: Instant,
    metrics: BTreeMap<String, f64>,
}

impl Check {
    fn start(name: &'static str) -> Self {
        Self {
            name,
            start: Instant::now(),
            metrics: BTreeMap::new(),
        }
    }

    fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    fn finish(self, passed: bool, detail: impl Into<String>) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            passed,
            detail: detail.into(),
            metrics: self.metrics,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }

    fn fail(self, err: Error) -> CheckResult {
        self.finish(false, format!("error: {err}"))
    }
}

fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> CoefficientVector {
    let power = rng.random_range(0.0..4.0);
    let values: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            u.signum() * u.abs().powf(power)
        })
        .collect();
    let a = CoefficientVector::new(values).expect("finite");
    if a.is_zero() {
        CoefficientVector::new(vec![1.0; n]).expect("finite")
    } else {
        a
    }
}

/// `γ_p` against Gaussian-moment quadrature for `p ∈ {1, 1.5, …, 50}`.
pub fn gamma_quadrature() -> CheckResult {
    let mut check = Check::start("gamma_p_quadrature");
    let mut worst = 0.0_f64;
    let mut worst_p = 0.0;
    for k in 0..=98 {
        let p = 1.0 + 0.5 * k as f64;
        let exact = gamma_p(p).expect("p ≥ 1");
        let rel = (exact - gaussian_pnorm_quadrature(p)).abs() / exact;
        if rel > worst {
            worst = rel;
            worst_p = p;
        }
    }
    check.metric("max_rel_err", worst);
    check.metric("worst_p", worst_p);
    let secs = check.start.elapsed().as_secs_f64();
    let passed = worst <= 1e-10 && secs < 1.0;
    check.finish(passed, format!("max relative error {worst:.2e} at p = {worst_p}"))
}

/// Exact Rademacher moments never exceed `γ_p‖a‖₂`.
pub fn khintchine(seed: u64) -> CheckResult {
    let mut check = Check::start("khintchine_optimal_constant");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b68);
    let mut violations = 0usize;
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let a = random_profile(&mut rng, n);
        for p in [2.0, 3.0, 4.0, 8.0, 16.0] {
            let bound = gamma_p(p).expect("p ≥ 1") * a.l2();
            let m = match brute_force_rademacher_pnorm(&a, p) {
                Ok(m) => m,
                Err(e) => return check.fail(e),
            };
            worst = worst.max(m / bound);
            if m > bound * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    check.metric("violations", violations as f64);
    check.metric("max_ratio", worst);
    let passed = violations == 0 && check.start.elapsed().as_secs_f64() < 30.0;
    check.finish(
        passed,
        format!("{violations} violations over 1000 cells, max ‖S‖_p/(γ_p‖a‖₂) = {worst:.12}"),
    )
}

/// `hitczenko_lower / ‖Σaᵢεᵢ‖_p ∈ [1/5, 5]` on random Rademacher sums.
pub fn hitczenko_rademacher(seed: u64) -> CheckResult {
    let mut check = Check::start("hitczenko_rademacher_two_sided");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6869);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let a = random_profile(&mut rng, n);
        for p in [2.0, 3.0, 4.0, 8.0, 16.0] {
            let r = match (hitczenko_lower(&a, p), brute_force_rademacher_pnorm(&a, p)) {
                (Ok(h), Ok(m)) => h / m,
                (Err(e), _) | (_, Err(e)) => return check.fail(e),
            };
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let c = hi.max(1.0 / lo);
    check.metric("ratio_min", lo);
    check.metric("ratio_max", hi);
    check.metric("c", c);
    check.finish(c <= 5.0, format!("ratio range [{lo:.4}, {hi:.4}], C = {c:.4}"))
}

fn random_tail(rng: &mut ChaCha8Rng) -> TailFunction {
    match rng.random_range(0..3) {
        0 => TailFunction::linear(rng.random_range(0.5..3.0)).expect("positive rate"),
        1 => TailFunction::power(2.0, rng.random_range(0.5..2.0)).expect("valid power tail"),
        _ => {
            let mut t = vec![0.0];
            let mut n = vec![0.0];
            let mut slope = rng.random_range(0.2..1.5);
            for _ in 0..rng.random_range(3..8) {
                let dt = rng.random_range(0.2..1.5);
                t.push(t.last().unwrap() + dt);
                n.push(n.last().unwrap() + slope * dt);
                slope += rng.random_range(0.1..2.0);
            }
            let (last_t, last_n) = (*t.last().unwrap(), *n.last().unwrap());
            if last_n < MIN_TABLE_LEVEL {
                t.push(last_t + (MIN_TABLE_LEVEL - last_n) / slope + 1.0);
                n.push(last_n + slope * (t.last().unwrap() - last_t));
            }
            TailFunction::tabulated(TabulatedTail::new(t, n).expect("convex table"))
        }
    }
}

/// The dual solver against nested boundary search on random tail mixes.
pub fn gk_oracle(seed: u64) -> CheckResult {
    let mut check = Check::start("gk_solver_vs_oracle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x676b);
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let dim = rng.random_range(2..=3);
        let tails: Vec<TailFunction> = (0..dim).map(|_| random_tail(&mut rng)).collect();
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(0.1..3.0)).collect();
        let p = rng.random_range(2.0..24.0);
        let solved = match gk_functional(&b, &tails, p) {
            Ok(v) => v,
            Err(e) => return check.fail(e),
        };
        let oracle = gk_brute_force(&b, &tails, p);
        worst = worst.max((solved - oracle).abs() / oracle);
    }
    let mut worst_exp = 0.0_f64;
    for _ in 0..50 {
        let dim = rng.random_range(1..=4);
        let b: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..3.0)).collect();
        let p = rng.random_range(2.0..32.0);
        let exact = p * b.iter().cloned().fold(0.0, f64::max) / 2f64.sqrt();
        let solved = match gk_functional(&b, &vec![TailFunction::exponential(); dim], p) {
            Ok(v) => v,
            Err(e) => return check.fail(e),
        };
        worst_exp = worst_exp.max((solved - exact).abs() / exact.max(f64::MIN_POSITIVE));
    }
    check.metric("max_rel_delta", worst);
    check.metric("max_rel_delta_exponential", worst_exp);
    let passed = worst <= 1e-4 && worst_exp <= 1e-10 && check.start.elapsed().as_secs_f64() < 60.0;
    check.finish(
        passed,
        format!("mixed tails max delta {worst:.2e}, exponential max delta {worst_exp:.2e}"),
    )
}

/// `E X⁴` equals 6, 1.8 and 3 for the exponential, cube and Gaussian laws and
/// never exceeds 6 for any implemented family.
pub fn fourth_moment(seed: u64, n_samples: usize) -> CheckResult {
    let mut check = Check::start("fourth_moment_extremality");
    let settings = McSettings::new(n_samples, seed);
    let exact: [(&str, usize, f64, f64); 3] =
        [("exp", 1, 6.0, 0.05), ("cube", 1, 1.8, 0.02), ("gauss", 1, 3.0, 0.03)];
    let others = ["ball:q=1", "ball:q=2", "ball:q=4", "product:gnorm:1.5", "product:gnorm:3"];
    let mut failures = Vec::new();
    let run = |spec: &str, n: usize| {
        DistributionFamily::parse(spec, n).and_then(|f| estimate_moment4(&f, 0, &settings))
    };
    for (spec, n, target, tol) in exact {
        match run(spec, n) {
            Ok(r) => {
                check.metric(&format!("{spec}.value"), r.value);
                if (r.value - target).abs() > tol || r.value > 6.0 + 3.0 * r.stderr {
                    failures.push(format!("{spec}: {:.4} vs {target}", r.value));
                }
            }
            Err(e) => return check.fail(e),
        }
    }
    for spec in others {
        for n in [2, 8] {
            match run(spec, n) {
                Ok(r) => {
                    check.metric(&format!("{spec}.n{n}.value"), r.value);
                    if r.value > 6.0 + 3.0 * r.stderr {
                        failures.push(format!("{spec} n={n}: {:.4} > 6", r.value));
                    }
                }
                Err(e) => return check.fail(e),
            }
        }
    }
    let detail = if failures.is_empty() {
        "all fourth moments within tolerance and ≤ 6".to_string()
    } else {
        failures.join("; ")
    };
    check.finish(failures.is_empty(), detail)
}

/// The grid shared by the two-sidedness and upper-probe checks.
pub fn momunc_grid(seed: u64, n_samples: usize) -> Result<GridRun> {
    let config = ExperimentConfig::new(
        &["exp", "ball:q=1", "ball:q=2", "cube"],
        &["one_hot", "flat", "geometric(0.7)", "power(1)"],
        &[4, 16, 64],
        &[2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0],
        n_samples,
        seed,
    )?;
    run_grid(&config)
}

/// The estimator used by [`momunc_two_sided`]: the primary surrogate of
/// each cell.
pub fn primary_estimator(_: &GridRun, cell: &GridCell) -> Option<f64> {
    cell.surrogates.primary()
}

/// `mc / estimator ∈ [1/10, 10]` on every grid cell.
pub fn momunc_two_sided(
    grid: &GridRun,
    estimator: &dyn Fn(&GridRun, &GridCell) -> Option<f64>,
) -> CheckResult {
    let mut check = Check::start("momunc_two_sidedness");
    let mut envelopes: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let mut bad = Vec::new();
    for cell in &grid.cells {
        let Some(est) = estimator(grid, cell) else {
            bad.push(format!("{} n={} {} p={}: no estimator", cell.family_label, cell.n, cell.profile, cell.p));
            continue;
        };
        let r = cell.mc.value / est;
        let e = envelopes
            .entry(cell.family_label.clone())
            .or_insert((f64::INFINITY, 0.0));
        e.0 = e.0.min(r);
        e.1 = e.1.max(r);
        if !(0.1..=10.0).contains(&r) {
            bad.push(format!("{} n={} {} p={}: ratio {r:.4}", cell.family_label, cell.n, cell.profile, cell.p));
        }
    }
    let mut parts = Vec::new();
    for (family, (lo, hi)) in &envelopes {
        check.metric(&format!("{family}.ratio_min"), *lo);
        check.metric(&format!("{family}.ratio_max"), *hi);
        parts.push(format!("{family} [{lo:.3}, {hi:.3}]"));
    }
    check.metric("cells", grid.cells.len() as f64);
    check.metric("violations", bad.len() as f64);
    let passed = bad.is_empty() && !grid.cells.is_empty();
    let mut detail = format!("{} cells, envelopes {}", grid.cells.len(), parts.join(", "));
    if !bad.is_empty() {
        detail = format!("{} violations (first: {}); {detail}", bad.len(), bad[0]);
    }
    check.finish(passed, detail)
}

/// `(mc − γ_p‖a‖₂)₊·‖a‖₂/(p^{5/2}(Σaᵢ⁴)^{1/2}) ≤ 10` on the grid.
pub fn upper_probe_check(grid: &GridRun) -> CheckResult {
    let mut check = Check::start("upper_probe");
    let mut worst = (0.0_f64, String::new());
    for cell in &grid.cells {
        let v = upper_probe(cell);
        if v > worst.0 || worst.1.is_empty() {
            worst = (v, format!("{} n={} {} p={}", cell.family_label, cell.n, cell.profile, cell.p));
        }
    }
    check.metric("max", worst.0);
    let passed = worst.0 <= 10.0 && !grid.cells.is_empty();
    check.finish(passed, format!("observed maximum {:.4e} at {}", worst.0, worst.1))
}

/// `|‖S‖_p − γ_p| ≤ p/√n + 3·stderr` for flat coefficients and exponential
/// coordinates.
pub fn gaussian_band_flat(seed: u64, n_samples: usize) -> CheckResult {
    let mut check = Check::start("gaussian_band_flat");
    let ps = [3.0, 4.0, 6.0, 8.0];
    let settings = McSettings::new(n_samples, seed);
    let mut violations = 0usize;
    let mut worst = 0.0_f64;
    for (g, n) in [16usize, 64].into_iter().enumerate() {
        let family = DistributionFamily::exponential(n).expect("n > 0");
        let a = CoefficientVector::new(vec![1.0 / (n as f64).sqrt(); n]).expect("finite");
        let key = StreamKey::new(seed, 0x6762_0000 + g as u64);
        let rows = match estimate_pnorms(&family, &[&a], &ps, &settings, key) {
            Ok(r) => r,
            Err(e) => return check.fail(e),
        };
        for (&p, r) in ps.iter().zip(&rows[0]) {
            let dev = (r.value - gamma_p(p).expect("p ≥ 1")).abs();
            let slack = p / (n as f64).sqrt() + 3.0 * r.stderr;
            worst = worst.max(dev / slack);
            violations += usize::from(dev > slack);
            check.metric(&format!("n{n}.p{p}.deviation"), dev);
        }
    }
    check.metric("violations", violations as f64);
    check.finish(
        violations == 0,
        format!("{violations} violations over 8 cells, max deviation/allowance {worst:.3}"),
    )
}

/// `‖S‖_p ≥ γ_p‖a‖₂ − √3·p·(Σaᵢ⁴)^{1/2}/‖a‖₂ − 3·stderr` on ball families.
pub fn lower_band_balls(seed: u64, n_samples: usize) -> CheckResult {
    let mut check = Check::start("lower_band_balls");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c62);
    let ps = [2.0, 4.0, 8.0];
    let settings = McSettings::new(n_samples, seed);
    let mut violations = 0usize;
    let mut cells = 0usize;
    let mut min_margin = f64::INFINITY;
    for q in [1.0, 2.0] {
        for k in 0..50 {
            let n = rng.random_range(2..=32);
            let a = random_profile(&mut rng, n);
            let p = ps[k % ps.len()];
            let family = match DistributionFamily::uniform_ball(n, q) {
                Ok(f) => f,
                Err(e) => return check.fail(e),
            };
            let key = StreamKey::new(seed, 0x6c62_0000 + cells as u64);
            let r = match estimate_pnorms(&family, &[&a], &[p], &settings, key) {
                Ok(r) => r[0][0],
                Err(e) => return check.fail(e),
            };
            let bound = gamma_p(p).expect("p ≥ 1") * a.l2() - 3f64.sqrt() * p * fourth_moment_functional(&a);
            let margin = (r.value + 3.0 * r.stderr - bound) / a.l2();
            min_margin = min_margin.min(margin);
            violations += usize::from(margin < 0.0);
            cells += 1;
        }
    }
    check.metric("cells", cells as f64);
    check.metric("violations", violations as f64);
    check.metric("min_margin", min_margin);
    check.finish(
        violations == 0,
        format!("{violations} violations over {cells} cells, min normalized margin {min_margin:.4}"),
    )
}

/// Ball versus independent marginals, plus the disk quadrature oracle.
pub fn negative_association(seed: u64, n_samples: usize) -> CheckResult {
    let mut check = Check::start("negative_association");
    let settings = McSettings::new(n_samples, seed);
    let ps = [3.0, 4.0, 6.0];
    let a = CoefficientVector::new(vec![1.0; 3]).expect("finite");
    let mut failures = Vec::new();
    for q in [1.0, 2.0] {
        let family = DistributionFamily::uniform_ball(3, q).expect("valid ball");
        let cmps = match na_compare_grid(&family, &a, &ps, &settings) {
            Ok(c) => c,
            Err(e) => return check.fail(e),
        };
        for (&p, c) in ps.iter().zip(&cmps) {
            check.metric(&format!("q{q}.p{p}.dependent"), c.dependent.value);
            check.metric(&format!("q{q}.p{p}.independent"), c.independent.value);
            if !c.holds_within(3.0) {
                failures.push(format!(
                    "q={q} p={p}: {:.6} > {:.6} + 3·{:.2e}",
                    c.dependent.value,
                    c.independent.value,
                    c.combined_stderr()
                ));
            }
        }
    }
    let (dep, ind) = disk_negative_association(2.0, 4.0);
    check.metric("disk.dependent", dep);
    check.metric("disk.independent", ind);
    if (dep - 8.0).abs() > 1e-6 || (ind - 10.0).abs() > 1e-6 || dep >= ind {
        failures.push(format!("disk oracle: dependent {dep} independent {ind}"));
    }
    let detail = if failures.is_empty() {
        format!("6 cells hold; disk oracle E S⁴ = {dep:.9} < {ind:.9}")
    } else {
        failures.join("; ")
    };
    check.finish(failures.is_empty(), detail)
}

/// Joint tails of exponential coordinates against `e^{−√2Σtᵢ}`, and the
/// level-set support against the program value.
pub fn joint_tail_agreement(seed: u64, n_samples: usize) -> CheckResult {
    let mut check = Check::start("joint_tail_gk_agreement");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6a74);
    let settings = McSettings::new(n_samples, seed);
    let mut misses = 0usize;
    let mut worst_z = 0.0_f64;
    for k in 0..20 {
        let n = rng.random_range(1..=4);
        let total = rng.random_range(0.05..3.0);
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let ws: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v *= total / ws);
        let family = DistributionFamily::exponential(n).expect("n > 0");
        let probe = McSettings { seed: settings.seed.wrapping_add(k), ..settings };
        let r = match estimate_joint_tail(&family, &w, &probe) {
            Ok(r) => r,
            Err(e) => return check.fail(e),
        };
        let exact = (-(2f64.sqrt()) * total).exp();
        let z = (r.value - exact).abs() / r.stderr;
        worst_z = worst_z.max(z);
        misses += usize::from(z > 3.0);
    }
    let mut worst_gap = 0.0_f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let a = random_profile(&mut rng, n);
        let p = rng.random_range(2.0..32.0);
        let family = DistributionFamily::exponential(n).expect("n > 0");
        let head = a.top_index_set(p);
        let b: Vec<f64> = a.restrict(&head).iter().map(|v| v.abs()).collect();
        let tails = vec![TailFunction::exponential(); b.len()];
        let level = family.level_set_support(&head, &a.restrict(&head), p);
        let program = gk_functional(&b, &tails, p);
        let full = momunc_estimate(&a, &family, p)
            .and_then(|m| Ok((m, gk_moment_estimate(&a, &vec![TailFunction::exponential(); n], p)?)));
        match (level, program, full) {
            (Ok(l), Ok(g), Ok((m, e))) => {
                worst_gap = worst_gap.max((l - g).abs() / g.max(1e-300));
                worst_gap = worst_gap.max((m - e).abs() / e.max(1e-300));
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return check.fail(e),
        }
    }
    check.metric("misses", misses as f64);
    check.metric("max_z", worst_z);
    check.metric("max_level_set_gap", worst_gap);
    let passed = misses == 0 && worst_gap <= 1e-12;
    check.finish(
        passed,
        format!("{misses}/20 probes outside 3σ (max z {worst_z:.2}), level-set gap {worst_gap:.1e}"),
    )
}

/// A small report computed on pools of different sizes yields identical CSV.
pub fn report_determinism(seed: u64) -> CheckResult {
    let mut check = Check::start("report_determinism");
    let config = match ExperimentConfig::new(
        &["exp", "ball:q=1.5"],
        &["flat", "geometric(0.7)"],
        &[3, 8],
        &[2.0, 5.0, 16.0],
        20_000,
        seed,
    ) {
        Ok(c) => c,
        Err(e) => return check.fail(e),
    };
    let mut outputs = Vec::new();
    for workers in [1, 4] {
        match with_workers(workers, || run_experiment(&config)) {
            Ok(Ok(r)) => outputs.push(r.csv()),
            Ok(Err(e)) | Err(e) => return check.fail(e),
        }
    }
    let same = outputs[0] == outputs[1];
    check.metric("bytes", outputs[0].len() as f64);
    check.finish(same, if same { "CSV identical for 1 and 4 workers" } else { "CSV differs between worker counts" })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Gk,
    Gaussian,
    Na,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Self::Core),
            "gk" => Ok(Self::Gk),
            "gaussian" => Ok(Self::Gaussian),
            "na" => Ok(Self::Na),
            _ => Err(Error::invalid(format!("unknown suite {s:?}; expected core, gk, gaussian or na"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Core => "core",
            Self::Gk => "gk",
            Self::Gaussian => "gaussian",
            Self::Na => "na",
        })
    }
}

/// Full-size parameters for every check.
pub const MOMENT4_SAMPLES: usize = 10_000_000;
pub const GRID_SAMPLES: usize = 1_000_000;
pub const BAND_SAMPLES: usize = 1_000_000;
pub const LOWER_BAND_SAMPLES: usize = 200_000;
pub const NA_SAMPLES: usize = 10_000_000;
pub const JOINT_TAIL_SAMPLES: usize = 1_000_000;

pub fn run_suite(suite: Suite, seed: u64) -> Vec<CheckResult> {
    match suite {
        Suite::Core => {
            let mut out = vec![fourth_moment(seed, MOMENT4_SAMPLES)];
            let start = Instant::now();
            match momunc_grid(seed, GRID_SAMPLES) {
                Ok(grid) => {
                    let grid_seconds = start.elapsed().as_secs_f64();
                    let mut two_sided = momunc_two_sided(&grid, &primary_estimator);
                    two_sided.seconds += grid_seconds;
                    two_sided.metrics.insert("grid_seconds".into(), grid_seconds);
                    out.push(two_sided);
                    out.push(upper_probe_check(&grid));
                }
                Err(e) => {
                    out.push(Check::start("momunc_two_sidedness").fail(e));
                }
            }
            out.push(report_determinism(seed));
            out.push(hitczenko_rademacher(seed));
            out
        }
        Suite::Gk => vec![gk_oracle(seed), joint_tail_agreement(seed, JOINT_TAIL_SAMPLES)],
        Suite::Gaussian => vec![
            gamma_quadrature(),
            khintchine(seed),
            gaussian_band_flat(seed, BAND_SAMPLES),
            lower_band_balls(seed, LOWER_BAND_SAMPLES),
        ],
        Suite::Na => vec![negative_association(seed, NA_SAMPLES)],
    }
}

/// Machine-readable verdict for one suite run.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Verdict {
    pub fn new(suite: Suite, seed: u64, checks: Vec<CheckResult>) -> Self {
        Self {
            suite,
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}
