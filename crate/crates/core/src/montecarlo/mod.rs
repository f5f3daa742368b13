//! Monte-Carlo ground truth: exact samplers, batched log-space p-norm
//! estimation and the specialized estimators built on top of them.
//!
//! Every estimator splits its budget into at least [`MIN_BATCHES`] batches.
//! Batch `b` draws from [`StreamKey::batch_rng`]`(b)`, batches run on the
//! rayon pool and are reduced in index order, so the result is a pure
//! function of `(seed, domain, n_samples, batches)`.

mod rng;
mod sampler;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use rng::StreamKey;
pub use sampler::{FamilySampler, IndependentMarginals, Sampler};

use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::families::DistributionFamily;

pub const MIN_SAMPLES: usize = 10_000;
pub const MIN_BATCHES: usize = 32;
pub const DEFAULT_BATCHES: usize = 64;
pub const MAX_P: f64 = 32.0;
const MAX_JOINT_TAIL_DIM: usize = 8;
const MAX_RADEMACHER_DIM: usize = 20;

pub(crate) const DOMAIN_PNORM: u64 = 1;
const DOMAIN_MOMENT4: u64 = 2;
const DOMAIN_JOINT: u64 = 3;
const DOMAIN_DEPENDENT: u64 = 4;
const DOMAIN_INDEPENDENT: u64 = 5;

/// One Monte-Carlo estimate with its batch standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub batches: usize,
}

/// Sample budget and seed shared by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n_samples: usize,
    pub seed: u64,
    pub batches: usize,
}

impl McSettings {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            batches: DEFAULT_BATCHES,
        }
    }

    pub fn with_batches(mut self, batches: usize) -> Self {
        self.batches = batches;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "n_samples must be ≥ {MIN_SAMPLES}, got {}",
                self.n_samples
            )));
        }
        if self.batches < MIN_BATCHES || self.batches > self.n_samples {
            return Err(Error::invalid(format!(
                "batches must lie in [{MIN_BATCHES}, n_samples], got {}",
                self.batches
            )));
        }
        Ok(())
    }

    fn batch_len(&self, b: usize) -> usize {
        let base = self.n_samples / self.batches;
        base + usize::from(b < self.n_samples % self.batches)
    }

    fn record(&self, value: f64, stderr: f64) -> EstimateRecord {
        EstimateRecord {
            value,
            stderr,
            n_samples: self.n_samples,
            seed: self.seed,
            batches: self.batches,
        }
    }
}

fn run_batches<T, F>(settings: &McSettings, key: StreamKey, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> T + Sync,
{
    (0..settings.batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = key.batch_rng(b as u64);
            f(&mut rng, settings.batch_len(b))
        })
        .collect()
}

fn check_pnorm_p(p: f64) -> Result<()> {
    if !(p >= 2.0) {
        return Err(Error::invalid(format!("p must be ≥ 2, got {p}")));
    }
    if p > MAX_P {
        return Err(Error::range(format!("p = {p} exceeds the supported maximum {MAX_P}")));
    }
    Ok(())
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `‖Σ aᵢXᵢ‖_p` for every profile in `profiles` and every `p` in `ps`,
/// all from the same draws. Returns `out[profile][p]`.
pub fn estimate_pnorms_with<S: Sampler>(
    sampler: &S,
    profiles: &[&CoefficientVector],
    ps: &[f64],
    settings: &McSettings,
    key: StreamKey,
) -> Result<Vec<Vec<EstimateRecord>>> {
    settings.validate()?;
    for &p in ps {
        check_pnorm_p(p)?;
    }
    let n = sampler.dim();
    for a in profiles {
        if a.len() != n {
            return Err(Error::invalid(format!(
                "coefficient length {} does not match dimension {n}",
                a.len()
            )));
        }
        if a.is_zero() {
            return Err(Error::invalid("coefficient vector is identically zero"));
        }
    }
    let np = ps.len();
    // Per batch: ln Σ_samples |S|^p for every (profile, p).
    let batch_sums: Vec<Vec<f64>> = run_batches(settings, key, |rng, len| {
        let mut x = vec![0.0; n];
        let mut ln_abs = vec![Vec::with_capacity(len); profiles.len()];
        for _ in 0..len {
            sampler.sample_into(rng, &mut x);
            for (logs, a) in ln_abs.iter_mut().zip(profiles) {
                let sum: f64 = a.values().iter().zip(&x).map(|(c, v)| c * v).sum();
                logs.push(sum.abs().ln());
            }
        }
        let mut out = Vec::with_capacity(profiles.len() * np);
        for logs in &ln_abs {
            let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for &p in ps {
                if max == f64::NEG_INFINITY {
                    out.push(f64::NEG_INFINITY);
                    continue;
                }
                let shift = p * max;
                let acc: f64 = logs.iter().map(|l| (p * l - shift).exp()).sum();
                out.push(shift + acc.ln());
            }
        }
        out
    });

    let total = settings.n_samples as f64;
    let b_count = settings.batches as f64;
    let mut result = Vec::with_capacity(profiles.len());
    for j in 0..profiles.len() {
        let mut row = Vec::with_capacity(np);
        for (k, &p) in ps.iter().enumerate() {
            let idx = j * np + k;
            let ln_m = log_sum_exp(batch_sums.iter().map(|v| v[idx])) - total.ln();
            if ln_m == f64::NEG_INFINITY {
                row.push(settings.record(0.0, 0.0));
                continue;
            }
            let ratios: Vec<f64> = batch_sums
                .iter()
                .enumerate()
                .map(|(b, v)| (v[idx] - (settings.batch_len(b) as f64).ln() - ln_m).exp())
                .collect();
            let mean = ratios.iter().sum::<f64>() / b_count;
            let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (b_count - 1.0);
            let value = (ln_m / p).exp();
            let stderr = value * (var / b_count).sqrt() / p;
            row.push(settings.record(value, stderr));
        }
        result.push(row);
    }
    Ok(result)
}

/// [`estimate_pnorms_with`] for a family's exact sampler.
pub fn estimate_pnorms(
    family: &DistributionFamily,
    profiles: &[&CoefficientVector],
    ps: &[f64],
    settings: &McSettings,
    key: StreamKey,
) -> Result<Vec<Vec<EstimateRecord>>> {
    estimate_pnorms_with(&FamilySampler::new(family), profiles, ps, settings, key)
}

/// `‖Σ aᵢXᵢ‖_p` estimated from `settings.n_samples` exact draws.
pub fn estimate_pnorm(
    family: &DistributionFamily,
    a: &CoefficientVector,
    p: f64,
    settings: &McSettings,
) -> Result<EstimateRecord> {
    let key = StreamKey::new(settings.seed, DOMAIN_PNORM);
    Ok(estimate_pnorms(family, &[a], &[p], settings, key)?[0][0])
}

fn mean_record(settings: &McSettings, sums: &[f64]) -> EstimateRecord {
    let b_count = settings.batches as f64;
    let value = sums.iter().sum::<f64>() / settings.n_samples as f64;
    let means: Vec<f64> = sums
        .iter()
        .enumerate()
        .map(|(b, s)| s / settings.batch_len(b) as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / b_count;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b_count - 1.0);
    settings.record(value, (var / b_count).sqrt())
}

/// Empirical `E Xᵢ⁴` for one coordinate.
pub fn estimate_moment4(
    family: &DistributionFamily,
    coordinate: usize,
    settings: &McSettings,
) -> Result<EstimateRecord> {
    settings.validate()?;
    let n = family.dim();
    if coordinate >= n {
        return Err(Error::invalid(format!("coordinate {coordinate} out of 0..{n}")));
    }
    let sampler = FamilySampler::new(family);
    let key = StreamKey::new(settings.seed, DOMAIN_MOMENT4);
    let sums = run_batches(settings, key, |rng, len| {
        let mut x = vec![0.0; n];
        let mut acc = 0.0;
        for _ in 0..len {
            sampler.sample_into(rng, &mut x);
            acc += x[coordinate].powi(4);
        }
        acc
    });
    Ok(mean_record(settings, &sums))
}

/// Empirical `P(|Xᵢ| ≥ tᵢ for all i)` with the binomial standard error.
pub fn estimate_joint_tail(
    family: &DistributionFamily,
    t: &[f64],
    settings: &McSettings,
) -> Result<EstimateRecord> {
    settings.validate()?;
    let n = family.dim();
    if n > MAX_JOINT_TAIL_DIM {
        return Err(Error::range(format!(
            "joint tails are limited to n ≤ {MAX_JOINT_TAIL_DIM}, got {n}"
        )));
    }
    if t.len() != n {
        return Err(Error::invalid(format!("{} thresholds for dimension {n}", t.len())));
    }
    if let Some(bad) = t.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("thresholds must be nonnegative, got {bad}")));
    }
    if t.iter().all(|v| *v == 0.0) {
        return Ok(settings.record(1.0, 0.0));
    }
    let sampler = FamilySampler::new(family);
    let key = StreamKey::new(settings.seed, DOMAIN_JOINT);
    let hits: u64 = run_batches(settings, key, |rng, len| {
        let mut x = vec![0.0; n];
        let mut hits = 0u64;
        for _ in 0..len {
            sampler.sample_into(rng, &mut x);
            hits += u64::from(x.iter().zip(t).all(|(v, s)| v.abs() >= *s));
        }
        hits
    })
    .into_iter()
    .sum();
    let prob = hits as f64 / settings.n_samples as f64;
    if prob < (-10.0f64).exp() {
        return Err(Error::range(format!(
            "estimated probability {prob:.3e} is below e^-10"
        )));
    }
    let stderr = (prob * (1.0 - prob) / settings.n_samples as f64).sqrt();
    Ok(settings.record(prob, stderr))
}

/// Result of [`na_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaComparison {
    pub dependent: EstimateRecord,
    pub independent: EstimateRecord,
}

impl NaComparison {
    pub fn combined_stderr(&self) -> f64 {
        self.dependent.stderr.hypot(self.independent.stderr)
    }

    /// `dependent ≤ independent + k·combined_stderr`.
    pub fn holds_within(&self, k: f64) -> bool {
        self.dependent.value <= self.independent.value + k * self.combined_stderr()
    }
}

/// `‖Σ aᵢXᵢ‖_p` on a uniform ball against the same sum over independent
/// copies of its coordinates, for each exponent in `ps`.
pub fn na_compare_grid(
    family: &DistributionFamily,
    a: &CoefficientVector,
    ps: &[f64],
    settings: &McSettings,
) -> Result<Vec<NaComparison>> {
    let DistributionFamily::UniformBall(ball) = family else {
        return Err(Error::unsupported("negative association is compared on uniform balls only"));
    };
    if let Some(p) = ps.iter().find(|p| !(**p >= 3.0)) {
        return Err(Error::invalid(format!("p must be ≥ 3, got {p}")));
    }
    if ball.n() < 2 {
        return Err(Error::invalid("negative association needs n ≥ 2"));
    }
    let dependent = estimate_pnorms(
        family,
        &[a],
        ps,
        settings,
        StreamKey::new(settings.seed, DOMAIN_DEPENDENT),
    )?;
    let independent = estimate_pnorms_with(
        &IndependentMarginals::new(ball.marginal()?, ball.n()),
        &[a],
        ps,
        settings,
        StreamKey::new(settings.seed, DOMAIN_INDEPENDENT),
    )?;
    Ok(dependent[0]
        .iter()
        .zip(&independent[0])
        .map(|(d, i)| NaComparison {
            dependent: *d,
            independent: *i,
        })
        .collect())
}

/// [`na_compare_grid`] for a single exponent.
pub fn na_compare(
    family: &DistributionFamily,
    a: &CoefficientVector,
    p: f64,
    settings: &McSettings,
) -> Result<NaComparison> {
    Ok(na_compare_grid(family, a, &[p], settings)?[0])
}

/// Exact `‖Σ aᵢεᵢ‖_p` for a Rademacher sequence by enumerating sign patterns.
pub fn brute_force_rademacher_pnorm(a: &CoefficientVector, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("p must be ≥ 1, got {p}")));
    }
    let n = a.len();
    if n > MAX_RADEMACHER_DIM {
        return Err(Error::range(format!(
            "enumeration is limited to n ≤ {MAX_RADEMACHER_DIM}, got {n}"
        )));
    }
    let scale = a.l1();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let v: Vec<f64> = a.values().iter().map(|x| x / scale).collect();
    // |S| is even in the signs, so ε₁ is pinned to +1.
    let patterns = 1u64 << (n - 1);
    let mut acc = 0.0;
    for mask in 0..patterns {
        let mut s = v[0];
        for (i, c) in v.iter().enumerate().skip(1) {
            if mask >> (i - 1) & 1 == 1 {
                s -= c;
            } else {
                s += c;
            }
        }
        acc += s.abs().powf(p);
    }
    Ok(scale * (acc / patterns as f64).powf(1.0 / p))
}

#[cfg(test)]
mod tests;
