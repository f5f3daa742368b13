//! The Gluskin–Kwapień program
//!
//! ```text
//! maximize Σ bᵢ tᵢ   subject to   Σ Nᵢ(tᵢ) ≤ p,  t ≥ 0
//! ```
//!
//! solved through its Lagrangian dual. For a multiplier `λ > 0` the problem
//! separates into one-dimensional concave maximizations
//! `sup_t (bᵢ t − λ Nᵢ(t))`, and the dual function
//! `D(λ) = λp + Σ sup_t (bᵢ t − λ Nᵢ(t))` is convex with
//! `D′(λ) = p − Σ Nᵢ(tᵢ(λ))`. The value of the program equals `min_λ D(λ)`;
//! the minimizer is found by bisection on the sign of `D′` in log-space.
//!
//! Linear (and tabulated, past the last node) tails make `D` infinite below
//! `λ_min = maxᵢ bᵢ / slope_∞(Nᵢ)`. When the remaining tails leave budget
//! unused at `λ_min` the optimum sits exactly there, which covers the
//! pure-exponential case `p·‖b‖_∞/√2`.

use crate::coeffs::CoefficientVector;
use crate::error::{Error, Result};
use crate::surrogates::tail::TailFunction;

const LAMBDA_LO: f64 = 1e-12;
const LAMBDA_HI: f64 = 1e12;
const MAX_ITER: usize = 200;

/// `sup{Σ bᵢtᵢ : Σ Nᵢ(tᵢ) ≤ p, t ≥ 0}`.
pub fn gk_functional(b: &[f64], tails: &[TailFunction], p: f64) -> Result<f64> {
    if b.len() != tails.len() {
        return Err(Error::invalid(format!(
            "{} coefficients but {} tails",
            b.len(),
            tails.len()
        )));
    }
    if !(p >= 2.0) || !p.is_finite() {
        return Err(Error::invalid(format!("p must be ≥ 2, got {p}")));
    }
    if let Some(bad) = b.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("coefficients must be nonnegative, got {bad}")));
    }
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(*v));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let b: Vec<f64> = b.iter().map(|v| v / scale).collect();

    let mut lambda_min = 0.0_f64;
    for (bi, tail) in b.iter().zip(tails) {
        if *bi == 0.0 {
            continue;
        }
        let slope = tail.asymptotic_slope();
        if !(slope > 0.0) {
            return Err(Error::Unbounded(format!(
                "tail {} is bounded while its coefficient is positive",
                tail.label()
            )));
        }
        lambda_min = lambda_min.max(bi / slope);
    }

    // Keeps bᵢ/λ at or below the last slope despite rounding.
    lambda_min *= 1.0 + 1e-14;
    let dual = Dual { b: &b, tails, p };
    if lambda_min > 0.0 {
        let (slack, value) = dual.eval(lambda_min)?;
        if slack >= 0.0 {
            return Ok(scale * value);
        }
    }
    let mut lo = lambda_min.max(LAMBDA_LO);
    let (slack_lo, value_lo) = dual.eval(lo)?;
    if slack_lo >= 0.0 {
        // Budget is slack even for a vanishing multiplier; D(lo) exceeds the
        // optimum by at most lo·p.
        return Ok(scale * value_lo);
    }
    let mut hi = LAMBDA_HI.max(lo * 2.0);
    let mut best = value_lo;
    loop {
        let (slack, value) = dual.eval(hi)?;
        best = best.min(value);
        if slack >= 0.0 {
            break;
        }
        lo = hi;
        hi *= 1e3;
        if !hi.is_finite() {
            return Err(Error::Unbounded("dual multiplier diverged".into()));
        }
    }
    for _ in 0..MAX_ITER {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let (slack, value) = dual.eval(mid)?;
        best = best.min(value);
        if slack >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(scale * best)
}

struct Dual<'a> {
    b: &'a [f64],
    tails: &'a [TailFunction],
    p: f64,
}

impl Dual<'_> {
    /// Returns `(D′(λ), D(λ))` using the smallest coordinate maximizers.
    fn eval(&self, lambda: f64) -> Result<(f64, f64)> {
        let mut used = 0.0;
        let mut value = lambda * self.p;
        for (bi, tail) in self.b.iter().zip(self.tails) {
            if *bi == 0.0 {
                continue;
            }
            let t = tail
                .lagrangian_argmax(bi / lambda)
                .ok_or_else(|| Error::Unbounded(format!("multiplier {lambda} below λ_min")))?;
            let n = tail.value(t);
            used += n;
            value += bi * t - lambda * n;
        }
        Ok((self.p - used, value))
    }
}

/// Head-tail estimator: the program restricted to `I_p` with `b = |a_{I_p}|`
/// plus `√p·(Σ_{i∉I_p} aᵢ²)^{1/2}`.
pub fn gk_moment_estimate(a: &CoefficientVector, tails: &[TailFunction], p: f64) -> Result<f64> {
    if tails.len() != a.len() {
        return Err(Error::invalid(format!(
            "{} coefficients but {} tails",
            a.len(),
            tails.len()
        )));
    }
    let head = a.top_index_set(p);
    let b: Vec<f64> = head.iter().map(|&i| a.values()[i].abs()).collect();
    let head_tails: Vec<TailFunction> = head.iter().map(|&i| tails[i].clone()).collect();
    let gk = gk_functional(&b, &head_tails, p)?;
    Ok(gk + p.sqrt() * a.complement_l2(p))
}
