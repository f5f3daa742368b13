//! Deterministic, constant-free surrogates for `‖Σ aᵢXᵢ‖_p`.
//!
//! Every function here returns a bare functional; the universal constants of
//! the two-sided equivalences are measured empirically by the harness.

mod gk;
mod tail;
mod tail_bounds;

pub use gk::{gk_functional, gk_moment_estimate};
pub use tail::{TabulatedTail, TailFunction, TailKind, MIN_TABLE_LEVEL};
pub use tail_bounds::{tail_bounds, TailBounds, TailPoint};

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::coeffs::{lq_norm, CoefficientVector};
use crate::error::{Error, Result};
use crate::families::DistributionFamily;

fn check_p(p: f64, min: f64) -> Result<()> {
    if !(p >= min) || !p.is_finite() {
        return Err(Error::invalid(format!("p must be ≥ {min}, got {p}")));
    }
    Ok(())
}

/// `γ_p = ‖N(0,1)‖_p = (2^{p/2} Γ((p+1)/2) / √π)^{1/p}`, evaluated in log-space.
pub fn gamma_p(p: f64) -> Result<f64> {
    check_p(p, 1.0)?;
    let ln_moment = 0.5 * p * std::f64::consts::LN_2 + ln_gamma(0.5 * (p + 1.0))
        - 0.5 * std::f64::consts::PI.ln();
    Ok((ln_moment / p).exp())
}

/// `Σ_{i≤p} a*_i + √p·(Σ_{i>p} (a*_i)²)^{1/2}` with a fractional boundary term.
pub fn hitczenko_lower(a: &CoefficientVector, p: f64) -> Result<f64> {
    check_p(p, 2.0)?;
    Ok(a.head_power_sum(p, 1.0) + p.sqrt() * a.tail_power_sum(p, 2.0).sqrt())
}

/// `p·‖a‖_∞ + √p·‖a‖₂`.
pub fn bn_upper(a: &CoefficientVector, p: f64) -> Result<f64> {
    check_p(p, 2.0)?;
    Ok(p * a.linf() + p.sqrt() * a.l2())
}

/// Closed form for `X` uniform on the isotropic `r_{n,q}B_q^n`:
/// `min{p,n}^{1/q}·(Σ_{i≤p} (a*_i)^{q′})^{1/q′} + √p·(Σ_{i>p} (a*_i)²)^{1/2}`.
pub fn bqn_estimate(a: &CoefficientVector, q: f64, p: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 || q.is_infinite() {
        return Err(Error::invalid(format!("q must lie in [1, ∞), got {q}")));
    }
    check_p(p, 2.0)?;
    let n = a.len() as f64;
    let lead = p.min(n).powf(1.0 / q);
    let head = if q == 1.0 {
        a.linf()
    } else {
        let dual = q / (q - 1.0);
        // Σ over ≤ ⌈p⌉ terms; scale by a*_1 to keep powf in range.
        let top = a.linf();
        if top == 0.0 {
            0.0
        } else {
            let scaled = CoefficientVector::new(a.rearrange().iter().map(|v| v / top).collect())?;
            top * scaled.head_power_sum(p, dual).powf(1.0 / dual)
        }
    };
    Ok(lead * head + p.sqrt() * a.tail_power_sum(p, 2.0).sqrt())
}

/// Head-tail split estimator: the level-set support functional of the
/// marginal on `I_p` plus `√p·(Σ_{i∉I_p} aᵢ²)^{1/2}`.
pub fn momunc_estimate(a: &CoefficientVector, family: &DistributionFamily, p: f64) -> Result<f64> {
    check_p(p, 2.0)?;
    if family.dim() != a.len() {
        return Err(Error::invalid(format!(
            "family dimension {} but {} coefficients",
            family.dim(),
            a.len()
        )));
    }
    let head = a.top_index_set(p);
    let a_head = a.restrict(&head);
    let support = family.level_set_support(&head, &a_head, p)?;
    Ok(support + p.sqrt() * a.complement_l2(p))
}

/// Gaussian approximation band for `‖S‖_p` around `γ_p‖a‖₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianBand {
    /// `max(0, γ_p‖a‖₂ − p·(3Σaᵢ⁴)^{1/2}/‖a‖₂)`.
    pub lower: f64,
    /// `γ_p‖a‖₂ + p‖a‖_∞`; proven for independent coordinates and `p ≥ 3`.
    pub upper_indep: f64,
    /// `γ_p‖a‖₂ + p^{5/2}(Σaᵢ⁴)^{1/2}/‖a‖₂`.
    pub upper_klartag: f64,
    /// Whether `p ≥ 3`, the range where `upper_indep` is a theorem.
    pub indep_applicable: bool,
}

pub fn gaussian_band(a: &CoefficientVector, p: f64) -> Result<GaussianBand> {
    check_p(p, 2.0)?;
    if a.is_zero() {
        return Err(Error::invalid("gaussian band needs a nonzero coefficient vector"));
    }
    let g = gamma_p(p)?;
    let l2 = a.l2();
    let top = a.linf();
    let fourth = fourth_moment_functional(a);
    Ok(GaussianBand {
        lower: (g * l2 - p * 3f64.sqrt() * fourth).max(0.0),
        upper_indep: g * l2 + p * top,
        upper_klartag: g * l2 + p.powf(2.5) * fourth,
        indep_applicable: p >= 3.0,
    })
}

/// `(Σaᵢ⁴)^{1/2}/‖a‖₂`, the functional multiplying `p` in the lower band.
pub fn fourth_moment_functional(a: &CoefficientVector) -> f64 {
    let l2 = a.l2();
    if l2 == 0.0 {
        return 0.0;
    }
    let top = a.linf();
    lq_norm(&a.rearrange().iter().map(|v| (v / top).powi(2)).collect::<Vec<_>>(), 2.0) * top * top
        / l2
}

/// All surrogates applicable to `(a, family, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateBundle {
    pub p: f64,
    pub hitczenko_lower: f64,
    pub bn_upper: f64,
    pub gk: Option<f64>,
    pub bqn: Option<f64>,
    pub momunc: Option<f64>,
    pub gamma_band: GaussianBand,
}

impl SurrogateBundle {
    pub fn evaluate(a: &CoefficientVector, family: &DistributionFamily, p: f64) -> Result<Self> {
        if family.dim() != a.len() {
            return Err(Error::invalid(format!(
                "family dimension {} but {} coefficients",
                family.dim(),
                a.len()
            )));
        }
        let gk = match family.coordinate_tails() {
            Some(tails) => Some(gk_moment_estimate(a, &tails, p)?),
            None => None,
        };
        let bqn = match family {
            DistributionFamily::UniformBall(ball) => Some(bqn_estimate(a, ball.q(), p)?),
            _ => None,
        };
        let momunc = match momunc_estimate(a, family, p) {
            Ok(v) => Some(v),
            Err(Error::UnsupportedFamily(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            p,
            hitczenko_lower: hitczenko_lower(a, p)?,
            bn_upper: bn_upper(a, p)?,
            gk,
            bqn,
            momunc,
            gamma_band: gaussian_band(a, p)?,
        })
    }

    /// The two-sided estimator for the family: `gk` for independent
    /// coordinates, `bqn` for balls, otherwise the level-set form.
    pub fn primary(&self) -> Option<f64> {
        self.gk.or(self.bqn).or(self.momunc)
    }
}
