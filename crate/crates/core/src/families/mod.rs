//! Isotropic unconditional log-concave distribution families.

mod ball;

pub use ball::{isotropic_radius, BallMarginal, UniformBall};

use std::sync::OnceLock;

use crate::coeffs::lq_norm;
use crate::error::{Error, Result};
use crate::surrogates::TailFunction;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionFamily {
    /// Independent symmetric coordinates given by their tails.
    Product { tails: Vec<TailFunction> },
    UniformBall(UniformBall),
    GaussianStd { n: usize },
    /// Product of uniform laws on `[−√3, √3]`.
    UniformCube { n: usize },
}

fn gaussian_tail() -> &'static TailFunction {
    static TAIL: OnceLock<TailFunction> = OnceLock::new();
    TAIL.get_or_init(TailFunction::gaussian)
}

impl DistributionFamily {
    pub fn exponential(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::Product {
            tails: vec![TailFunction::exponential(); n],
        })
    }

    pub fn product(tails: Vec<TailFunction>) -> Result<Self> {
        check_dim(tails.len())?;
        Ok(Self::Product { tails })
    }

    pub fn uniform_ball(n: usize, q: f64) -> Result<Self> {
        Ok(Self::UniformBall(UniformBall::new(n, q)?))
    }

    pub fn gaussian(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::GaussianStd { n })
    }

    pub fn cube(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::UniformCube { n })
    }

    /// Parses a family specification for dimension `n`:
    /// `exp`, `gauss`, `cube`, `ball:q=<val>`, `product:<tail>[,<tail>…]`
    /// with tails `exp`, `gauss`, `gnorm:<β>`. A tail list shorter than `n`
    /// is repeated cyclically.
    pub fn parse(spec: &str, n: usize) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "exp" => return Self::exponential(n),
            "gauss" => return Self::gaussian(n),
            "cube" => return Self::cube(n),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("ball:") {
            let q = rest
                .strip_prefix("q=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("bad ball spec '{spec}', expected ball:q=<val>")))?;
            return Self::uniform_ball(n, q);
        }
        if let Some(rest) = spec.strip_prefix("product:") {
            let parsed: Vec<TailFunction> = rest
                .split(',')
                .map(|t| parse_tail(t.trim()))
                .collect::<Result<_>>()?;
            if parsed.is_empty() {
                return Err(Error::invalid("product spec needs at least one tail"));
            }
            check_dim(n)?;
            let tails = (0..n).map(|i| parsed[i % parsed.len()].clone()).collect();
            return Self::product(tails);
        }
        Err(Error::invalid(format!("unknown family spec '{spec}'")))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Product { tails } => tails.len(),
            Self::UniformBall(b) => b.n(),
            Self::GaussianStd { n } | Self::UniformCube { n } => *n,
        }
    }

    /// Whether permuting coordinates leaves the law unchanged.
    pub fn is_exchangeable(&self) -> bool {
        match self {
            Self::Product { tails } => tails.windows(2).all(|w| w[0] == w[1]),
            _ => true,
        }
    }

    /// Per-coordinate tails when the coordinates are independent and the
    /// tails are representable.
    pub fn coordinate_tails(&self) -> Option<Vec<TailFunction>> {
        match self {
            Self::Product { tails } => Some(tails.clone()),
            Self::GaussianStd { n } => Some(vec![gaussian_tail().clone(); *n]),
            _ => None,
        }
    }

    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "point has {} coordinates, family has {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(match self {
            Self::Product { tails } => tails.iter().zip(x).map(|(t, v)| t.log_density(*v)).sum(),
            Self::GaussianStd { n } => {
                -0.5 * (*n as f64) * (2.0 * std::f64::consts::PI).ln()
                    - 0.5 * x.iter().map(|v| v * v).sum::<f64>()
            }
            Self::UniformCube { n } => {
                if x.iter().all(|v| v.abs() <= SQRT_3) {
                    -(*n as f64) * (2.0 * SQRT_3).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::UniformBall(b) => {
                if b.contains(x) {
                    -b.ln_volume()
                } else {
                    f64::NEG_INFINITY
                }
            }
        })
    }

    /// `sup{Σ_{i∈I} aᵢxᵢ : g_I(x) ≥ e^{−p} g_I(0)}` where `g_I` is the
    /// density of `(X_i)_{i∈I}`.
    pub fn level_set_support(&self, indices: &[usize], a: &[f64], p: f64) -> Result<f64> {
        if indices.len() != a.len() {
            return Err(Error::invalid("index set and coefficients differ in length"));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::invalid(format!("p must be positive, got {p}")));
        }
        let n = self.dim();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::invalid(format!("index {bad} out of range for n = {n}")));
        }
        if a.is_empty() {
            return Ok(0.0);
        }
        match self {
            Self::Product { tails } => {
                // Separable density e^{−Σ cᵢ|xᵢ|}: the level set is a weighted
                // ℓ₁ ball and its support function is p·maxᵢ |aᵢ|/cᵢ.
                let mut best = 0.0_f64;
                for (&i, ai) in indices.iter().zip(a) {
                    if !tails[i].is_linear() {
                        return Err(Error::unsupported(format!(
                            "level set of a product with tail {} has no closed form",
                            tails[i].label()
                        )));
                    }
                    best = best.max(ai.abs() / tails[i].asymptotic_slope());
                }
                Ok(p * best)
            }
            Self::GaussianStd { .. } => Ok((2.0 * p).sqrt() * lq_norm(a, 2.0)),
            Self::UniformCube { .. } => Ok(SQRT_3 * a.iter().map(|v| v.abs()).sum::<f64>()),
            Self::UniformBall(b) => {
                let k = indices.len();
                let dual = lq_norm(a, b.dual_exponent());
                if k >= n {
                    return Ok(b.r() * dual);
                }
                // g_I(x)/g_I(0) = (1 − (‖x‖_q/r)^q)^{(n−k)/q}
                let q = b.q();
                let shrink = (-(-p * q / (n - k) as f64).exp_m1()).powf(1.0 / q);
                Ok(b.r() * shrink * dual)
            }
        }
    }

    /// Quantile of the first-coordinate marginal (uniform ball only).
    pub fn marginal_quantile(&self, u: f64) -> Result<f64> {
        match self {
            Self::UniformBall(b) => b.marginal()?.quantile(u),
            _ => Err(Error::unsupported("marginal quantile tables exist for uniform balls only")),
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("dimension must be ≥ 1"));
    }
    Ok(())
}

fn parse_tail(spec: &str) -> Result<TailFunction> {
    match spec {
        "exp" => Ok(TailFunction::exponential()),
        "gauss" => Ok(gaussian_tail().clone()),
        _ => {
            if let Some(beta) = spec.strip_prefix("gnorm:") {
                let beta: f64 = beta
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad generalized normal exponent '{beta}'")))?;
                return TailFunction::generalized_normal(beta);
            }
            Err(Error::invalid(format!("unknown tail spec '{spec}'")))
        }
    }
}
