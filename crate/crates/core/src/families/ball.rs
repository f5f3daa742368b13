//! Uniform distribution on the isotropic ball `r_{n,q}B_q^n`.

use std::sync::{Arc, OnceLock};

use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const TABLE_NODES: usize = 4096;

/// Radius `r` with `E X_1² = 1` for `X` uniform on `r·B_q^n`.
///
/// Writing the uniform law through the Dirichlet representation,
/// `|X_1/r|^q ~ Beta(1/q, (n−1)/q + 1)`, so
/// `r² = Γ(1/q)Γ((n+2)/q + 1) / (Γ(3/q)Γ(n/q + 1))`.
pub fn isotropic_radius(n: usize, q: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("dimension must be ≥ 1"));
    }
    if q.is_nan() || q < 1.0 || q.is_infinite() {
        return Err(Error::invalid(format!("q must lie in [1, ∞), got {q}")));
    }
    let nf = n as f64;
    let r = if n == 1 {
        3f64.sqrt()
    } else if q == 1.0 {
        ((nf + 1.0) * (nf + 2.0) / 2.0).sqrt()
    } else if q == 2.0 {
        (nf + 2.0).sqrt()
    } else {
        let ln_r2 = ln_gamma(1.0 / q) + ln_gamma((nf + 2.0) / q + 1.0)
            - ln_gamma(3.0 / q)
            - ln_gamma(nf / q + 1.0);
        (0.5 * ln_r2).exp()
    };
    let ratio = r / nf.powf(1.0 / q);
    debug_assert!((0.1..=10.0).contains(&ratio), "r/n^(1/q) = {ratio}");
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct UniformBall {
    n: usize,
    q: f64,
    r: f64,
    marginal: OnceLock<Arc<BallMarginal>>,
}

impl PartialEq for UniformBall {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.q == other.q && self.r == other.r
    }
}

impl UniformBall {
    pub fn new(n: usize, q: f64) -> Result<Self> {
        let r = isotropic_radius(n, q)?;
        Ok(Self {
            n,
            q,
            r,
            marginal: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `q′` with `1/q + 1/q′ = 1`.
    pub fn dual_exponent(&self) -> f64 {
        if self.q == 1.0 {
            f64::INFINITY
        } else {
            self.q / (self.q - 1.0)
        }
    }

    /// Whether `x` lies in `r·B_q^n`.
    pub fn contains(&self, x: &[f64]) -> bool {
        let s: f64 = x.iter().map(|v| (v.abs() / self.r).powf(self.q)).sum();
        s <= 1.0
    }

    /// `ln |r·B_q^n| = n ln(2r) + n lnΓ(1 + 1/q) − lnΓ(1 + n/q)`.
    pub fn ln_volume(&self) -> f64 {
        let nf = self.n as f64;
        nf * (2.0 * self.r).ln() + nf * ln_gamma(1.0 + 1.0 / self.q) - ln_gamma(1.0 + nf / self.q)
    }

    /// Coordinate marginal with its cached CDF table; requires `n ≥ 2`.
    pub fn marginal(&self) -> Result<Arc<BallMarginal>> {
        if self.n < 2 {
            return Err(Error::invalid("ball marginal table needs n ≥ 2"));
        }
        Ok(self
            .marginal
            .get_or_init(|| Arc::new(BallMarginal::new(self.n, self.q, self.r)))
            .clone())
    }
}

/// Law of one coordinate of the uniform ball: density on `[−r, r]`
/// proportional to `(1 − (|x|/r)^q)^{(n−1)/q}`.
///
/// `|X|/r` has CDF `H(s) = I_{s^q}(1/q, (n−1)/q + 1)`. `H` is tabulated at
/// `s_j = sin(πj/2N)` (dense toward the endpoint) and interpolated with a
/// monotone cubic Hermite spline whose node slopes are the exact density.
#[derive(Debug, Clone)]
pub struct BallMarginal {
    q: f64,
    r: f64,
    shape_a: f64,
    shape_b: f64,
    ln_norm: f64,
    s: Vec<f64>,
    h: Vec<f64>,
    dh: Vec<f64>,
}

impl BallMarginal {
    pub fn new(n: usize, q: f64, r: f64) -> Self {
        let m = (n as f64 - 1.0) / q;
        let shape_a = 1.0 / q;
        let shape_b = m + 1.0;
        // ∫_0^1 (1 − s^q)^m ds = B(1/q, m + 1)/q
        let ln_norm = ln_beta(shape_a, shape_b) - q.ln();
        let mut this = Self {
            q,
            r,
            shape_a,
            shape_b,
            ln_norm,
            s: Vec::with_capacity(TABLE_NODES + 1),
            h: Vec::with_capacity(TABLE_NODES + 1),
            dh: Vec::with_capacity(TABLE_NODES + 1),
        };
        for j in 0..=TABLE_NODES {
            let s = if j == TABLE_NODES {
                1.0
            } else {
                (std::f64::consts::FRAC_PI_2 * j as f64 / TABLE_NODES as f64).sin()
            };
            this.s.push(s);
            this.h.push(this.abs_cdf_exact(s));
            this.dh.push(this.abs_density(s));
        }
        this.limit_slopes();
        this
    }

    /// Fritsch–Carlson limiter so every Hermite segment is monotone.
    fn limit_slopes(&mut self) {
        for k in 0..self.s.len() - 1 {
            let delta = (self.h[k + 1] - self.h[k]) / (self.s[k + 1] - self.s[k]);
            if delta <= 0.0 {
                self.dh[k] = 0.0;
                self.dh[k + 1] = 0.0;
                continue;
            }
            let alpha = self.dh[k] / delta;
            let beta = self.dh[k + 1] / delta;
            let norm = alpha * alpha + beta * beta;
            if norm > 9.0 {
                let tau = 3.0 / norm.sqrt();
                self.dh[k] = tau * alpha * delta;
                self.dh[k + 1] = tau * beta * delta;
            }
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Density of `|X|/r` on `[0, 1]`.
    fn abs_density(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        let base = 1.0 - s.powf(self.q);
        if base <= 0.0 {
            return 0.0;
        }
        ((self.shape_b - 1.0) * base.ln() - self.ln_norm).exp()
    }

    /// Exact `H(s)` through the regularized incomplete beta function.
    fn abs_cdf_exact(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        beta_reg(self.shape_a, self.shape_b, s.powf(self.q))
    }

    fn segment(&self, s: f64) -> usize {
        (self.s.partition_point(|&x| x <= s).max(1) - 1).min(self.s.len() - 2)
    }

    fn hermite(&self, k: usize, s: f64) -> f64 {
        let w = self.s[k + 1] - self.s[k];
        let t = (s - self.s[k]) / w;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.h[k]
            + (t3 - 2.0 * t2 + t) * w * self.dh[k]
            + (-2.0 * t3 + 3.0 * t2) * self.h[k + 1]
            + (t3 - t2) * w * self.dh[k + 1]
    }

    fn abs_cdf_table(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return 1.0;
        }
        self.hermite(self.segment(s), s)
    }

    /// Marginal density on ℝ.
    pub fn density(&self, x: f64) -> f64 {
        0.5 * self.abs_density(x.abs() / self.r) / self.r
    }

    /// Marginal CDF from the interpolated table.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.abs_cdf_table(x.abs() / self.r);
        if x >= 0.0 {
            0.5 + 0.5 * h
        } else {
            0.5 - 0.5 * h
        }
    }

    /// Marginal CDF evaluated directly (no table).
    pub fn cdf_exact(&self, x: f64) -> f64 {
        let h = self.abs_cdf_exact(x.abs() / self.r);
        if x >= 0.0 {
            0.5 + 0.5 * h
        } else {
            0.5 - 0.5 * h
        }
    }

    /// Inverse CDF of the marginal.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {u}")));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        let v = (2.0 * u - 1.0).abs();
        let s = self.abs_quantile(v);
        if u >= 0.5 {
            self.r * s
        } else {
            -self.r * s
        }
    }

    fn abs_quantile(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        let k = (self.h.partition_point(|&x| x <= v).max(1) - 1).min(self.h.len() - 2);
        let (mut lo, mut hi) = (self.s[k], self.s[k + 1]);
        let w = hi - lo;
        // Newton from the secant guess, safeguarded by bisection.
        let mut s = lo + w * (v - self.h[k]) / (self.h[k + 1] - self.h[k]).max(f64::MIN_POSITIVE);
        for _ in 0..60 {
            let f = self.hermite(k, s) - v;
            if f.abs() <= 1e-15 {
                break;
            }
            if f > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let t = (s - self.s[k]) / w;
            let t2 = t * t;
            let d = (6.0 * t2 - 6.0 * t) * (self.h[k] - self.h[k + 1]) / w
                + (3.0 * t2 - 4.0 * t + 1.0) * self.dh[k]
                + (3.0 * t2 - 2.0 * t) * self.dh[k + 1];
            let next = s - f / d;
            s = if d > 0.0 && next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 1e-16 {
                break;
            }
        }
        s
    }
}
