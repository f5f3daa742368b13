//! Coordinate tail functions `N(t) = −ln P(|X_i| ≥ t)`.
//!
//! A tail is convex and nondecreasing with `N(0) = 0`. Three shapes are
//! supported: linear `c·t` (symmetric exponential), power `(t/s)^α` with
//! `α ≥ 1`, and a tabulated piecewise-linear convex interpolant that is
//! extended past its last node with the last slope.

use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// Tails are tabulated up to at least this value of `N`.
pub const MIN_TABLE_LEVEL: f64 = 64.0;

const DEFAULT_LEVELS: usize = 4096;
const TABLE_TOP: f64 = 72.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TailKind {
    Linear { rate: f64 },
    Power { alpha: f64, scale: f64 },
    Tabulated(TabulatedTail),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailFunction {
    kind: TailKind,
    label: String,
}

/// Piecewise-linear convex `N` through `(t_k, N_k)` with `t_0 = N_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTail {
    t: Vec<f64>,
    n: Vec<f64>,
    slopes: Vec<f64>,
}

impl TabulatedTail {
    pub fn new(t: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if t.len() != n.len() || t.len() < 2 {
            return Err(Error::invalid("tabulated tail needs ≥ 2 matching nodes"));
        }
        if t[0] != 0.0 || n[0] != 0.0 {
            return Err(Error::invalid("tabulated tail must start at (0, 0)"));
        }
        let mut slopes = Vec::with_capacity(t.len() - 1);
        for k in 0..t.len() - 1 {
            let dt = t[k + 1] - t[k];
            let dn = n[k + 1] - n[k];
            if !(dt > 0.0) || !dn.is_finite() || !(dn > 0.0) {
                return Err(Error::invalid(format!(
                    "tabulated tail must be strictly increasing (node {k})"
                )));
            }
            slopes.push(dn / dt);
        }
        // Tolerate rounding-level slope noise from tabulating a smooth convex N.
        for k in 1..slopes.len() {
            if slopes[k] < slopes[k - 1] * (1.0 - 1e-9) {
                return Err(Error::invalid(format!("tabulated tail is not convex at node {k}")));
            }
            if slopes[k] < slopes[k - 1] {
                slopes[k] = slopes[k - 1];
            }
        }
        let last = *n.last().unwrap();
        if last < MIN_TABLE_LEVEL {
            return Err(Error::invalid(format!(
                "tabulated tail must reach N ≥ {MIN_TABLE_LEVEL}, got {last}"
            )));
        }
        Ok(Self { t, n, slopes })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.t, &self.n)
    }

    pub fn domain_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    fn last_slope(&self) -> f64 {
        *self.slopes.last().unwrap()
    }

    fn value(&self, t: f64) -> f64 {
        let last = self.t.len() - 1;
        if t >= self.t[last] {
            return self.n[last] + self.last_slope() * (t - self.t[last]);
        }
        let k = self.t.partition_point(|&x| x <= t) - 1;
        self.n[k] + self.slopes[k] * (t - self.t[k])
    }

    fn inverse(&self, y: f64) -> f64 {
        let last = self.n.len() - 1;
        if y >= self.n[last] {
            return self.t[last] + (y - self.n[last]) / self.last_slope();
        }
        let k = self.n.partition_point(|&x| x <= y) - 1;
        self.t[k] + (y - self.n[k]) / self.slopes[k]
    }

    /// Slope of the segment containing `t` from the right.
    fn right_slope(&self, t: f64) -> f64 {
        if t >= self.domain_max() {
            return self.last_slope();
        }
        let k = self.t.partition_point(|&x| x <= t) - 1;
        self.slopes[k]
    }

    /// Smallest maximizer of `r·t − N(t)` (a node of the table).
    fn argmax(&self, r: f64) -> Option<f64> {
        let k = self.slopes.partition_point(|&s| s < r);
        (k < self.slopes.len()).then(|| self.t[k])
    }

    /// `∫_0^∞ 2t·e^{−N(t)} dt` segment by segment.
    fn second_moment(&self) -> f64 {
        let mut total = 0.0;
        for k in 0..self.slopes.len() {
            total += segment_moment(self.t[k], self.n[k], self.slopes[k], self.t[k + 1] - self.t[k]);
        }
        let last = self.t.len() - 1;
        total + segment_moment(self.t[last], self.n[last], self.last_slope(), f64::INFINITY)
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            t: self.t.iter().map(|t| t * factor).collect(),
            n: self.n.clone(),
            slopes: self.slopes.iter().map(|s| s / factor).collect(),
        }
    }
}

/// `∫_0^h 2(t0 + u)·e^{−n0 − s·u} du`.
fn segment_moment(t0: f64, n0: f64, s: f64, h: f64) -> f64 {
    let x = s * h;
    let (one_minus, poly) = if x.is_infinite() {
        (1.0, 1.0)
    } else {
        let e = (-x).exp();
        (-(-x).exp_m1(), -(-x).exp_m1() - x * e)
    };
    2.0 * (-n0).exp() * (t0 * one_minus / s + poly / (s * s))
}

impl TailFunction {
    pub fn linear(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(Error::invalid(format!("linear tail rate must be positive, got {rate}")));
        }
        Ok(Self {
            kind: TailKind::Linear { rate },
            label: format!("linear({rate})"),
        })
    }

    /// Tail of the unit-variance symmetric exponential law, `N(t) = √2·t`.
    pub fn exponential() -> Self {
        Self {
            kind: TailKind::Linear {
                rate: std::f64::consts::SQRT_2,
            },
            label: "exp".into(),
        }
    }

    /// `N(t) = (t/scale)^α`, `α ≥ 1`.
    pub fn power(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("power tail exponent must be ≥ 1, got {alpha}")));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::invalid(format!("power tail scale must be positive, got {scale}")));
        }
        Ok(Self {
            kind: TailKind::Power { alpha, scale },
            label: format!("power({alpha},{scale})"),
        })
    }

    /// Power tail scaled so the law with `P(|X| ≥ t) = e^{−(t/s)^α}` has unit variance.
    pub fn power_isotropic(alpha: f64) -> Result<Self> {
        let scale = (-0.5 * ln_gamma(1.0 + 2.0 / alpha)).exp();
        let mut tail = Self::power(alpha, scale)?;
        tail.label = format!("weibull:{alpha}");
        Ok(tail)
    }

    pub fn tabulated(table: TabulatedTail) -> Self {
        Self {
            kind: TailKind::Tabulated(table),
            label: "tabulated".into(),
        }
    }

    /// Tabulates a smooth convex tail at evenly spaced levels of `N` up to
    /// beyond [`MIN_TABLE_LEVEL`], then rescales `t` so the tabulated law has
    /// unit variance.
    pub fn tabulate(label: &str, n_fn: impl Fn(f64) -> f64, levels: usize) -> Result<Self> {
        let levels = levels.max(2);
        let mut hi = 1.0;
        while n_fn(hi) < TABLE_TOP {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::invalid("tail does not reach the table top"));
            }
        }
        let mut t = Vec::with_capacity(levels + 1);
        let mut n = Vec::with_capacity(levels + 1);
        t.push(0.0);
        n.push(0.0);
        let mut lo = 0.0;
        for k in 1..=levels {
            let level = TABLE_TOP * k as f64 / levels as f64;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if n_fn(mid) < level {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let value = n_fn(b);
            if b > *t.last().unwrap() && value > *n.last().unwrap() {
                t.push(b);
                n.push(value);
            }
            lo = b;
        }
        let table = TabulatedTail::new(t, n)?;
        let sigma = table.second_moment().sqrt();
        Ok(Self {
            kind: TailKind::Tabulated(table.scaled(1.0 / sigma)),
            label: label.into(),
        })
    }

    /// Standard normal tail `N(t) = −ln erfc(t/√2)`, tabulated.
    pub fn gaussian() -> Self {
        Self::tabulate("gauss", |t| -erfc(t / std::f64::consts::SQRT_2).ln(), DEFAULT_LEVELS)
            .expect("gaussian tail tabulation")
    }

    /// Unit-variance generalized normal law with density `∝ exp(−|x/s|^β)`,
    /// `β ≥ 1` (log-concave), tabulated through the regularized upper
    /// incomplete gamma function.
    pub fn generalized_normal(beta: f64) -> Result<Self> {
        if !(beta >= 1.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("generalized normal needs β ≥ 1, got {beta}")));
        }
        let shape = 1.0 / beta;
        Self::tabulate(
            &format!("gnorm:{beta}"),
            |t| {
                if t <= 0.0 {
                    0.0
                } else {
                    -gamma_ur(shape, t.powf(beta)).ln()
                }
            },
            DEFAULT_LEVELS,
        )
    }

    pub fn kind(&self) -> &TailKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, TailKind::Linear { .. })
            || matches!(self.kind, TailKind::Power { alpha, .. } if alpha == 1.0)
    }

    /// `N(t)` for `t ≥ 0`, evaluated at `|t|`.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.kind {
            TailKind::Linear { rate } => rate * t,
            TailKind::Power { alpha, scale } => (t / scale).powf(*alpha),
            TailKind::Tabulated(table) => table.value(t),
        }
    }

    /// `N⁻¹(y)` for `y ≥ 0`.
    pub fn inverse(&self, y: f64) -> f64 {
        match &self.kind {
            TailKind::Linear { rate } => y / rate,
            TailKind::Power { alpha, scale } => scale * y.powf(1.0 / alpha),
            TailKind::Tabulated(table) => table.inverse(y),
        }
    }

    /// `P(|X| ≥ t)`.
    pub fn survival(&self, t: f64) -> f64 {
        (-self.value(t)).exp()
    }

    /// Points past which the tail, as tabulated, is extrapolated.
    pub fn domain_max(&self) -> f64 {
        match &self.kind {
            TailKind::Tabulated(table) => table.domain_max(),
            _ => f64::INFINITY,
        }
    }

    /// `lim N(t)/t`: the rate beyond which `b·t − λN(t)` is unbounded.
    pub fn asymptotic_slope(&self) -> f64 {
        match &self.kind {
            TailKind::Linear { rate } => *rate,
            TailKind::Power { alpha, scale } => {
                if *alpha == 1.0 {
                    1.0 / scale
                } else {
                    f64::INFINITY
                }
            }
            TailKind::Tabulated(table) => table.last_slope(),
        }
    }

    /// Smallest maximizer of `r·t − N(t)` over `t ≥ 0`; `None` when unbounded.
    pub fn lagrangian_argmax(&self, r: f64) -> Option<f64> {
        if r <= 0.0 {
            return Some(0.0);
        }
        match &self.kind {
            TailKind::Linear { rate } => (r <= *rate).then_some(0.0),
            TailKind::Power { alpha, scale } => {
                if *alpha == 1.0 {
                    (r <= 1.0 / scale).then_some(0.0)
                } else {
                    Some(scale * (r * scale / alpha).powf(1.0 / (alpha - 1.0)))
                }
            }
            TailKind::Tabulated(table) => table.argmax(r),
        }
    }

    /// Log-density of the symmetric law on ℝ with this tail:
    /// `ln(N′(|x|)/2) − N(|x|)`.
    pub fn log_density(&self, x: f64) -> f64 {
        let t = x.abs();
        let slope = match &self.kind {
            TailKind::Linear { rate } => *rate,
            TailKind::Power { alpha, scale } => {
                if *alpha == 1.0 {
                    1.0 / scale
                } else {
                    alpha / scale * (t / scale).powf(alpha - 1.0)
                }
            }
            TailKind::Tabulated(table) => table.right_slope(t),
        };
        (0.5 * slope).ln() - self.value(t)
    }

    /// `E X²` of the symmetric law with this tail.
    pub fn second_moment(&self) -> f64 {
        match &self.kind {
            TailKind::Linear { rate } => 2.0 / (rate * rate),
            TailKind::Power { alpha, scale } => scale * scale * ln_gamma(1.0 + 2.0 / alpha).exp(),
            TailKind::Tabulated(table) => table.second_moment(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_basics() {
        let e = TailFunction::exponential();
        assert_eq!(e.value(0.0), 0.0);
        assert!((e.value(1.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((e.second_moment() - 1.0).abs() < 1e-15);
        assert!((e.log_density(0.0) - (1.0 / 2f64.sqrt()).ln()).abs() < 1e-15);
        assert_eq!(e.asymptotic_slope(), 2f64.sqrt());
    }

    #[test]
    fn isotropic_power_has_unit_variance() {
        for alpha in [1.0, 1.5, 2.0, 3.0] {
            let t = TailFunction::power_isotropic(alpha).unwrap();
            assert!((t.second_moment() - 1.0).abs() < 1e-12, "alpha {alpha}");
        }
        assert!((TailFunction::power_isotropic(1.0).unwrap().value(1.0) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn power_rejects_concave() {
        assert!(TailFunction::power(0.5, 1.0).is_err());
        assert!(TailFunction::power(2.0, 0.0).is_err());
        assert!(TailFunction::linear(-1.0).is_err());
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedTail::new(vec![0.0, 1.0], vec![0.0, 80.0]).is_ok());
        // does not reach the level bound
        assert!(TabulatedTail::new(vec![0.0, 1.0], vec![0.0, 10.0]).is_err());
        // concave
        assert!(TabulatedTail::new(vec![0.0, 1.0, 2.0], vec![0.0, 60.0, 70.0]).is_err());
        // must start at the origin
        assert!(TabulatedTail::new(vec![0.5, 1.0], vec![0.0, 80.0]).is_err());
    }

    #[test]
    fn tabulated_inverse_and_argmax() {
        let table = TabulatedTail::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 70.0]).unwrap();
        let tail = TailFunction::tabulated(table);
        assert!((tail.value(0.5) - 0.5).abs() < 1e-15);
        assert!((tail.inverse(0.5) - 0.5).abs() < 1e-15);
        assert!((tail.value(3.0) - 139.0).abs() < 1e-12);
        assert!((tail.inverse(139.0) - 3.0).abs() < 1e-12);
        assert_eq!(tail.lagrangian_argmax(0.5), Some(0.0));
        assert_eq!(tail.lagrangian_argmax(1.0), Some(0.0));
        assert_eq!(tail.lagrangian_argmax(2.0), Some(1.0));
        assert_eq!(tail.lagrangian_argmax(69.0), Some(1.0));
        assert_eq!(tail.lagrangian_argmax(69.5), None);
    }

    #[test]
    fn gaussian_tabulation_is_accurate_and_isotropic() {
        let g = TailFunction::gaussian();
        assert!(g.value(g.domain_max()) >= MIN_TABLE_LEVEL);
        assert!((g.second_moment() - 1.0).abs() < 1e-12);
        for t in [0.1, 0.5, 1.0, 2.0, 3.0, 5.0] {
            let exact = -erfc(t / std::f64::consts::SQRT_2).ln();
            assert!((g.value(t) - exact).abs() < 1e-3 * (1.0 + exact), "t = {t}");
        }
    }

    #[test]
    fn generalized_normal_endpoints() {
        let g1 = TailFunction::generalized_normal(1.0).unwrap();
        // β = 1 is the Laplace law: N(t) = √2·t
        for t in [0.5, 1.0, 4.0] {
            assert!((g1.value(t) - 2f64.sqrt() * t).abs() < 1e-3 * (1.0 + t), "t = {t}");
        }
        let g2 = TailFunction::generalized_normal(2.0).unwrap();
        let g = TailFunction::gaussian();
        for t in [0.5, 1.0, 3.0] {
            assert!((g2.value(t) - g.value(t)).abs() < 1e-3 * (1.0 + g.value(t)));
        }
        assert!(TailFunction::generalized_normal(0.5).is_err());
    }

    #[test]
    fn lagrangian_argmax_power_closed_form() {
        let t = TailFunction::power(2.0, 1.0).unwrap();
        // max r t − t² at t = r/2
        assert!((t.lagrangian_argmax(3.0).unwrap() - 1.5).abs() < 1e-15);
        let l = TailFunction::exponential();
        assert_eq!(l.lagrangian_argmax(1.0), Some(0.0));
        assert_eq!(l.lagrangian_argmax(2.0), None);
    }
}
