//! Two-sided tail estimates for `S` from a curve `p ↦ ‖S‖_p`.
//!
//! Chebyshev with exponent `p` gives `P(|S| ≥ e‖S‖_p) ≤ e^{−p}`. In the
//! opposite direction a Paley–Zygmund argument gives
//! `P(|S| ≥ ‖S‖_p/c) ≥ min{1/c, e^{−p}}`, where `c` is the doubling constant
//! `max_p ‖S‖_{2p}/‖S‖_p` recorded from the same curve.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub p: f64,
    /// Threshold `u` in `P(|S| ≥ u)`.
    pub u: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBounds {
    /// `(e‖S‖_p, e^{−p})` for every grid point.
    pub upper: Vec<TailPoint>,
    /// `(‖S‖_p/c, min{1/c, e^{−p}})`; empty when no `2p` lies in the grid range.
    pub lower: Vec<TailPoint>,
    pub doubling: Option<f64>,
}

impl TailBounds {
    /// Smallest upper bound on `P(|S| ≥ u)` implied by the grid (1 if none).
    pub fn upper_at(&self, u: f64) -> f64 {
        self.upper
            .iter()
            .filter(|pt| pt.u <= u)
            .map(|pt| pt.bound)
            .fold(1.0, f64::min)
    }
}

/// Builds tail bounds from `(p, ‖S‖_p)` pairs sorted by `p`.
pub fn tail_bounds(curve: &[(f64, f64)]) -> Result<TailBounds> {
    if curve.is_empty() {
        return Err(Error::invalid("empty moment curve"));
    }
    for &(p, v) in curve {
        if !(p >= 2.0) || !p.is_finite() || !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("invalid curve point ({p}, {v})")));
        }
    }
    for w in curve.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::invalid("curve grid must be strictly increasing in p"));
        }
        if w[1].1 < w[0].1 {
            return Err(Error::invalid(format!(
                "moment curve decreases between p = {} and p = {}",
                w[0].0, w[1].0
            )));
        }
    }
    let upper = curve
        .iter()
        .map(|&(p, v)| TailPoint {
            p,
            u: std::f64::consts::E * v,
            bound: (-p).exp(),
        })
        .collect();

    let p_max = curve.last().unwrap().0;
    let doubling = curve
        .iter()
        .filter(|(p, _)| 2.0 * p <= p_max)
        .map(|&(p, v)| interpolate(curve, 2.0 * p) / v)
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));

    let lower = match doubling {
        Some(c) => curve
            .iter()
            .map(|&(p, v)| TailPoint {
                p,
                u: v / c,
                bound: (1.0 / c).min((-p).exp()),
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(TailBounds {
        upper,
        lower,
        doubling,
    })
}

/// Log-linear interpolation of the curve at `p` inside its range.
fn interpolate(curve: &[(f64, f64)], p: f64) -> f64 {
    let k = curve.partition_point(|(x, _)| *x < p);
    if k < curve.len() && curve[k].0 == p {
        return curve[k].1;
    }
    let (p0, v0) = curve[k - 1];
    let (p1, v1) = curve[k];
    let w = (p - p0) / (p1 - p0);
    (v0.ln() * (1.0 - w) + v1.ln() * w).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surrogates::gamma_p;
    use statrs::function::erf::erfc;

    #[test]
    fn chebyshev_point() {
        let b = tail_bounds(&[(4.0, 2.0)]).unwrap();
        let pt = b.upper[0];
        assert!((pt.u - 2.0 * std::f64::consts::E).abs() < 1e-15);
        assert!((pt.bound - (-4f64).exp()).abs() < 1e-18);
        assert!(b.lower.is_empty());
        assert_eq!(b.upper_at(1.0), 1.0);
        assert_eq!(b.upper_at(10.0), (-4f64).exp());
    }

    #[test]
    fn constant_curve() {
        let curve: Vec<(f64, f64)> = (2..=8).map(|p| (p as f64, 1.0)).collect();
        let b = tail_bounds(&curve).unwrap();
        for pt in &b.upper {
            assert!((pt.u - std::f64::consts::E).abs() < 1e-15);
            assert!((pt.bound - (-pt.p).exp()).abs() < 1e-18);
        }
        assert_eq!(b.doubling, Some(1.0));
    }

    #[test]
    fn rejects_non_monotone() {
        assert!(tail_bounds(&[(2.0, 2.0), (4.0, 1.0)]).is_err());
        assert!(tail_bounds(&[(4.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(tail_bounds(&[(1.0, 1.0)]).is_err());
        assert!(tail_bounds(&[]).is_err());
    }

    #[test]
    fn gaussian_tail_is_dominated() {
        let curve: Vec<(f64, f64)> = (2..=32).map(|p| (p as f64, gamma_p(p as f64).unwrap())).collect();
        let b = tail_bounds(&curve).unwrap();
        let gauss_tail = |u: f64| erfc(u / std::f64::consts::SQRT_2);
        for pt in &b.upper {
            assert!(gauss_tail(pt.u) <= pt.bound, "p = {}", pt.p);
        }
        let c = b.doubling.unwrap();
        assert!(c > 1.0 && c < 2.0);
        for pt in &b.lower {
            assert!(gauss_tail(pt.u) >= pt.bound, "p = {}", pt.p);
        }
    }
}
