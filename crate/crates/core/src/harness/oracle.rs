//! Independent numerical oracles used by the verification checks.

use std::f64::consts::PI;

use crate::surrogates::TailFunction;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `ln E|g|^p` for a standard Gaussian `g`, by quadrature of
/// `√(2/π)∫₀^∞ x^p e^{−x²/2} dx` normalized by the integrand's peak.
pub fn gaussian_ln_abs_moment(p: f64) -> f64 {
    let peak = 0.5 * p * (p.ln() - 1.0);
    let h = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            (p * x.ln() - 0.5 * x * x - peak).exp()
        }
    };
    let end = p.sqrt() + 14.0;
    let pieces = end.ceil() as usize;
    let width = end / pieces as f64;
    let integral: f64 = (0..pieces)
        .map(|k| adaptive_simpson(&h, k as f64 * width, (k + 1) as f64 * width, 1e-13))
        .sum();
    peak + integral.ln() + 0.5 * (2.0 / PI).ln()
}

/// `‖g‖_p` from [`gaussian_ln_abs_moment`].
pub fn gaussian_pnorm_quadrature(p: f64) -> f64 {
    (gaussian_ln_abs_moment(p) / p).exp()
}

fn invert_tail(tail: &TailFunction, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while tail.value(hi) < y {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tail.value(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const GRID: usize = 160;
const GOLDEN_ITERS: usize = 90;

/// Maximizes a concave function on `[lo, hi]`: coarse grid, then golden
/// section on the bracket around the best node.
fn maximize_concave(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return f(lo);
    }
    let step = (hi - lo) / GRID as f64;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..=GRID {
        let v = f(lo + k as f64 * step);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut a = lo + best_k.saturating_sub(1) as f64 * step;
    let mut b = (lo + (best_k + 1) as f64 * step).min(hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    best.max(fc).max(fd)
}

/// `sup{Σ bᵢtᵢ : Σ Nᵢ(tᵢ) ≤ p}` by nested one-dimensional search along the
/// constraint boundary. Only evaluates the tails; intended for 1 to 3
/// coordinates.
pub fn gk_brute_force(b: &[f64], tails: &[TailFunction], p: f64) -> f64 {
    match b.len() {
        0 => 0.0,
        1 => b[0] * invert_tail(&tails[0], p),
        _ => {
            let first = &tails[0];
            let phi = |t: f64| {
                let rest = (p - first.value(t)).max(0.0);
                b[0] * t + gk_brute_force(&b[1..], &tails[1..], rest)
            };
            maximize_concave(&phi, 0.0, invert_tail(first, p))
        }
    }
}

/// `(E|X₁+X₂|^p, E|X₁*+X₂*|^p)` for `X` uniform on the disk of radius `r`
/// and `X*` its coordinates made independent, by two-dimensional quadrature
/// with `x = r·sin θ`.
pub fn disk_negative_association(r: f64, p: f64) -> (f64, f64) {
    let tol = 1e-12;
    let half = 0.5 * PI;
    let dependent = {
        let outer = |th: f64| {
            let x = r * th.sin();
            let h = r * th.cos();
            let inner = |y: f64| (x + y).abs().powf(p);
            r * th.cos() * adaptive_simpson(&inner, -h, h, tol)
        };
        adaptive_simpson(&outer, -half, half, tol) / (PI * r * r)
    };
    let independent = {
        // x = r sin θ turns the marginal density into (2/π)cos²θ dθ.
        let w = |th: f64| 2.0 / PI * th.cos().powi(2);
        let outer = |t1: f64| {
            let x = r * t1.sin();
            let inner = |t2: f64| (x + r * t2.sin()).abs().powf(p) * w(t2);
            w(t1) * adaptive_simpson(&inner, -half, half, tol)
        };
        adaptive_simpson(&outer, -half, half, tol)
    };
    (dependent, independent)
}
