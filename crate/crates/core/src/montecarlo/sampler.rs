//! Exact samplers for every family.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::families::{BallMarginal, DistributionFamily};
use crate::surrogates::{TailFunction, TailKind};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Draws i.i.d. vectors from a fixed law.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;
    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]);
}

/// Uniform on the open interval `(0, 1)`.
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R, v: f64) -> f64 {
    if rng.next_u32() & 1 == 1 {
        -v
    } else {
        v
    }
}

/// Sampler for a [`DistributionFamily`].
///
/// * product: `|X_i| = N_i⁻¹(E)` with `E ~ Exp(1)`, random sign;
/// * ball: `X = r·G/(Σ|G_i|^q + W)^{1/q}` with `|G_i|^q ~ Gamma(1/q, 1)`,
///   `W ~ Exp(1)` and symmetric signs;
/// * Gaussian: standard normals;
/// * cube: `√3·(2U − 1)`.
#[derive(Debug, Clone)]
pub struct FamilySampler<'a> {
    family: &'a DistributionFamily,
    gamma: Option<Gamma<f64>>,
}

impl<'a> FamilySampler<'a> {
    pub fn new(family: &'a DistributionFamily) -> Self {
        let gamma = match family {
            DistributionFamily::UniformBall(b) if b.q() != 1.0 => {
                Some(Gamma::new(1.0 / b.q(), 1.0).expect("positive gamma shape"))
            }
            _ => None,
        };
        Self { family, gamma }
    }
}

fn sample_tail<R: Rng + ?Sized>(tail: &TailFunction, rng: &mut R) -> f64 {
    let e: f64 = Exp1.sample(rng);
    let t = match tail.kind() {
        TailKind::Linear { rate } => e / rate,
        _ => tail.inverse(e),
    };
    random_sign(rng, t)
}

impl Sampler for FamilySampler<'_> {
    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.family {
            DistributionFamily::Product { tails } => {
                for (x, tail) in out.iter_mut().zip(tails) {
                    *x = sample_tail(tail, rng);
                }
            }
            DistributionFamily::GaussianStd { .. } => {
                for x in out.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
            }
            DistributionFamily::UniformCube { .. } => {
                for x in out.iter_mut() {
                    *x = SQRT_3 * (2.0 * open_unit(rng) - 1.0);
                }
            }
            DistributionFamily::UniformBall(ball) => {
                let q = ball.q();
                let mut total: f64 = Exp1.sample(rng);
                for x in out.iter_mut() {
                    let g = match &self.gamma {
                        Some(gamma) => gamma.sample(rng),
                        None => Exp1.sample(rng),
                    };
                    total += g;
                    *x = g;
                }
                let inv_q = 1.0 / q;
                let scale = ball.r() / total.powf(inv_q);
                for x in out.iter_mut() {
                    let mag = if q == 1.0 { *x } else { x.powf(inv_q) };
                    *x = random_sign(rng, scale * mag);
                }
            }
        }
    }
}

/// Independent coordinates, each with the ball's one-dimensional marginal,
/// drawn by inverting the tabulated marginal CDF.
#[derive(Debug, Clone)]
pub struct IndependentMarginals {
    marginal: Arc<BallMarginal>,
    n: usize,
}

impl IndependentMarginals {
    pub fn new(marginal: Arc<BallMarginal>, n: usize) -> Self {
        Self { marginal, n }
    }
}

impl Sampler for IndependentMarginals {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.marginal.quantile_unchecked(open_unit(rng));
        }
    }
}
