//! Moment surrogates for linear combinations of coordinates of unconditional,
//! isotropic, log-concave random vectors.
//!
//! For `S = Σ aᵢXᵢ` the crate computes constant-free deterministic functionals
//! that are equivalent to `‖S‖_p = (E|S|^p)^{1/p}` up to universal constants,
//! together with Monte-Carlo ground truth and exact brute-force oracles used to
//! measure those constants empirically.
//!
//! Layout:
//!
//! * [`coeffs`] rearrangements, top-index sets and partial norms of `a`.
//! * [`surrogates`] the deterministic functionals (Hitczenko lower bound,
//!   exponential upper bound, Gluskin–Kwapień program, `B_q^n` closed form,
//!   head/tail split estimator, Gaussian approximation bands, tail bounds).
//! * [`families`] concrete distribution families and their level sets.
//! * [`montecarlo`] exact samplers and batched, reproducible estimators.
//! * [`harness`] experiment configuration, CSV reports and verification checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod error;
pub mod families;
pub mod harness;
pub mod montecarlo;
pub mod surrogates;

pub use coeffs::{CoefficientVector, Range};
pub use error::{Error, Result};
pub use families::DistributionFamily;
pub use montecarlo::EstimateRecord;
pub use surrogates::{SurrogateBundle, TailFunction};
