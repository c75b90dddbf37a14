//! Moments and value distribution of products of L-functions on the critical
//! line, at the scale a desktop can reach.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: primes, characters, Satake tables and the multiplicative
//!   coefficients d_k, h_k and 𝐡.
//! * [`lfunc`]: Hurwitz ζ, Dirichlet L and abelian Dedekind ζ near the
//!   critical line, plus fast uniform-grid evaluation of log|L(½+it)|.
//! * [`moments`]: moment quadrature, windowed integrals, mean-value checks,
//!   convexity, scaling fits and the twisted Hurwitz moment.
//! * [`harper`]: the prime-block schedule, smoothed weights, the polynomial
//!   bank and the good/bad set classification.
//! * [`deviations`]: empirical tails, central limit statistics and the
//!   moment/tail identities.
//!
//! Coefficient and statistics code is generic over [`Real`]; the `f64`
//! aliases below are what the rest of the crate uses.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod deviations;
pub mod error;
pub mod harper;
pub mod lfunc;
pub mod moments;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Character = arith::DirichletCharacter<f64>;
pub type Satake = arith::SatakeSpec<f64>;
pub type Series = arith::MultiplicativeSeries<f64>;
