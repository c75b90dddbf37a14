//! Primes, Dirichlet characters, Satake data and multiplicative coefficients.

pub mod characters;
pub mod coeffs;
pub mod primes;
pub mod satake;
pub mod special;

pub use characters::{character_group, CharacterGroupStructure, CharacterId, DirichletCharacter};
pub use coeffs::{
    big_h, divisor_coeff, divisor_series, h_coeff, h_series, partial_sum_sq, partial_sum_sq_of, MultiplicativeSeries,
    PartialSumReport, PrimePowerRule,
};
pub use primes::{sieve_primes, PrimeTable};
pub use satake::{lambda_pi, satake_from_character, SatakeSpec};
pub use special::{exp_integral_e1, selberg_sum, SelbergSum, EULER_GAMMA, MERTENS};
