//! Value distribution of log|L(½+it)|: empirical joint tails, central limit
//! statistics, joint independence, large deviations and the identities that
//! tie tails to moments.
//!
//! All measures are sample fractions on a uniform t-grid, so Φ_T(V) is
//! approximated by δ·#{samples in the tail}.

pub mod clt;
pub mod fubini;
pub mod tail;

pub use clt::{clt_statistics, selberg_clt_test, CltReport};
pub use fubini::{fubini_check, mass_concentration_check, FubiniReport, MassReport};
pub use tail::{empirical_phi, joint_tail_ratio, large_deviation_profile, normaliser, LargeDeviationReport, Region, TailGrid};
