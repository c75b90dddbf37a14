//! Moments of products of L-functions on the critical line and the
//! mean-value estimates they rest on.

pub mod meanvalue;
pub mod moment;
pub mod quadrature;
pub mod windowed;

pub use meanvalue::{coprime_factorization_check, high_moment_check, mv_check, CoprimeReport, HighMomentReport, MeanValueReport, SparsePoly};
pub use moment::{
    joint_moment, joint_moment_from_grids, moment_curve, scaling_fit, twisted_hurwitz_moment, FitResult, MomentRecord, MomentResult,
    MomentSpec, TwistedMoment, Window,
};
pub use quadrature::{simpson, simpson_fn, simpson_stream, Quad};
pub use windowed::{dirichlet_poly_sn, g_n, gabriel_check, window_weight, windowed_integrals, GabrielReport, WindowedIntegrals, WINDOW_REACH};
