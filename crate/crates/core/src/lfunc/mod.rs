//! Evaluation of ζ, Hurwitz ζ, Dirichlet L and abelian Dedekind ζ.

pub mod bernoulli;
pub mod grid;
pub mod hurwitz;
pub mod id;
pub mod powersum;
pub mod riemann_siegel;

pub use grid::{
    log_abs_grid, log_abs_grid_with, value_grid, value_grid_at, value_grid_with, CriticalLineGrid, GridOptions, GridSpec,
    DEFAULT_CLAMP_FLOOR, DEFAULT_LOG_PRECISION,
};
pub use hurwitz::{
    dedekind_abelian, dirichlet_l, dirichlet_l_with_cutoff, hurwitz_from_characters, hurwitz_zeta, hurwitz_zeta_em,
    DEFAULT_PRECISION,
};
pub use id::{parse_selector, LFunctionId};
pub use powersum::{eval_grid, Kernel, PowerSum};
