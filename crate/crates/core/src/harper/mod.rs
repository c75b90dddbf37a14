//! The upper-bound apparatus: prime-block schedule, smoothed weights, the
//! polynomial bank, the truncated-exponential lemma, the majorant audit and
//! the good/bad set classification.
//!
//! The asymptotic schedule is empty for every feasible T, so everything runs
//! on desk knobs β (first block exponent) and ε (cutoff) instead.

pub mod bank;
pub mod chandee;
pub mod classify;
pub mod schedule;
pub mod weights;

pub use bank::{good_set_moment, GoodSetMoment, PolyBank, SUPPORT_BUDGET};
pub use chandee::{chandee_audit, majorant_constant, ChandeeReport};
pub use classify::{classify_sets, SetClassification, SetLabel};
pub use schedule::{build_schedule, asymptotic_schedule, HarperSchedule, DEFAULT_BETA, DEFAULT_EPSILON};
pub use weights::{smoothed_lambda, truncation_excess, truncation_ratio, truncation_suite, TruncationCase};
