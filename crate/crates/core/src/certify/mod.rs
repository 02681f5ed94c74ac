//! Statistical certificates built from the span event: exact binomial
//! intervals, per-level span failure rates, the recursive upper bound on
//! total variation, a distinguishing-statistic lower bound and occupation
//! time concentration checks.

mod certificate;
mod lower;
mod occupation;
mod span;
mod stats;

pub use certificate::{
    certified_tv_upper, certify_with_base, certify_with_profiles, default_base_level, CertificateReport, ExactBase, LevelBound,
};
pub use lower::{
    last_column_zeros, lower_bound_from_stats, stationary_zero_tail, tv_lower_statistic, tv_lower_statistic_with,
    LOWER_CONFIDENCE,
};
pub use occupation::{lezaud_tail_check, occupation_fraction, LezaudReport, LEZAUD_CONFIDENCE};
pub use span::{
    count_span_failures, estimate_span_failure, span_event_check, span_log, span_time, SpanProfile, SpanRecord,
};
pub use stats::{beta_quantile_bisect, binomial_band, ConfidenceInterval};
