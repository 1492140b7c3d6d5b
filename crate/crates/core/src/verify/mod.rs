//! Certificates for the metric axioms, Lipschitz bounds, truncation tails,
//! ball inclusions and smoothing effectiveness, plus independent oracles.

pub mod checks;
pub mod oracles;
pub mod report;
pub mod sample;

pub use checks::{
    ball_inclusion_search, lipschitz_ratio_report, metric_axioms_check, smoothing_effectiveness_report,
    tail_honesty_check, BallInclusion, Effectiveness, LipschitzRow, TRIANGLE_SLACK,
};
pub use oracles::oracle_pack;
pub use report::{Record, Status, Summary, VerificationReport};
