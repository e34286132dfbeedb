//! Node-private community detection in stochastic block models.
//!
//! The crate provides the penalized-likelihood exponential-mechanism
//! estimator over balanced labelings, the information-theoretic scalars that
//! calibrate it, exact small-scale privacy audits (including the two-point
//! lower-bound construction), brute-force verification of the supporting
//! combinatorial and Chernoff-type inequalities, and a Monte-Carlo risk
//! harness with CSV/JSON reporting.

pub mod assignment;
pub mod audit;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod info;
pub mod labeling;
pub mod mechanism;
pub mod rng;
pub mod sbm;
pub mod score;
pub mod stats;
pub mod verify;

pub use audit::{
    audit_group_privacy, audit_restricted_dp, group_privacy_factor, min_epsilon_for_failure,
    risk_floor, risk_floor_check, two_point_exact, two_point_monte_carlo, AuditReport,
    GroupPrivacySummary, TwoPointInstance, TwoPointReport,
};
pub use error::{Error, Result};
pub use experiments::{
    feasibility_report, lower_bound_overlay, min_feasible_epsilon, run_risk_sweep, CellReport,
    Constants, FeasibilityRecord, RiskReport, SweepCell, SweepConfig, SweepGrid, TruthMode,
};
pub use graph::{node_distance, Graph, NodeDistance};
pub use info::{
    check_assumptions, chernoff_tilt, penalty_lambda, renyi_half, signal, AssumptionReport,
    InfoQuantities,
};
pub use labeling::{
    canonical_balanced, enumerate_balanced, enumerate_balanced_capped, is_balanced,
    mismatch_ratio, orbit_distance, round_robin_balanced, BalanceCertificate, Labeling,
    SbmParams,
};
pub use mechanism::{
    em_distribution, exact_output_law, run_private_estimator, sample_em, EmDistribution,
    EstimatorRun, FallbackPolicy, MechanismConfig, SamplerKind,
};
pub use sbm::{graph_log_prob, sample_sbm, sample_sbm_stream};
pub use score::{
    in_envelope, restricted_sensitivity, split_merge_counts, DegreeEnvelope, ScoreContext,
    SplitMergeCounts,
};
pub use verify::{
    chernoff_bound_check, check_split_merge_bound, exact_tail_probability, near_optimal_sets,
    orbit_census, peeling_bound_check, run_lemma_suite, LemmaCheckRecord, NearOptimalProfile,
    OrbitCensus, SuiteKind, SuiteOptions, TailBoundCheck,
};
