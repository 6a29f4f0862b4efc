//! Periodic interference-free scheduling of one or two multi-hop
//! transmission paths.
//!
//! The pipeline runs bottom-up: [`model`] holds paths and the interference
//! relation, [`analysis`] measures its clique structure, [`periods`] builds
//! equally spaced activation subsets and joint concurrency matrices,
//! [`matching`] finds maximum supporting sets, [`scheduler`] assembles beat
//! cycles, [`simulator`] executes them, and [`optimizer`] searches routes,
//! spacings and activation counts for the best joint throughput.

pub mod analysis;
pub mod error;
mod graph;
pub mod matching;
pub mod matrix;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod periods;
pub mod rational;
pub mod scenario;
pub mod scheduler;
pub mod simulator;
pub mod verify;

pub use analysis::{
    check_continuity, concurrency_intensity, connection_degrees, intensity_report, interference_intensity,
    is_dominant, max_interference_cliques, split_dominant, ConnectionDegrees, IntensityReport, NodeDegree,
};
pub use error::{Error, Result};
pub use matching::{
    brute_force_max_support, is_support_set, max_support_set, validate_support_set, SupportSet, SupportViolation,
};
pub use matrix::BinaryMatrix;
pub use model::{
    is_concurrency_subset, validate_path_rules, GeometricTopology, InterferenceRelation, NodeRef, PathPair, Point,
    PrimaryPath, RuleReport, RuleViolation,
};
pub use periods::{
    build_matrix, continuation, intrinsic_period, is_reachable_period, subset_members, ConcurrencyMatrix,
    EquallySpacedSubset,
};
pub use optimizer::{
    optimize, BestParameters, Candidate, CandidateStatus, OptimizationResult, RouteCandidate, SearchSpace,
    DEFAULT_MAX_ACTIVATIONS,
};
pub use rational::Rational;
pub use scenario::{Environment, Network, Scenario, SearchBounds};
pub use scheduler::{
    audit, is_pipelined, predicted_path_throughput, predicted_throughput, schedule_pair_equal,
    schedule_pair_unequal, schedule_primary, schedule_primary_with_spacing, AuditViolation, Beat, BeatCategory,
    PathPlan, Schedule, ScheduleKind,
};
pub use simulator::{
    default_warmup, measure_delay, run, run_activations, run_traced, space_time_diagram, BeatTrace, Delivery,
    PathStats, SimReport,
};
