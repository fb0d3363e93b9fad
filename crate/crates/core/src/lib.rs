//! Rotational mutation and crossover search over box-bounded domains,
//! the De Jong / Goldstein-Price test functions, a DE baseline and an
//! experiment harness.

pub mod de;
pub mod domain;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod operators;
pub mod optimizer;

pub use de::{de_optimize, DeConfig, DeWeight};
pub use domain::{
    EventKind, GenerationCounters, Goal, Point, RunResult, SearchBox, SignVector,
    TerminationReason, TraceEvent,
};
pub use error::{Result, RmcError};
pub use harness::{
    run_experiment, summarize_table2, AlgorithmConfig, ExperimentSpec, Table2Row, Table3Row,
};
pub use objectives::{grid_oracle, ObjectiveId, ObjectiveSpec};
pub use operators::{
    best_vertex, crossover_halve, enumerate_sign_vectors, is_better, redirect_search,
    rotational_mutate,
};
pub use optimizer::{rmc_optimize, RmcConfig};
