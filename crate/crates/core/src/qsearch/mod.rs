//! Amplitude-exact simulation of distributed quantum search: single
//! searches, parallel ensembles, the typical-input variant with rehearsed
//! network cost, and the numeric projection-bound checker.

mod amplitude;
mod projection;
mod schedule;
mod single;

pub mod multi;

pub use amplitude::{
    closed_form_success, grover_iterate, AmplitudeVector, SearchError, TruthTable, TwoLevelState,
};
pub use multi::{
    hypothesis_report, multi_search_product, multi_search_typical, typical_membership, EvalOutcome,
    HypothesisReport, SearchEnsemble, TupleEvaluator, TypicalSpec, TypicalityReport,
};
pub use projection::{projection_bound_check, ProjectionCheck};
pub use schedule::{pass_iteration_bound, pass_length, schedule_iterations};
pub use single::{grover_search, SearchParams};
