//! Distributed negative-triangle detection: pair covers, class estimation,
//! networked evaluation procedures, and the lockstep search pipeline.

mod classes;
mod compute_pairs;
mod cover;
mod eval;
mod predicate;
mod search;

use crate::error::{Abort, NetError};

/// Failure of one protocol phase: either a retryable abort or an
/// infrastructure error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseError {
    Abort(Abort),
    Net(NetError),
}

pub use classes::{identify_class, ClassPartition};
pub use compute_pairs::{
    compute_pairs, find_pairs_once, ComputePairsOutput, FinderContext, GatherPlan, PipelineAudit,
};
pub use cover::{build_pair_cover, CoverPhase, HelperRetained, LambdaCover, SlotBuckets};
pub use eval::{eval_round_bound, AlphaEvaluator, EvalCallResult, EvalQuery};
pub use predicate::{check_pair_blocks, negative_triangle_predicate, TriangleIndex};
pub use search::{run_class_searches, AlphaSearchReport, ClassSearchOutcome};
