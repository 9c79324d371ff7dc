//! Deterministic, seeded simulator of quantum CONGEST-CLIQUE shortest-path
//! pipelines.
//!
//! The crate builds up in layers:
//!
//! * [`weight`], [`graph`], [`matrix`], [`tripartite`], [`io`]: the min-plus
//!   semiring, graph and matrix types, the product-to-triangle instance
//!   builder, and text formats;
//! * [`net`], [`ledger`], [`labels`]: the synchronous round engine with
//!   bandwidth enforcement, the per-phase cost ledger, and the node labeling
//!   schemes;
//! * [`qsearch`]: amplitude-exact Grover search, parallel ensembles, the
//!   typical-input variant, and the projection-bound checker;
//! * [`triangles`]: pair covers, class estimation, the networked evaluation
//!   procedures, and the full negative-triangle pair finder;
//! * [`reductions`]: shortest paths from distance products from triangle
//!   detection;
//! * [`oracles`]: independent brute-force ground truth for all of the above.

pub mod error;
pub mod graph;
pub mod io;
pub mod labels;
pub mod ledger;
pub mod matrix;
pub mod net;
pub mod oracles;
pub mod params;
pub mod qsearch;
pub mod reductions;
pub mod rng;
pub mod triangles;
pub mod tripartite;
pub mod weight;

pub use error::{Abort, GraphError, NetError, PipelineError};
pub use graph::{Pair, PairSet, UndirectedWeightedGraph, WeightedDigraph};
pub use ledger::{CostKind, PhaseLedger, RoundLedger};
pub use matrix::{encode_graph_matrix, min_plus_product, DistMatrix};
pub use net::{EnforcementMode, Message, Network, NodeId};
pub use params::{PipelineParams, SearchMode};
pub use rng::{Seeder, Substream};
pub use weight::ExtWeight;
