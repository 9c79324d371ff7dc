//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("weight addition overflowed: {a} + {b}")]
    WeightOverflow { a: i64, b: i64 },
    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("weight {weight} outside [-{bound}, {bound}]")]
    WeightOutOfBounds { weight: i64, bound: i64 },
    #[error("threshold matrix entry ({i},{j}) must be finite")]
    NonFiniteThreshold { i: usize, j: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error(
        "bandwidth violation: {units} units on link {src}->{dst} in one round (limit {limit})"
    )]
    Bandwidth {
        src: usize,
        dst: usize,
        units: u64,
        limit: u64,
    },
    #[error("message of {units} units exceeds per-message limit {limit}")]
    Oversized { units: u64, limit: u64 },
    #[error("bulk route overload: node {node} {role} {units} units (limit {limit})")]
    BulkOverload {
        node: usize,
        role: &'static str,
        units: u64,
        limit: u64,
    },
    #[error("node id {node} out of range (n = {n})")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("network size {n} is not a fourth power; pad the input with isolated vertices")]
    NotFourthPower { n: usize },
}

/// Protocol-level abort: the caller retries with fresh randomness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Abort {
    #[error("pair cover not well-balanced at helper node {node}")]
    CoverNotBalanced { node: usize },
    #[error("class sampling overflow at node {node}: |sample| = {size} > {limit}")]
    ClassSampleOverflow {
        node: usize,
        size: usize,
        limit: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("aborted {attempts} times, retry bound exhausted: {last}")]
    RetriesExhausted { attempts: usize, last: Abort },
    #[error("negative cycle detected (diagonal entry {diag} at vertex {vertex})")]
    NegativeCycle { vertex: usize, diag: i64 },
    #[error("input rejected: {0}")]
    BadInput(String),
}
