use thiserror::Error;

use crate::weighting::GuardViolation;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TesError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("loop at vertex {0}")]
    Loop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("{0} is not an edge of the graph")]
    NotAnEdge(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("cannot identify {u} and {v}: {reason}")]
    Identify { u: usize, v: usize, reason: String },

    #[error("edge count {m} is not 1 mod 3")]
    Residue { m: usize },

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("weighting is not well guarded (first violation at i = {})", .0.i)]
    NotWellGuarded(GuardViolation),

    #[error("weighting is not irregular: edges {0:?} and {1:?} share a total sum")]
    NotIrregular((usize, usize), (usize, usize)),

    #[error("search budget of {budget} nodes exhausted at strength {strength}")]
    BudgetExhausted { strength: usize, budget: u64 },

    #[error("enumeration size {size} exceeds cap {cap}")]
    EnumerationCap { size: f64, cap: u64 },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("degenerate lemma instance: |E(A1,C)| = {e_a1_c} <= Delta1 = {delta1}")]
    DegenerateInstance { e_a1_c: usize, delta1: usize },

    #[error("lemma condition ({0}) does not hold")]
    ConditionFailed(u8),

    #[error("greedy ordering reached a dead end at position {position}")]
    OrderingDeadEnd { position: usize },

    #[error("construction produced an invalid certificate: {0}")]
    Certificate(String),

    #[error("{claim} not achieved: {detail}")]
    ClaimFailed { claim: &'static str, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("{attempts} resamples exhausted without a guarding set (best first violation at i = {best_violation_i:?})")]
    ResamplesExhausted {
        attempts: usize,
        best_violation_i: Option<usize>,
    },

    #[error("all construction routes failed: {}", .0.join("; "))]
    AllRoutesFailed(Vec<String>),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, TesError>;
