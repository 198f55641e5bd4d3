use thiserror::Error;

use crate::metric::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph6 decode error: {0}")]
    Graph6(String),

    #[error("loop edge ({vertex}, {vertex}) on line {line}")]
    LoopEdge { line: usize, vertex: usize },

    #[error("edge endpoint {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("graph is disconnected: vertices {a} and {b} lie in different components")]
    Disconnected { a: usize, b: usize },

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("operation needs at least {need} points, got {got}")]
    TooSmall { need: usize, got: usize },

    #[error("invalid metric: {}", format_violations(.0))]
    InvalidMetric(Vec<Violation>),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("subset must be proper and nonempty")]
    ImproperSubset,

    #[error("n = {n} exceeds the exhaustive Cheeger cap of {cap}; use a heuristic or skip the Cheeger computation")]
    CapExceeded { n: usize, cap: usize },

    #[error("group error: {0}")]
    Group(String),

    #[error("character sum has imaginary residue {0:e}; the distance vector is not symmetric")]
    ImaginaryResidue(f64),

    #[error("vector is not balanced: sum = {0:e}")]
    Unbalanced(f64),

    #[error("generator gave up after {attempts} attempts (seed {seed}, index {index})")]
    RetryExhausted { seed: u64, index: usize, attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
