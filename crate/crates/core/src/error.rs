use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge {index}: self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge {index}: vertex {vertex} out of range for n={n}")]
    VertexOutOfRange { index: usize, vertex: usize, n: usize },
    #[error("edge {index}: weight {weight} is negative")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("edge {index}: weight {weight} is not finite")]
    NonFiniteWeight { index: usize, weight: f64 },

    #[error("cut side must be a nonempty proper subset of the vertices")]
    ImproperSide,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("vertices {0} and {1} already share a metavertex")]
    SameMetavertex(usize, usize),
    #[error("brute force refused for n={0} (limit 20)")]
    TooLargeForBruteForce(usize),
    #[error("graph is disconnected")]
    Disconnected,

    #[error("sampler has no live weight")]
    EmptySampler,
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("edge index {0} out of range")]
    BadEdgeIndex(usize),
    #[error("weight {0} is not a finite nonnegative value")]
    BadWeight(f64),
    #[error("rollback mark {mark} does not match the innermost checkpoint")]
    NonLifoRollback { mark: usize },

    #[error("boost scalar B={0} must be at least 1")]
    BoostBelowOne(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("prediction value {p} for pair ({u},{v}) outside [0,1]")]
    PredictionOutOfRange { u: usize, v: usize, p: f64 },
    #[error("reference cut has zero weight")]
    ZeroWeightCut,
    #[error("eta target {0} outside [0,1]")]
    EtaOutOfRange(f64),
    #[error("rho target {target} infeasible, maximum achievable is {max}")]
    RhoInfeasible { target: f64, max: f64 },
    #[error("heuristic predictor could not sample a subgraph with 2+ connected vertices")]
    HeuristicSampleFailed,

    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("sample {index}: minimum cut weight {weight} below C_min {c_min}")]
    BelowCmin { index: usize, weight: f64, c_min: f64 },
    #[error("prediction vector coordinate {index} = {value} outside [0,1]")]
    OutsideBox { index: usize, value: f64 },
    #[error("no samples supplied")]
    NoSamples,

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("oracle mismatch on {instance}: stoer-wagner {sw} vs brute force {brute}")]
    OracleMismatch { instance: String, sw: f64, brute: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io { path: path.into(), message: err.to_string() }
    }
}
