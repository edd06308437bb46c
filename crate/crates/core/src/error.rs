use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    Empty,

    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),

    #[error("unknown vertex id `{0}`")]
    UnknownVertexId(String),

    #[error("duplicate vertex id `{0}`")]
    DuplicateVertexId(String),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("edge {{{u}, {v}}} has non-positive weight {w}")]
    NonPositiveWeight { u: usize, v: usize, w: f64 },

    #[error("vertex {vertex} has non-positive measure {mu}")]
    NonPositiveMeasure { vertex: usize, mu: f64 },

    #[error("explicit measure has {got} entries, graph has {expected} vertices")]
    MeasureLength { expected: usize, got: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {0} has no neighbours")]
    DegenerateVertex(usize),

    #[error("graph has {0} vertices, dense eigensolver is capped at {max}", max = crate::spectral::MAX_DENSE_VERTICES)]
    TooLarge(usize),

    #[error("heat semigroup evaluated at negative time {0}")]
    NegativeTime(f64),

    #[error("precondition not certified: {0}")]
    PreconditionNotCertified(String),

    #[error("vertex set is empty")]
    EmptySet,

    #[error("vertex sets are not disjoint")]
    SetsNotDisjoint,

    #[error("distance {dist} between sets does not exceed rho = {rho}")]
    DistanceTooSmall { dist: usize, rho: usize },

    #[error("enumeration needs about {needed:.3e} evaluations, budget is {budget:.3e}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("connected-set search stopped after {0:.3e} sets")]
    SearchBudgetExceeded(f64),

    #[error("k = {k} out of range for a graph with {n} vertices")]
    KOutOfRange { k: usize, n: usize },

    #[error("function has {got} values, graph has {expected} vertices")]
    FunctionLength { expected: usize, got: usize },

    #[error("malformed graph file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
