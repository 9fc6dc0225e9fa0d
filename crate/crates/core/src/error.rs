use thiserror::Error;

/// Errors raised while building or transforming base graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid vertex label {0:?}")]
    InvalidLabel(String),
    #[error("vertex {0} declared twice")]
    DuplicateVertex(String),
    #[error("self-loop at vertex {0}")]
    SelfLoop(String),
    #[error("edge {0} -> {1} declared twice")]
    DuplicateEdge(String, String),
    #[error("edge endpoint {0} is not a declared vertex")]
    UnknownEndpoint(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("vertex map is not a bijection on the vertex set")]
    NotABijection,
    #[error("blow-up vertices {0} and {1} are adjacent")]
    AdjacentBlowupVertices(String, String),
    #[error("gadget size k must be at least 1")]
    EmptyGadget,
    #[error("base edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Errors raised while parsing or binding events.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("event references {0}, which is not part of the bunkbed graph")]
    UnboundReference(String),
    #[error("cannot parse event at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// Errors raised by the probability engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error("model has {actual} entries but the bunkbed graph has {expected} edges")]
    ModelLength { expected: usize, actual: usize },
    #[error("edge probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("{free} free edges exceed the enumeration cap of {cap}")]
    TooManyFreeEdges { free: usize, cap: usize },
    #[error("base graph has a directed cycle")]
    BaseNotAcyclic,
    #[error("frontier grew to {width} vertex pairs (cap {cap})")]
    FrontierTooWide { width: usize, cap: usize },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("confidence level {0} must lie strictly between 0 and 1")]
    BadConfidence(f64),
}

/// Errors raised by the scripted verifications.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("certified gadget size k = {k_cert} exceeds the requested maximum {k_max}")]
    CertifiedKExceedsKMax { k_cert: u32, k_max: u32 },
    #[error("gadget vertex must be one of 2, 5, 8 (got {0})")]
    UnknownGadget(String),
    #[error("gadget size k must be at least 1")]
    EmptyGadget,
    #[error("the conditioned gap is not positive, so no k can be certified")]
    NonPositiveGap,
}

impl From<GraphError> for SuiteError {
    fn from(e: GraphError) -> Self {
        SuiteError::Engine(EngineError::Graph(e))
    }
}

impl From<EventError> for SuiteError {
    fn from(e: EventError) -> Self {
        SuiteError::Engine(EngineError::Event(e))
    }
}
