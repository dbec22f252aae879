use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern is disconnected")]
    DisconnectedPattern,
    #[error("pattern edge ({0},{0}) is a self-loop")]
    SelfLoop(usize),
    #[error("pattern edge ({0},{1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("pattern needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("edge probability {0} exceeds 1 after sparse scaling")]
    ProbabilityOverflow(f64),
    #[error("selection probability must lie strictly inside (0,1), got {0}")]
    InvalidProbability(f64),
    #[error("observation predicate queried for self pair ({0},{0})")]
    SelfPairQueried(usize),
    #[error("tuple has repeated vertices")]
    NonDistinctTuple,
    #[error("pattern has {pattern} vertices but graph only {graph}")]
    PatternLargerThanGraph { pattern: usize, graph: usize },
    #[error("pattern or model too large for exact enumeration: {0}")]
    PatternTooLarge(String),
    #[error("theta_1 is zero; clustering asymptotics undefined")]
    DegenerateTheta,
    #[error("variance is zero")]
    ZeroVariance,
    #[error("level must lie strictly inside (0,1), got {0}")]
    InvalidLevel(f64),
    #[error("quantile argument must lie strictly inside (0,1), got {0}")]
    OutOfDomain(f64),
    #[error("beta = {beta} outside admissible interval (0, {bound})")]
    BetaOutOfRange { beta: f64, bound: f64 },
    #[error("no observed pairs for class cell ({0},{1})")]
    EmptyCell(usize, usize),
    #[error("need at least {needed} selected nodes, got {got}")]
    TooFewSelectedNodes { needed: usize, got: usize },
    #[error("invalid number of communities: {0}")]
    InvalidK(usize),
    #[error("no selected nodes to work with")]
    EmptyObservation,
    #[error("no labelled vertices")]
    NoLabels,
    #[error("true bias is zero; relative bias undefined")]
    ZeroTrueBias,
    #[error("count overflowed 128-bit accumulator")]
    CountOverflow,
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end:
    /// 2 usage, 3 data, 4 numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DisconnectedPattern
            | Error::SelfLoop(_)
            | Error::DuplicateEdge(..)
            | Error::TooFewVertices(_)
            | Error::InvalidSize(_)
            | Error::IndexOutOfRange(_)
            | Error::InvalidModel(_)
            | Error::ProbabilityOverflow(_)
            | Error::InvalidProbability(_)
            | Error::SelfPairQueried(_)
            | Error::NonDistinctTuple
            | Error::PatternTooLarge(_)
            | Error::InvalidLevel(_)
            | Error::OutOfDomain(_)
            | Error::BetaOutOfRange { .. }
            | Error::InvalidK(_)
            | Error::Config(_) => 2,
            Error::Parse { .. }
            | Error::LabelMismatch(_)
            | Error::DimensionMismatch(_)
            | Error::PatternLargerThanGraph { .. }
            | Error::Io(_) => 3,
            Error::DegenerateTheta
            | Error::ZeroVariance
            | Error::EmptyCell(..)
            | Error::TooFewSelectedNodes { .. }
            | Error::EmptyObservation
            | Error::NoLabels
            | Error::ZeroTrueBias
            | Error::CountOverflow => 4,
        }
    }
}
