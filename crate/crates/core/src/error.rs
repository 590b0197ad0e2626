use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("node count n must be at least 2 (got {0})")]
    TooFewNodes(usize),
    #[error("key ring size K must be positive")]
    EmptyRing,
    #[error("key ring size K = {ring} exceeds key pool size P = {pool}")]
    RingExceedsPool { ring: usize, pool: usize },
    #[error("q must be at least 1")]
    ZeroThreshold,
    #[error("channel probability p must lie in [0, 1] (got {0})")]
    ChannelProbability(f64),
    #[error("{0} exceeds the supported range of 32-bit identifiers")]
    TooLarge(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Params(#[from] ParamError),
    /// The asymptotic decompositions need `ln ln n > 0`.
    #[error("n = {0} is too small for the asymptotic decomposition (requires n >= 3)")]
    Domain(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no feasible design: {0}")]
    NoFeasibleDesign(String),
}

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
    #[error("trial {index} failed: {reason}")]
    Trial { index: u64, reason: String },
}
