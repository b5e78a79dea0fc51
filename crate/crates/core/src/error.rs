use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("resource limit: {what} needs {needed} but the budget is {budget}; {hint}")]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        budget: u128,
        hint: &'static str,
    },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("numeric failure: {what} (residual {residual:e})")]
    NumericFailure { what: String, residual: f64 },

    #[error("construction bug: {0}")]
    ConstructionBug(String),

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("bad config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::InvalidParameter(_) | Error::Parse { .. }
        )
    }

    /// Process exit code: 2 for resource limits, 3 for configuration and
    /// input problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::ResourceLimit { .. } => 2,
            Error::Io(_) | Error::InvalidInput(_) => 3,
            e if e.is_config() => 3,
            _ => 1,
        }
    }
}
