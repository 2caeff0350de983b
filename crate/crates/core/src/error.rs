use thiserror::Error;

/// Errors raised while building, solving or post-processing models.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("parameter `{param}` has no value for scenario `{scenario}`")]
    UnresolvedParameter { param: String, scenario: String },

    #[error("design has no value for first-stage variable `{0}`")]
    MissingDesignValue(String),

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("assignment has no value for variable index {0}")]
    MissingValue(usize),

    #[error("model is infeasible{}", fmt_rows(.0))]
    Infeasible(Vec<String>),

    #[error("objective {0} is unbounded")]
    Unbounded(usize),

    #[error("solver limit reached: {0}")]
    LimitReached(String),

    #[error("empty front")]
    EmptyFront,

    #[error("dimension mismatch: expected {expected} objectives, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("all objectives have a degenerate normalization range")]
    DegenerateNormalization,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("lp file parse error at line {line}: {msg}")]
    LpParse { line: usize, msg: String },

    #[error("external solver failed: {0}")]
    ExternalSolver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_rows(rows: &[String]) -> String {
    if rows.is_empty() {
        String::new()
    } else {
        format!(" (violated: {})", rows.join(", "))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
