use thiserror::Error;

pub type Result<T, E = GfnError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GfnError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate Jacobi ring: {0}")]
    DegenerateRing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "Newton iteration did not converge after {iterations} iterations (last iterate {last})"
    )]
    Convergence { iterations: usize, last: String },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("integration failed at tau = {tau}: {reason}")]
    Integration { tau: String, reason: String },

    #[error(
        "no Halphen convention reached the residual tolerance; candidate residuals: {residuals:?}"
    )]
    Convention { residuals: Vec<(String, String)> },

    #[error("Buchberger step budget of {budget} exhausted with {} basis elements so far", basis_so_far.len())]
    GroebnerBudget {
        budget: usize,
        basis_so_far: Vec<String>,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GfnError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        GfnError::Usage(msg.into())
    }
}
