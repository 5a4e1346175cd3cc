use thiserror::Error;

/// Errors produced by configuration validation, the simulation engine, and
/// the metrics layer.
#[derive(Debug, Error)]
pub enum SimError {
    /// A scenario configuration violates one of its invariants. `field` names
    /// the offending key so diagnostics can point at the config file.
    #[error("invalid config `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    /// Mismatched lengths, out-of-order history, or other malformed inputs.
    #[error("structural error: {0}")]
    Structural(String),

    /// Predictor weights summed to zero; the ensemble cannot form a prediction.
    #[error("degenerate ensemble: predictor weights sum to zero")]
    DegenerateEnsemble,

    /// Two runs handed to the comparison metrics were not a paired experiment.
    #[error("comparison error: {0}")]
    Comparison(String),
}

impl SimError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn structural(message: impl Into<String>) -> Self {
        SimError::Structural(message.into())
    }
}
