//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Integer arithmetic left the representable range.
    #[error("integer overflow in {context}")]
    Overflow { context: String },

    /// A quadrature grid cannot resolve the requested polynomial degree.
    #[error("{axis} grid too small: need at least {required} points, got {got}")]
    GridTooSmall {
        axis: &'static str,
        required: usize,
        got: usize,
    },

    /// A custom multiplier table has no entry for a mode present in the field.
    #[error("multiplier table missing mode {mode}")]
    MissingMode { mode: i64 },

    /// A triple-enumeration scan beyond the supported bandlimit.
    #[error("scan bandlimit {requested} exceeds the supported maximum {max}")]
    ScanTooLarge { max: i64, requested: i64 },

    /// Parameter validation failure.
    #[error("{0}")]
    InvalidInput(String),

    /// The viscous solver detected a diverging trajectory.
    #[error("solution blew up at t = {time:.6}: norm {norm:.3e} exceeds 1e12")]
    BlowUp { time: f64, norm: f64 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
