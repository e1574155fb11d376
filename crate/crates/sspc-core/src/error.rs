use thiserror::Error;

/// Failure modes shared across the library.
///
/// Numeric payloads are reported as `f64` regardless of the working scalar so
/// that messages stay printable; generic code converts via `ToPrimitive`.
#[derive(Debug, Error)]
pub enum Error {
    /// A Choi eigenvalue fell below the completely-positive clip window.
    #[error("channel is not completely positive: Choi eigenvalue {min_eigenvalue:.3e} is below -{tolerance:.0e}")]
    NotCompletelyPositive { min_eigenvalue: f64, tolerance: f64 },

    /// The Kraus completeness sum deviates from the identity.
    #[error("channel is not trace preserving: completeness residual {residual:.3e} exceeds {tolerance:.0e}")]
    NotTracePreserving { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A projected Pauli probability was negative beyond the clip window.
    #[error("negative probability {value:.3e} for Pauli {label} exceeds the clip window")]
    NegativeProbability { label: String, value: f64 },

    /// Conditioning on a measurement outcome whose probability vanishes.
    #[error("parity outcome has vanishing probability {probability:.3e}")]
    ImprobableOutcome { probability: f64 },

    /// The commensurability search exhausted its bound.
    #[error("no commensurate clock solution with a <= {search_bound}")]
    NoClockSolution { search_bound: u64 },

    #[error("unsupported conversion: {0}")]
    UnsupportedConversion(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}
