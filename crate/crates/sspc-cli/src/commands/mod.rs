//! One module per subcommand. Each exposes an `Args` struct (clap derive) and
//! `run(&Args, &Ctx) -> Result<u8>` returning the process exit code; errors
//! bubbling out of `run` are reported as invalid input (exit 2).

pub mod accumulate;
pub mod analyze;
pub mod clock;
pub mod compare;
pub mod convert;
pub mod grape;
pub mod spectrum;
pub mod sspc_verify;

use serde_json::Value;
use sspc_core::projection::PauliErrorChannel;
use sspc_core::RMat64;

pub const PASS: u8 = 0;
pub const VERIFICATION_FAILURE: u8 = 1;

/// A real matrix as a JSON array of row arrays.
pub(crate) fn matrix_rows(m: &RMat64) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| m[(i, j)].into()).collect()))
            .collect(),
    )
}

/// Pauli probabilities as a label-keyed JSON map (dust below 1e-15 dropped,
/// matching the channel file format).
pub(crate) fn probs_value(channel: &PauliErrorChannel<f64>) -> Value {
    serde_json::to_value(sspc_core::io::PauliChannelFile::from_channel(channel).probs)
        .expect("probability map serializes")
}
