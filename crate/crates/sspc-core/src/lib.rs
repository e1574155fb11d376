//! Turns experimentally characterized quantum gates into stochastic Pauli error
//! channels, accumulates those errors through parity-check circuits, and builds and
//! verifies single-step parity-check (SSPC) gates.
//!
//! The crate has three groups of modules:
//!
//! * Channel analysis: [`pauli`] (operator basis and the Klein-group transform),
//!   [`channel`] (representation conversions between unitary, superoperator, Choi,
//!   chi, Pauli transfer matrix and Kraus forms), [`projection`] (extraction of the
//!   stochastic Pauli channel from Kraus operators) and [`circuit`] (accumulation of
//!   Pauli channels through a layered circuit).
//! * Parity-check construction: [`sspc`] (the XX/ZZ single-step parity-check
//!   unitaries, their decomposed circuits and verification) and [`noise`]
//!   (parameterized error models and fidelity calibration).
//! * Pulse-level tooling for a two-nuclei + one-electron spin system: [`spin`]
//!   (Hamiltonians, controls, propagation), [`grape`] (piecewise-constant pulse
//!   optimization), [`spectrum`] (FFT peak analysis of optimized pulses) and
//!   [`clock`] (commensurability search for the drift couplings).
//!
//! [`io`] holds the JSON/CSV interchange formats used by the CLI.
//!
//! Numeric kernels are generic over the real scalar through the [`Real`] trait;
//! `f64` aliases ([`CMat64`], [`RMat64`], [`CVec64`]) are used by the serde layer.

pub mod channel;
pub mod circuit;
pub mod clock;
pub mod error;
pub mod grape;
pub mod io;
pub mod noise;
pub mod pauli;
pub mod projection;
pub mod spectrum;
pub mod spin;
pub mod sspc;

use nalgebra::{Complex, DMatrix, DVector};

/// Scalar abstraction for the numeric kernels: a real field with lossless-enough
/// conversions from `f64` literals. Blanket-implemented; in practice `f32` and `f64`.
pub trait Real:
    nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy
{
}

impl<T> Real for T where
    T: nalgebra::RealField + num_traits::FromPrimitive + num_traits::ToPrimitive + Copy
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
/// e^{i theta} for scalars that only promise RealField.
pub(crate) fn cis<T: Real>(theta: T) -> nalgebra::Complex<T> {
    nalgebra::Complex::new(theta.cos(), theta.sin())
}

pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// Complex dense matrix over the working scalar.
pub type CMat<T> = DMatrix<Complex<T>>;
/// Real dense matrix over the working scalar.
pub type RMat<T> = DMatrix<T>;
/// Complex dense vector over the working scalar.
pub type CVec<T> = DVector<Complex<T>>;

/// `f64` concrete aliases.
pub type CMat64 = CMat<f64>;
pub type RMat64 = RMat<f64>;
pub type CVec64 = CVec<f64>;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
