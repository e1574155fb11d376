//! Accumulation of stochastic Pauli errors through a layered circuit.
//!
//! The model is deliberately literal: each layer contributes an independent
//! Pauli error channel, and the accumulated channel is the Klein-group
//! convolution of the layers (the distribution of the product of independently
//! drawn Pauli errors). Ideal-gate conjugation of the errors (Clifford
//! propagation) is *not* applied; cancellation happens only through the group
//! structure, e.g. Z errors in two layers multiplying to the identity. A
//! consequence is that layer order does not affect the result.
//!
//! The headline figure is the accumulated identity probability P_I, the
//! perfection rate of the whole circuit. For a two-layer circuit
//! P_I = sum_s p_s(2) p_s(1), and the accumulated X-error weight is
//! P_X = p_i2 p_x1 + p_x2 p_i1 + p_y2 p_z1 + p_z2 p_y1, both special cases of
//! the convolution.

use crate::pauli::{character_transform, PauliString};
use crate::projection::PauliErrorChannel;
use crate::{real, Error, Real, Result};

/// One circuit layer: a name for reporting plus its error channel.
#[derive(Debug, Clone)]
pub struct Layer<T: Real> {
    pub name: String,
    pub channel: PauliErrorChannel<T>,
}

/// A layered circuit over a fixed register.
#[derive(Debug, Clone)]
pub struct Circuit<T: Real> {
    pub n_qubits: usize,
    pub layers: Vec<Layer<T>>,
}

impl<T: Real> Circuit<T> {
    pub fn new(n_qubits: usize, layers: Vec<Layer<T>>) -> Result<Self> {
        for layer in &layers {
            if layer.channel.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "layer '{}' acts on {} qubits, circuit has {}",
                    layer.name,
                    layer.channel.n_qubits(),
                    n_qubits
                )));
            }
        }
        Ok(Self { n_qubits, layers })
    }
}

/// Tensor product of per-register channels into one layer channel; the first
/// part is the most significant (leftmost) register.
pub fn tensor_layer<T: Real>(parts: &[PauliErrorChannel<T>]) -> Result<PauliErrorChannel<T>> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("tensor_layer needs at least one part".into()));
    }
    let mut n_total = 0usize;
    let mut probs: Vec<T> = vec![T::one()];
    for part in parts {
        n_total += part.n_qubits();
        let mut next = Vec::with_capacity(probs.len() * part.probs().len());
        for &hi in &probs {
            for &lo in part.probs() {
                next.push(hi * lo);
            }
        }
        probs = next;
    }
    PauliErrorChannel::new(n_total, probs)
}

/// Klein-group convolution of all layers. Empty circuits give the identity
/// channel.
pub fn accumulate<T: Real>(circuit: &Circuit<T>) -> Result<PauliErrorChannel<T>> {
    let size = 1usize << (2 * circuit.n_qubits);
    let mut acc = vec![T::one(); size]; // character transform of the identity channel
    for layer in &circuit.layers {
        let mut t = layer.channel.probs().to_vec();
        character_transform(&mut t, circuit.n_qubits);
        for (a, b) in acc.iter_mut().zip(t.iter()) {
            *a *= *b;
        }
    }
    character_transform(&mut acc, circuit.n_qubits);
    let norm = real::<T>(size as f64);
    for a in acc.iter_mut() {
        *a /= norm;
    }
    PauliErrorChannel::new(circuit.n_qubits, acc)
}

/// Perfection rate after each prefix of the circuit:
/// (layer name, P_I of layers up to and including it).
pub fn per_step_trace<T: Real>(circuit: &Circuit<T>) -> Vec<(String, T)> {
    let size = 1usize << (2 * circuit.n_qubits);
    let norm = real::<T>(size as f64);
    let mut acc = vec![T::one(); size];
    let mut out = Vec::with_capacity(circuit.layers.len());
    for layer in &circuit.layers {
        let mut t = layer.channel.probs().to_vec();
        character_transform(&mut t, circuit.n_qubits);
        for (a, b) in acc.iter_mut().zip(t.iter()) {
            *a *= *b;
        }
        // P_I is the mean of the running transform: the inverse transform
        // evaluated at the identity string.
        let p_i = acc.iter().fold(T::zero(), |s, &x| s + x) / norm;
        out.push((layer.name.clone(), p_i));
    }
    out
}

/// Accumulated probability of one specific Pauli error at the end of the circuit.
pub fn accumulated_error<T: Real>(circuit: &Circuit<T>, pauli: &PauliString) -> Result<T> {
    if pauli.n_qubits() != circuit.n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "Pauli string acts on {} qubits, circuit has {}",
            pauli.n_qubits(),
            circuit.n_qubits
        )));
    }
    Ok(accumulate(circuit)?.prob_of(pauli))
}
