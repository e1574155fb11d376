//! Projection of a noisy channel onto a stochastic Pauli error channel.
//!
//! Every d x d Kraus operator expands in the Pauli basis as
//! A_k = sum_j a_jk P_j with a_jk = Tr(A_k P_j)/d. The diagonal of the chi
//! matrix, chi_jj = sum_k |a_jk|^2, is the probability of the Pauli error P_j
//! once coherent (off-diagonal) terms are dropped; this is the quantity that
//! matters for a syndrome-extracting circuit, where measurement collapses the
//! error onto Pauli components. The identity weight p_I = chi_00 is the
//! "perfection rate" of the operation, which is not the average gate fidelity:
//! p_I <= F_pro <= F_avg.

use crate::channel::{convert, Channel, Rep};
use crate::pauli::PauliString;
use crate::{real, CMat, Error, RMat, Real, Result};
use nalgebra::Complex;

/// Probabilities below the negative clip window abort the projection.
pub const NEGATIVE_CLIP_WINDOW: f64 = 1e-6;

/// A stochastic Pauli channel: probabilities over the 4^n Pauli strings in
/// canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliErrorChannel<T: Real> {
    n_qubits: usize,
    probs: Vec<T>,
}

impl<T: Real> PauliErrorChannel<T> {
    /// Validates and wraps a probability vector (length 4^n, entries >= -1e-12,
    /// sum within 1e-9 of one; tiny negatives are clipped and the vector is
    /// renormalized).
    pub fn new(n_qubits: usize, mut probs: Vec<T>) -> Result<Self> {
        let size = 1usize << (2 * n_qubits);
        if probs.len() != size {
            return Err(Error::DimensionMismatch(format!(
                "expected 4^{n_qubits} = {size} probabilities, got {}",
                probs.len()
            )));
        }
        let floor = -real::<T>(1e-12);
        for (idx, p) in probs.iter_mut().enumerate() {
            if *p < floor {
                return Err(Error::NegativeProbability {
                    label: PauliString::from_index(n_qubits, idx).label(),
                    value: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            *p = p.max(T::zero());
        }
        let total: T = probs.iter().fold(T::zero(), |acc, &p| acc + p);
        if (total - T::one()).abs() > real::<T>(1e-9) {
            return Err(Error::InvalidInput(format!(
                "Pauli probabilities sum to {}, not 1",
                total.to_f64().unwrap_or(f64::NAN)
            )));
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(Self { n_qubits, probs })
    }

    /// The perfect identity channel.
    pub fn identity(n_qubits: usize) -> Self {
        let size = 1usize << (2 * n_qubits);
        let mut probs = vec![T::zero(); size];
        probs[0] = T::one();
        Self { n_qubits, probs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Identity-label probability (the perfection rate of a single step).
    pub fn p_identity(&self) -> T {
        self.probs[0]
    }

    pub fn prob_of(&self, pauli: &PauliString) -> T {
        assert_eq!(pauli.n_qubits(), self.n_qubits);
        self.probs[pauli.index()]
    }

    /// (label, probability) pairs in canonical (= alphabetical) order.
    pub fn labeled(&self) -> impl Iterator<Item = (String, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (PauliString::from_index(self.n_qubits, i).label(), p))
    }

    /// Diagonal PTM of the channel (the character transform of the probabilities).
    pub fn ptm(&self) -> RMat<T> {
        let mut diag = self.probs.clone();
        crate::pauli::character_transform(&mut diag, self.n_qubits);
        RMat::<T>::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }

    /// Average gate fidelity of the channel against the identity.
    pub fn avg_gate_fidelity(&self) -> T {
        let d = real::<T>((1usize << self.n_qubits) as f64);
        let mut diag = self.probs.clone();
        crate::pauli::character_transform(&mut diag, self.n_qubits);
        let f_pro = diag.iter().fold(T::zero(), |acc, &x| acc + x) / (d * d);
        (d * f_pro + T::one()) / (d + T::one())
    }
}

/// Pauli expansion coefficients of a Kraus set: table[j][k] = Tr(A_k P_j)/d.
#[derive(Debug, Clone)]
pub struct PauliCoefficients<T: Real> {
    pub n_qubits: usize,
    /// Row j: coefficients of Pauli string j across the Kraus operators.
    pub table: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PauliCoefficients<T> {
    /// Rebuilds Kraus operator k from the table; used by the reconstruction
    /// invariant sum_j a_jk P_j = A_k.
    pub fn reconstruct(&self, k: usize) -> CMat<T> {
        let dim = 1usize << self.n_qubits;
        let mut acc = CMat::<T>::zeros(dim, dim);
        for (j, row) in self.table.iter().enumerate() {
            let p = PauliString::from_index(self.n_qubits, j).matrix::<T>();
            acc += p.map(|x| x * row[k]);
        }
        acc
    }
}

/// Expands each Kraus operator in the Pauli basis.
pub fn pauli_coefficients<T: Real>(kraus: &[CMat<T>]) -> PauliCoefficients<T> {
    let dim = kraus[0].nrows();
    let n_qubits = dim.trailing_zeros() as usize;
    let size = dim * dim;
    let d = real::<T>(dim as f64);
    let mut table = Vec::with_capacity(size);
    for j in 0..size {
        let p = PauliString::from_index(n_qubits, j).matrix::<T>();
        let row = kraus
            .iter()
            .map(|a| (&p * a).trace() / Complex::new(d, T::zero()))
            .collect();
        table.push(row);
    }
    PauliCoefficients { n_qubits, table }
}

/// Result of projecting a channel onto its Pauli-diagonal part.
#[derive(Debug, Clone)]
pub struct Projection<T: Real> {
    pub channel: PauliErrorChannel<T>,
    /// Frobenius norm of the off-diagonal part of chi: how much coherent error
    /// the projection discarded.
    pub off_diagonal_weight: T,
    /// Labels whose raw probability was slightly negative and was clipped.
    pub clipped: Vec<(String, T)>,
}

/// Projects a Kraus set onto a stochastic Pauli channel:
/// prob[j] = sum_k |Tr(A_k P_j)/d|^2.
///
/// Raw values in (-1e-6, 0) are clipped to zero and the vector renormalized
/// (reported in `clipped`); anything below the window is an error.
pub fn project_to_pauli_channel<T: Real>(kraus: &[CMat<T>]) -> Result<Projection<T>> {
    let coeffs = pauli_coefficients(kraus);
    let n_qubits = coeffs.n_qubits;
    let mut clipped = Vec::new();
    let mut probs: Vec<T> = Vec::with_capacity(coeffs.table.len());
    for (j, row) in coeffs.table.iter().enumerate() {
        let mut p = row.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        if p < T::zero() {
            // norm_sqr is nonnegative; kept for parity with readers of raw chi
            // diagonals, where roundoff can undershoot.
            if p < -real::<T>(NEGATIVE_CLIP_WINDOW) {
                return Err(Error::NegativeProbability {
                    label: PauliString::from_index(n_qubits, j).label(),
                    value: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            clipped.push((
                PauliString::from_index(n_qubits, j).label(),
                p,
            ));
            p = T::zero();
        }
        probs.push(p);
    }
    let total = probs.iter().fold(T::zero(), |acc, &p| acc + p);
    if (total - T::one()).abs() > real::<T>(1e-6) {
        return Err(Error::InvalidInput(format!(
            "chi diagonal sums to {}, not 1; channel is far from trace preserving",
            total.to_f64().unwrap_or(f64::NAN)
        )));
    }
    for p in probs.iter_mut() {
        *p /= total;
    }

    // chi = table * table^dag: off-diagonal weight measures coherent error.
    let n_kraus = kraus.len();
    let size = coeffs.table.len();
    let table = CMat::<T>::from_fn(size, n_kraus, |j, k| coeffs.table[j][k]);
    let chi = &table * table.adjoint();
    let mut off = T::zero();
    for i in 0..size {
        for j in 0..size {
            if i != j {
                off += chi[(i, j)].norm_sqr();
            }
        }
    }

    Ok(Projection {
        channel: PauliErrorChannel { n_qubits, probs },
        off_diagonal_weight: off.sqrt(),
        clipped,
    })
}

/// Error-channel PTM from gate set tomography: transpose(ideal) * experimental.
///
/// For a unitary ideal gate the PTM is orthogonal, so its transpose is the
/// inverse; the product is the PTM of "what happened beyond the ideal gate".
pub fn full_gst_matrix<T: Real>(ideal: &RMat<T>, experimental: &RMat<T>) -> Result<RMat<T>> {
    if ideal.shape() != experimental.shape() || ideal.nrows() != ideal.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "GST matrices must be square and congruent, got {:?} and {:?}",
            ideal.shape(),
            experimental.shape()
        )));
    }
    Ok(ideal.transpose() * experimental)
}

/// Full pipeline from an error-channel PTM to its Pauli projection.
pub fn project_ptm<T: Real>(ptm: &RMat<T>) -> Result<Projection<T>> {
    let kraus = convert(&Channel::Ptm(ptm.clone()), Rep::Kraus)?;
    let Channel::Kraus(ops) = kraus else { unreachable!() };
    project_to_pauli_channel(&ops)
}

/// Trace identity p_I = Tr(R)/d^2 for a trace-preserving channel's PTM; cheap
/// cross-check of the projection pipeline.
pub fn p_identity_from_ptm<T: Real>(ptm: &RMat<T>) -> T {
    let d2 = real::<T>(ptm.nrows() as f64);
    ptm.trace() / d2
}

/// Frobenius distance between chi and its diagonal for an arbitrary channel;
/// diagnostic for how "Pauli" the channel already is.
pub fn chi_off_diagonal_weight<T: Real>(ch: &Channel<T>) -> Result<T> {
    let Channel::Chi(chi) = convert(ch, Rep::Chi)? else { unreachable!() };
    let mut off = T::zero();
    for i in 0..chi.nrows() {
        for j in 0..chi.ncols() {
            if i != j {
                off += chi[(i, j)].norm_sqr();
            }
        }
    }
    Ok(off.sqrt())
}
