//! Pauli strings, the normalized Pauli operator basis, and the Klein-group
//! character transform used to convolve Pauli error channels.
//!
//! Indexing convention: an n-qubit Pauli string is a base-4 integer with digits
//! I=0, X=1, Y=2, Z=3. The leftmost character of the label is the most
//! significant digit and the leftmost tensor factor, so for n=2 the index 6 =
//! base-4 "12" is the string "XY" = X ⊗ Y. Because 'I' < 'X' < 'Y' < 'Z' in
//! ASCII, alphabetical label order coincides with index order.
//!
//! Multiplication of Pauli strings modulo phase is the Klein four-group
//! (Z2 × Z2)^n acting by digit-wise XOR; every character of that group is
//! `s -> ±1` with sign given by the commutation of two strings. The resulting
//! transform (a Walsh-Hadamard-like butterfly with a 4-point kernel) maps a
//! Pauli probability vector to the diagonal of its Pauli transfer matrix and
//! turns channel composition into a pointwise product.

use crate::{real, CMat, Real};
use nalgebra::Complex;

/// One qubit Pauli matrix by digit (0=I, 1=X, 2=Y, 3=Z).
pub fn sigma<T: Real>(digit: u8) -> CMat<T> {
    let o = T::zero();
    let l = T::one();
    let c = Complex::new;
    match digit {
        0 => CMat::<T>::from_row_slice(2, 2, &[c(l, o), c(o, o), c(o, o), c(l, o)]),
        1 => CMat::<T>::from_row_slice(2, 2, &[c(o, o), c(l, o), c(l, o), c(o, o)]),
        2 => CMat::<T>::from_row_slice(2, 2, &[c(o, o), c(o, -l), c(o, l), c(o, o)]),
        3 => CMat::<T>::from_row_slice(2, 2, &[c(l, o), c(o, o), c(o, o), c(-l, o)]),
        _ => panic!("Pauli digit out of range: {digit}"),
    }
}

/// Dense n-qubit Pauli string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    digits: Vec<u8>,
}

impl PauliString {
    /// Parses a label like "IXZ". Leftmost character is the leftmost tensor factor.
    pub fn from_label(label: &str) -> crate::Result<Self> {
        let digits = label
            .chars()
            .map(|ch| match ch {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(crate::Error::InvalidInput(format!(
                    "invalid Pauli label character '{other}'"
                ))),
            })
            .collect::<crate::Result<Vec<u8>>>()?;
        if digits.is_empty() {
            return Err(crate::Error::InvalidInput("empty Pauli label".into()));
        }
        Ok(Self { digits })
    }

    /// Builds the string with the given canonical index.
    pub fn from_index(n_qubits: usize, index: usize) -> Self {
        assert!(index < 1 << (2 * n_qubits), "Pauli index out of range");
        let mut digits = vec![0u8; n_qubits];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest & 3) as u8;
            rest >>= 2;
        }
        Self { digits }
    }

    pub fn n_qubits(&self) -> usize {
        self.digits.len()
    }

    /// Canonical base-4 index; inverse of [`PauliString::from_index`].
    pub fn index(&self) -> usize {
        self.digits.iter().fold(0, |acc, &d| (acc << 2) | d as usize)
    }

    pub fn label(&self) -> String {
        self.digits.iter().map(|&d| b"IXYZ"[d as usize] as char).collect()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|&&d| d != 0).count()
    }

    /// Dense matrix, built leftmost factor first.
    pub fn matrix<T: Real>(&self) -> CMat<T> {
        let mut m = sigma::<T>(self.digits[0]);
        for &d in &self.digits[1..] {
            m = m.kronecker(&sigma::<T>(d));
        }
        m
    }
}

/// Index of the product of two Pauli strings modulo phase (digit-wise XOR).
pub fn mul_index(a: usize, b: usize) -> usize {
    a ^ b
}

/// Whether two Pauli strings commute.
///
/// Each digit carries symplectic bits x, z (I=00, X=10, Y=11, Z=01); two strings
/// commute iff the symplectic form sum x_a z_b + z_a x_b is even.
pub fn commutes(a: usize, b: usize, n_qubits: usize) -> bool {
    let mut form = 0u32;
    let (mut a, mut b) = (a, b);
    for _ in 0..n_qubits {
        let (da, db) = ((a & 3) as u8, (b & 3) as u8);
        let (xa, za) = (u32::from(da == 1 || da == 2), u32::from(da == 2 || da == 3));
        let (xb, zb) = (u32::from(db == 1 || db == 2), u32::from(db == 2 || db == 3));
        form += xa * zb + za * xb;
        a >>= 2;
        b >>= 2;
    }
    form.is_multiple_of(2)
}

/// Character value w(r, s) = +1 if strings r and s commute, -1 otherwise.
#[cfg(test)]
fn character<T: Real>(r: usize, s: usize, n_qubits: usize) -> T {
    if commutes(r, s, n_qubits) {
        T::one()
    } else {
        -T::one()
    }
}

/// In-place Klein-group character transform of a length-4^n vector,
/// b_r = sum_s w(r, s) a_s.
///
/// Applied twice it multiplies the vector by 4^n. The per-digit kernel is the
/// commutation sign table of {I, X, Y, Z}, giving an O(n 4^n) butterfly.
pub fn character_transform<T: Real>(values: &mut [T], n_qubits: usize) {
    assert_eq!(values.len(), 1 << (2 * n_qubits), "length must be 4^n");
    let mut stride = 1usize;
    for _ in 0..n_qubits {
        let block = stride * 4;
        for start in (0..values.len()).step_by(block) {
            for offset in start..start + stride {
                let a0 = values[offset];
                let a1 = values[offset + stride];
                let a2 = values[offset + 2 * stride];
                let a3 = values[offset + 3 * stride];
                values[offset] = a0 + a1 + a2 + a3;
                values[offset + stride] = a0 + a1 - a2 - a3;
                values[offset + 2 * stride] = a0 - a1 + a2 - a3;
                values[offset + 3 * stride] = a0 - a1 - a2 + a3;
            }
        }
        stride = block;
    }
}

/// Convolution of two Pauli probability vectors over the Klein group:
/// out[s] = sum over a XOR b = s of p[a] q[b].
///
/// This is the distribution of the product Pauli when the two errors are drawn
/// independently, computed through the character transform in O(n 4^n).
pub fn convolve<T: Real>(p: &[T], q: &[T], n_qubits: usize) -> Vec<T> {
    let size = 1usize << (2 * n_qubits);
    assert_eq!(p.len(), size);
    assert_eq!(q.len(), size);
    let mut tp = p.to_vec();
    let mut tq = q.to_vec();
    character_transform(&mut tp, n_qubits);
    character_transform(&mut tq, n_qubits);
    for (x, y) in tp.iter_mut().zip(tq.iter()) {
        *x *= *y;
    }
    character_transform(&mut tp, n_qubits);
    let norm = real::<T>(size as f64);
    for x in tp.iter_mut() {
        *x /= norm;
    }
    tp
}
