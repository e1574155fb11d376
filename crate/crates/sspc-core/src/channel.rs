//! Quantum channel representations and conversions.
//!
//! Five representations are supported: a unitary matrix, the column-stacking
//! superoperator, the Choi matrix, the chi (process) matrix in the Pauli basis,
//! and the Pauli transfer matrix (PTM), plus Kraus operator sets.
//!
//! Conventions (column stacking): vec(A rho B) = (B^T ⊗ A) vec(rho), so a
//! channel with Kraus operators {A_k} has superoperator S = sum_k conj(A_k) ⊗ A_k.
//! The Choi matrix is C = sum_k vec(A_k) vec(A_k)^dag with Tr C = d, positive
//! semidefinite iff the channel is completely positive. With B the unitary whose
//! columns are vec(P_j)/sqrt(d) in canonical Pauli order, R = B^dag S B is the
//! (real) PTM and chi = B^dag C B / d, so that the channel acts as
//! E(rho) = sum_{ij} chi_ij P_i rho P_j and Tr chi = 1.
//!
//! Kraus extraction diagonalizes the Choi matrix; eigenvalues below -1e-8 are a
//! complete-positivity failure, eigenvalues in [-1e-8, 0) are clipped to zero.

use crate::pauli::PauliString;
use crate::{real, CMat, CVec, Error, RMat, Real, Result};
use nalgebra::{Complex, Normed, SymmetricEigen};

/// Eigenvalues below this (relative to trace-normalized Choi) fail the CP check.
pub const CP_EIGENVALUE_TOLERANCE: f64 = 1e-8;
/// Choi eigenvalues above this are kept as Kraus directions.
pub const KRAUS_KEEP_THRESHOLD: f64 = 1e-10;
/// Largest imaginary part tolerated when realifying a PTM.
pub const PTM_REALITY_TOLERANCE: f64 = 1e-10;

/// Representation tags, matching the `kind` field of the matrix JSON format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Ptm,
    Chi,
    Superop,
    Unitary,
    Kraus,
}

impl Rep {
    pub fn name(self) -> &'static str {
        match self {
            Rep::Ptm => "ptm",
            Rep::Chi => "chi",
            Rep::Superop => "superop",
            Rep::Unitary => "unitary",
            Rep::Kraus => "kraus",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "ptm" => Ok(Rep::Ptm),
            "chi" => Ok(Rep::Chi),
            "superop" => Ok(Rep::Superop),
            "unitary" => Ok(Rep::Unitary),
            "kraus" => Ok(Rep::Kraus),
            other => Err(Error::InvalidInput(format!("unknown representation '{other}'"))),
        }
    }
}

/// A channel in one concrete representation.
#[derive(Debug, Clone)]
pub enum Channel<T: Real> {
    Ptm(RMat<T>),
    Chi(CMat<T>),
    Superop(CMat<T>),
    Unitary(CMat<T>),
    Kraus(Vec<CMat<T>>),
}

impl<T: Real> Channel<T> {
    pub fn rep(&self) -> Rep {
        match self {
            Channel::Ptm(_) => Rep::Ptm,
            Channel::Chi(_) => Rep::Chi,
            Channel::Superop(_) => Rep::Superop,
            Channel::Unitary(_) => Rep::Unitary,
            Channel::Kraus(_) => Rep::Kraus,
        }
    }

    /// Number of qubits, deduced from the stored dimension.
    pub fn n_qubits(&self) -> usize {
        let dim = match self {
            Channel::Ptm(m) => m.nrows(),
            Channel::Chi(m) | Channel::Superop(m) => m.nrows(),
            Channel::Unitary(m) => m.nrows() * m.nrows(),
            Channel::Kraus(ops) => ops[0].nrows() * ops[0].nrows(),
        };
        debug_assert!(dim.is_power_of_two());
        dim.trailing_zeros() as usize / 2
    }
}

/// Column-stacks a matrix. nalgebra stores column-major, so this is a copy.
pub fn vec_col<T: Real>(m: &CMat<T>) -> CVec<T> {
    CVec::<T>::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_col`] for square matrices.
pub fn unvec<T: Real>(v: &CVec<T>, dim: usize) -> CMat<T> {
    assert_eq!(v.len(), dim * dim);
    CMat::<T>::from_column_slice(dim, dim, v.as_slice())
}

/// Unitary basis-change matrix whose j-th column is vec(P_j)/sqrt(d), with P_j
/// the canonical-order Pauli strings.
pub fn pauli_basis<T: Real>(n_qubits: usize) -> CMat<T> {
    let dim = 1usize << n_qubits;
    let size = dim * dim;
    let scale = Complex::new(T::one() / real::<T>(dim as f64).sqrt(), T::zero());
    let mut basis = CMat::<T>::zeros(size, size);
    for j in 0..size {
        let v = vec_col(&PauliString::from_index(n_qubits, j).matrix::<T>());
        basis.set_column(j, &(v * scale));
    }
    basis
}

/// Reshuffle between superoperator and Choi orderings (an involution):
/// out[i0 + d*j0, i1 + d*j1] = in[i0 + d*i1, j0 + d*j1].
fn reshuffle<T: Real>(m: &CMat<T>) -> CMat<T> {
    let size = m.nrows();
    let d = (size as f64).sqrt().round() as usize;
    assert_eq!(d * d, size, "reshuffle needs a d^2 x d^2 matrix");
    let mut out = CMat::<T>::zeros(size, size);
    for i0 in 0..d {
        for i1 in 0..d {
            for j0 in 0..d {
                for j1 in 0..d {
                    out[(i0 + d * j0, i1 + d * j1)] = m[(i0 + d * i1, j0 + d * j1)];
                }
            }
        }
    }
    out
}

fn superop_from_kraus<T: Real>(ops: &[CMat<T>]) -> CMat<T> {
    let d = ops[0].nrows();
    let mut s = CMat::<T>::zeros(d * d, d * d);
    for op in ops {
        s += op.map(|x| x.conj()).kronecker(op);
    }
    s
}

fn choi_from_kraus<T: Real>(ops: &[CMat<T>]) -> CMat<T> {
    let d = ops[0].nrows();
    let mut c = CMat::<T>::zeros(d * d, d * d);
    for op in ops {
        let v = vec_col(op);
        c += &v * v.adjoint();
    }
    c
}

fn ptm_from_superop<T: Real>(s: &CMat<T>) -> Result<RMat<T>> {
    let n = (s.nrows().trailing_zeros() / 2) as usize;
    let basis = pauli_basis::<T>(n);
    let r = basis.adjoint() * s * &basis;
    let worst_imag = r.iter().map(|x| x.im.abs()).fold(T::zero(), T::max);
    if worst_imag > real::<T>(PTM_REALITY_TOLERANCE) {
        return Err(Error::InvalidInput(format!(
            "superoperator does not map Hermitian to Hermitian: PTM imaginary part {:.3e}",
            worst_imag.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(r.map(|x| x.re))
}

fn superop_from_ptm<T: Real>(r: &RMat<T>) -> CMat<T> {
    let n = (r.nrows().trailing_zeros() / 2) as usize;
    let basis = pauli_basis::<T>(n);
    let rc = r.map(|x| Complex::new(x, T::zero()));
    &basis * rc * basis.adjoint()
}

fn chi_from_choi<T: Real>(c: &CMat<T>) -> CMat<T> {
    let n = (c.nrows().trailing_zeros() / 2) as usize;
    let d = real::<T>((1usize << n) as f64);
    let basis = pauli_basis::<T>(n);
    (basis.adjoint() * c * &basis).map(|x| x / d)
}

fn choi_from_chi<T: Real>(chi: &CMat<T>) -> CMat<T> {
    let n = (chi.nrows().trailing_zeros() / 2) as usize;
    let d = real::<T>((1usize << n) as f64);
    let basis = pauli_basis::<T>(n);
    (&basis * chi * basis.adjoint()).map(|x| x * d)
}

/// Kraus operators from a Choi matrix by Hermitian eigendecomposition.
///
/// Directions with eigenvalue > KRAUS_KEEP_THRESHOLD are kept; eigenvalues in
/// [-CP_EIGENVALUE_TOLERANCE, 0) are clipped; anything lower is an error.
fn kraus_from_choi<T: Real>(c: &CMat<T>) -> Result<Vec<CMat<T>>> {
    let d = (c.nrows() as f64).sqrt().round() as usize;
    let hermitized = (c + c.adjoint()).map(|x| x / real::<T>(2.0));
    let eig = SymmetricEigen::new(hermitized);
    let mut ops = Vec::new();
    let mut min_eig = T::zero();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        min_eig = min_eig.min(lambda);
        if lambda > real::<T>(KRAUS_KEEP_THRESHOLD) {
            let col = eig.eigenvectors.column(idx);
            let scale = Complex::new(lambda.sqrt(), T::zero());
            let v = CVec::<T>::from_iterator(c.nrows(), col.iter().map(|x| x * scale));
            ops.push(unvec(&v, d));
        }
    }
    if min_eig < -real::<T>(CP_EIGENVALUE_TOLERANCE) {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min_eig.to_f64().unwrap_or(f64::NAN),
            tolerance: CP_EIGENVALUE_TOLERANCE,
        });
    }
    if ops.is_empty() {
        return Err(Error::InvalidInput("Choi matrix has no positive weight".into()));
    }
    Ok(ops)
}

fn to_superop<T: Real>(channel: &Channel<T>) -> CMat<T> {
    match channel {
        Channel::Superop(s) => s.clone(),
        Channel::Unitary(u) => u.map(|x| x.conj()).kronecker(u),
        Channel::Kraus(ops) => superop_from_kraus(ops),
        Channel::Ptm(r) => superop_from_ptm(r),
        Channel::Chi(chi) => reshuffle(&choi_from_chi(chi)),
    }
}

/// Converts a channel to the target representation.
///
/// All pairs are supported except conversion *to* `unitary`, which is only an
/// input representation (a general channel has no unitary form).
pub fn convert<T: Real>(channel: &Channel<T>, target: Rep) -> Result<Channel<T>> {
    if channel.rep() == target {
        return Ok(channel.clone());
    }
    match target {
        Rep::Unitary => Err(Error::UnsupportedConversion(
            "general channels cannot be converted to a unitary".into(),
        )),
        Rep::Superop => Ok(Channel::Superop(to_superop(channel))),
        Rep::Ptm => Ok(Channel::Ptm(ptm_from_superop(&to_superop(channel))?)),
        Rep::Chi => {
            let choi = match channel {
                Channel::Kraus(ops) => choi_from_kraus(ops),
                other => reshuffle(&to_superop(other)),
            };
            Ok(Channel::Chi(chi_from_choi(&choi)))
        }
        Rep::Kraus => {
            let choi = match channel {
                Channel::Kraus(ops) => choi_from_kraus(ops),
                other => reshuffle(&to_superop(other)),
            };
            Ok(Channel::Kraus(kraus_from_choi(&choi)?))
        }
    }
}

/// Choi matrix of a channel (exposed for diagnostics; Tr = d for a TP channel).
pub fn choi<T: Real>(channel: &Channel<T>) -> CMat<T> {
    match channel {
        Channel::Kraus(ops) => choi_from_kraus(ops),
        other => reshuffle(&to_superop(other)),
    }
}

/// Smallest eigenvalue of the (hermitized) Choi matrix. Nonnegative for a
/// completely positive channel; how negative it goes quantifies reconstruction
/// noise in experimental data.
pub fn min_choi_eigenvalue<T: Real>(channel: &Channel<T>) -> T {
    let c = choi(channel);
    let hermitized = (&c + c.adjoint()).map(|x| x / real::<T>(2.0));
    let eig = SymmetricEigen::new(hermitized);
    eig.eigenvalues.iter().copied().fold(eig.eigenvalues[0], |acc, l| acc.min(l))
}

/// Kraus completeness check: returns (is TP within tol, max residual of
/// sum_k A_k^dag A_k - I).
pub fn check_tp<T: Real>(ops: &[CMat<T>], tol: T) -> (bool, T) {
    let d = ops[0].nrows();
    let mut acc = CMat::<T>::zeros(d, d);
    for op in ops {
        acc += op.adjoint() * op;
    }
    let residual = (acc - CMat::<T>::identity(d, d)).map(|x| x.norm()).max();
    (residual <= tol, residual)
}

/// PTM of the composition "b first, then a": R = R_a R_b.
pub fn compose_ptm<T: Real>(a: &RMat<T>, b: &RMat<T>) -> RMat<T> {
    assert_eq!(a.ncols(), b.nrows(), "PTM dimension mismatch");
    a * b
}

/// PTM of the tensor product; the left argument is the most significant
/// (leftmost) register, matching the Pauli index convention.
pub fn tensor_ptm<T: Real>(a: &RMat<T>, b: &RMat<T>) -> RMat<T> {
    a.kronecker(b)
}

/// PTM of a unitary gate: R_ij = Tr(P_i U P_j U^dag)/d.
pub fn ptm_from_unitary<T: Real>(u: &CMat<T>) -> RMat<T> {
    ptm_from_superop(&to_superop(&Channel::Unitary(u.clone())))
        .expect("unitary conjugation always has a real PTM")
}

/// Process fidelity between two channels given as PTMs:
/// F_pro = Tr(R_ideal^T R_noisy)/d^2. Equals chi_00 overlap for unitary ideals.
pub fn process_fidelity_ptm<T: Real>(noisy: &RMat<T>, ideal: &RMat<T>) -> T {
    let d2 = real::<T>(noisy.nrows() as f64);
    (ideal.transpose() * noisy).trace() / d2
}

/// Average gate fidelity of a noisy channel (PTM) against an ideal unitary:
/// F_avg = (d F_pro + 1)/(d + 1).
pub fn avg_gate_fidelity<T: Real>(noisy_ptm: &RMat<T>, ideal_unitary: &CMat<T>) -> T {
    let d = real::<T>(ideal_unitary.nrows() as f64);
    let f_pro = process_fidelity_ptm(noisy_ptm, &ptm_from_unitary(ideal_unitary));
    (d * f_pro + T::one()) / (d + T::one())
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs(m: &CMat<f64>) -> f64 {
        m.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn pauli_basis_is_unitary() {
        for n in 1..=2 {
            let b = pauli_basis::<f64>(n);
            let delta = &b.adjoint() * &b - CMat::<f64>::identity(b.nrows(), b.ncols());
            assert!(max_abs(&delta) < 1e-12);
        }
    }

    #[test]
    fn reshuffle_is_involution() {
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = random_complex_matrix(16, 16, &mut rng);
        let back = super::reshuffle(&super::reshuffle(&m));
        assert!(max_abs(&(back - m)) < 1e-15);
    }

    #[test]
    fn ptm_of_sqrt_x_matches_known_form() {
        // sqrt(X) maps X->X, Y->Z, Z->-Y under conjugation.
        let u = CMat::<f64>::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.5, 0.5),
                Complex::new(0.5, -0.5),
                Complex::new(0.5, -0.5),
                Complex::new(0.5, 0.5),
            ],
        );
        assert!(max_abs(&(&u * &u - sigma_x())) < 1e-12, "u^2 should be X");
        let r = ptm_from_unitary(&u);
        let expected = RMat::<f64>::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert!((r - expected).abs().max() < 1e-12);
    }

    fn sigma_x() -> CMat<f64> {
        crate::pauli::sigma::<f64>(1)
    }

    #[test]
    fn choi_trace_is_dimension_and_first_ptm_row_flags_tp() {
        for seed in 0..5u64 {
            let ops = random_kraus(2, 3, seed);
            let ch = Channel::Kraus(ops.clone());
            let c = choi(&ch);
            assert_relative_eq!(c.trace().re, 4.0, epsilon = 1e-10);
            assert!(c.trace().im.abs() < 1e-12);
            let (tp, residual) = check_tp(&ops, 1e-10);
            assert!(tp, "Stinespring construction must be exactly TP, residual {residual}");
            let Channel::Ptm(r) = convert(&ch, Rep::Ptm).unwrap() else { panic!() };
            assert_relative_eq!(r[(0, 0)], 1.0, epsilon = 1e-10);
            for j in 1..16 {
                assert!(r[(0, j)].abs() < 1e-10, "TP PTM first row must be (1, 0, ..)");
            }
        }
    }

    #[test]
    fn representation_round_trips() {
        let ops = random_kraus(1, 2, 11);
        let start = convert(&Channel::Kraus(ops), Rep::Superop).unwrap();
        let Channel::Superop(s0) = &start else { panic!() };
        for target in [Rep::Ptm, Rep::Chi, Rep::Kraus] {
            let there = convert(&start, target).unwrap();
            let Channel::Superop(back) = convert(&there, Rep::Superop).unwrap() else { panic!() };
            assert!(
                max_abs(&(back - s0.clone())) < 1e-9,
                "round trip through {:?} drifted",
                target
            );
        }
    }

    #[test]
    fn kraus_action_equivalence_after_extraction() {
        let ops = random_kraus(2, 4, 23);
        let direct = superop_from_kraus(&ops);
        let extracted = convert(&Channel::Kraus(ops), Rep::Kraus).unwrap();
        let Channel::Kraus(new_ops) = extracted else { panic!() };
        let rebuilt = superop_from_kraus(&new_ops);
        assert!(max_abs(&(rebuilt - direct)) < 1e-9);
    }

    #[test]
    fn unitary_survives_kraus_extraction_up_to_phase() {
        let u = random_unitary(4, 3);
        let Channel::Kraus(ops) = convert(&Channel::Unitary(u.clone()), Rep::Kraus).unwrap() else {
            panic!()
        };
        assert_eq!(ops.len(), 1, "a unitary channel has one Kraus operator");
        // A_0 = phase * U
        let overlap = (u.adjoint() * &ops[0]).trace() / Complex::new(4.0, 0.0);
        assert_relative_eq!(overlap.norm(), 1.0, epsilon = 1e-9);
        assert!(max_abs(&(&ops[0] - u.map(|x| x * overlap))) < 1e-9);
    }

    #[test]
    fn transpose_map_is_rejected_as_not_cp() {
        // Choi of the transpose map is the SWAP operator: eigenvalue -1.
        let mut swap = CMat::<f64>::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i + 2 * j, j + 2 * i)] = Complex::new(1.0, 0.0);
            }
        }
        let result = super::kraus_from_choi(&swap);
        assert!(matches!(result, Err(Error::NotCompletelyPositive { .. })));
    }

    #[test]
    fn compose_and_tensor_match_dense_superoperators() {
        let ka = random_kraus(1, 2, 31);
        let kb = random_kraus(1, 3, 32);
        let (sa, sb) = (superop_from_kraus(&ka), superop_from_kraus(&kb));
        let (ra, rb) = (
            ptm_from_superop(&sa).unwrap(),
            ptm_from_superop(&sb).unwrap(),
        );
        // composition, b first
        let composed = compose_ptm(&ra, &rb);
        let dense = ptm_from_superop(&(&sa * &sb)).unwrap();
        assert!((composed - dense).abs().max() < 1e-10);
        // tensor, a on the most significant qubit
        let big_kraus: Vec<CMat<f64>> = ka
            .iter()
            .flat_map(|a| kb.iter().map(move |b| a.kronecker(b)))
            .collect();
        let tensored = tensor_ptm(&ra, &rb);
        let dense_tensor = ptm_from_superop(&superop_from_kraus(&big_kraus)).unwrap();
        assert!((tensored - dense_tensor).abs().max() < 1e-10);
    }

    #[test]
    fn process_fidelity_identities() {
        // identity channel against identity: 1
        let eye = CMat::<f64>::identity(2, 2);
        let r_eye = ptm_from_unitary(&eye);
        assert_relative_eq!(process_fidelity_ptm(&r_eye, &r_eye), 1.0, epsilon = 1e-12);
        // phase flip p: F_avg = 1 - 2p/3 against identity
        let p = 0.0375;
        let ptm = RMat::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0,
            1.0 - 2.0 * p,
            1.0 - 2.0 * p,
            1.0,
        ]));
        assert_relative_eq!(avg_gate_fidelity(&ptm, &eye), 1.0 - 2.0 * p / 3.0, epsilon = 1e-12);
    }
}
