//! Single-step parity-check (SSPC) unitaries and their verification.
//!
//! A two-body parity check measures X⊗X or Z⊗Z on two data qubits through an
//! ancilla. The SSPC gate is the single 8x8 unitary that replaces the whole
//! decomposed gate sequence before ancilla readout. Basis ordering everywhere:
//! |ancilla, q1, q2> with the ancilla the most significant qubit.
//!
//! Action: with projectors Pi_pm = (I ± P)/2 for the checked Pauli P,
//! U |0>_a |psi> = |0> Pi_+ |psi> + |1> Pi_- |psi>, so measuring the ancilla in
//! the computational basis collapses the data register onto the parity-even or
//! parity-odd eigenspace. Both gates are involutions and belong to the
//! three-qubit Clifford group.

use crate::{real, CMat, CVec, Error, Real, Result};
use nalgebra::{Complex, Normed};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Which two-body parity is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityCheck {
    XX,
    ZZ,
}

impl ParityCheck {
    pub fn name(self) -> &'static str {
        match self {
            ParityCheck::XX => "xx",
            ParityCheck::ZZ => "zz",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "xx" => Ok(ParityCheck::XX),
            "zz" => Ok(ParityCheck::ZZ),
            other => Err(Error::InvalidInput(format!("unknown parity check '{other}'"))),
        }
    }

    /// The checked two-qubit Pauli operator (4x4, on the data register).
    pub fn operator<T: Real>(self) -> CMat<T> {
        let s = match self {
            ParityCheck::XX => crate::pauli::sigma::<T>(1),
            ParityCheck::ZZ => crate::pauli::sigma::<T>(3),
        };
        s.kronecker(&s)
    }

    /// The single-step gate (8x8, ancilla plus data register) for this check.
    pub fn gate<T: Real>(self) -> CMat<T> {
        match self {
            ParityCheck::XX => u_xx(),
            ParityCheck::ZZ => u_zz(),
        }
    }
}

/// The XX single-step parity check: in ancilla blocks,
/// U = 1/2 [[I + XX, I - XX], [I - XX, I + XX]].
pub fn u_xx<T: Real>() -> CMat<T> {
    let xx = ParityCheck::XX.operator::<T>();
    let eye = CMat::<T>::identity(4, 4);
    let half = Complex::new(real::<T>(0.5), T::zero());
    let plus = (&eye + &xx).map(|x| x * half);
    let minus = (&eye - &xx).map(|x| x * half);
    let mut u = CMat::<T>::zeros(8, 8);
    u.view_mut((0, 0), (4, 4)).copy_from(&plus);
    u.view_mut((0, 4), (4, 4)).copy_from(&minus);
    u.view_mut((4, 0), (4, 4)).copy_from(&minus);
    u.view_mut((4, 4), (4, 4)).copy_from(&plus);
    u
}

/// The ZZ single-step parity check: the permutation flipping the ancilla iff
/// the data qubits have odd parity, |a, q1, q2> -> |a xor q1 xor q2, q1, q2>.
pub fn u_zz<T: Real>() -> CMat<T> {
    permutation_gate(|idx| {
        let (a, q1, q2) = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
        ((a ^ q1 ^ q2) << 2) | (q1 << 1) | q2
    })
}

/// 8x8 permutation unitary from a basis-index map.
fn permutation_gate<T: Real>(map: impl Fn(usize) -> usize) -> CMat<T> {
    let mut u = CMat::<T>::zeros(8, 8);
    for col in 0..8 {
        u[(map(col), col)] = Complex::new(T::one(), T::zero());
    }
    u
}

/// Hadamard on the most significant of three qubits.
fn h_on_ancilla<T: Real>() -> CMat<T> {
    let s = T::one() / real::<T>(2.0).sqrt();
    let h = CMat::<T>::from_row_slice(
        2,
        2,
        &[
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(s, T::zero()),
            Complex::new(-s, T::zero()),
        ],
    );
    h.kronecker(&CMat::<T>::identity(4, 4))
}

/// CNOT with given control and target bit positions (2 = ancilla, 1 = q1, 0 = q2).
fn cnot<T: Real>(control: usize, target: usize) -> CMat<T> {
    permutation_gate(|idx| {
        if (idx >> control) & 1 == 1 {
            idx ^ (1 << target)
        } else {
            idx
        }
    })
}

/// The conventional gate decomposition of a parity check, in application order
/// (index 0 acts first). The full unitary is the reversed product.
///
/// XX: H on ancilla, CNOT(ancilla -> q1), CNOT(ancilla -> q2), H on ancilla.
/// ZZ: CNOT(q1 -> ancilla), CNOT(q2 -> ancilla).
pub fn decomposed_parity_circuit<T: Real>(check: ParityCheck) -> Vec<CMat<T>> {
    match check {
        ParityCheck::XX => vec![h_on_ancilla(), cnot(2, 1), cnot(2, 0), h_on_ancilla()],
        ParityCheck::ZZ => vec![cnot(1, 2), cnot(0, 2)],
    }
}

/// Product of the decomposition, applied left-to-right.
pub fn decomposed_product<T: Real>(check: ParityCheck) -> CMat<T> {
    let layers = decomposed_parity_circuit::<T>(check);
    let mut u = CMat::<T>::identity(8, 8);
    for layer in layers {
        u = layer * u;
    }
    u
}

/// Projects a two-qubit data state onto the parity eigenspace for the given
/// ancilla outcome (0 = even, +1 eigenspace; 1 = odd). Returns the outcome
/// probability and the renormalized post-measurement state.
pub fn parity_project<T: Real>(
    state: &CVec<T>,
    check: ParityCheck,
    outcome: u8,
) -> Result<(T, CVec<T>)> {
    if state.len() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "parity_project expects a two-qubit state (length 4), got {}",
            state.len()
        )));
    }
    let sign = match outcome {
        0 => T::one(),
        1 => -T::one(),
        other => return Err(Error::InvalidInput(format!("outcome must be 0 or 1, got {other}"))),
    };
    let op = check.operator::<T>();
    let half = Complex::new(real::<T>(0.5), T::zero());
    let signed = Complex::new(sign * real::<T>(0.5), T::zero());
    let projector = CMat::<T>::identity(4, 4).map(|x| x * half) + op.map(|x| x * signed);
    let projected = &projector * state;
    let prob = projected.norm_squared();
    if prob < real::<T>(1e-12) {
        return Err(Error::ImprobableOutcome {
            probability: prob.to_f64().unwrap_or(f64::NAN),
        });
    }
    let scale = Complex::new(T::one() / prob.sqrt(), T::zero());
    Ok((prob, projected.map(|x| x * scale)))
}

/// Outcome of [`verify_parity_semantics`].
#[derive(Debug, Clone)]
pub struct ParityVerification<T: Real> {
    pub trials: usize,
    /// Largest entrywise deviation between U|0>|psi> and the projector form.
    pub max_deviation: T,
    /// Trial index that produced the worst deviation.
    pub worst_trial: usize,
}

/// Checks U |0>_a |psi> = |0> Pi_+ |psi> + |1> Pi_- |psi> on seeded
/// pseudo-random states (normalized complex Gaussian vectors).
pub fn verify_parity_semantics<T: Real>(
    u: &CMat<T>,
    check: ParityCheck,
    trials: usize,
    seed: u64,
) -> ParityVerification<T>
where
    StandardNormal: Distribution<T>,
{
    assert_eq!(u.shape(), (8, 8), "parity-check gate acts on ancilla + 2 data qubits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    let mut worst_trial = 0usize;
    let op = check.operator::<T>();
    let half = Complex::new(real::<T>(0.5), T::zero());
    let plus = CMat::<T>::identity(4, 4).map(|x| x * half) + op.map(|x| x * half);
    let minus = CMat::<T>::identity(4, 4).map(|x| x * half) - op.map(|x| x * half);
    for trial in 0..trials {
        let mut psi = CVec::<T>::from_fn(4, |_, _| {
            Complex::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        });
        let norm = psi.norm();
        psi = psi.map(|x| x / Complex::new(norm, T::zero()));

        // input |0>_a |psi>
        let mut input = CVec::<T>::zeros(8);
        for i in 0..4 {
            input[i] = psi[i];
        }
        let lhs = u * &input;
        let (even, odd) = (&plus * &psi, &minus * &psi);
        let mut rhs = CVec::<T>::zeros(8);
        for i in 0..4 {
            rhs[i] = even[i];
            rhs[i + 4] = odd[i];
        }
        let deviation = (lhs - rhs).map(|x| x.norm()).max();
        if deviation > worst {
            worst = deviation;
            worst_trial = trial;
        }
    }
    ParityVerification { trials, max_deviation: worst, worst_trial }
}

/// Whether an n-qubit unitary is Clifford: conjugation of every single-qubit
/// X and Z generator must land on a Pauli string up to a phase in {±1, ±i}.
pub fn is_clifford<T: Real>(u: &CMat<T>) -> bool {
    let dim = u.nrows();
    if !dim.is_power_of_two() || u.ncols() != dim {
        return false;
    }
    let n = dim.trailing_zeros() as usize;
    let tol = real::<T>(1e-9);
    // unitarity first
    let eye = CMat::<T>::identity(dim, dim);
    if (u.adjoint() * u - &eye).map(|x| x.norm()).max() > tol {
        return false;
    }
    let d = real::<T>(dim as f64);
    for qubit in 0..n {
        for pauli_digit in [1u8, 3u8] {
            // X or Z on one qubit
            let mut generator_index = 0usize;
            generator_index |= (pauli_digit as usize) << (2 * (n - 1 - qubit));
            let p = crate::pauli::PauliString::from_index(n, generator_index).matrix::<T>();
            let conj = u * p * u.adjoint();
            // find the unique Pauli string with unit overlap
            let mut matched = false;
            for candidate in 0..dim * dim {
                let q = crate::pauli::PauliString::from_index(n, candidate).matrix::<T>();
                let phase = (q.adjoint() * &conj).trace() / Complex::new(d, T::zero());
                if (phase.norm() - T::one()).abs() < tol {
                    let residue = (&conj - q.map(|x| x * phase)).map(|x| x.norm()).max();
                    let quarter = phase.re.abs() < tol || phase.im.abs() < tol;
                    if residue < tol && quarter {
                        matched = true;
                    }
                    break;
                }
            }
            if !matched {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs(m: &CMat<f64>) -> f64 {
        m.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn gates_are_involutive_unitaries() {
        for u in [u_xx::<f64>(), u_zz::<f64>()] {
            let eye = CMat::<f64>::identity(8, 8);
            assert!(max_abs(&(&u * u.adjoint() - &eye)) < 1e-14);
            assert!(max_abs(&(&u * &u - &eye)) < 1e-14, "parity gates square to identity");
        }
    }

    #[test]
    fn gates_match_their_decompositions() {
        assert!(max_abs(&(u_xx::<f64>() - decomposed_product::<f64>(ParityCheck::XX))) < 1e-14);
        assert!(max_abs(&(u_zz::<f64>() - decomposed_product::<f64>(ParityCheck::ZZ))) < 1e-14);
    }

    #[test]
    fn zz_gate_action_on_basis_states() {
        let u = u_zz::<f64>();
        for idx in 0..8usize {
            let (a, q1, q2) = ((idx >> 2) & 1, (idx >> 1) & 1, idx & 1);
            let expect = ((a ^ q1 ^ q2) << 2) | (q1 << 1) | q2;
            assert_relative_eq!(u[(expect, idx)].re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn parity_semantics_hold_for_both_gates() {
        for (u, check) in [
            (u_xx::<f64>(), ParityCheck::XX),
            (u_zz::<f64>(), ParityCheck::ZZ),
        ] {
            let report = verify_parity_semantics(&u, check, 200, 1234);
            assert!(
                report.max_deviation < 1e-12,
                "{:?} deviation {}",
                check,
                report.max_deviation
            );
        }
    }

    #[test]
    fn parity_project_probabilities_sum_to_one() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let mut psi = CVec::<f64>::from_fn(4, |_, _| {
                Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let n = psi.norm();
            psi = psi.map(|x| x / n);
            for check in [ParityCheck::XX, ParityCheck::ZZ] {
                let even = parity_project(&psi, check, 0).map(|(p, _)| p).unwrap_or(0.0);
                let odd = parity_project(&psi, check, 1).map(|(p, _)| p).unwrap_or(0.0);
                assert_relative_eq!(even + odd, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn projected_states_are_parity_eigenstates() {
        let psi = {
            let mut v = CVec::<f64>::from_fn(4, |i, _| Complex::new(1.0 + i as f64, -(i as f64)));
            let n = v.norm();
            v = v.map(|x| x / n);
            v
        };
        for check in [ParityCheck::XX, ParityCheck::ZZ] {
            let op = check.operator::<f64>();
            for (outcome, sign) in [(0u8, 1.0), (1u8, -1.0)] {
                let (_, post) = parity_project(&psi, check, outcome).unwrap();
                let applied = &op * &post;
                let diff = (applied - post.map(|x| x * sign)).map(|x| x.norm()).max();
                assert!(diff < 1e-12, "{check:?} outcome {outcome} not an eigenstate");
            }
        }
    }

    #[test]
    fn vanishing_outcome_is_an_error() {
        // |00> + |11> has even ZZ parity only
        let mut psi = CVec::<f64>::zeros(4);
        psi[0] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[3] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!(matches!(
            parity_project(&psi, ParityCheck::ZZ, 1),
            Err(Error::ImprobableOutcome { .. })
        ));
    }

    #[test]
    fn parity_gates_are_clifford_and_t_gate_is_not() {
        assert!(is_clifford(&u_xx::<f64>()));
        assert!(is_clifford(&u_zz::<f64>()));
        // T ⊗ I ⊗ I is unitary but not Clifford
        let phase = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let mut t = CMat::<f64>::identity(2, 2);
        t[(1, 1)] = phase;
        let t_gate = t.kronecker(&CMat::<f64>::identity(4, 4));
        assert!(!is_clifford(&t_gate));
        // and a non-unitary matrix is rejected outright
        assert!(!is_clifford(&CMat::<f64>::zeros(8, 8)));
    }
}
