//! Parametric Pauli noise models and fidelity calibration.
//!
//! These build the stochastic channels used to dress circuit layers: a
//! single-qubit family (phase flip, bit flip, depolarizing) applied either
//! independently per qubit or as one correlated error, plus `calibrate_p`,
//! which inverts average gate fidelity so channels can be pinned to a
//! measured fidelity instead of a raw probability. The headline comparison
//! accumulates the four-layer decomposed parity check against the single-step
//! gate under each circuit's own noise.

use serde::{Deserialize, Serialize};

use crate::circuit::{self, Circuit, Layer};
use crate::pauli::PauliString;
use crate::projection::PauliErrorChannel;
use crate::{real, Error, Real, Result};

/// Single-qubit stochastic noise family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    PhaseFlip,
    BitFlip,
    Depolarizing,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::PhaseFlip => "phase_flip",
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "phase_flip" | "phase-flip" | "pf" => Ok(NoiseKind::PhaseFlip),
            "bit_flip" | "bit-flip" | "bf" => Ok(NoiseKind::BitFlip),
            "depolarizing" | "depol" => Ok(NoiseKind::Depolarizing),
            other => Err(Error::InvalidInput(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// A noise channel description: which family, how strong, and whether it acts
/// independently on every qubit or as one correlated error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct NoiseSpec<T: Real> {
    pub model: NoiseKind,
    pub p: T,
    #[serde(default = "default_per_qubit")]
    pub per_qubit: bool,
}

fn default_per_qubit() -> bool {
    true
}

impl<T: Real> NoiseSpec<T> {
    pub fn per_qubit(model: NoiseKind, p: T) -> Self {
        NoiseSpec { model, p, per_qubit: true }
    }

    pub fn correlated(model: NoiseKind, p: T) -> Self {
        NoiseSpec { model, p, per_qubit: false }
    }
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if p < T::zero() || p > T::one() {
        return Err(Error::InvalidInput(format!(
            "error probability must lie in [0, 1], got {}",
            p.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// Single-qubit channel of the given family with error probability `p`.
pub fn single_qubit<T: Real>(model: NoiseKind, p: T) -> Result<PauliErrorChannel<T>> {
    check_probability(p)?;
    let rest = T::one() - p;
    let probs = match model {
        NoiseKind::PhaseFlip => vec![rest, T::zero(), T::zero(), p],
        NoiseKind::BitFlip => vec![rest, p, T::zero(), T::zero()],
        NoiseKind::Depolarizing => {
            let third = p / real::<T>(3.0);
            vec![rest, third, third, third]
        }
    };
    PauliErrorChannel::new(1, probs)
}

/// Independent identical noise on each of `n_qubits` qubits.
pub fn uniform<T: Real>(model: NoiseKind, p: T, n_qubits: usize) -> Result<PauliErrorChannel<T>> {
    let one = single_qubit(model, p)?;
    circuit::tensor_layer(&vec![one; n_qubits])
}

/// Correlated error: applies the given Pauli string with probability `p`,
/// identity otherwise.
pub fn correlated_string<T: Real>(pauli: &PauliString, p: T) -> Result<PauliErrorChannel<T>> {
    check_probability(p)?;
    let n = pauli.n_qubits();
    let mut probs = vec![T::zero(); 1 << (2 * n)];
    probs[0] = T::one() - p;
    probs[pauli.index()] += p;
    PauliErrorChannel::new(n, probs)
}

/// Realizes a noise spec on a register. Per-qubit specs tensor the
/// single-qubit family; correlated phase/bit flips act on every qubit at once
/// (all-Z or all-X with probability p), and correlated depolarizing spreads p
/// uniformly over all non-identity strings.
pub fn make_channel<T: Real>(spec: &NoiseSpec<T>, n_qubits: usize) -> Result<PauliErrorChannel<T>> {
    check_probability(spec.p)?;
    if spec.per_qubit {
        return uniform(spec.model, spec.p, n_qubits);
    }
    match spec.model {
        NoiseKind::PhaseFlip => {
            correlated_string(&PauliString::from_label(&"Z".repeat(n_qubits))?, spec.p)
        }
        NoiseKind::BitFlip => {
            correlated_string(&PauliString::from_label(&"X".repeat(n_qubits))?, spec.p)
        }
        NoiseKind::Depolarizing => {
            let dim = 1usize << (2 * n_qubits);
            let share = spec.p / real::<T>((dim - 1) as f64);
            let mut probs = vec![share; dim];
            probs[0] = T::one() - spec.p;
            PauliErrorChannel::new(n_qubits, probs)
        }
    }
}

/// Error probability at which per-qubit noise on `n_qubits` reaches the
/// target average gate fidelity, found by bisection on [0, 1] to 1e-10.
pub fn calibrate_p<T: Real>(
    target_fidelity: T,
    model: NoiseKind,
    n_qubits: usize,
) -> Result<T> {
    let f_at = |p: T| -> Result<T> { Ok(uniform(model, p, n_qubits)?.avg_gate_fidelity()) };
    let (f_lo, f_hi) = (f_at(T::zero())?, f_at(T::one())?);
    assert!(f_lo > f_hi, "fidelity must decrease with p");
    if target_fidelity > f_lo || target_fidelity < f_hi {
        return Err(Error::InvalidInput(format!(
            "target fidelity {} outside attainable range [{}, {}]",
            target_fidelity.to_f64().unwrap_or(f64::NAN),
            f_hi.to_f64().unwrap_or(f64::NAN),
            f_lo.to_f64().unwrap_or(f64::NAN),
        )));
    }
    let tol = real::<T>(1e-10);
    let (mut lo, mut hi) = (T::zero(), T::one());
    // fidelity decreases with p: keep f(lo) >= target >= f(hi)
    while hi - lo > tol {
        let mid = (lo + hi) / real::<T>(2.0);
        if f_at(mid)? >= target_fidelity {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / real::<T>(2.0))
}

/// Per-step identity-probability trace entry.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct StepTrace<T: Real> {
    pub layer: String,
    pub p_identity: T,
}

/// Side-by-side accumulation of the decomposed parity-check circuit and the
/// single-step gate under their respective noise.
#[derive(Debug, Clone)]
pub struct ComparisonReport<T: Real> {
    pub decomposed_trace: Vec<StepTrace<T>>,
    pub sspc_trace: Vec<StepTrace<T>>,
    pub decomposed: PauliErrorChannel<T>,
    pub sspc: PauliErrorChannel<T>,
    pub decomposed_p_identity: T,
    pub sspc_p_identity: T,
    /// sspc_p_identity / decomposed_p_identity; > 1 means the single-step
    /// gate keeps more of the state error-free.
    pub ratio: T,
}

/// Accumulates three-qubit noise over the four-layer decomposed parity check
/// (Hadamard on the ancilla, two CNOTs, Hadamard) against a single layer for
/// the single-step gate. An optional ancilla-only flip of the decomposed
/// spec's family models readout error; it appends a fifth (respectively
/// second) layer to both circuits and is excluded from the headline numbers
/// when `None`.
pub fn compare_decomposed_vs_sspc<T: Real>(
    decomposed_noise: &NoiseSpec<T>,
    sspc_noise: &NoiseSpec<T>,
    readout_flip: Option<T>,
) -> Result<ComparisonReport<T>> {
    let layer_noise = make_channel(decomposed_noise, 3)?;
    let mut decomposed_layers = ["HII", "CNOT01", "CNOT02", "HII"]
        .iter()
        .map(|name| Layer { name: (*name).to_string(), channel: layer_noise.clone() })
        .collect::<Vec<_>>();
    let mut sspc_layers =
        vec![Layer { name: "UXX".to_string(), channel: make_channel(sspc_noise, 3)? }];
    if let Some(q) = readout_flip {
        let ancilla_only = circuit::tensor_layer(&[
            single_qubit(decomposed_noise.model, q)?,
            PauliErrorChannel::identity(1),
            PauliErrorChannel::identity(1),
        ])?;
        for layers in [&mut decomposed_layers, &mut sspc_layers] {
            layers.push(Layer { name: "measII".to_string(), channel: ancilla_only.clone() });
        }
    }
    let run = |layers: Vec<Layer<T>>| -> Result<(Vec<StepTrace<T>>, PauliErrorChannel<T>)> {
        let circuit = Circuit::new(3, layers)?;
        let trace = circuit::per_step_trace(&circuit)
            .into_iter()
            .map(|(layer, p_identity)| StepTrace { layer, p_identity })
            .collect();
        Ok((trace, circuit::accumulate(&circuit)?))
    };
    let (decomposed_trace, decomposed) = run(decomposed_layers)?;
    let (sspc_trace, sspc) = run(sspc_layers)?;
    let decomposed_p_identity = decomposed.p_identity();
    let sspc_p_identity = sspc.p_identity();
    Ok(ComparisonReport {
        decomposed_trace,
        sspc_trace,
        decomposed,
        sspc,
        decomposed_p_identity,
        sspc_p_identity,
        ratio: sspc_p_identity / decomposed_p_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn families_have_expected_probability_vectors() {
        let p = 0.12;
        assert_eq!(
            single_qubit::<f64>(NoiseKind::PhaseFlip, p).unwrap().probs(),
            &[0.88, 0.0, 0.0, 0.12]
        );
        assert_eq!(
            single_qubit::<f64>(NoiseKind::BitFlip, p).unwrap().probs(),
            &[0.88, 0.12, 0.0, 0.0]
        );
        let depol = single_qubit::<f64>(NoiseKind::Depolarizing, p).unwrap();
        assert_relative_eq!(depol.probs()[1], 0.04, epsilon = 1e-15);
        assert_relative_eq!(depol.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(single_qubit::<f64>(NoiseKind::PhaseFlip, -0.1).is_err());
        assert!(single_qubit::<f64>(NoiseKind::PhaseFlip, 1.1).is_err());
    }

    #[test]
    fn avg_fidelity_matches_ptm_trace_oracle() {
        // oracle: F_pro = Tr(R)/4 from the explicitly built PTM, F_avg = (2 F_pro + 1)/3
        for model in [NoiseKind::PhaseFlip, NoiseKind::BitFlip, NoiseKind::Depolarizing] {
            for p in [0.0, 0.003, 0.1, 0.5] {
                let ch = single_qubit::<f64>(model, p).unwrap();
                let f_pro = ch.ptm().trace() / 4.0;
                let expect = (2.0 * f_pro + 1.0) / 3.0;
                assert_relative_eq!(ch.avg_gate_fidelity(), expect, epsilon = 1e-14);
                assert_relative_eq!(ch.avg_gate_fidelity(), 1.0 - 2.0 * p / 3.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn calibration_inverts_fidelity() {
        for model in [NoiseKind::PhaseFlip, NoiseKind::BitFlip, NoiseKind::Depolarizing] {
            for target in [1.0, 0.9943, 0.99, 0.97] {
                let p = calibrate_p::<f64>(target, model, 1).unwrap();
                let achieved = single_qubit(model, p).unwrap().avg_gate_fidelity();
                assert_relative_eq!(achieved, target, epsilon = 1e-9);
                assert_relative_eq!(p, 1.5 * (1.0 - target), epsilon = 1e-9);
            }
        }
        assert!(calibrate_p::<f64>(0.2, NoiseKind::PhaseFlip, 1).is_err());
    }

    #[test]
    fn three_qubit_calibration_matches_closed_form() {
        // per-qubit phase flip: F_avg = (8(1-p)^3 + 1)/9
        let p = calibrate_p::<f64>(0.99, NoiseKind::PhaseFlip, 3).unwrap();
        let expect = 1.0 - ((9.0_f64 * 0.99 - 1.0) / 8.0).powf(1.0 / 3.0);
        assert_relative_eq!(p, expect, epsilon = 1e-9);
        let achieved = uniform(NoiseKind::PhaseFlip, p, 3).unwrap().avg_gate_fidelity();
        assert_relative_eq!(achieved, 0.99, epsilon = 1e-9);
    }

    #[test]
    fn uniform_noise_is_a_product_distribution() {
        let p = 0.07;
        let one = single_qubit::<f64>(NoiseKind::Depolarizing, p).unwrap();
        let two = uniform::<f64>(NoiseKind::Depolarizing, p, 2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                // first factor is the most significant digit
                assert_relative_eq!(
                    two.probs()[4 * a + b],
                    one.probs()[a] * one.probs()[b],
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn correlated_specs_hit_single_strings() {
        let spec = NoiseSpec::correlated(NoiseKind::PhaseFlip, 0.2);
        let ch = make_channel::<f64>(&spec, 2).unwrap();
        let zz = PauliString::from_label("ZZ").unwrap();
        assert_relative_eq!(ch.p_identity(), 0.8, epsilon = 1e-15);
        assert_relative_eq!(ch.prob_of(&zz), 0.2, epsilon = 1e-15);

        let depol = make_channel::<f64>(&NoiseSpec::correlated(NoiseKind::Depolarizing, 0.3), 2)
            .unwrap();
        assert_relative_eq!(depol.p_identity(), 0.7, epsilon = 1e-15);
        assert_relative_eq!(depol.probs()[5], 0.3 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn comparison_matches_closed_forms() {
        let (p_dec, p_sspc) = (0.0085, 0.0329);
        let report = compare_decomposed_vs_sspc::<f64>(
            &NoiseSpec::per_qubit(NoiseKind::PhaseFlip, p_dec),
            &NoiseSpec::per_qubit(NoiseKind::PhaseFlip, p_sspc),
            None,
        )
        .unwrap();
        assert_eq!(report.decomposed_trace.len(), 4);
        assert_eq!(report.sspc_trace.len(), 1);
        // phase flips on one qubit over 4 layers: P(even count) = (1 + (1-2p)^4)/2
        let per_qubit = (1.0 + (1.0 - 2.0 * p_dec).powi(4)) / 2.0;
        assert_relative_eq!(report.decomposed_p_identity, per_qubit.powi(3), epsilon = 1e-13);
        assert_relative_eq!(report.sspc_p_identity, (1.0 - p_sspc).powi(3), epsilon = 1e-13);
        assert_relative_eq!(
            report.ratio,
            report.sspc_p_identity / report.decomposed_p_identity,
            epsilon = 1e-15
        );
        // accumulated channels agree with the trace endpoints
        assert_relative_eq!(
            report.decomposed.p_identity(),
            report.decomposed_trace.last().unwrap().p_identity,
            epsilon = 1e-12
        );
        // traces never increase
        for steps in [&report.decomposed_trace, &report.sspc_trace] {
            for pair in steps.windows(2) {
                assert!(pair[1].p_identity <= pair[0].p_identity + 1e-15);
            }
        }
    }

    #[test]
    fn noiseless_comparison_is_perfect() {
        let silent = NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.0);
        let report = compare_decomposed_vs_sspc::<f64>(&silent, &silent, None).unwrap();
        assert_relative_eq!(report.decomposed_p_identity, 1.0, epsilon = 1e-15);
        assert_relative_eq!(report.sspc_p_identity, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn matched_fidelity_favors_the_single_step_gate() {
        let spec = NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.00375);
        let report = compare_decomposed_vs_sspc::<f64>(&spec, &spec, None).unwrap();
        assert!(report.sspc_p_identity > report.decomposed_p_identity);
        assert!(report.ratio > 1.0);
    }

    #[test]
    fn readout_flip_appends_an_ancilla_layer() {
        let dec = NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.01);
        let ss = NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.03);
        let with = compare_decomposed_vs_sspc::<f64>(&dec, &ss, Some(0.02)).unwrap();
        assert_eq!(with.decomposed_trace.len(), 5);
        assert_eq!(with.sspc_trace.len(), 2);
        let base = compare_decomposed_vs_sspc::<f64>(&dec, &ss, None).unwrap();
        // a Z flip on the ancilla leaves X/Y strings alone, so the identity
        // probability drops by a factor strictly between 1-q and 1
        let ratio = with.sspc_p_identity / base.sspc_p_identity;
        assert!(ratio < 1.0 && ratio > 0.98);
    }
}
