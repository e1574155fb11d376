//! On-disk formats.
//!
//! Matrix files carry one channel representation as row-major [re, im] pairs
//! under a `kind` tag; readers verify the declared kind's structural
//! invariants before accepting the payload. Pauli channels serialize as a
//! label-to-probability map, circuits as named layers whose parts are inline
//! channels, noise specs, or references to channel files resolved relative to
//! the circuit file. Schedules and spectra additionally export as CSV for
//! plotting.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::Complex;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Rep};
use crate::circuit::{tensor_layer, Circuit, Layer};
use crate::noise::{make_channel, NoiseSpec};
use crate::pauli::PauliString;
use crate::projection::PauliErrorChannel;
use crate::spectrum::Spectrum;
use crate::spin::PulseSchedule;
use crate::{CMat, Error, RMat, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub kind: String,
    pub n_qubits: usize,
    pub data: MatrixData,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixData {
    Single(Vec<[f64; 2]>),
    Kraus(Vec<Vec<[f64; 2]>>),
}

fn dense(flat: &[[f64; 2]], dim: usize, what: &str) -> Result<CMat<f64>> {
    if flat.len() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "{what} needs {dim}x{dim} = {} entries, file has {}",
            dim * dim,
            flat.len()
        )));
    }
    let values: Vec<Complex<f64>> =
        flat.iter().map(|&[re, im]| Complex::new(re, im)).collect();
    Ok(CMat::<f64>::from_row_slice(dim, dim, &values))
}

fn flatten(m: &CMat<f64>) -> Vec<[f64; 2]> {
    m.row_iter()
        .flat_map(|row| row.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>())
        .collect()
}

fn flatten_real(m: &RMat<f64>) -> Vec<[f64; 2]> {
    m.row_iter()
        .flat_map(|row| row.iter().map(|&v| [v, 0.0]).collect::<Vec<_>>())
        .collect()
}

impl MatrixFile {
    pub fn from_channel(channel: &Channel<f64>) -> Self {
        let data = match channel {
            Channel::Ptm(m) => MatrixData::Single(flatten_real(m)),
            Channel::Chi(m) | Channel::Superop(m) | Channel::Unitary(m) => {
                MatrixData::Single(flatten(m))
            }
            Channel::Kraus(ops) => MatrixData::Kraus(ops.iter().map(flatten).collect()),
        };
        MatrixFile {
            kind: channel.rep().name().to_string(),
            n_qubits: channel.n_qubits(),
            data,
        }
    }

    /// Validates the declared kind's invariants (dimensions; PTM realness
    /// within 1e-10; unitarity and chi hermiticity within 1e-8) and builds
    /// the channel.
    pub fn to_channel(&self) -> Result<Channel<f64>> {
        let rep = Rep::from_name(&self.kind)?;
        if self.n_qubits == 0 || self.n_qubits > 3 {
            return Err(Error::InvalidInput(format!(
                "n_qubits must be 1..=3, got {}",
                self.n_qubits
            )));
        }
        let small = 1usize << self.n_qubits;
        let big = small * small;
        match (&self.data, rep) {
            (MatrixData::Kraus(list), Rep::Kraus) => {
                if list.is_empty() {
                    return Err(Error::InvalidInput("empty Kraus list".into()));
                }
                let ops = list
                    .iter()
                    .map(|flat| dense(flat, small, "each Kraus operator"))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Channel::Kraus(ops))
            }
            (MatrixData::Kraus(_), _) => Err(Error::InvalidInput(format!(
                "kind '{}' takes a single matrix, file holds a list",
                self.kind
            ))),
            (MatrixData::Single(_), Rep::Kraus) => Err(Error::InvalidInput(
                "kind 'kraus' takes a list of matrices".into(),
            )),
            (MatrixData::Single(flat), Rep::Unitary) => {
                let m = dense(flat, small, "a unitary")?;
                let defect = (m.adjoint() * &m - CMat::<f64>::identity(small, small))
                    .map(|v| v.norm())
                    .max();
                if defect > 1e-8 {
                    return Err(Error::InvalidInput(format!(
                        "matrix declared unitary has max |U\u{2020}U - I| = {defect:.3e}"
                    )));
                }
                Ok(Channel::Unitary(m))
            }
            (MatrixData::Single(flat), Rep::Ptm) => {
                let m = dense(flat, big, "a PTM")?;
                let imag = m.map(|v| v.im.abs()).max();
                if imag > 1e-10 {
                    return Err(Error::InvalidInput(format!(
                        "matrix declared ptm has imaginary parts up to {imag:.3e}"
                    )));
                }
                Ok(Channel::Ptm(m.map(|v| v.re)))
            }
            (MatrixData::Single(flat), Rep::Chi) => {
                let m = dense(flat, big, "a chi matrix")?;
                let defect = (&m - m.adjoint()).map(|v| v.norm()).max();
                if defect > 1e-8 {
                    return Err(Error::InvalidInput(format!(
                        "matrix declared chi is not Hermitian (defect {defect:.3e})"
                    )));
                }
                Ok(Channel::Chi(m))
            }
            (MatrixData::Single(flat), Rep::Superop) => {
                Ok(Channel::Superop(dense(flat, big, "a superoperator")?))
            }
        }
    }
}

/// Pauli channel file: probabilities keyed by label, canonical (index) order,
/// entries below 1e-15 omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliChannelFile {
    pub n_qubits: usize,
    pub probs: BTreeMap<String, f64>,
}

impl PauliChannelFile {
    pub fn from_channel(channel: &PauliErrorChannel<f64>) -> Self {
        PauliChannelFile {
            n_qubits: channel.n_qubits(),
            probs: channel.labeled().filter(|&(_, p)| p >= 1e-15).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<PauliErrorChannel<f64>> {
        let mut probs = vec![0.0; 1usize << (2 * self.n_qubits)];
        for (label, &p) in &self.probs {
            let pauli = PauliString::from_label(label)?;
            if pauli.n_qubits() != self.n_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "label '{label}' does not act on {} qubits",
                    self.n_qubits
                )));
            }
            probs[pauli.index()] = p;
        }
        PauliErrorChannel::new(self.n_qubits, probs)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n_qubits: usize,
    pub layers: Vec<LayerFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerFile {
    pub name: String,
    pub parts: Vec<LayerPart>,
}

/// One tensor factor of a layer, leftmost part on the most significant
/// qubits. Untagged: a bare string is a channel-file reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerPart {
    File(String),
    Noise {
        noise: NoiseSpec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        qubits: Option<usize>,
    },
    Inline(PauliChannelFile),
}

impl CircuitFile {
    /// Builds the circuit, loading file references relative to `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<Circuit<f64>> {
        let mut layers = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            if layer.parts.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "layer '{}' has no parts",
                    layer.name
                )));
            }
            let mut parts = Vec::with_capacity(layer.parts.len());
            for part in &layer.parts {
                parts.push(match part {
                    LayerPart::File(rel) => read_pauli_channel(base_dir.join(rel))?,
                    LayerPart::Noise { noise, qubits } => {
                        let n = match qubits {
                            Some(n) => *n,
                            // a lone noise part fills the whole register
                            None if layer.parts.len() == 1 => self.n_qubits,
                            None => {
                                return Err(Error::InvalidInput(format!(
                                    "layer '{}': a noise part sharing a layer needs an explicit qubit count",
                                    layer.name
                                )))
                            }
                        };
                        make_channel(noise, n)?
                    }
                    LayerPart::Inline(file) => file.to_channel()?,
                });
            }
            let channel = if parts.len() == 1 {
                parts.pop().expect("one part")
            } else {
                tensor_layer(&parts)?
            };
            layers.push(Layer { name: layer.name.clone(), channel });
        }
        Circuit::new(self.n_qubits, layers)
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_channel(path: impl AsRef<Path>) -> Result<Channel<f64>> {
    read_json::<MatrixFile>(path)?.to_channel()
}

pub fn write_channel(path: impl AsRef<Path>, channel: &Channel<f64>) -> Result<()> {
    write_json(path, &MatrixFile::from_channel(channel))
}

pub fn read_pauli_channel(path: impl AsRef<Path>) -> Result<PauliErrorChannel<f64>> {
    read_json::<PauliChannelFile>(path)?.to_channel()
}

pub fn write_pauli_channel(
    path: impl AsRef<Path>,
    channel: &PauliErrorChannel<f64>,
) -> Result<()> {
    write_json(path, &PauliChannelFile::from_channel(channel))
}

pub fn read_circuit(path: impl AsRef<Path>) -> Result<Circuit<f64>> {
    let path = path.as_ref();
    let file: CircuitFile = read_json(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    file.resolve(base)
}

/// Columns: slot index, slot start time in ns, one amplitude column per
/// control channel labeled by the channel.
pub fn write_schedule_csv(path: impl AsRef<Path>, schedule: &PulseSchedule<f64>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["slot".to_string(), "time_ns".to_string()];
    header.extend(schedule.channels.iter().map(|c| c.label.clone()));
    writer.write_record(&header)?;
    for j in 0..schedule.n_slots {
        let mut record = vec![j.to_string(), (j as f64 * schedule.dt_ns).to_string()];
        record.extend(schedule.channels.iter().map(|c| c.amplitudes[j].to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_spectrum_csv(path: impl AsRef<Path>, spectrum: &Spectrum<f64>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["freq_mhz", "magnitude"])?;
    for (f, m) in spectrum.freq_mhz.iter().zip(&spectrum.magnitude) {
        writer.write_record([f.to_string(), m.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::test_support::random_unitary;
    use crate::noise::{NoiseKind, NoiseSpec};
    use approx::assert_relative_eq;

    #[test]
    fn matrix_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let u = random_unitary(4, 21);
        let path = dir.path().join("u.json");
        write_channel(&path, &Channel::Unitary(u.clone())).unwrap();
        let Channel::Unitary(back) = read_channel(&path).unwrap() else {
            panic!("kind changed in flight")
        };
        assert_relative_eq!((back - u).map(|v| v.norm()).max(), 0.0, epsilon = 1e-12);

        let ops = crate::channel::test_support::random_kraus(1, 3, 9);
        let path = dir.path().join("k.json");
        write_channel(&path, &Channel::Kraus(ops.clone())).unwrap();
        let Channel::Kraus(back) = read_channel(&path).unwrap() else {
            panic!("kind changed in flight")
        };
        assert_eq!(back.len(), 3);
        for (a, b) in back.iter().zip(&ops) {
            assert_relative_eq!((a - b).map(|v| v.norm()).max(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn mistyped_kinds_are_rejected() {
        // a 1-qubit PTM has 16 entries; as a 1-qubit unitary it is the wrong shape
        let ptm = crate::noise::single_qubit(NoiseKind::PhaseFlip, 0.1).unwrap().ptm();
        let mut file = MatrixFile::from_channel(&Channel::Ptm(ptm));
        file.kind = "unitary".into();
        assert!(matches!(file.to_channel(), Err(Error::DimensionMismatch(_))));

        // right shape, wrong structure
        let not_unitary =
            MatrixData::Single(vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.3, 0.0]]);
        let file = MatrixFile { kind: "unitary".into(), n_qubits: 1, data: not_unitary };
        assert!(matches!(file.to_channel(), Err(Error::InvalidInput(_))));

        let complex_ptm = MatrixFile {
            kind: "ptm".into(),
            n_qubits: 1,
            data: MatrixData::Single(vec![[0.0, 0.5]; 16]),
        };
        assert!(matches!(complex_ptm.to_channel(), Err(Error::InvalidInput(_))));

        let file = MatrixFile {
            kind: "dense".into(),
            n_qubits: 1,
            data: MatrixData::Single(vec![[0.0, 0.0]; 4]),
        };
        assert!(matches!(file.to_channel(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn pauli_channel_files_round_trip_and_drop_dust() {
        let dir = tempfile::tempdir().unwrap();
        let mut probs = vec![0.0; 16];
        probs[0] = 0.97;
        probs[3] = 0.03 - 1e-16;
        probs[5] = 1e-16;
        let channel = PauliErrorChannel::new(2, probs).unwrap();
        let file = PauliChannelFile::from_channel(&channel);
        assert_eq!(file.probs.len(), 2, "sub-1e-15 entries must be omitted");
        let path = dir.path().join("pc.json");
        write_pauli_channel(&path, &channel).unwrap();
        let back = read_pauli_channel(&path).unwrap();
        assert_relative_eq!(back.p_identity(), 0.97, epsilon = 1e-12);
        assert_relative_eq!(
            back.prob_of(&PauliString::from_label("IZ").unwrap()),
            0.03,
            epsilon = 1e-12
        );
    }

    #[test]
    fn bad_pauli_labels_are_rejected() {
        let file = PauliChannelFile {
            n_qubits: 1,
            probs: [("Q".to_string(), 1.0)].into_iter().collect(),
        };
        assert!(file.to_channel().is_err());
        let file = PauliChannelFile {
            n_qubits: 2,
            probs: [("X".to_string(), 1.0)].into_iter().collect(),
        };
        assert!(matches!(file.to_channel(), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn circuit_files_resolve_every_part_kind() {
        let dir = tempfile::tempdir().unwrap();
        let z_heavy = crate::noise::single_qubit(NoiseKind::PhaseFlip, 0.2).unwrap();
        write_pauli_channel(dir.path().join("z.json"), &z_heavy).unwrap();

        let inline = PauliChannelFile::from_channel(
            &crate::noise::single_qubit(NoiseKind::BitFlip, 0.1).unwrap(),
        );
        let circuit_json = CircuitFile {
            n_qubits: 2,
            layers: vec![
                LayerFile {
                    name: "mixed".into(),
                    parts: vec![LayerPart::File("z.json".into()), LayerPart::Inline(inline)],
                },
                LayerFile {
                    name: "uniform".into(),
                    parts: vec![LayerPart::Noise {
                        noise: NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.05),
                        qubits: None,
                    }],
                },
            ],
        };
        let path = dir.path().join("circuit.json");
        write_json(&path, &circuit_json).unwrap();
        let circuit = read_circuit(&path).unwrap();
        assert_eq!(circuit.layers.len(), 2);

        let expected_first = tensor_layer(&[
            z_heavy,
            crate::noise::single_qubit(NoiseKind::BitFlip, 0.1).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(
            circuit.layers[0].channel.p_identity(),
            expected_first.p_identity(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            circuit.layers[1].channel.p_identity(),
            0.95 * 0.95,
            epsilon = 1e-12
        );

        // a shared-layer noise part with no qubit count is ambiguous
        let ambiguous = CircuitFile {
            n_qubits: 2,
            layers: vec![LayerFile {
                name: "bad".into(),
                parts: vec![
                    LayerPart::Noise {
                        noise: NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.05),
                        qubits: None,
                    },
                    LayerPart::Noise {
                        noise: NoiseSpec::per_qubit(NoiseKind::PhaseFlip, 0.05),
                        qubits: None,
                    },
                ],
            }],
        };
        assert!(ambiguous.resolve(dir.path()).is_err());
    }

    #[test]
    fn schedule_and_spectrum_csv_exports() {
        use crate::spin::ControlChannel;
        let dir = tempfile::tempdir().unwrap();
        let schedule = PulseSchedule {
            n_slots: 16,
            dt_ns: 10.0,
            channels: vec![
                ControlChannel {
                    label: "a".into(),
                    carrier_ghz: None,
                    amplitudes: (0..16).map(|j| j as f64 * 0.01).collect(),
                },
                ControlChannel {
                    label: "b".into(),
                    carrier_ghz: Some(0.02),
                    amplitudes: vec![0.5; 16],
                },
            ],
        };
        let path = dir.path().join("schedule.csv");
        write_schedule_csv(&path, &schedule).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "slot,time_ns,a,b");
        assert_eq!(lines[1], "0,0,0,0.5");
        assert_eq!(lines.len(), 17);

        let spectrum = crate::spectrum::pulse_spectrum(&schedule).unwrap();
        let path = dir.path().join("spectrum.csv");
        write_spectrum_csv(&path, &spectrum).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("freq_mhz,magnitude\n0,"));
        assert_eq!(text.lines().count(), spectrum.freq_mhz.len() + 1);
    }
}
