//! Two-nuclei, one-electron spin system: Hamiltonians, control operators,
//! transition analysis, and piecewise-constant propagation.
//!
//! Conventions: Hilbert space ordering electron ⊗ nucleus1 ⊗ nucleus2 with
//! the electron the most significant qubit (it doubles as the parity-check
//! ancilla). |0> is spin up. All Hamiltonians are in ordinary frequency
//! (MHz), times in ns, and evolution is exp(-i·2π·H·t); an MHz·ns product
//! therefore carries a factor 1e-3. Spin operators are half Paulis.
//! Gyromagnetic ratios enter by magnitude; the sign convention is absorbed
//! into the explicit minus signs of the Hamiltonian terms.

use nalgebra::{Complex, Normed};
use serde::{Deserialize, Serialize};

use crate::{real, CMat, Error, Real, Result};

/// Physical parameters of the spin system.
///
/// Units: `gamma_e` GHz/T, `gamma_n` MHz/T, `b0` and `b1_max` tesla,
/// `a1`/`a2` MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SpinSystemSpec<T: Real> {
    pub gamma_e: T,
    pub gamma_n: T,
    pub b0: T,
    pub a1: T,
    pub a2: T,
    pub b1_max: T,
}

impl<T: Real> SpinSystemSpec<T> {
    /// Desk-scale system: electron frequencies scaled down a thousandfold and
    /// hyperfine couplings tenfold, so 10 ns slots resolve every line and a
    /// laptop can run the optimizer. Control bound loosened to keep Rabi
    /// periods well inside microsecond pulses.
    pub fn desk() -> Self {
        SpinSystemSpec {
            gamma_e: real(0.02797),
            gamma_n: real(17.23),
            b0: real(1.33),
            a1: real(9.5),
            a2: real(0.9),
            b1_max: real(0.04),
        }
    }

    /// Published lab-scale system. Propagating this faithfully needs ~10 ps
    /// slots (hundreds of thousands per pulse): HPC territory, kept for
    /// reference and spectroscopy arithmetic.
    pub fn lab() -> Self {
        SpinSystemSpec {
            gamma_e: real(27.97),
            gamma_n: real(17.23),
            b0: real(1.33),
            a1: real(95.0),
            a2: real(9.0),
            b1_max: real(0.001),
        }
    }

    /// |gamma_e| in MHz/T.
    pub fn gamma_e_mhz_per_t(&self) -> T {
        self.gamma_e.abs() * real::<T>(1000.0)
    }

    /// |gamma_n| in MHz/T.
    pub fn gamma_n_mhz_per_t(&self) -> T {
        self.gamma_n.abs()
    }

    /// Electron Zeeman splitting |gamma_e|·B0 in MHz.
    pub fn electron_zeeman_mhz(&self) -> T {
        self.gamma_e_mhz_per_t() * self.b0
    }

    /// Nuclear Zeeman splitting |gamma_n|·B0 in MHz.
    pub fn nuclear_zeeman_mhz(&self) -> T {
        self.gamma_n_mhz_per_t() * self.b0
    }

    /// A1 + A2 + nuclear Zeeman: shows up in pulse spectra without being an
    /// eigenvalue gap of any single-flip transition.
    pub fn combination_line_mhz(&self) -> T {
        self.a1 + self.a2 + self.nuclear_zeeman_mhz()
    }

    /// Hard invariants error out; a weakly secular regime (electron Zeeman
    /// not well above the hyperfine couplings) only warns.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.b0 <= T::zero() {
            return Err(Error::InvalidInput("b0 must be positive".into()));
        }
        if self.b1_max <= T::zero() {
            return Err(Error::InvalidInput("b1_max must be positive".into()));
        }
        let mut warnings = Vec::new();
        let coupling = self.a1.abs().max(self.a2.abs());
        if self.electron_zeeman_mhz() < real::<T>(3.0) * coupling {
            warnings.push(format!(
                "electron Zeeman {:.4} MHz is not well above the hyperfine couplings (max {:.4} MHz); secular approximations are unreliable",
                self.electron_zeeman_mhz().to_f64().unwrap_or(f64::NAN),
                coupling.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(warnings)
    }
}

/// Half-Pauli spin operators (Sx, Sy, Sz) on one spin.
fn half_paulis<T: Real>() -> [CMat<T>; 3] {
    let half = Complex::new(real::<T>(0.5), T::zero());
    [1u8, 2, 3].map(|digit| crate::pauli::sigma::<T>(digit).map(|x| x * half))
}

/// Embeds a single-spin operator at `slot` (0 = electron, most significant).
fn embed<T: Real>(op: &CMat<T>, slot: usize) -> CMat<T> {
    let mut out = CMat::<T>::identity(1, 1);
    for s in 0..3 {
        let factor = if s == slot { op.clone() } else { CMat::<T>::identity(2, 2) };
        out = out.kronecker(&factor);
    }
    out
}

/// The three axis operators of one spin, embedded in the 8-dimensional space.
fn spin_ops<T: Real>(slot: usize) -> [CMat<T>; 3] {
    half_paulis::<T>().map(|op| embed(&op, slot))
}

/// Laboratory-frame drift Hamiltonian (MHz, Hermitian):
/// H = -γeB0·Sz - γnB0·(I1z + I2z) + A1·S·I1 + A2·S·I2.
pub fn drift_hamiltonian<T: Real>(spec: &SpinSystemSpec<T>) -> CMat<T> {
    let e = spin_ops::<T>(0);
    let n1 = spin_ops::<T>(1);
    let n2 = spin_ops::<T>(2);
    let ge = Complex::new(-spec.electron_zeeman_mhz(), T::zero());
    let gn = Complex::new(-spec.nuclear_zeeman_mhz(), T::zero());
    let mut h = e[2].map(|x| x * ge) + (&n1[2] + &n2[2]).map(|x| x * gn);
    for axis in 0..3 {
        let c1 = Complex::new(spec.a1, T::zero());
        let c2 = Complex::new(spec.a2, T::zero());
        h += (&e[axis] * &n1[axis]).map(|x| x * c1) + (&e[axis] * &n2[axis]).map(|x| x * c2);
    }
    h
}

/// Ising truncation of the drift: only Sz·Iz hyperfine terms survive, so the
/// Hamiltonian is diagonal and each coupling gets an independent clock.
pub fn ising_hamiltonian<T: Real>(spec: &SpinSystemSpec<T>) -> CMat<T> {
    let e = spin_ops::<T>(0);
    let n1 = spin_ops::<T>(1);
    let n2 = spin_ops::<T>(2);
    let ge = Complex::new(-spec.electron_zeeman_mhz(), T::zero());
    let gn = Complex::new(-spec.nuclear_zeeman_mhz(), T::zero());
    let c1 = Complex::new(spec.a1, T::zero());
    let c2 = Complex::new(spec.a2, T::zero());
    e[2].map(|x| x * ge)
        + (&n1[2] + &n2[2]).map(|x| x * gn)
        + (&e[2] * &n1[2]).map(|x| x * c1)
        + (&e[2] * &n2[2]).map(|x| x * c2)
}

/// One drivable control: a Hermitian operator in MHz per tesla, optionally
/// tied to a carrier. The slot amplitude (tesla) times the sampled carrier
/// factor times the matrix is the control's Hamiltonian contribution.
#[derive(Debug, Clone)]
pub struct Control<T: Real> {
    pub label: String,
    pub matrix: CMat<T>,
    /// Carrier frequency in GHz (so carrier·t_ns counts cycles directly);
    /// `None` means a baseband control whose amplitude is the waveform.
    pub carrier_ghz: Option<T>,
}

/// Transverse drive operator along `axis` (0 = x, 1 = y) coupling the shared
/// field to every spin at its own gyromagnetic ratio:
/// -γe·S_axis - γn·(I1_axis + I2_axis).
fn transverse_operator<T: Real>(spec: &SpinSystemSpec<T>, axis: usize) -> CMat<T> {
    let ge = Complex::new(-spec.gamma_e_mhz_per_t(), T::zero());
    let gn = Complex::new(-spec.gamma_n_mhz_per_t(), T::zero());
    spin_ops::<T>(0)[axis].map(|x| x * ge)
        + (&spin_ops::<T>(1)[axis] + &spin_ops::<T>(2)[axis]).map(|x| x * gn)
}

/// The controls GRAPE may drive.
///
/// Non-modulated: four baseband envelopes, electron and nuclei separately
/// along x and y. Modulated: one combined transverse operator per spatial
/// axis per single-flip line of the drift, with the carrier pinned to that
/// line; the x/y pair at each line spans both rotating-frame quadratures.
pub fn control_operators<T: Real>(spec: &SpinSystemSpec<T>, modulated: bool) -> Result<Vec<Control<T>>> {
    let e = spin_ops::<T>(0);
    let n1 = spin_ops::<T>(1);
    let n2 = spin_ops::<T>(2);
    if !modulated {
        let ge = Complex::new(-spec.gamma_e_mhz_per_t(), T::zero());
        let gn = Complex::new(-spec.gamma_n_mhz_per_t(), T::zero());
        let mut out = Vec::with_capacity(4);
        for (axis, axis_name) in [(0usize, "x"), (1, "y")] {
            out.push(Control {
                label: format!("electron_{axis_name}"),
                matrix: e[axis].map(|x| x * ge),
                carrier_ghz: None,
            });
            out.push(Control {
                label: format!("nuclear_{axis_name}"),
                matrix: (&n1[axis] + &n2[axis]).map(|x| x * gn),
                carrier_ghz: None,
            });
        }
        return Ok(out);
    }
    let lines = single_flip_lines(spec)?;
    let mut out = Vec::with_capacity(2 * lines.len());
    for line in lines {
        for (axis, axis_name) in [(0usize, "x"), (1, "y")] {
            out.push(Control {
                label: format!("{axis_name}@{:.4}MHz", line.to_f64().unwrap_or(f64::NAN)),
                matrix: transverse_operator(spec, axis),
                carrier_ghz: Some(line / real::<T>(1000.0)),
            });
        }
    }
    Ok(out)
}

/// An eigenvalue gap of a Hamiltonian, tagged with how strongly each spin's
/// raising operator connects the two eigenstates.
#[derive(Debug, Clone, Copy)]
pub struct Transition<T: Real> {
    /// Eigenstate indices in ascending-energy order.
    pub lower: usize,
    pub upper: usize,
    pub frequency_mhz: T,
    pub electron_overlap: T,
    pub nucleus1_overlap: T,
    pub nucleus2_overlap: T,
}

/// Matrix-element magnitude above which a transition counts as a driveable
/// single-spin flip. Half the maximal element of a raising operator, so
/// dressed main lines pass while weakly allowed satellites do not.
pub const SINGLE_FLIP_OVERLAP_THRESHOLD: f64 = 0.5;

impl<T: Real> Transition<T> {
    pub fn is_single_flip(&self) -> bool {
        let thr = real::<T>(SINGLE_FLIP_OVERLAP_THRESHOLD);
        self.electron_overlap > thr || self.nucleus1_overlap > thr || self.nucleus2_overlap > thr
    }

    /// Which spin's raising operator dominates, if the transition is a
    /// single flip at all.
    pub fn dominant(&self) -> Option<&'static str> {
        if !self.is_single_flip() {
            return None;
        }
        let names = ["electron", "nucleus1", "nucleus2"];
        let overlaps = [self.electron_overlap, self.nucleus1_overlap, self.nucleus2_overlap];
        let mut best = 0;
        for i in 1..3 {
            if overlaps[i] > overlaps[best] {
                best = i;
            }
        }
        Some(names[best])
    }
}

/// All 28 pairwise eigenvalue gaps of an 8-dimensional Hermitian Hamiltonian,
/// sorted by frequency, with raising-operator overlap tags.
pub fn transition_frequencies<T: Real>(h: &CMat<T>) -> Result<Vec<Transition<T>>> {
    if h.nrows() != 8 || h.ncols() != 8 {
        return Err(Error::DimensionMismatch(format!(
            "transition analysis expects an 8x8 Hamiltonian, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let deviation = (h - h.adjoint()).map(|x| x.norm()).max();
    if deviation > real::<T>(1e-9) {
        return Err(Error::InvalidInput(format!(
            "Hamiltonian is not Hermitian (max |H - H†| = {:.3e})",
            deviation.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    // ascending eigenvalue order
    let mut order: Vec<usize> = (0..8).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let raising: Vec<CMat<T>> = (0..3)
        .map(|slot| {
            let ops = spin_ops::<T>(slot);
            &ops[0] + ops[1].map(|x| x * Complex::new(T::zero(), T::one()))
        })
        .collect();
    let mut out = Vec::with_capacity(28);
    for i in 0..8 {
        for j in (i + 1)..8 {
            let (lo, hi) = (order[i], order[j]);
            let vl = eig.eigenvectors.column(lo);
            let vh = eig.eigenvectors.column(hi);
            let overlap = |op: &CMat<T>| -> T {
                let up = (vh.adjoint() * op * vl)[(0, 0)].norm();
                let down = (vl.adjoint() * op * vh)[(0, 0)].norm();
                up.max(down)
            };
            out.push(Transition {
                lower: i,
                upper: j,
                frequency_mhz: eig.eigenvalues[hi] - eig.eigenvalues[lo],
                electron_overlap: overlap(&raising[0]),
                nucleus1_overlap: overlap(&raising[1]),
                nucleus2_overlap: overlap(&raising[2]),
            });
        }
    }
    out.sort_by(|a, b| {
        a.frequency_mhz
            .partial_cmp(&b.frequency_mhz)
            .unwrap()
            .then(a.lower.cmp(&b.lower))
            .then(a.upper.cmp(&b.upper))
    });
    Ok(out)
}

/// Ascending single-flip line frequencies (MHz) of the drift Hamiltonian,
/// with near-duplicates (within 1e-9 MHz) merged.
pub fn single_flip_lines<T: Real>(spec: &SpinSystemSpec<T>) -> Result<Vec<T>> {
    let transitions = transition_frequencies(&drift_hamiltonian(spec))?;
    let mut lines: Vec<T> = transitions
        .iter()
        .filter(|t| t.is_single_flip())
        .map(|t| t.frequency_mhz)
        .collect();
    lines.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lines.dedup_by(|a, b| (*a - *b).abs() < real::<T>(1e-9));
    Ok(lines)
}

/// One control's slot amplitudes (tesla) plus the carrier it rides on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ControlChannel<T: Real> {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_ghz: Option<T>,
    pub amplitudes: Vec<T>,
}

/// A piecewise-constant pulse: `n_slots` slots of `dt_ns` each, one amplitude
/// sequence per control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PulseSchedule<T: Real> {
    pub n_slots: usize,
    pub dt_ns: T,
    pub channels: Vec<ControlChannel<T>>,
}

impl<T: Real> PulseSchedule<T> {
    /// All-zero schedule over the given controls.
    pub fn zeros(controls: &[Control<T>], n_slots: usize, dt_ns: T) -> Self {
        PulseSchedule {
            n_slots,
            dt_ns,
            channels: controls
                .iter()
                .map(|c| ControlChannel {
                    label: c.label.clone(),
                    carrier_ghz: c.carrier_ghz,
                    amplitudes: vec![T::zero(); n_slots],
                })
                .collect(),
        }
    }

    pub fn total_time_ns(&self) -> T {
        real::<T>(self.n_slots as f64) * self.dt_ns
    }

    pub fn max_amplitude(&self) -> T {
        self.channels
            .iter()
            .flat_map(|c| c.amplitudes.iter())
            .fold(T::zero(), |acc, &a| acc.max(a.abs()))
    }

    /// Structural checks, plus the amplitude bound when one is given.
    pub fn validate(&self, b1_max: Option<T>) -> Result<()> {
        if self.n_slots == 0 || self.dt_ns <= T::zero() {
            return Err(Error::InvalidInput("schedule needs n_slots > 0 and dt_ns > 0".into()));
        }
        for channel in &self.channels {
            if channel.amplitudes.len() != self.n_slots {
                return Err(Error::DimensionMismatch(format!(
                    "channel '{}' has {} amplitudes for {} slots",
                    channel.label,
                    channel.amplitudes.len(),
                    self.n_slots
                )));
            }
        }
        if let Some(bound) = b1_max {
            let max = self.max_amplitude();
            if max > bound + real::<T>(1e-12) {
                return Err(Error::InvalidInput(format!(
                    "amplitude {:.6e} T exceeds the b1_max bound {:.6e} T",
                    max.to_f64().unwrap_or(f64::NAN),
                    bound.to_f64().unwrap_or(f64::NAN)
                )));
            }
        }
        Ok(())
    }
}

/// Carrier factor at time `t_ns`: cos(2π·f·t) for a carrier, 1 for baseband.
pub fn carrier_factor<T: Real>(carrier_ghz: Option<T>, t_ns: T) -> T {
    match carrier_ghz {
        Some(f) => (real::<T>(2.0) * T::pi() * f * t_ns).cos(),
        None => T::one(),
    }
}

/// Midpoint of slot `j`, the time at which carriers are sampled.
pub fn slot_midpoint_ns<T: Real>(dt_ns: T, j: usize) -> T {
    (real::<T>(j as f64) + real::<T>(0.5)) * dt_ns
}

/// The summed physical drive waveform at slot midpoints: every channel's
/// amplitude times its sampled carrier, added up. For baseband schedules this
/// is just the sum of the envelopes.
pub fn waveform<T: Real>(schedule: &PulseSchedule<T>) -> Vec<T> {
    (0..schedule.n_slots)
        .map(|j| {
            let t = slot_midpoint_ns(schedule.dt_ns, j);
            schedule
                .channels
                .iter()
                .fold(T::zero(), |acc, c| acc + c.amplitudes[j] * carrier_factor(c.carrier_ghz, t))
        })
        .collect()
}

/// exp(-i·scale·H) for Hermitian H, exact via eigendecomposition.
pub(crate) fn expi_hermitian<T: Real>(h: &CMat<T>, scale: T) -> CMat<T> {
    let half = Complex::new(real::<T>(0.5), T::zero());
    let sym = (h + h.adjoint()).map(|x| x * half);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let d = h.nrows();
    let mut phases = CMat::<T>::zeros(d, d);
    for i in 0..d {
        let angle = -scale * eig.eigenvalues[i];
        phases[(i, i)] = crate::cis(angle);
    }
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Time-ordered propagator of drift plus scheduled controls:
/// U = Π_j exp(-i·2π·(H_drift + Σ_k u_k[j]·carrier_k(t_j)·C_k)·dt), slot 0
/// rightmost. Slot exponentials are exact, so the only model error is the
/// piecewise-constant discretization itself.
pub fn propagate<T: Real>(
    drift: &CMat<T>,
    controls: &[Control<T>],
    schedule: &PulseSchedule<T>,
) -> Result<CMat<T>> {
    schedule.validate(None)?;
    if controls.len() != schedule.channels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} control operators for {} schedule channels",
            controls.len(),
            schedule.channels.len()
        )));
    }
    let d = drift.nrows();
    for c in controls {
        if c.matrix.nrows() != d || c.matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "control '{}' is {}x{}, drift is {d}x{d}",
                c.label,
                c.matrix.nrows(),
                c.matrix.ncols()
            )));
        }
    }
    let angle_scale = real::<T>(2.0) * T::pi() * schedule.dt_ns * real::<T>(1e-3);
    let mut u = CMat::<T>::identity(d, d);
    for j in 0..schedule.n_slots {
        let t = slot_midpoint_ns(schedule.dt_ns, j);
        let mut h = drift.clone();
        for (control, channel) in controls.iter().zip(&schedule.channels) {
            let weight = channel.amplitudes[j] * carrier_factor(control.carrier_ghz, t);
            if weight != T::zero() {
                let w = Complex::new(weight, T::zero());
                h += control.matrix.map(|x| x * w);
            }
        }
        u = expi_hermitian(&h, angle_scale) * u;
    }
    Ok(u)
}
