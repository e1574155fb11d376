//! Discrete spectrum of a pulse schedule's summed waveform.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::spin::{waveform, PulseSchedule};
use crate::{real, Error, Real, Result};

/// One-sided magnitude spectrum. Bin b holds frequency b/(N·dt) for
/// b = 0..=N/2; magnitudes are |X_b|/N, so a unit cosine at an exact bin
/// frequency shows up as 0.5.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real> {
    pub freq_mhz: Vec<T>,
    pub magnitude: Vec<T>,
    pub resolution_mhz: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T: Real> {
    pub freq_mhz: T,
    pub magnitude: T,
    pub bin: usize,
}

/// FFT of the summed waveform sampled at slot midpoints. Needs at least 16
/// slots for the noise statistics in `peaks` to mean anything.
pub fn pulse_spectrum<T: Real>(schedule: &PulseSchedule<T>) -> Result<Spectrum<T>> {
    if schedule.n_slots < 16 {
        return Err(Error::InvalidInput(format!(
            "spectrum needs at least 16 slots, got {}",
            schedule.n_slots
        )));
    }
    schedule.validate(None)?;
    let samples = waveform(schedule);
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .map(|v| Complex64::new(v.to_f64().unwrap_or(0.0), 0.0))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let dt = schedule.dt_ns.to_f64().unwrap_or(f64::NAN);
    let resolution = 1000.0 / (n as f64 * dt);
    let half = n / 2;
    let mut freq_mhz = Vec::with_capacity(half + 1);
    let mut magnitude = Vec::with_capacity(half + 1);
    for (b, value) in buf.iter().enumerate().take(half + 1) {
        freq_mhz.push(real::<T>(b as f64 * resolution));
        magnitude.push(real::<T>(value.norm() / n as f64));
    }
    Ok(Spectrum { freq_mhz, magnitude, resolution_mhz: real(resolution) })
}

impl<T: Real> Spectrum<T> {
    /// Strict interior local maxima rising above mean + 5·stddev of the
    /// whole magnitude spectrum. DC and Nyquist can never qualify.
    pub fn peaks(&self) -> Vec<Peak<T>> {
        let n = self.magnitude.len();
        if n < 3 {
            return Vec::new();
        }
        let count = real::<T>(n as f64);
        let mean = self.magnitude.iter().fold(T::zero(), |a, &m| a + m) / count;
        let var = self
            .magnitude
            .iter()
            .fold(T::zero(), |a, &m| a + (m - mean) * (m - mean))
            / count;
        let threshold = mean + real::<T>(5.0) * var.sqrt();
        (1..n - 1)
            .filter(|&b| {
                self.magnitude[b] > threshold
                    && self.magnitude[b] > self.magnitude[b - 1]
                    && self.magnitude[b] > self.magnitude[b + 1]
            })
            .map(|b| Peak { freq_mhz: self.freq_mhz[b], magnitude: self.magnitude[b], bin: b })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{ControlChannel, PulseSchedule};
    use approx::assert_relative_eq;

    fn baseband_schedule(amplitudes: Vec<f64>, dt_ns: f64) -> PulseSchedule<f64> {
        PulseSchedule {
            n_slots: amplitudes.len(),
            dt_ns,
            channels: vec![ControlChannel { label: "w".into(), carrier_ghz: None, amplitudes }],
        }
    }

    #[test]
    fn pure_cosine_lands_in_one_bin() {
        let n = 256;
        let dt = 10.0;
        // 20 cycles over the record puts the tone exactly on bin 20
        let f_mhz = 20.0 * 1000.0 / (n as f64 * dt);
        let amps: Vec<f64> = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) * dt;
                0.8 * (2.0 * std::f64::consts::PI * f_mhz * 1e-3 * t).cos()
            })
            .collect();
        let spectrum = pulse_spectrum(&baseband_schedule(amps, dt)).unwrap();
        assert_eq!(spectrum.magnitude.len(), n / 2 + 1);
        assert_relative_eq!(spectrum.resolution_mhz, 1000.0 / (n as f64 * dt), epsilon = 1e-12);
        let peaks = spectrum.peaks();
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].bin, 20);
        assert_relative_eq!(peaks[0].freq_mhz, f_mhz, epsilon = 1e-12);
        assert_relative_eq!(peaks[0].magnitude, 0.4, epsilon = 1e-9);
    }

    #[test]
    fn two_tones_give_two_peaks() {
        let n = 512;
        let dt = 5.0;
        let res = 1000.0 / (n as f64 * dt);
        let (fa, fb) = (30.0 * res, 100.0 * res);
        let amps: Vec<f64> = (0..n)
            .map(|j| {
                let t = (j as f64 + 0.5) * dt;
                let w = 2.0 * std::f64::consts::PI * 1e-3 * t;
                (fa * w).cos() + 0.5 * (fb * w).cos()
            })
            .collect();
        let peaks = pulse_spectrum(&baseband_schedule(amps, dt)).unwrap().peaks();
        let bins: Vec<usize> = peaks.iter().map(|p| p.bin).collect();
        assert_eq!(bins, vec![30, 100]);
        assert!(peaks[0].magnitude > peaks[1].magnitude);
    }

    #[test]
    fn constant_waveform_has_no_peaks() {
        let schedule = baseband_schedule(vec![0.3; 64], 10.0);
        let spectrum = pulse_spectrum(&schedule).unwrap();
        // all energy sits at DC, which is structurally excluded
        assert!(spectrum.magnitude[0] > 0.29);
        assert!(spectrum.peaks().is_empty());
    }

    #[test]
    fn modulated_channel_peak_tracks_its_carrier() {
        let n = 200;
        let dt = 10.0;
        let carrier_mhz = 40.0 * 1000.0 / (n as f64 * dt);
        let schedule = PulseSchedule {
            n_slots: n,
            dt_ns: dt,
            channels: vec![ControlChannel {
                label: "mod".into(),
                carrier_ghz: Some(carrier_mhz * 1e-3),
                amplitudes: vec![1.0; n],
            }],
        };
        let peaks = pulse_spectrum(&schedule).unwrap().peaks();
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].bin, 40);
    }

    #[test]
    fn short_schedules_are_rejected() {
        let schedule = baseband_schedule(vec![0.1; 8], 10.0);
        assert!(matches!(pulse_spectrum(&schedule), Err(Error::InvalidInput(_))));
    }
}
