//! Fourier spectrum of a pulse schedule with peak detection. Given a
//! spin-system spec, each peak is also matched against the system's
//! transition lines and the run fails if any peak sits more than one
//! frequency bin from every line.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;
use sspc_core::io;
use sspc_core::spectrum::pulse_spectrum;
use sspc_core::spin::{single_flip_lines, PulseSchedule, SpinSystemSpec};

use crate::commands::{PASS, VERIFICATION_FAILURE};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Pulse schedule file (JSON, as written by `grape --schedule-out`).
    #[arg(long)]
    schedule: PathBuf,

    /// Spin-system spec file; adds transition-line matching per peak.
    #[arg(long)]
    spec: Option<PathBuf>,
}

pub fn run(args: &SpectrumArgs, ctx: &Ctx) -> Result<u8> {
    let mut report = Report::new("spectrum");
    report.digest_input(&args.schedule)?;

    let schedule: PulseSchedule<f64> = io::read_json(&args.schedule)
        .with_context(|| format!("reading {}", args.schedule.display()))?;
    let spectrum = pulse_spectrum(&schedule)?;
    let peaks = spectrum.peaks();

    let lines = match &args.spec {
        Some(path) => {
            report.digest_input(path)?;
            let spin: SpinSystemSpec<f64> =
                io::read_json(path).with_context(|| format!("reading {}", path.display()))?;
            let mut lines = single_flip_lines(&spin)?;
            lines.push(spin.combination_line_mhz());
            Some(lines)
        }
        None => None,
    };

    let peak_values: Vec<_> = peaks
        .iter()
        .map(|peak| {
            let mut value = json!({
                "freq_mhz": peak.freq_mhz,
                "magnitude": peak.magnitude,
                "bin": peak.bin,
            });
            if let Some(lines) = &lines {
                let (nearest, distance) = lines
                    .iter()
                    .map(|&line| (line, (line - peak.freq_mhz).abs()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("line list is non-empty");
                value["nearest_line_mhz"] = nearest.into();
                value["distance_mhz"] = distance.into();
                value["on_line"] = (distance <= spectrum.resolution_mhz).into();
            }
            value
        })
        .collect();
    let all_on_line = peak_values
        .iter()
        .all(|p| p.get("on_line").and_then(|v| v.as_bool()).unwrap_or(true));

    report.params = json!({
        "n_slots": schedule.n_slots,
        "dt_ns": schedule.dt_ns,
    });
    report.results = json!({
        "resolution_mhz": spectrum.resolution_mhz,
        "n_bins": spectrum.freq_mhz.len(),
        "n_peaks": peaks.len(),
        "peaks": peak_values,
        "reference_lines_mhz": lines,
        "all_peaks_on_lines": lines.as_ref().map(|_| all_on_line),
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = spectrum
                .freq_mhz
                .iter()
                .zip(&spectrum.magnitude)
                .map(|(f, m)| vec![f.to_string(), m.to_string()])
                .collect();
            emit_bytes(ctx.out.as_deref(), &csv_bytes(&["freq_mhz", "magnitude"], &rows)?)?;
        }
    }
    Ok(if lines.is_some() && !all_on_line { VERIFICATION_FAILURE } else { PASS })
}
