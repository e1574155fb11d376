//! Ideal/experimental matrix pair -> stochastic Pauli error channel.
//!
//! Reads both process matrices, forms the error channel transpose(ideal) ·
//! experimental, extracts Kraus operators (failing loudly if the channel is
//! not completely positive), and projects onto the Pauli-diagonal part. The
//! report carries the error-channel PTM, CP/TP verdicts with residuals, the
//! probability map, and how much coherent (off-diagonal) weight the
//! projection discarded.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde_json::json;
use sspc_core::channel::{check_tp, convert, min_choi_eigenvalue, Channel, Rep};
use sspc_core::io;
use sspc_core::projection::{full_gst_matrix, p_identity_from_ptm, project_to_pauli_channel};
use sspc_core::{Error, RMat64};

use crate::commands::{matrix_rows, probs_value, PASS};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Ideal-gate channel file (JSON).
    #[arg(long)]
    ideal: PathBuf,

    /// Experimentally characterized channel file for the same gate.
    #[arg(long)]
    experimental: PathBuf,

    /// Also write the extracted Pauli channel here (channel JSON format),
    /// ready to be referenced from a circuit file.
    #[arg(long)]
    channel_out: Option<PathBuf>,
}

const TP_TOLERANCE: f64 = 1e-6;

fn read_ptm(path: &PathBuf) -> Result<RMat64> {
    let channel = io::read_channel(path).with_context(|| format!("reading {}", path.display()))?;
    match convert(&channel, Rep::Ptm)? {
        Channel::Ptm(r) => Ok(r),
        _ => unreachable!("convert returned the requested representation"),
    }
}

pub fn run(args: &AnalyzeArgs, ctx: &Ctx) -> Result<u8> {
    let mut report = Report::new("analyze");
    report.digest_input(&args.ideal)?;
    report.digest_input(&args.experimental)?;

    let ideal = read_ptm(&args.ideal)?;
    let experimental = read_ptm(&args.experimental)?;
    let gst = full_gst_matrix(&ideal, &experimental)?;

    let min_eigenvalue = min_choi_eigenvalue(&Channel::Ptm(gst.clone()));
    let kraus = match convert(&Channel::Ptm(gst.clone()), Rep::Kraus) {
        Ok(Channel::Kraus(ops)) => ops,
        Ok(_) => unreachable!("convert returned the requested representation"),
        Err(err @ Error::NotCompletelyPositive { .. }) => {
            return Err(anyhow!(err).context(
                "the reconstructed error channel is not completely positive; \
                 it is recommended to check the output of the experimental method",
            ));
        }
        Err(err) => return Err(err.into()),
    };
    let (tp_ok, tp_residual) = check_tp(&kraus, TP_TOLERANCE);
    if !tp_ok {
        bail!(
            "the reconstructed error channel is not trace preserving \
             (completeness residual {tp_residual:.3e} > {TP_TOLERANCE:.0e}); \
             it is recommended to check the output of the experimental method"
        );
    }
    let projection = project_to_pauli_channel(&kraus)?;
    let channel = &projection.channel;

    if let Some(path) = &args.channel_out {
        io::write_pauli_channel(path, channel)?;
    }

    report.params = json!({
        "tp_tolerance": TP_TOLERANCE,
        "cp_clip_tolerance": sspc_core::channel::CP_EIGENVALUE_TOLERANCE,
    });
    report.results = json!({
        "full_gst_ptm": matrix_rows(&gst),
        "cp": { "pass": true, "min_choi_eigenvalue": min_eigenvalue },
        "tp": { "pass": tp_ok, "residual": tp_residual },
        "kraus_count": kraus.len(),
        "pauli_probabilities": probs_value(channel),
        "p_identity": channel.p_identity(),
        "p_identity_trace_check": p_identity_from_ptm(&gst),
        "off_diagonal_weight": projection.off_diagonal_weight,
        "clipped": projection
            .clipped
            .iter()
            .map(|(label, value)| json!({ "label": label, "value": value }))
            .collect::<Vec<_>>(),
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = channel
                .labeled()
                .filter(|&(_, p)| p >= 1e-15)
                .map(|(label, p)| vec![label, p.to_string()])
                .collect();
            emit_bytes(ctx.out.as_deref(), &csv_bytes(&["pauli", "probability"], &rows)?)?;
        }
    }
    Ok(PASS)
}
