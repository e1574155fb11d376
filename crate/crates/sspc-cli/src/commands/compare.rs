//! Side-by-side error accumulation: the four-layer decomposed parity check
//! versus the single-step gate, each under its own per-qubit noise.

use anyhow::Result;
use clap::Args;
use serde_json::json;
use sspc_core::noise::{compare_decomposed_vs_sspc, NoiseKind, NoiseSpec, StepTrace};

use crate::commands::{probs_value, PASS};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Per-qubit error probability for each decomposed-circuit layer.
    #[arg(long)]
    decomposed_p: f64,

    /// Per-qubit error probability for the single-step layer.
    #[arg(long)]
    sspc_p: f64,

    /// Noise family: phase_flip, bit_flip, or depolarizing.
    #[arg(long, default_value = "phase_flip")]
    model: String,

    /// Optional ancilla readout-error probability appended to both circuits.
    #[arg(long)]
    readout_flip: Option<f64>,
}

pub fn run(args: &CompareArgs, ctx: &Ctx) -> Result<u8> {
    let model = NoiseKind::from_name(&args.model)?;
    let comparison = compare_decomposed_vs_sspc(
        &NoiseSpec::per_qubit(model, args.decomposed_p),
        &NoiseSpec::per_qubit(model, args.sspc_p),
        args.readout_flip,
    )?;

    let steps = |trace: &[StepTrace<f64>]| {
        trace
            .iter()
            .map(|s| json!({ "layer": s.layer, "p_identity": s.p_identity }))
            .collect::<Vec<_>>()
    };

    let mut report = Report::new("compare");
    report.params = json!({
        "model": model.name(),
        "decomposed_p": args.decomposed_p,
        "sspc_p": args.sspc_p,
        "readout_flip": args.readout_flip,
    });
    report.results = json!({
        "decomposed": {
            "steps": steps(&comparison.decomposed_trace),
            "p_identity": comparison.decomposed_p_identity,
            "pauli_probabilities": probs_value(&comparison.decomposed),
        },
        "sspc": {
            "steps": steps(&comparison.sspc_trace),
            "p_identity": comparison.sspc_p_identity,
            "pauli_probabilities": probs_value(&comparison.sspc),
        },
        "ratio": comparison.ratio,
        "sspc_wins": comparison.ratio >= 1.0,
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let mut rows = Vec::new();
            for (circuit, trace) in [
                ("decomposed", &comparison.decomposed_trace),
                ("sspc", &comparison.sspc_trace),
            ] {
                for (i, step) in trace.iter().enumerate() {
                    rows.push(vec![
                        circuit.to_string(),
                        (i + 1).to_string(),
                        step.layer.clone(),
                        step.p_identity.to_string(),
                    ]);
                }
            }
            emit_bytes(
                ctx.out.as_deref(),
                &csv_bytes(&["circuit", "step", "layer", "p_identity"], &rows)?,
            )?;
        }
    }
    Ok(PASS)
}
