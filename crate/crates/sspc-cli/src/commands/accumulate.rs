//! Push per-layer Pauli channels through a circuit, tracing the perfection
//! rate (identity probability) after every layer.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;
use sspc_core::circuit;
use sspc_core::io;

use crate::commands::{probs_value, PASS};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct AccumulateArgs {
    /// Circuit file (JSON): layer list over a fixed register.
    #[arg(long)]
    circuit: PathBuf,

    /// Also write the accumulated channel here (channel JSON format).
    #[arg(long)]
    channel_out: Option<PathBuf>,
}

pub fn run(args: &AccumulateArgs, ctx: &Ctx) -> Result<u8> {
    let mut report = Report::new("accumulate");
    report.digest_input(&args.circuit)?;

    let circuit = io::read_circuit(&args.circuit)
        .with_context(|| format!("reading {}", args.circuit.display()))?;
    let steps = circuit::per_step_trace(&circuit);
    let accumulated = circuit::accumulate(&circuit)?;

    if let Some(path) = &args.channel_out {
        io::write_pauli_channel(path, &accumulated)?;
    }

    report.params = json!({ "n_layers": circuit.layers.len() });
    report.results = json!({
        "n_qubits": circuit.n_qubits,
        "steps": steps
            .iter()
            .map(|(layer, p)| json!({ "layer": layer, "p_identity": p }))
            .collect::<Vec<_>>(),
        "final": {
            "p_identity": accumulated.p_identity(),
            "pauli_probabilities": probs_value(&accumulated),
        },
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = steps
                .iter()
                .enumerate()
                .map(|(i, (layer, p))| vec![(i + 1).to_string(), layer.clone(), p.to_string()])
                .collect();
            emit_bytes(ctx.out.as_deref(), &csv_bytes(&["step", "layer", "p_identity"], &rows)?)?;
        }
    }
    Ok(PASS)
}
