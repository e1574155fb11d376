//! Pulse optimization: drive the three-spin system's control fields toward a
//! target gate and report the fidelity trace.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde_json::json;
use sspc_core::channel::Channel;
use sspc_core::grape::{grape_optimize, GrapeOptions};
use sspc_core::io;
use sspc_core::spin::SpinSystemSpec;
use sspc_core::sspc::ParityCheck;
use sspc_core::CMat64;

use crate::commands::{PASS, VERIFICATION_FAILURE};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct GrapeArgs {
    /// Spin-system spec file (JSON: gamma_e, gamma_n, b0, a1, a2, b1_max).
    #[arg(long)]
    spec: PathBuf,

    /// Target gate: "xx", "zz", or a path to a unitary channel file.
    #[arg(long)]
    target: String,

    /// Number of piecewise-constant slots.
    #[arg(long, default_value_t = 2000)]
    slots: usize,

    /// Slot duration in nanoseconds.
    #[arg(long, default_value_t = 10.0)]
    dt_ns: f64,

    /// Iteration budget.
    #[arg(long, default_value_t = 500)]
    max_iter: usize,

    /// Plain x/y amplitude controls instead of carrier-modulated envelopes.
    #[arg(long)]
    unmodulated: bool,

    /// Write the optimized schedule here (JSON, replayable by `spectrum`).
    #[arg(long)]
    schedule_out: Option<PathBuf>,

    /// Write the optimized schedule here as plot-ready CSV.
    #[arg(long)]
    schedule_csv: Option<PathBuf>,
}

/// Target fidelity when --tol is not given.
const DEFAULT_TARGET_FIDELITY: f64 = 0.99;

fn resolve_target(name: &str, report: &mut Report) -> Result<CMat64> {
    if let Ok(check) = ParityCheck::from_name(name) {
        return Ok(check.gate::<f64>());
    }
    let path = Path::new(name);
    if !path.exists() {
        bail!("target must be \"xx\", \"zz\", or a path to a unitary channel file, got '{name}'");
    }
    report.digest_input(path)?;
    match io::read_channel(path).with_context(|| format!("reading {}", path.display()))? {
        Channel::Unitary(u) => Ok(u),
        other => bail!(
            "target file {} holds a '{}' channel; the optimizer needs a unitary",
            path.display(),
            other.rep().name()
        ),
    }
}

pub fn run(args: &GrapeArgs, ctx: &Ctx) -> Result<u8> {
    let mut report = Report::new("grape");
    report.digest_input(&args.spec)?;

    let spin: SpinSystemSpec<f64> =
        io::read_json(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    for warning in spin.validate()? {
        eprintln!("warning: {warning}");
    }
    let target = resolve_target(&args.target, &mut report)?;

    let mut opts = GrapeOptions::new(args.slots, args.dt_ns, spin.b1_max);
    opts.max_iter = args.max_iter;
    opts.tol = ctx.tol.unwrap_or(DEFAULT_TARGET_FIDELITY);
    opts.modulated = !args.unmodulated;
    opts.seed = ctx.seed;

    let result = grape_optimize(&target, &spin, &opts)?;
    eprintln!(
        "fidelity {:.6} after {} iterations ({})",
        result.fidelity,
        result.iterations,
        if result.converged { "converged" } else { "target not reached" }
    );

    if let Some(path) = &args.schedule_out {
        io::write_json(path, &result.schedule)?;
    }
    if let Some(path) = &args.schedule_csv {
        io::write_schedule_csv(path, &result.schedule)?;
    }

    report.params = json!({
        "target": args.target,
        "n_slots": opts.n_slots,
        "dt_ns": opts.dt_ns,
        "max_iter": opts.max_iter,
        "target_fidelity": opts.tol,
        "b1_max": opts.b1_max,
        "modulated": opts.modulated,
        "seed": opts.seed,
    });
    report.results = json!({
        "fidelity": result.fidelity,
        "iterations": result.iterations,
        "converged": result.converged,
        "total_time_us": result.schedule.total_time_ns() / 1000.0,
        "n_channels": result.schedule.channels.len(),
        "max_amplitude": result.schedule.max_amplitude(),
        "fidelity_trace": result.trace,
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .trace
                .iter()
                .enumerate()
                .map(|(i, f)| vec![i.to_string(), f.to_string()])
                .collect();
            emit_bytes(ctx.out.as_deref(), &csv_bytes(&["iteration", "best_fidelity"], &rows)?)?;
        }
    }
    Ok(if result.converged { PASS } else { VERIFICATION_FAILURE })
}
