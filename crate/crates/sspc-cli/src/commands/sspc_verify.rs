//! Verify a single-step parity-check gate: unitarity, hermiticity,
//! involution, equality with its decomposed circuit, Clifford membership, and
//! parity semantics on seeded random states.

use anyhow::Result;
use clap::Args;
use serde_json::json;
use sspc_core::channel::Channel;
use sspc_core::io::MatrixFile;
use sspc_core::sspc::{decomposed_product, is_clifford, verify_parity_semantics, ParityCheck};
use sspc_core::CMat64;

use crate::commands::{PASS, VERIFICATION_FAILURE};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct SspcVerifyArgs {
    /// Which parity check: "xx" or "zz".
    #[arg(long)]
    basis: String,

    /// Random states for the parity-semantics check.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
}

/// Matrix-identity checks are exact up to roundoff.
const MATRIX_TOLERANCE: f64 = 1e-12;
/// Random-state check default; override with --tol.
const SEMANTICS_TOLERANCE: f64 = 1e-9;

fn max_abs(m: &CMat64) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn run(args: &SspcVerifyArgs, ctx: &Ctx) -> Result<u8> {
    let check = ParityCheck::from_name(&args.basis)?;
    let u = check.gate::<f64>();
    let dim = u.nrows();
    let identity = CMat64::identity(dim, dim);
    let semantics_tol = ctx.tol.unwrap_or(SEMANTICS_TOLERANCE);

    let semantics = verify_parity_semantics(&u, check, args.trials, ctx.seed);
    let checks = [
        ("unitarity", max_abs(&(u.adjoint() * &u - &identity)), MATRIX_TOLERANCE),
        ("hermiticity", max_abs(&(&u - u.adjoint())), MATRIX_TOLERANCE),
        ("involution", max_abs(&(&u * &u - &identity)), MATRIX_TOLERANCE),
        ("decomposition", max_abs(&(&u - decomposed_product::<f64>(check))), MATRIX_TOLERANCE),
        ("parity_semantics", semantics.max_deviation, semantics_tol),
    ];
    let clifford = is_clifford(&u);
    let pass = clifford && checks.iter().all(|&(_, deviation, tol)| deviation <= tol);

    let mut report = Report::new("sspc-verify");
    report.params = json!({
        "basis": check.name(),
        "trials": args.trials,
        "seed": ctx.seed,
        "matrix_tolerance": MATRIX_TOLERANCE,
        "semantics_tolerance": semantics_tol,
    });
    report.results = json!({
        "matrix": MatrixFile::from_channel(&Channel::Unitary(u.clone())),
        "checks": checks
            .iter()
            .map(|&(name, deviation, tol)| json!({
                "check": name,
                "max_deviation": deviation,
                "tolerance": tol,
                "pass": deviation <= tol,
            }))
            .chain(std::iter::once(json!({ "check": "clifford", "pass": clifford })))
            .collect::<Vec<_>>(),
        "worst_trial": semantics.worst_trial,
        "pass": pass,
    });

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = checks
                .iter()
                .map(|&(name, deviation, tol)| {
                    vec![
                        name.to_string(),
                        deviation.to_string(),
                        tol.to_string(),
                        (deviation <= tol).to_string(),
                    ]
                })
                .collect();
            rows.push(vec!["clifford".into(), String::new(), String::new(), clifford.to_string()]);
            emit_bytes(
                ctx.out.as_deref(),
                &csv_bytes(&["check", "max_deviation", "tolerance", "pass"], &rows)?,
            )?;
        }
    }
    Ok(if pass { PASS } else { VERIFICATION_FAILURE })
}
