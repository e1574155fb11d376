//! Commensurate-clock search: smallest repetition pair (a, b) with
//! |a·t_a − b·t_b| within the timing budget, under optional parity
//! constraints on a and b.

use anyhow::Result;
use clap::Args;
use serde_json::json;
use sspc_core::clock::{solve, ClockSpec};
use sspc_core::Error;

use crate::commands::{PASS, VERIFICATION_FAILURE};
use crate::report::{csv_bytes, emit_bytes, emit_json, Report};
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct ClockArgs {
    /// First period, in nanoseconds.
    #[arg(long)]
    ta: f64,

    /// Second period, in nanoseconds.
    #[arg(long)]
    tb: f64,

    /// Require an odd repetition count a.
    #[arg(long)]
    a_odd: bool,

    /// Require an odd repetition count b.
    #[arg(long)]
    b_odd: bool,

    /// Largest tolerated |a·t_a − b·t_b|, in nanoseconds.
    #[arg(long, default_value_t = 0.01)]
    err: f64,

    /// Give up once a exceeds this bound.
    #[arg(long)]
    max_a: Option<u64>,
}

pub fn run(args: &ClockArgs, ctx: &Ctx) -> Result<u8> {
    let mut spec = ClockSpec::new(args.ta, args.tb, args.err);
    spec.odd_a = args.a_odd;
    spec.odd_b = args.b_odd;
    if let Some(bound) = args.max_a {
        spec.max_a = bound;
    }

    let mut report = Report::new("clock");
    report.params = json!({
        "t_a_ns": spec.t_a_ns,
        "t_b_ns": spec.t_b_ns,
        "odd_a": spec.odd_a,
        "odd_b": spec.odd_b,
        "error_ns": spec.error_ns,
        "max_a": spec.max_a,
    });

    let (results, row, code) = match solve(&spec) {
        Ok(solution) => {
            let mismatch = solution.residual.sqrt();
            (
                json!({
                    "found": true,
                    "a": solution.a,
                    "b": solution.b,
                    "total_time_us": solution.total_time_us,
                    "mismatch_ns": mismatch,
                }),
                vec![
                    solution.a.to_string(),
                    solution.b.to_string(),
                    solution.total_time_us.to_string(),
                    mismatch.to_string(),
                ],
                PASS,
            )
        }
        Err(Error::NoClockSolution { search_bound }) => (
            json!({ "found": false, "search_bound": search_bound }),
            vec![String::new(), String::new(), String::new(), String::new()],
            VERIFICATION_FAILURE,
        ),
        Err(err) => return Err(err.into()),
    };
    report.results = results;

    match ctx.format {
        Format::Json => emit_json(&report, ctx.out.as_deref())?,
        Format::Csv => emit_bytes(
            ctx.out.as_deref(),
            &csv_bytes(&["a", "b", "total_time_us", "mismatch_ns"], &[row])?,
        )?,
    }
    Ok(code)
}
