//! Convert a channel file between representations. The output is itself a
//! channel file (not a report), so it can feed straight back into `analyze`,
//! `convert`, or a circuit layer.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use sspc_core::channel::{convert, Rep};
use sspc_core::io::{self, MatrixFile};

use crate::commands::PASS;
use crate::report::emit_bytes;
use crate::{Ctx, Format};

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// Source channel file (JSON).
    #[arg(long)]
    input: PathBuf,

    /// Target representation: ptm, chi, superop, kraus, or unitary.
    #[arg(long)]
    to: String,
}

pub fn run(args: &ConvertArgs, ctx: &Ctx) -> Result<u8> {
    if ctx.format == Format::Csv {
        bail!("convert emits channel files; only --format json is supported");
    }
    let target = Rep::from_name(&args.to)?;
    let channel =
        io::read_channel(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let converted = convert(&channel, target)?;
    let file = MatrixFile::from_channel(&converted);
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    emit_bytes(ctx.out.as_deref(), text.as_bytes())?;
    Ok(PASS)
}
