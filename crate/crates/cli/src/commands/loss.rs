use std::io::Write;

use anyhow::Result;
use topocon::loss::connectivity_loss_with_grad;
use topocon::{connectivity_loss, io};

use super::{require, sink};
use crate::args::LossArgs;
use crate::config::{Context, RunConfig};

/// Prints the loss value; with `--grad`, the gradient follows as CSV with
/// one row per point (or goes to `--grad-out`).
pub fn run(a: LossArgs, ctx: &Context) -> Result<()> {
    let input = require(a.input.clone(), "in")?;
    let eta = a.eta.unwrap_or(2.0);
    let cloud = io::read_cloud_file(
        &input,
        a.norm.unwrap_or_default(),
        a.header.unwrap_or(false),
    )?;
    let want_grad = a.grad.unwrap_or(false) || a.grad_out.is_some();
    let result = if want_grad {
        connectivity_loss_with_grad(&cloud, eta)?
    } else {
        connectivity_loss(&cloud, eta)?
    };
    let mut out = sink(None)?;
    writeln!(out, "{}", result.value)?;
    if let Some(g) = &result.gradient {
        let rows = g.chunks(cloud.dim());
        match &a.grad_out {
            Some(path) => io::write_rows(sink(Some(path))?, None, rows)?,
            None => {
                out.flush()?;
                io::write_rows(std::io::stdout().lock(), None, rows)?;
            }
        }
    }
    out.flush()?;
    let primary = a.grad_out.clone();
    ctx.write_config(
        RunConfig {
            loss: Some(a),
            ..RunConfig::default()
        },
        primary.as_deref(),
    )
}
