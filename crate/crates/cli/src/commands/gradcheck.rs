use anyhow::{bail, Result};
use topocon::gradcheck::{
    check_network_gradients, check_point_gradients, GradCheckConfig, NetGradCheckConfig,
};

use crate::args::GradCheckArgs;
use crate::config::Context;

/// Exits with a data error when the worst relative error exceeds the tolerance.
pub fn run(a: GradCheckArgs, ctx: &Context) -> Result<()> {
    let network = a.network.unwrap_or(false);
    let (report, default_tol) = if network {
        let cfg = NetGradCheckConfig {
            trials: a.trials.unwrap_or(200),
            lambda: a.lambda.unwrap_or(1.0),
            norm: a.norm.unwrap_or_default(),
            step: a.step.unwrap_or(1e-6),
            kink_margin: a.kink_margin.unwrap_or(1e-4),
            seed: ctx.seed,
        };
        (check_network_gradients(&cfg)?, 1e-4)
    } else {
        let cfg = GradCheckConfig {
            trials: a.trials.unwrap_or(200),
            max_points: a.max_points.unwrap_or(16),
            max_dim: a.max_dim.unwrap_or(8),
            eta: a.eta.unwrap_or(2.0),
            norm: a.norm.unwrap_or_default(),
            step: a.step.unwrap_or(1e-6),
            kink_margin: a.kink_margin.unwrap_or(1e-4),
            seed: ctx.seed,
        };
        (check_point_gradients(&cfg)?, 1e-5)
    };
    let tol = a.tolerance.unwrap_or(default_tol);
    println!("trials\t{}", report.trials);
    println!("redrawn\t{}", report.redrawn);
    println!("max_rel_error\t{:e}", report.max_rel_error);
    println!("tolerance\t{tol:e}");
    if report.max_rel_error > tol {
        bail!(
            "gradient check failed: {:e} > {tol:e}",
            report.max_rel_error
        );
    }
    Ok(())
}
