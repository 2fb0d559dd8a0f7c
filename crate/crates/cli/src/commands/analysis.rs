use anyhow::{bail, Result};
use topocon::analysis::{
    batch_size_condition, entropy_bound, separation_threshold, verify_lemma1, AnnulusSpec,
    Lemma1Config,
};

use super::{require, usage};
use crate::args::{BoundsArgs, VerifyLemma1Args};
use crate::config::Context;

/// Prints every bound the given flags determine, one `name<TAB>value` line each.
pub fn bounds(a: BoundsArgs, _ctx: &Context) -> Result<()> {
    let alpha = require(a.alpha, "alpha")?;
    let beta = require(a.beta, "beta")?;
    let n = require(a.n, "n")?;
    let spec = AnnulusSpec::new(alpha, beta, n).map_err(|e| usage(e.to_string()))?;
    let positive = |v: f64, flag: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(usage(format!("--{flag} must be positive")))
        }
    };
    let mut printed = false;
    if let Some(eps) = a.eps {
        println!(
            "entropy_bound\t{}",
            entropy_bound(&spec, positive(eps, "eps")?)
        );
        printed = true;
    }
    if let (Some(eta), Some(b)) = (a.eta, a.b) {
        let eta = positive(eta, "eta")?;
        println!(
            "separation_threshold\t{}",
            separation_threshold(b, alpha, beta, eta, n)
        );
        printed = true;
    } else if a.eta.is_some() != a.b.is_some() {
        return Err(usage("the separation threshold needs both --eta and --b"));
    }
    println!(
        "batch_size_condition\t{}",
        batch_size_condition(alpha, beta, n)
    );
    if !printed {
        log::info!("pass --eps or --eta with --b for the remaining bounds");
    }
    Ok(())
}

/// Exits with a data error when any premise-satisfying cloud violates the
/// conclusion.
pub fn lemma1(a: VerifyLemma1Args, ctx: &Context) -> Result<()> {
    let mut cfg = Lemma1Config::new(
        a.m.unwrap_or(5),
        a.b.unwrap_or(3),
        a.n.unwrap_or(2),
        a.trials.unwrap_or(1000),
        ctx.seed,
    );
    cfg.kind = a.kind.unwrap_or_default();
    cfg.norm = a.norm.unwrap_or_default();
    cfg.alpha_beta = a.alpha.zip(a.beta);
    let r = verify_lemma1(&cfg)?;
    println!("trials\t{}", r.trials);
    println!("premise_hits\t{}", r.premise_hits);
    println!("required\t{}", r.required);
    match r.min_annulus_count {
        Some(c) => println!("min_annulus_count\t{c}"),
        None => println!("min_annulus_count\tnone"),
    }
    println!("violations\t{}", r.violations);
    if r.violations > 0 {
        bail!(
            "{} premise-satisfying clouds violate the conclusion",
            r.violations
        );
    }
    Ok(())
}
