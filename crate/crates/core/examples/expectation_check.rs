//! What a reader expects the belief to do, and whether it did.

use bbn_explain::expectation::{check_expectation_for, derive_expectation_for, detect_basic_case_for};
use bbn_explain::{SupportKind, Transition, DEFAULT_EPS_BEL};

fn report(name: &str, tr: &Transition) -> bbn_explain::Result<()> {
    let e = derive_expectation_for(tr, 0, SupportKind::Causal)?;
    let o = check_expectation_for(e, tr, 0, DEFAULT_EPS_BEL)?;
    let basic = detect_basic_case_for(tr, 0, SupportKind::Causal)?;
    println!(
        "{name:<10} expected {:?}, realized {:?} (ΔBel {:+.4}), met: {}, basic case: {:?}",
        e.direction, o.realized, o.delta_bel, o.met, basic
    );
    Ok(())
}

fn main() -> bbn_explain::Result<()> {
    let same = |pi_old: Vec<f64>, pi_new: Vec<f64>, lam: Vec<f64>| {
        Transition::from_vectors(pi_old, pi_new, lam.clone(), lam)
    };
    report("binary", &same(vec![0.4, 0.6], vec![0.5, 0.5], vec![0.2, 0.7]))?;
    report(
        "drift",
        &same(vec![0.3, 0.4, 0.3], vec![0.4, 0.35, 0.25], vec![0.5, 0.9, 0.1]),
    )?;
    report(
        "violated",
        &same(vec![0.30, 0.38, 0.32], vec![0.33, 0.46, 0.21], vec![0.95, 0.9, 0.01]),
    )?;
    Ok(())
}
