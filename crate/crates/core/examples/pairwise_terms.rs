//! The arithmetic behind an explanation: pairwise terms, conditions, the shift indicator.

use bbn_explain::math::shift_indicator_for;
use bbn_explain::{pair_term, percent_change, render_percent, SupportKind, Transition};

fn main() -> bbn_explain::Result<()> {
    let lambda = vec![0.95, 0.9, 0.01];
    let mut tr = Transition::from_vectors(
        vec![0.30, 0.38, 0.32],
        vec![0.33, 0.46, 0.21],
        lambda.clone(),
        lambda,
    );
    tr.labels = vec!["b_1".into(), "b_2".into(), "b_3".into()];
    let focal = 0;

    for i in [1, 2] {
        let term = pair_term(&tr.pi_old, &tr.pi_new, i, focal, SupportKind::Causal)?;
        println!(
            "{} vs {}: term {:+.4}  {:?}",
            tr.labels[i], tr.labels[focal], term.value, term.condition
        );
    }
    for (k, label) in tr.labels.iter().enumerate() {
        let p = percent_change(tr.pi_old[k], tr.pi_new[k]);
        println!("causal support for {label}: {}", render_percent(&p));
    }

    let u = shift_indicator_for(&tr, focal, SupportKind::Causal)?;
    let d_bel = tr.bel_new()?[focal] - tr.bel_old()?[focal];
    println!("U = {:+.5}, ΔBel({}) = {:+.5}", u.value, tr.labels[focal], d_bel);
    Ok(())
}
