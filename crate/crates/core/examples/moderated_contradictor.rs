//! A contradicting hypothesis that is weakened but not ruled out.
//!
//! Same causal supports as the first example, but the evidence against b_3 is
//! mild, so the plan eliminates b_3, reasons about b_2, then reinstates b_3.

use bbn_explain::history::load_injection_file;
use bbn_explain::{inject_snapshots, plan_explanation, realize, PlannerConfig, SupportSelection};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() -> bbn_explain::Result<()> {
    let history = inject_snapshots(&load_injection_file(format!("{FIXTURES}/moderated_inject.json"))?)?;
    for snap in history.snapshots() {
        println!("t={}  Bel(B) {:.4?}", snap.t, snap.nodes[0].bel);
    }

    let plan = plan_explanation(&history, "B", 0, 1, 2, SupportSelection::Auto, &PlannerConfig::default())?;
    let step = &plan.steps[0];
    println!("case {:?}, ΔBel(b_1) = {:+.5}", step.case, step.outcome.delta_bel);
    println!();
    let text = realize(&plan)?;
    for (k, p) in text.paragraphs.iter().enumerate() {
        println!("[{}] {p}\n", k + 1);
    }
    Ok(())
}
