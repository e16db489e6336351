//! Explain why the belief in b_1 fell although its causal support rose.
//!
//! Grounds C = c_1 and then D = d_1 on the bundled network, plans the
//! explanation for the second step and realizes it as text.

use bbn_explain::history::load_scenario_file;
use bbn_explain::network::load_network_file;
use bbn_explain::{plan_explanation, realize, run_scenario, PlannerConfig, SupportSelection};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() -> bbn_explain::Result<()> {
    let network = load_network_file(format!("{FIXTURES}/worked_network.json"))?;
    let scenario = load_scenario_file(format!("{FIXTURES}/worked_scenario.json"))?;
    let history = run_scenario(&network, &scenario)?;

    let b = history.node_index("B")?;
    let b1 = history.state_index(b, "b_1")?;
    let plan = plan_explanation(&history, "B", b1, 1, 2, SupportSelection::Auto, &PlannerConfig::default())?;

    let step = &plan.steps[0];
    println!("case: {:?}", step.case);
    if let (Some(et), Some(sets)) = (&step.threshold, &step.sets) {
        println!("threshold {:.3} ({:?}), In {:?}, Out {:?}", et.value, et.regime, sets.in_labels, sets.out_labels);
    }
    println!();
    println!("{}", realize(&plan)?.text);
    Ok(())
}
