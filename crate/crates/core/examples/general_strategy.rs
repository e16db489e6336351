//! Four hypotheses: the planner partitions competitors into In and Out.
//!
//! Run twice with different evidence for b_4: nearly ruled out, then only weakened.

use bbn_explain::{plan_explanation, realize, inject_snapshots, InjectedStep, InjectionDoc, PlannerConfig, SupportSelection};

fn explain(lambda_b4: f64) -> bbn_explain::Result<()> {
    let lambda = vec![0.9, 0.9, 0.5, lambda_b4];
    let doc = InjectionDoc {
        node: "B".into(),
        states: None,
        timesteps: vec![
            InjectedStep { pi: vec![0.25, 0.25, 0.25, 0.25], lambda: lambda.clone() },
            InjectedStep { pi: vec![0.27, 0.40, 0.30, 0.03], lambda },
        ],
    };
    let history = inject_snapshots(&doc)?;
    let plan = plan_explanation(&history, "B", 0, 0, 1, SupportSelection::Causal, &PlannerConfig::default())?;
    let step = &plan.steps[0];
    println!("λ(b_4) = {lambda_b4}: {:?}", step.case);
    if let Some(sets) = &step.sets {
        println!("  In {:?}  Out {:?}", sets.in_labels, sets.out_labels);
    }
    println!("{}\n", realize(&plan)?.text);
    Ok(())
}

fn main() -> bbn_explain::Result<()> {
    explain(0.01)?;
    explain(0.3)
}
