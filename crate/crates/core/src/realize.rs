//! Deterministic English realization of explanation plans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{Direction, Realized};
use crate::math::{Condition, PercentChange, SupportKind};
use crate::planner::{CaseTag, ExplanationPlan, Partition, StepPlan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizedExplanation {
    pub text: String,
    pub paragraphs: Vec<String>,
    pub slots: BTreeMap<String, String>,
}

/// Renders the magnitude of a percent change: `"10%"`, `"over 21%"`, or
/// `"from a negligible level"` when the old value was negligible.
pub fn render_percent(p: &PercentChange) -> String {
    match p.percent {
        None => "from a negligible level".to_string(),
        Some(v) => {
            let a = v.abs();
            let r = a.round();
            if (a - r).abs() <= 0.005 {
                format!("{r:.0}%")
            } else {
                format!("over {:.0}%", a.floor())
            }
        }
    }
}

struct Phrases {
    support: &'static str,
    weight: &'static str,
    ruler: &'static str,
}

fn phrases(kind: SupportKind) -> Phrases {
    match kind {
        SupportKind::Causal => Phrases {
            support: "causal support",
            weight: "evidential support",
            ruler: "the evidence",
        },
        SupportKind::Evidential => Phrases {
            support: "evidential support",
            weight: "causal support",
            ruler: "the lack of causal support",
        },
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn join_labels(labels: &[&str]) -> String {
    match labels {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// "increased by 10%", "decreased by over 34%", "did not change".
fn past_change(p: &PercentChange) -> String {
    match p.direction() {
        0 => "did not change".to_string(),
        d => {
            let verb = if d > 0 { "increased" } else { "decreased" };
            if p.is_infinite() {
                format!("{verb} {}", render_percent(p))
            } else {
                format!("{verb} by {}", render_percent(p))
            }
        }
    }
}

fn movement_noun(p: &PercentChange) -> &'static str {
    match p.direction() {
        1 => "increase",
        -1 => "decrease",
        _ => "lack of change",
    }
}

fn subject(support: &str, labels: &[&str]) -> String {
    if labels.len() == 1 {
        format!("the {support} for {}", labels[0])
    } else {
        format!("the {support} for each of {}", join_labels(labels))
    }
}

/// Why a group of competitors sharing `cond` pushes the focal belief, present tense.
///
/// `focal_dir` and `comp_dir` are the directions of the focal's and the group's support.
fn pressure_clause(
    cond: Condition,
    support: &str,
    comp: &[&str],
    focal: &str,
    focal_dir: i8,
    comp_dir: i8,
) -> String {
    let s = subject(support, comp);
    let f = format!("the {support} for {focal}");
    let others = join_labels(comp);
    match cond {
        Condition::DownC1 | Condition::UpC1 => {
            let (comp_verb, focal_verb) = if cond == Condition::DownC1 {
                ("increases", "decreases")
            } else {
                ("decreases", "increases")
            };
            match (comp_dir, focal_dir) {
                (0, _) => format!("{f} {focal_verb} while that for {others} stays the same"),
                (_, 0) => format!("{s} {comp_verb} while that for {focal} stays the same"),
                _ => format!("{s} {comp_verb} while {f} {focal_verb}"),
            }
        }
        Condition::DownC2 => format!("{s} increases by a larger percentage than for {focal}"),
        Condition::DownC3 => format!("{f} decreases by a larger percentage than for {others}"),
        Condition::UpC2 => format!("{f} increases by a larger percentage than for {others}"),
        Condition::UpC3 => format!("{s} decreases by a larger percentage than for {focal}"),
        Condition::Neutral => format!("{s} changes in proportion with that for {focal}"),
    }
}

/// Pressure clauses for a set, grouping competitors that share a condition and direction.
fn pressure_clauses(step: &StepPlan, set: &[usize], labels: &[String], focal: &str) -> String {
    let support = phrases(step.kind).support;
    let focal_dir = step.percents[step.indicator.focal].direction();
    let mut groups: Vec<((Condition, i8), Vec<&str>)> = Vec::new();
    for &i in set {
        let cond = step
            .indicator
            .term(i)
            .map(|t| t.condition)
            .unwrap_or(Condition::Neutral);
        let key = (cond, step.percents[i].direction());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(labels[i].as_str()),
            None => groups.push((key, vec![labels[i].as_str()])),
        }
    }
    groups
        .iter()
        .map(|((cond, dir), comp)| pressure_clause(*cond, support, comp, focal, focal_dir, *dir))
        .collect::<Vec<_>>()
        .join(", and ")
}

fn labels_of<'a>(set: &[usize], labels: &'a [String]) -> Vec<&'a str> {
    set.iter().map(|&i| labels[i].as_str()).collect()
}

fn expected_verb(d: Direction) -> &'static str {
    match d {
        Direction::RiseExpected => "rise",
        Direction::FallExpected => "fall",
        Direction::NoChangeExpected => "stay the same",
    }
}

fn realize_basic(step: &StepPlan, focal: &str) -> String {
    let support = phrases(step.kind).support;
    match step.outcome.realized {
        Realized::Rose => format!(
            "The belief in {focal} has increased due to an increase in its {support}."
        ),
        Realized::Fell => format!(
            "The belief in {focal} has decreased due to a decrease in its {support}."
        ),
        Realized::Unchanged => format!(
            "The belief in {focal} has not changed, since its {support} has not changed."
        ),
    }
}

fn require_partition(step: &StepPlan) -> Result<&Partition> {
    step.partition
        .as_ref()
        .ok_or_else(|| Error::Invalid(format!("{:?} plan without a partition", step.case)))
}

fn realize_step(
    step: &StepPlan,
    labels: &[String],
    focal_ix: usize,
    slots: &mut BTreeMap<String, String>,
    prefix: &str,
) -> Result<Vec<String>> {
    let focal = labels[focal_ix].as_str();
    let ph = phrases(step.kind);
    let mut put = |k: &str, v: String| {
        slots.insert(format!("{prefix}{k}"), v);
    };
    put("focal", focal.to_string());
    put("support", ph.support.to_string());
    put("case", format!("{:?}", step.case));
    put(
        "pct_focal",
        render_percent(&step.percents[focal_ix]),
    );

    if step.case == CaseTag::Basic {
        return Ok(vec![realize_basic(step, focal)]);
    }

    let part = require_partition(step)?;
    let ins = labels_of(&part.in_set, labels);
    let outs = labels_of(&part.out_set, labels);
    put("in", join_labels(&ins));
    put("out", join_labels(&outs));
    let expected = step.outcome.expectation.direction;
    let cs = step.contradiction_sign.unwrap_or(0);
    let pushed = if cs < 0 { "reduced" } else { "raised" };

    let conclusion = match step.outcome.realized {
        Realized::Unchanged => "remains fixed".to_string(),
        Realized::Fell => "has decreased".to_string(),
        Realized::Rose => "has increased".to_string(),
    };
    put("conclusion", conclusion.clone());

    let pressure = pressure_clauses(step, &part.in_set, labels, focal);
    let paragraphs = match step.case {
        CaseTag::ReduceToBinary => {
            let i = part.in_set[0];
            let o = outs[0];
            put("pct_in", render_percent(&step.percents[i]));
            let first = format!(
                "The {} for {focal} {}, and the support for {} {}.",
                ph.support,
                past_change(&step.percents[focal_ix]),
                labels[i],
                past_change(&step.percents[i]),
            );
            let second = match step.kind {
                SupportKind::Causal => format!(
                    "Now, since there is overwhelming evidence against {o}, {} and {focal} remain the only two alternatives, thus they compete against each other.",
                    labels[i]
                ),
                SupportKind::Evidential => format!(
                    "Now, since there is almost no causal support for {o}, {} and {focal} remain the only two alternatives, thus they compete against each other.",
                    labels[i]
                ),
            };
            let third = match step.outcome.realized {
                Realized::Fell => format!("As a result, the overall belief in {focal} must decrease."),
                Realized::Rose => format!("As a result, the overall belief in {focal} must increase."),
                Realized::Unchanged => format!(
                    "As a result, the overall belief in {focal} does not {} and remains fixed.",
                    expected_verb(expected)
                ),
            };
            vec![format!("{first} {second} {third}")]
        }
        CaseTag::EliminateAndReinstate => {
            let o = outs[0];
            let o_ix = part.out_set[0];
            let in_list = join_labels(&ins);
            vec![
                format!(
                    "Since the {} for {o} is lower than for {in_list}, let us assume for a moment that {} rules out {o}, thereby bringing {in_list} into closer competition with {focal}.",
                    ph.weight, ph.ruler
                ),
                format!(
                    "If {o} is ruled out, the fact that {pressure} leads to the belief in {focal} being {pushed}."
                ),
                format!(
                    "Now, the {} in the {} for {o} has the opposite effect on the belief in {focal}. Hence, since {} doesn't completely rule out {o}, it actually diminishes the effect of {in_list}. This explains why the belief in {focal} {}.",
                    movement_noun(&step.percents[o_ix]),
                    ph.support,
                    ph.ruler,
                    moderated_conclusion(step.outcome.realized),
                ),
            ]
        }
        CaseTag::GeneralLowET => vec![format!(
            "{} is ruling out {}, bringing {focal} into closer competition with {}. Since {pressure}, the belief in {focal} {conclusion}.",
            capitalize(ph.ruler),
            join_labels(&outs),
            join_labels(&ins),
        )],
        CaseTag::GeneralModerated => vec![
            format!(
                "Let us assume for a moment that {} rules out {}, bringing {focal} into closer competition with {}. Then, since {pressure}, the belief in {focal} would be {pushed}.",
                ph.ruler,
                join_labels(&outs),
                join_labels(&ins),
            ),
            format!(
                "However, {} doesn't completely rule out {}, and {} {} {} the opposite effect on the belief in {focal}, which diminishes the effect of {}. This explains why the belief in {focal} {}.",
                ph.ruler,
                join_labels(&outs),
                if outs.len() == 1 { "the change in its" } else { "the changes in their" },
                ph.support,
                if outs.len() == 1 { "has" } else { "have" },
                join_labels(&ins),
                moderated_conclusion(step.outcome.realized),
            ),
        ],
        CaseTag::Basic => unreachable!("handled above"),
    };
    Ok(paragraphs)
}

fn moderated_conclusion(realized: Realized) -> &'static str {
    match realized {
        Realized::Unchanged => "remains fixed",
        Realized::Fell => "has decreased only moderately",
        Realized::Rose => "has increased only moderately",
    }
}

/// Turns a plan into text. Same plan, same bytes.
pub fn realize(plan: &ExplanationPlan) -> Result<RealizedExplanation> {
    let mut slots = BTreeMap::new();
    let mut paragraphs = Vec::new();
    if plan.is_compound() {
        for (n, step) in plan.steps.iter().enumerate() {
            let lead = match step.kind {
                SupportKind::Causal => {
                    "Considering first the change in causal support, with the evidential support held at its earlier value:"
                }
                SupportKind::Evidential => {
                    "Then, considering the change in evidential support, with the causal support at its new value:"
                }
            };
            paragraphs.push(lead.to_string());
            let prefix = format!("step{}.", n + 1);
            paragraphs.extend(realize_step(step, &plan.labels, plan.focal, &mut slots, &prefix)?);
        }
    } else {
        let step = plan
            .steps
            .first()
            .ok_or_else(|| Error::Invalid("plan has no steps".into()))?;
        paragraphs = realize_step(step, &plan.labels, plan.focal, &mut slots, "")?;
    }
    Ok(RealizedExplanation {
        text: paragraphs.join("\n\n"),
        paragraphs,
        slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{percent_change, Transition};
    use crate::planner::{plan_transition, PlannerConfig, SupportSelection};

    fn labelled(mut tr: Transition) -> Transition {
        tr.labels = vec!["b_1".into(), "b_2".into(), "b_3".into()];
        tr
    }

    #[test]
    fn percent_rendering() {
        assert_eq!(render_percent(&percent_change(0.30, 0.33)), "10%");
        assert_eq!(render_percent(&percent_change(0.38, 0.46)), "over 21%");
        assert_eq!(render_percent(&percent_change(0.0, 0.0)), "0%");
        assert_eq!(render_percent(&percent_change(0.32, 0.21)), "over 34%");
        assert_eq!(render_percent(&percent_change(0.0, 0.3)), "from a negligible level");
    }

    #[test]
    fn basic_rise() {
        let lam = vec![0.5, 0.9, 0.1];
        let tr = labelled(Transition::from_vectors(
            vec![0.3, 0.4, 0.3],
            vec![0.4, 0.35, 0.25],
            lam.clone(),
            lam,
        ));
        let plan = plan_transition(&tr, 0, SupportSelection::Auto, &PlannerConfig::default())
            .unwrap();
        let text = realize(&plan).unwrap().text;
        assert_eq!(
            text,
            "The belief in b_1 has increased due to an increase in its causal support."
        );
    }

    #[test]
    fn worked_reduce_to_binary() {
        let lam = vec![0.95, 0.9, 0.01];
        let tr = labelled(Transition::from_vectors(
            vec![0.30, 0.38, 0.32],
            vec![0.33, 0.46, 0.21],
            lam.clone(),
            lam,
        ));
        let plan = plan_transition(&tr, 0, SupportSelection::Auto, &PlannerConfig::default())
            .unwrap();
        let r = realize(&plan).unwrap();
        assert_eq!(
            r.text,
            "The causal support for b_1 increased by 10%, and the support for b_2 increased by over 21%. \
             Now, since there is overwhelming evidence against b_3, b_2 and b_1 remain the only two \
             alternatives, thus they compete against each other. As a result, the overall belief in \
             b_1 must decrease."
        );
        assert_eq!(r.slots["out"], "b_3");
        assert_eq!(r.slots["pct_focal"], "10%");
    }

    #[test]
    fn moderated_three_part_narration() {
        let lam = vec![0.2268, 0.7524, 0.2225];
        let tr = labelled(Transition::from_vectors(
            vec![0.30, 0.38, 0.32],
            vec![0.33, 0.46, 0.21],
            lam.clone(),
            lam,
        ));
        let plan = plan_transition(&tr, 0, SupportSelection::Auto, &PlannerConfig::default())
            .unwrap();
        let r = realize(&plan).unwrap();
        assert_eq!(r.paragraphs.len(), 3);
        assert!(r.paragraphs[0].contains("let us assume for a moment that the evidence rules out b_3"));
        assert!(r.paragraphs[1].contains(
            "the causal support for b_2 increases by a larger percentage than for b_1"
        ));
        assert!(r.paragraphs[2].contains("diminishes the effect of b_2"));
        assert!(r.paragraphs[2].ends_with("the belief in b_1 remains fixed."));
    }
}
