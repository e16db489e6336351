//! Explanation planning.
//!
//! A met expectation gets a basic explanation. A violated one is explained by
//! splitting the competitors around an elimination threshold (ET) on their
//! weights: competitors whose pairwise effect contradicts the expectation and
//! that keep substantial support form the In set; competitors that agree with
//! the expectation but have little support form the Out set and are treated as
//! ruled out. Whether Out's residual effect must be mentioned depends on how
//! low the threshold sits (the regime).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expectation::{
    check_expectation_for, derive_expectation_for, detect_basic_case_for, BasicCaseKind,
    ExpectationOutcome, Realized, DEFAULT_EPS_BEL,
};
use crate::history::History;
use crate::math::{
    percent_change, shift_indicator_for, sign_eps, PairTerm, PercentChange, ShiftIndicator,
    SupportKind, Transition, SIGN_EPS,
};

pub const DEFAULT_RHO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Out is "negligible" when its largest weight is at most `rho` times the largest competitor weight.
    pub rho: f64,
    /// Belief changes smaller than this that contradict the expectation are narrated as no change.
    pub eps_bel: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            rho: DEFAULT_RHO,
            eps_bel: DEFAULT_EPS_BEL,
        }
    }
}

/// Which support change to explain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportSelection {
    Causal,
    Evidential,
    Auto,
}

impl std::str::FromStr for SupportSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "causal" => Ok(SupportSelection::Causal),
            "evidential" => Ok(SupportSelection::Evidential),
            "auto" => Ok(SupportSelection::Auto),
            other => Err(Error::Invalid(format!(
                "support must be causal, evidential or auto, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    LowET,
    ModeratedET,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationThreshold {
    pub value: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub in_set: Vec<usize>,
    pub out_set: Vec<usize>,
    pub residual: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Basic,
    ReduceToBinary,
    EliminateAndReinstate,
    GeneralLowET,
    GeneralModerated,
}

impl CaseTag {
    pub fn is_violation(self) -> bool {
        self != CaseTag::Basic
    }
}

/// State labels of the In, Out and residual sets, for consumers that do not index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetLabels {
    #[serde(rename = "in")]
    pub in_labels: Vec<String>,
    #[serde(rename = "out")]
    pub out_labels: Vec<String>,
    pub residual: Vec<String>,
}

/// Plan for a single-sided (π-only or λ-only) transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub kind: SupportKind,
    pub case: CaseTag,
    pub basic_kind: Option<BasicCaseKind>,
    pub outcome: ExpectationOutcome,
    pub indicator: ShiftIndicator,
    /// Direction the contradicting competitors push the focal belief (violations only).
    pub contradiction_sign: Option<i8>,
    pub threshold: Option<EliminationThreshold>,
    pub partition: Option<Partition>,
    pub sets: Option<SetLabels>,
    /// Σ weight · term over the residual set; not narrated.
    pub residual_effect: Option<f64>,
    pub support_old: Vec<f64>,
    pub support_new: Vec<f64>,
    pub weights: Vec<f64>,
    pub bel_old: Vec<f64>,
    pub bel_new: Vec<f64>,
    pub percents: Vec<PercentChange>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationPlan {
    pub node: String,
    pub labels: Vec<String>,
    pub focal: usize,
    pub focal_label: String,
    pub from_t: usize,
    pub to_t: usize,
    pub config: PlannerConfig,
    /// One step, or a causal step followed by an evidential step for mixed windows.
    pub steps: Vec<StepPlan>,
}

impl ExplanationPlan {
    pub fn is_compound(&self) -> bool {
        self.steps.len() > 1
    }
}

fn is_contradictor(term: &PairTerm, contradiction_sign: i8) -> bool {
    sign_eps(term.value, SIGN_EPS) == contradiction_sign
}

fn is_supporter(term: &PairTerm, contradiction_sign: i8) -> bool {
    sign_eps(term.value, SIGN_EPS) == -contradiction_sign
}

/// Picks the largest candidate threshold that leaves no contradicting competitor
/// below it and still rules out at least one supporting competitor.
///
/// Candidates are midpoints between consecutive distinct competitor weights,
/// plus a value just above the largest weight. `weights` is indexed by state.
pub fn choose_elimination_threshold(
    weights: &[f64],
    terms: &[PairTerm],
    contradiction_sign: i8,
    rho: f64,
) -> Result<EliminationThreshold> {
    let mut sorted: Vec<f64> = terms.iter().map(|t| weights[t.competitor]).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let max_w = *sorted.last().unwrap_or(&0.0);

    let mut candidates: Vec<f64> = sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    candidates.push(max_w + max_w.abs().max(1.0) * 1e-9);

    let viable = |c: f64| {
        let valid = !terms
            .iter()
            .any(|t| is_contradictor(t, contradiction_sign) && weights[t.competitor] < c);
        let has_out = terms
            .iter()
            .any(|t| is_supporter(t, contradiction_sign) && weights[t.competitor] < c);
        let has_in = terms
            .iter()
            .any(|t| is_contradictor(t, contradiction_sign) && weights[t.competitor] > c);
        valid && has_out && has_in
    };

    let value = candidates
        .into_iter()
        .rev()
        .find(|&c| viable(c))
        .ok_or_else(|| {
            let dump = serde_json::json!({
                "weights": weights,
                "terms": terms,
                "contradiction_sign": contradiction_sign,
            });
            Error::NoValidThreshold(dump.to_string())
        })?;

    let max_out = terms
        .iter()
        .filter(|t| is_supporter(t, contradiction_sign) && weights[t.competitor] < value)
        .map(|t| weights[t.competitor])
        .fold(0.0, f64::max);
    let regime = if max_out <= rho * max_w {
        Regime::LowET
    } else {
        Regime::ModeratedET
    };
    Ok(EliminationThreshold { value, regime })
}

/// Splits competitors into In, Out and residual around `et`.
pub fn partition_in_out(
    weights: &[f64],
    terms: &[PairTerm],
    contradiction_sign: i8,
    et: f64,
) -> Result<Partition> {
    let mut p = Partition {
        in_set: Vec::new(),
        out_set: Vec::new(),
        residual: Vec::new(),
    };
    for t in terms {
        let w = weights[t.competitor];
        if is_contradictor(t, contradiction_sign) {
            if w < et {
                return Err(Error::InvalidThreshold(et));
            }
            if w > et {
                p.in_set.push(t.competitor);
                continue;
            }
        } else if is_supporter(t, contradiction_sign) && w < et {
            p.out_set.push(t.competitor);
            continue;
        }
        p.residual.push(t.competitor);
    }
    Ok(p)
}

pub fn classify_violation_case(n: usize, regime: Regime) -> CaseTag {
    match (n, regime) {
        (3, Regime::LowET) => CaseTag::ReduceToBinary,
        (3, Regime::ModeratedET) => CaseTag::EliminateAndReinstate,
        (_, Regime::LowET) => CaseTag::GeneralLowET,
        (_, Regime::ModeratedET) => CaseTag::GeneralModerated,
    }
}

/// Plans the explanation of a single-sided transition.
pub fn plan_step(
    tr: &Transition,
    f: usize,
    kind: SupportKind,
    config: &PlannerConfig,
) -> Result<StepPlan> {
    let indicator = shift_indicator_for(tr, f, kind)?;
    let expectation = derive_expectation_for(tr, f, kind)?;
    let outcome = check_expectation_for(expectation, tr, f, config.eps_bel)?;
    let (support_old, support_new) = tr.moving(kind)?;
    let weights = indicator.weights.clone();
    let percents = support_old
        .iter()
        .zip(&support_new)
        .map(|(o, n)| percent_change(*o, *n))
        .collect();

    let mut plan = StepPlan {
        kind,
        case: CaseTag::Basic,
        basic_kind: None,
        outcome,
        indicator,
        contradiction_sign: None,
        threshold: None,
        partition: None,
        sets: None,
        residual_effect: None,
        support_old,
        support_new,
        weights,
        bel_old: tr.bel_old()?,
        bel_new: tr.bel_new()?,
        percents,
    };

    if outcome.met {
        plan.basic_kind = detect_basic_case_for(tr, f, kind)?;
        return Ok(plan);
    }

    let cs = match outcome.realized {
        Realized::Rose => 1,
        Realized::Fell => -1,
        Realized::Unchanged => -outcome.expectation.direction.sign(),
    };
    let terms = &plan.indicator.terms;
    let et = choose_elimination_threshold(&plan.weights, terms, cs, config.rho)?;
    let partition = partition_in_out(&plan.weights, terms, cs, et.value)?;
    let residual_effect = partition
        .residual
        .iter()
        .filter_map(|&i| plan.indicator.term(i).map(|t| plan.weights[i] * t.value))
        .sum();
    let label = |ix: &Vec<usize>| ix.iter().map(|&i| tr.labels[i].clone()).collect();
    plan.sets = Some(SetLabels {
        in_labels: label(&partition.in_set),
        out_labels: label(&partition.out_set),
        residual: label(&partition.residual),
    });
    plan.case = classify_violation_case(tr.arity(), et.regime);
    plan.contradiction_sign = Some(cs);
    plan.threshold = Some(et);
    plan.partition = Some(partition);
    plan.residual_effect = Some(residual_effect);
    Ok(plan)
}

/// Plans the explanation of a focal belief change over a transition.
///
/// If both supports moved, the transition is split into a π-step (old λ) then a
/// λ-step (new π), regardless of `selection`.
pub fn plan_transition(
    tr: &Transition,
    f: usize,
    selection: SupportSelection,
    config: &PlannerConfig,
) -> Result<ExplanationPlan> {
    tr.check_index(f)?;
    let steps = match (tr.pi_changed(), tr.lambda_changed()) {
        (false, false) => return Err(Error::NothingToExplain),
        (true, true) => vec![
            plan_step(&tr.causal_step(), f, SupportKind::Causal, config)?,
            plan_step(&tr.evidential_step(), f, SupportKind::Evidential, config)?,
        ],
        (true, false) => {
            if selection == SupportSelection::Evidential {
                return Err(Error::SupportUnchanged(SupportKind::Evidential));
            }
            vec![plan_step(tr, f, SupportKind::Causal, config)?]
        }
        (false, true) => {
            if selection == SupportSelection::Causal {
                return Err(Error::SupportUnchanged(SupportKind::Causal));
            }
            vec![plan_step(tr, f, SupportKind::Evidential, config)?]
        }
    };
    Ok(ExplanationPlan {
        node: tr.node.clone(),
        labels: tr.labels.clone(),
        focal: f,
        focal_label: tr.labels[f].clone(),
        from_t: tr.from_t,
        to_t: tr.to_t,
        config: *config,
        steps,
    })
}

pub fn plan_explanation(
    history: &History,
    node: &str,
    f: usize,
    from_t: usize,
    to_t: usize,
    selection: SupportSelection,
    config: &PlannerConfig,
) -> Result<ExplanationPlan> {
    let tr = Transition::from_history(history, node, from_t, to_t)?;
    plan_transition(&tr, f, selection, config)
}
