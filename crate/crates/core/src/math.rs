//! Direction-of-change indicators for a focal hypothesis.
//!
//! With evidential support λ held fixed, the sign of
//! `U = Σ_{i≠f} λ(b_i) · U_{i,f}` equals the sign of the change in `Bel(b_f)`,
//! where the pairwise term is the cross product
//! `U_{i,f} = π_new(b_f)·π_old(b_i) − π_old(b_f)·π_new(b_i)`.
//! The evidential indicator `D` is the exact mirror: λ (normalized) moves and
//! π supplies the weights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::History;
use crate::support::{fuse_belief, max_abs_diff, normalized};

/// Threshold below which a signed quantity is treated as mathematically zero.
pub const SIGN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportKind {
    Causal,
    Evidential,
}

impl SupportKind {
    pub fn noun(self) -> &'static str {
        match self {
            SupportKind::Causal => "causal support",
            SupportKind::Evidential => "evidential support",
        }
    }

    pub fn other(self) -> SupportKind {
        match self {
            SupportKind::Causal => SupportKind::Evidential,
            SupportKind::Evidential => SupportKind::Causal,
        }
    }
}

impl fmt::Display for SupportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SupportKind::Causal => "causal",
            SupportKind::Evidential => "evidential",
        })
    }
}

/// `-1`, `0` or `1`, with `|x| <= eps` mapped to zero.
pub fn sign_eps(x: f64, eps: f64) -> i8 {
    if x > eps {
        1
    } else if x < -eps {
        -1
    } else {
        0
    }
}

/// How the joint movement of a competitor and the focal hypothesis pushes the focal belief.
///
/// `Down*` push the focal belief down, `Up*` push it up:
/// - `C1`: the two supports move in opposite directions (or only one of them moves);
/// - `C2`: both rise, and the focal rises by a smaller (down) or larger (up) percentage;
/// - `C3`: both fall, and the focal falls by a larger (down) or smaller (up) percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    DownC1,
    DownC2,
    DownC3,
    UpC1,
    UpC2,
    UpC3,
    Neutral,
}

impl Condition {
    /// `-1` for the down family, `1` for the up family, `0` for neutral.
    pub fn direction(self) -> i8 {
        match self {
            Condition::DownC1 | Condition::DownC2 | Condition::DownC3 => -1,
            Condition::UpC1 | Condition::UpC2 | Condition::UpC3 => 1,
            Condition::Neutral => 0,
        }
    }
}

/// Classifies from deltas and percent-wise changes alone, without the cross product.
pub fn classify_condition(old_f: f64, new_f: f64, old_i: f64, new_i: f64) -> Condition {
    let df = new_f - old_f;
    let di = new_i - old_i;
    if (df < 0.0 && di >= 0.0) || (df <= 0.0 && di > 0.0) {
        return Condition::DownC1;
    }
    if (df > 0.0 && di <= 0.0) || (df >= 0.0 && di < 0.0) {
        return Condition::UpC1;
    }
    if df == 0.0 && di == 0.0 {
        return Condition::Neutral;
    }
    let pf = relative(old_f, df);
    let pi = relative(old_i, di);
    if df > 0.0 {
        if pf < pi {
            Condition::DownC2
        } else if pf > pi {
            Condition::UpC2
        } else {
            Condition::Neutral
        }
    } else if pf.abs() > pi.abs() {
        Condition::DownC3
    } else if pf.abs() < pi.abs() {
        Condition::UpC3
    } else {
        Condition::Neutral
    }
}

fn relative(old: f64, delta: f64) -> f64 {
    if old > 0.0 {
        delta / old
    } else {
        delta.signum() * f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub competitor: usize,
    pub focal: usize,
    pub value: f64,
    pub kind: SupportKind,
    pub condition: Condition,
}

/// Pairwise effect of competitor `i` on focal `f`, as if `i` were `f`'s only competitor.
///
/// For the evidential kind both vectors must already be normalized.
pub fn pair_term(
    old: &[f64],
    new: &[f64],
    i: usize,
    f: usize,
    kind: SupportKind,
) -> Result<PairTerm> {
    if old.len() != new.len() {
        return Err(Error::LengthMismatch {
            left: old.len(),
            right: new.len(),
        });
    }
    for idx in [i, f] {
        if idx >= old.len() {
            return Err(Error::IndexOutOfRange {
                index: idx,
                len: old.len(),
            });
        }
    }
    if i == f {
        return Err(Error::SameIndex(i));
    }
    let value = new[f] * old[i] - old[f] * new[i];
    let condition = if value.abs() <= SIGN_EPS {
        Condition::Neutral
    } else {
        classify_condition(old[f], new[f], old[i], new[i])
    };
    Ok(PairTerm {
        competitor: i,
        focal: f,
        value,
        kind,
        condition,
    })
}

/// Percent-wise change used for narration only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercentChange {
    pub old: f64,
    pub new: f64,
    /// `(new - old) / old * 100`; `None` when `old` is negligible but `new` differs.
    pub percent: Option<f64>,
    /// Sign of the change when `percent` is `None`.
    pub infinite_sign: i8,
}

impl PercentChange {
    pub fn is_infinite(&self) -> bool {
        self.percent.is_none()
    }

    pub fn direction(&self) -> i8 {
        match self.percent {
            Some(p) => sign_eps(p, 0.0),
            None => self.infinite_sign,
        }
    }
}

pub fn percent_change(old: f64, new: f64) -> PercentChange {
    if old > SIGN_EPS {
        PercentChange {
            old,
            new,
            percent: Some((new - old) / old * 100.0),
            infinite_sign: 0,
        }
    } else if (new - old).abs() <= SIGN_EPS {
        PercentChange {
            old,
            new,
            percent: Some(0.0),
            infinite_sign: 0,
        }
    } else {
        PercentChange {
            old,
            new,
            percent: None,
            infinite_sign: sign_eps(new - old, 0.0),
        }
    }
}

/// Scales evidential support to sum 1; belief is unchanged by this.
pub fn normalize_lambda(lambda: &[f64]) -> Result<Vec<f64>> {
    if lambda.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidSupport(format!("{lambda:?}")));
    }
    normalized(lambda).ok_or_else(|| Error::InvalidSupport("all entries are zero".into()))
}

/// One node's supports at the two ends of a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub node: String,
    pub labels: Vec<String>,
    pub from_t: usize,
    pub to_t: usize,
    pub pi_old: Vec<f64>,
    pub pi_new: Vec<f64>,
    pub lambda_old: Vec<f64>,
    pub lambda_new: Vec<f64>,
}

impl Transition {
    pub fn from_history(history: &History, node: &str, from_t: usize, to_t: usize) -> Result<Self> {
        if from_t >= to_t {
            return Err(Error::InvalidWindow {
                from: from_t,
                to: to_t,
            });
        }
        let k = history.node_index(node)?;
        let old = &history.snapshot(from_t)?.nodes[k];
        let new = &history.snapshot(to_t)?.nodes[k];
        Ok(Transition {
            node: node.to_string(),
            labels: history.nodes()[k].states.clone(),
            from_t,
            to_t,
            pi_old: old.pi.clone(),
            pi_new: new.pi.clone(),
            lambda_old: old.lambda.clone(),
            lambda_new: new.lambda.clone(),
        })
    }

    /// A transition built directly from vectors (labels `s_1..s_n`).
    pub fn from_vectors(
        pi_old: Vec<f64>,
        pi_new: Vec<f64>,
        lambda_old: Vec<f64>,
        lambda_new: Vec<f64>,
    ) -> Self {
        let labels = (1..=pi_old.len()).map(|k| format!("s_{k}")).collect();
        Transition {
            node: "X".to_string(),
            labels,
            from_t: 0,
            to_t: 1,
            pi_old,
            pi_new,
            lambda_old,
            lambda_new,
        }
    }

    pub fn arity(&self) -> usize {
        self.pi_old.len()
    }

    pub fn pi_changed(&self) -> bool {
        max_abs_diff(&self.pi_old, &self.pi_new) > SIGN_EPS
    }

    /// λ is compared after normalization; a pure rescaling is not a change.
    pub fn lambda_changed(&self) -> bool {
        match (normalized(&self.lambda_old), normalized(&self.lambda_new)) {
            (Some(a), Some(b)) => max_abs_diff(&a, &b) > SIGN_EPS,
            _ => true,
        }
    }

    pub fn changed(&self, kind: SupportKind) -> bool {
        match kind {
            SupportKind::Causal => self.pi_changed(),
            SupportKind::Evidential => self.lambda_changed(),
        }
    }

    /// The moving support for `kind`, old and new. λ is normalized.
    pub fn moving(&self, kind: SupportKind) -> Result<(Vec<f64>, Vec<f64>)> {
        match kind {
            SupportKind::Causal => Ok((self.pi_old.clone(), self.pi_new.clone())),
            SupportKind::Evidential => Ok((
                normalize_lambda(&self.lambda_old)?,
                normalize_lambda(&self.lambda_new)?,
            )),
        }
    }

    /// The fixed-side vector that weights the pairwise terms (raw λ, or π).
    pub fn weights(&self, kind: SupportKind) -> &[f64] {
        match kind {
            SupportKind::Causal => &self.lambda_old,
            SupportKind::Evidential => &self.pi_old,
        }
    }

    pub fn bel_old(&self) -> Result<Vec<f64>> {
        Ok(fuse_belief(&self.pi_old, &self.lambda_old)?.values)
    }

    pub fn bel_new(&self) -> Result<Vec<f64>> {
        Ok(fuse_belief(&self.pi_new, &self.lambda_new)?.values)
    }

    /// The π-only step: π moves, λ stays at its old value.
    pub fn causal_step(&self) -> Transition {
        Transition {
            lambda_new: self.lambda_old.clone(),
            ..self.clone()
        }
    }

    /// The λ-only step that follows [`Transition::causal_step`]: λ moves under the new π.
    pub fn evidential_step(&self) -> Transition {
        Transition {
            pi_old: self.pi_new.clone(),
            ..self.clone()
        }
    }

    pub fn check_index(&self, f: usize) -> Result<()> {
        if f >= self.arity() {
            return Err(Error::IndexOutOfRange {
                index: f,
                len: self.arity(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftIndicator {
    pub kind: SupportKind,
    pub value: f64,
    pub terms: Vec<PairTerm>,
    /// `weights[i]` multiplies `terms` for competitor `i`; the focal entry is unused.
    pub weights: Vec<f64>,
    pub focal: usize,
    pub from_t: usize,
    pub to_t: usize,
}

impl ShiftIndicator {
    pub fn term(&self, competitor: usize) -> Option<&PairTerm> {
        self.terms.iter().find(|t| t.competitor == competitor)
    }
}

/// Aggregate indicator `U` (causal) or `D` (evidential) for a single-sided transition.
pub fn shift_indicator_for(tr: &Transition, f: usize, kind: SupportKind) -> Result<ShiftIndicator> {
    tr.check_index(f)?;
    if tr.changed(kind.other()) {
        return Err(Error::FixedSideChanged(kind));
    }
    let (old, new) = tr.moving(kind)?;
    let weights = tr.weights(kind).to_vec();
    let mut terms = Vec::with_capacity(tr.arity() - 1);
    let mut value = 0.0;
    for i in (0..tr.arity()).filter(|&i| i != f) {
        let term = pair_term(&old, &new, i, f, kind)?;
        value += weights[i] * term.value;
        terms.push(term);
    }
    Ok(ShiftIndicator {
        kind,
        value,
        terms,
        weights,
        focal: f,
        from_t: tr.from_t,
        to_t: tr.to_t,
    })
}

pub fn shift_indicator(
    history: &History,
    node: &str,
    f: usize,
    from_t: usize,
    to_t: usize,
    kind: SupportKind,
) -> Result<ShiftIndicator> {
    let tr = Transition::from_history(history, node, from_t, to_t)?;
    shift_indicator_for(&tr, f, kind)
}
