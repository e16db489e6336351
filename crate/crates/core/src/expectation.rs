//! The reader's expected direction for a focal belief, and whether it was met.
//!
//! A reader expects the focal belief to follow its own support: rise when the
//! support rises, fall when it falls, stay put when it does not move.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::history::History;
use crate::math::{sign_eps, SupportKind, Transition, SIGN_EPS};

/// Default materiality threshold for narrating a belief change.
pub const DEFAULT_EPS_BEL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    RiseExpected,
    FallExpected,
    NoChangeExpected,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::RiseExpected => 1,
            Direction::FallExpected => -1,
            Direction::NoChangeExpected => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub direction: Direction,
    pub basis: SupportKind,
    pub focal_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Realized {
    Rose,
    Fell,
    Unchanged,
}

impl Realized {
    pub fn sign(self) -> i8 {
        match self {
            Realized::Rose => 1,
            Realized::Fell => -1,
            Realized::Unchanged => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationOutcome {
    pub expectation: Expectation,
    pub realized: Realized,
    pub met: bool,
    pub delta_bel: f64,
    pub bel_old: f64,
    pub bel_new: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasicCaseKind {
    BinaryNode,
    UniformEvidence,
    OpposingDrift,
}

pub fn derive_expectation_for(tr: &Transition, f: usize, kind: SupportKind) -> Result<Expectation> {
    tr.check_index(f)?;
    let (old, new) = tr.moving(kind)?;
    let focal_delta = new[f] - old[f];
    let direction = match sign_eps(focal_delta, SIGN_EPS) {
        1 => Direction::RiseExpected,
        -1 => Direction::FallExpected,
        _ => Direction::NoChangeExpected,
    };
    Ok(Expectation {
        direction,
        basis: kind,
        focal_delta,
    })
}

/// Classifies the realized belief change.
///
/// A change that goes the expected way (beyond [`SIGN_EPS`]) is reported as such.
/// Any other change smaller than `eps_bel` is narrated as no change; larger
/// changes are reported by their sign.
pub fn realize_change(expected: Direction, delta_bel: f64, eps_bel: f64) -> Realized {
    let exact = sign_eps(delta_bel, SIGN_EPS);
    let realized = |s: i8| match s {
        1 => Realized::Rose,
        -1 => Realized::Fell,
        _ => Realized::Unchanged,
    };
    if exact == expected.sign() {
        realized(exact)
    } else if delta_bel.abs() <= eps_bel {
        Realized::Unchanged
    } else {
        realized(exact)
    }
}

pub fn check_expectation_for(
    expectation: Expectation,
    tr: &Transition,
    f: usize,
    eps_bel: f64,
) -> Result<ExpectationOutcome> {
    tr.check_index(f)?;
    let bel_old = tr.bel_old()?[f];
    let bel_new = tr.bel_new()?[f];
    let delta_bel = bel_new - bel_old;
    let realized = realize_change(expectation.direction, delta_bel, eps_bel);
    Ok(ExpectationOutcome {
        expectation,
        realized,
        met: expectation.direction.sign() == realized.sign(),
        delta_bel,
        bel_old,
        bel_new,
    })
}

/// First matching case of BinaryNode, UniformEvidence, OpposingDrift.
pub fn detect_basic_case_for(
    tr: &Transition,
    f: usize,
    kind: SupportKind,
) -> Result<Option<BasicCaseKind>> {
    tr.check_index(f)?;
    let n = tr.arity();
    if n == 2 {
        return Ok(Some(BasicCaseKind::BinaryNode));
    }
    let weights = tr.weights(kind);
    let mut competitors = (0..n).filter(|&i| i != f);
    let first = competitors.next().map(|i| weights[i]).unwrap_or(0.0);
    // uniform competitor weights: compare relative to scale so raw λ works too
    let scale = weights.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if (0..n)
        .filter(|&i| i != f)
        .all(|i| ((weights[i] - first) / scale).abs() <= SIGN_EPS)
    {
        return Ok(Some(BasicCaseKind::UniformEvidence));
    }
    let (old, new) = tr.moving(kind)?;
    let df = sign_eps(new[f] - old[f], SIGN_EPS);
    if df != 0
        && (0..n)
            .filter(|&i| i != f)
            .all(|i| sign_eps(new[i] - old[i], SIGN_EPS) != df)
    {
        return Ok(Some(BasicCaseKind::OpposingDrift));
    }
    Ok(None)
}

pub fn derive_expectation(
    history: &History,
    node: &str,
    f: usize,
    from_t: usize,
    to_t: usize,
    kind: SupportKind,
) -> Result<Expectation> {
    derive_expectation_for(&Transition::from_history(history, node, from_t, to_t)?, f, kind)
}

pub fn check_expectation(
    expectation: Expectation,
    history: &History,
    node: &str,
    f: usize,
    from_t: usize,
    to_t: usize,
    eps_bel: f64,
) -> Result<ExpectationOutcome> {
    let tr = Transition::from_history(history, node, from_t, to_t)?;
    check_expectation_for(expectation, &tr, f, eps_bel)
}

pub fn detect_basic_case(
    history: &History,
    node: &str,
    f: usize,
    from_t: usize,
    to_t: usize,
    kind: SupportKind,
) -> Result<Option<BasicCaseKind>> {
    detect_basic_case_for(&Transition::from_history(history, node, from_t, to_t)?, f, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_t1_t2() -> Transition {
        let lam = vec![0.95, 0.9, 0.01];
        Transition::from_vectors(
            vec![0.30, 0.38, 0.32],
            vec![0.33, 0.46, 0.21],
            lam.clone(),
            lam,
        )
    }

    #[test]
    fn expectations_follow_focal_support() {
        let tr = worked_t1_t2();
        let e = derive_expectation_for(&tr, 0, SupportKind::Causal).unwrap();
        assert_eq!(e.direction, Direction::RiseExpected);
        assert!((e.focal_delta - 0.03).abs() < 1e-12);
        let e = derive_expectation_for(&tr, 2, SupportKind::Causal).unwrap();
        assert_eq!(e.direction, Direction::FallExpected);
        assert!((e.focal_delta + 0.11).abs() < 1e-12);

        let same = Transition::from_vectors(
            vec![0.3, 0.7],
            vec![0.3, 0.7],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        );
        let e = derive_expectation_for(&same, 0, SupportKind::Causal).unwrap();
        assert_eq!(e.direction, Direction::NoChangeExpected);
    }

    #[test]
    fn worked_outcomes() {
        let tr = worked_t1_t2();
        let e = derive_expectation_for(&tr, 0, SupportKind::Causal).unwrap();
        let o = check_expectation_for(e, &tr, 0, DEFAULT_EPS_BEL).unwrap();
        assert_eq!(o.realized, Realized::Fell);
        assert!(!o.met);

        let e = derive_expectation_for(&tr, 2, SupportKind::Causal).unwrap();
        let o = check_expectation_for(e, &tr, 2, DEFAULT_EPS_BEL).unwrap();
        assert_eq!(o.realized, Realized::Fell);
        assert!(o.met);
    }

    #[test]
    fn moderated_is_unchanged_and_violated() {
        let lam = vec![0.2268, 0.7524, 0.2225];
        let tr = Transition::from_vectors(
            vec![0.30, 0.38, 0.32],
            vec![0.33, 0.46, 0.21],
            lam.clone(),
            lam,
        );
        let e = derive_expectation_for(&tr, 0, SupportKind::Causal).unwrap();
        let o = check_expectation_for(e, &tr, 0, DEFAULT_EPS_BEL).unwrap();
        assert_eq!(o.realized, Realized::Unchanged);
        assert!(!o.met);
        assert!(o.delta_bel.abs() < DEFAULT_EPS_BEL);
    }

    #[test]
    fn basic_cases() {
        let binary = Transition::from_vectors(
            vec![0.3, 0.7],
            vec![0.6, 0.4],
            vec![0.2, 0.9],
            vec![0.2, 0.9],
        );
        assert_eq!(
            detect_basic_case_for(&binary, 0, SupportKind::Causal).unwrap(),
            Some(BasicCaseKind::BinaryNode)
        );

        // worked example t0 -> t1 analysed causally with λ = (1, 1, 1) at t0
        let t0_t1 = Transition::from_vectors(
            vec![0.30, 0.38, 0.32],
            vec![0.30, 0.38, 0.32],
            vec![1.0, 1.0, 1.0],
            vec![0.95, 0.9, 0.01],
        );
        assert_eq!(
            detect_basic_case_for(&t0_t1, 0, SupportKind::Causal).unwrap(),
            Some(BasicCaseKind::UniformEvidence)
        );

        let lam = vec![0.5, 0.9, 0.1];
        let drift = Transition::from_vectors(
            vec![0.3, 0.4, 0.3],
            vec![0.4, 0.35, 0.25],
            lam.clone(),
            lam,
        );
        assert_eq!(
            detect_basic_case_for(&drift, 0, SupportKind::Causal).unwrap(),
            Some(BasicCaseKind::OpposingDrift)
        );
        let bel_old = drift.bel_old().unwrap()[0];
        let bel_new = drift.bel_new().unwrap()[0];
        assert!(bel_new > bel_old);

        assert_eq!(
            detect_basic_case_for(&worked_t1_t2(), 0, SupportKind::Causal).unwrap(),
            None
        );
    }

    #[test]
    fn realized_is_exclusive_and_materiality_only_masks_contrary_moves() {
        assert_eq!(
            realize_change(Direction::FallExpected, -0.002, 0.005),
            Realized::Fell
        );
        assert_eq!(
            realize_change(Direction::RiseExpected, -0.002, 0.005),
            Realized::Unchanged
        );
        assert_eq!(
            realize_change(Direction::NoChangeExpected, 0.004, 0.005),
            Realized::Unchanged
        );
        assert_eq!(
            realize_change(Direction::NoChangeExpected, 0.04, 0.005),
            Realized::Rose
        );
    }
}
