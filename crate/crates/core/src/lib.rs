//! Belief propagation and micro explanations for tree-structured Bayesian networks.
//!
//! The engine propagates causal (π) and evidential (λ) support through a
//! directed forest, records a snapshot after every grounding, and explains why
//! the belief in a chosen hypothesis rose, fell or stayed put between two
//! snapshots, including the cases where it moved against the direction of its
//! own support.
//!
//! ```
//! use bbn_explain::{inject_snapshots, plan_explanation, realize, InjectionDoc, InjectedStep,
//!                   PlannerConfig, SupportSelection};
//!
//! let lambda = vec![0.95, 0.9, 0.01];
//! let doc = InjectionDoc {
//!     node: "B".into(),
//!     states: None,
//!     timesteps: vec![
//!         InjectedStep { pi: vec![0.30, 0.38, 0.32], lambda: lambda.clone() },
//!         InjectedStep { pi: vec![0.33, 0.46, 0.21], lambda },
//!     ],
//! };
//! let history = inject_snapshots(&doc).unwrap();
//! let plan = plan_explanation(&history, "B", 0, 0, 1, SupportSelection::Auto,
//!                             &PlannerConfig::default()).unwrap();
//! let text = realize(&plan).unwrap().text;
//! assert!(text.contains("overwhelming evidence against b_3"));
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expectation;
pub mod history;
pub mod math;
pub mod network;
pub mod oracle;
pub mod planner;
pub mod propagation;
pub mod realize;
pub mod service;
pub mod session;
pub mod support;

pub use error::{Error, Result};
pub use expectation::{
    check_expectation, derive_expectation, detect_basic_case, BasicCaseKind, Direction,
    Expectation, ExpectationOutcome, Realized, DEFAULT_EPS_BEL,
};
pub use history::{
    ground_evidence, inject_snapshots, load_injection, load_scenario, run_scenario, Grounding,
    History, InjectedStep, InjectionDoc, ScenarioDoc, Snapshot,
};
pub use math::{
    normalize_lambda, pair_term, percent_change, shift_indicator, Condition, PairTerm,
    PercentChange, ShiftIndicator, SupportKind, Transition,
};
pub use network::{load_network, Network, NetworkDoc, NodeSpec};
pub use oracle::{check_claims, joint_distribution, oracle_beliefs, ClaimId, OracleConfig, OracleReport};
pub use planner::{
    choose_elimination_threshold, classify_violation_case, partition_in_out, plan_explanation,
    CaseTag, EliminationThreshold, ExplanationPlan, Partition, PlannerConfig, Regime,
    SupportSelection,
};
pub use propagation::{propagate, NodeBeliefs};
pub use realize::{realize, render_percent, RealizedExplanation};
pub use support::{fuse_belief, BeliefVector, SupportVector};
