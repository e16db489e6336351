use thiserror::Error;

use crate::math::SupportKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("node `{node}` has {count} state(s); at least 2 are required")]
    TooFewStates { node: String, count: usize },

    #[error("node `{node}`: {what} sums to {sum}, expected 1")]
    NotNormalized { node: String, what: String, sum: f64 },

    #[error("node `{node}`: {what} contains an entry outside [0, 1]")]
    OutOfRange { node: String, what: String },

    #[error("node `{node}`: {detail}")]
    Shape { node: String, detail: String },

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("node `{node}` references unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },

    #[error("parent references form a cycle through node `{0}`")]
    Cycle(String),

    #[error("node `{0}` must declare either a prior or a parent with a cpt, not both or neither")]
    AmbiguousDistribution(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{node}` has no state `{state}`")]
    UnknownState { node: String, state: String },

    #[error("node `{0}` is already grounded")]
    AlreadyGrounded(String),

    #[error("grounding `{node}` = `{state}` has zero posterior probability")]
    ZeroProbabilityEvidence { node: String, state: String },

    #[error("evidence contradicts every causally possible state")]
    ContradictoryEvidence,

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid support vector: {0}")]
    InvalidSupport(String),

    #[error("timestep {0} does not exist")]
    UnknownTimestep(usize),

    #[error("invalid window: from {from} must precede to {to}")]
    InvalidWindow { from: usize, to: usize },

    #[error("the {0} side's fixed vector changed within the window; decompose the transition first")]
    FixedSideChanged(SupportKind),

    #[error("requested {0} analysis, but that support did not change over the window")]
    SupportUnchanged(SupportKind),

    #[error("neither causal nor evidential support changed over the window")]
    NothingToExplain,

    #[error("state index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("competitor and focal index are both {0}")]
    SameIndex(usize),

    #[error("elimination threshold {0} leaves a contradicting hypothesis below it")]
    InvalidThreshold(f64),

    #[error("no elimination threshold yields valid, non-empty In and Out sets: {0}")]
    NoValidThreshold(String),

    #[error("joint table would have {0} rows, above the enumeration bound")]
    TooLarge(u128),

    #[error("inconsistent snapshot injection: {0}")]
    Injection(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

impl Error {
    /// Machine-readable code surfaced by the CLI and HTTP service.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse_error",
            Error::Io(_) => "io_error",
            Error::TooFewStates { .. } => "too_few_states",
            Error::NotNormalized { .. } => "not_normalized",
            Error::OutOfRange { .. } => "probability_out_of_range",
            Error::Shape { .. } => "shape_mismatch",
            Error::DuplicateNode(_) => "duplicate_node",
            Error::UnknownParent { .. } => "unknown_parent",
            Error::Cycle(_) => "cycle",
            Error::AmbiguousDistribution(_) => "ambiguous_distribution",
            Error::UnknownNode(_) => "unknown_node",
            Error::UnknownState { .. } => "unknown_state",
            Error::AlreadyGrounded(_) => "already_grounded",
            Error::ZeroProbabilityEvidence { .. } => "zero_probability_evidence",
            Error::ContradictoryEvidence => "contradictory_evidence",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::InvalidSupport(_) => "invalid_support",
            Error::UnknownTimestep(_) => "unknown_timestep",
            Error::InvalidWindow { .. } => "invalid_window",
            Error::FixedSideChanged(_) => "fixed_side_changed",
            Error::SupportUnchanged(_) => "support_unchanged",
            Error::NothingToExplain => "nothing_to_explain",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::SameIndex(_) => "same_index",
            Error::InvalidThreshold(_) => "invalid_threshold",
            Error::NoValidThreshold(_) => "internal_consistency",
            Error::TooLarge(_) => "too_large",
            Error::Injection(_) => "inconsistent_injection",
            Error::Invalid(_) => "invalid_argument",
        }
    }

    /// True for failures that indicate a broken engine assumption rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::NoValidThreshold(_))
    }
}
