//! Brute-force checks that are independent of the message-passing and planning code.
//!
//! [`joint_distribution`] and [`oracle_beliefs`] enumerate every full assignment
//! of a network. [`check_claims`] draws random instances and tests the
//! mathematical claims the explanation strategy relies on; each failure carries
//! the trial seed and a JSON dump so it can be replayed with [`run_trial`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::expectation::{
    check_expectation_for, derive_expectation_for, detect_basic_case_for,
};
use crate::history::History;
use crate::math::{
    classify_condition, shift_indicator_for, sign_eps, SupportKind, Transition, SIGN_EPS,
};
use crate::network::{Distribution, Network, NetworkDoc, NodeDoc};
use crate::planner::{plan_step, PlannerConfig};
use crate::support::fuse_belief;

/// Largest joint table [`joint_distribution`] will build.
pub const MAX_JOINT_ROWS: u128 = 1_000_000;

/// Draws below this are resampled so sign tests stay well-conditioned.
pub const MIN_DRAW: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub arities: Vec<usize>,
    pub assignments: Vec<(Vec<usize>, f64)>,
}

pub fn joint_distribution(network: &Network) -> Result<JointTable> {
    let arities: Vec<usize> = network.nodes().iter().map(|n| n.arity()).collect();
    let size = arities.iter().map(|&a| a as u128).product::<u128>();
    if size > MAX_JOINT_ROWS {
        return Err(Error::TooLarge(size));
    }
    let mut assignments = Vec::with_capacity(size as usize);
    let mut current = vec![0usize; arities.len()];
    loop {
        let p = network
            .nodes()
            .iter()
            .zip(&current)
            .map(|(node, &s)| match &node.distribution {
                Distribution::Prior(prior) => prior[s],
                Distribution::Conditional { parent, cpt } => cpt[current[*parent]][s],
            })
            .product::<f64>();
        assignments.push((current.clone(), p));
        // odometer increment, last node fastest
        let mut k = arities.len();
        loop {
            if k == 0 {
                return Ok(JointTable {
                    arities,
                    assignments,
                });
            }
            k -= 1;
            current[k] += 1;
            if current[k] < arities[k] {
                break;
            }
            current[k] = 0;
        }
    }
}

/// Exact posterior marginals of every node given `(node, state)` evidence.
pub fn oracle_beliefs(network: &Network, evidence: &[(usize, usize)]) -> Result<Vec<Vec<f64>>> {
    let table = joint_distribution(network)?;
    let mut marginals: Vec<Vec<f64>> = table.arities.iter().map(|&a| vec![0.0; a]).collect();
    let mut mass = 0.0;
    for (assignment, p) in &table.assignments {
        if evidence.iter().all(|&(n, s)| assignment[n] == s) {
            mass += p;
            for (m, &s) in marginals.iter_mut().zip(assignment) {
                m[s] += p;
            }
        }
    }
    if !(mass > 0.0) {
        return Err(Error::ContradictoryEvidence);
    }
    for m in &mut marginals {
        for v in m.iter_mut() {
            *v /= mass;
        }
    }
    Ok(marginals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClaimId {
    SignU,
    SignD,
    ConditionEquiv,
    NonEmptiness,
    BasicImpliesMet,
    BinaryAlwaysMet,
    /// Message passing agrees with joint enumeration on random forests.
    Propagation,
}

impl ClaimId {
    pub const ALL: [ClaimId; 7] = [
        ClaimId::SignU,
        ClaimId::SignD,
        ClaimId::ConditionEquiv,
        ClaimId::NonEmptiness,
        ClaimId::BasicImpliesMet,
        ClaimId::BinaryAlwaysMet,
        ClaimId::Propagation,
    ];

    fn salt(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for ClaimId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClaimId::ALL
            .iter()
            .copied()
            .find(|c| c.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown claim `{s}`")))
    }
}

/// Parses `all` or a comma-separated list of claim ids.
pub fn parse_claims(list: &str) -> Result<Vec<ClaimId>> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(ClaimId::ALL.to_vec());
    }
    list.split(',').map(|s| s.trim().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub planner: PlannerConfig,
    /// Zero out some competitor weights to model ruled-out hypotheses.
    pub adversarial: bool,
    /// Upper bound on state count for support-vector claims (lower bound is 2, or 3 for NonEmptiness).
    pub max_states: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            planner: PlannerConfig::default(),
            adversarial: false,
            max_states: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub seed: u64,
    pub claim: ClaimId,
    pub state: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimSummary {
    pub claim: ClaimId,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub trials: usize,
    pub claims: Vec<ClaimSummary>,
    /// Sorted by claim, then seed.
    pub failures: Vec<Failure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_for(&self, claim: ClaimId) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.claim == claim)
    }

    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<18} {:>8} {:>9}  status\n", "claim", "trials", "failures");
        for c in &self.claims {
            out.push_str(&format!(
                "{:<18} {:>8} {:>9}  {}\n",
                c.claim.to_string(),
                c.trials,
                c.failures,
                if c.failures == 0 { "ok" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Seed of trial `trial` of `claim` under master seed `seed`.
pub fn trial_seed(seed: u64, claim: ClaimId, trial: usize) -> u64 {
    // splitmix64 over the three inputs
    let mut z = seed
        ^ claim.salt().wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn check_claims(
    seed: u64,
    trials: usize,
    claims: &[ClaimId],
    config: &OracleConfig,
) -> OracleReport {
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for &claim in claims {
        let mut count = 0;
        for trial in 0..trials {
            let s = trial_seed(seed, claim, trial);
            if let Some(state) = run_trial(claim, s, config) {
                count += 1;
                failures.push(Failure {
                    seed: s,
                    claim,
                    state,
                });
            }
        }
        summaries.push(ClaimSummary {
            claim,
            trials,
            failures: count,
        });
    }
    failures.sort_by_key(|f| (f.claim, f.seed));
    OracleReport {
        seed,
        trials: trials.max(1),
        claims: summaries,
        failures,
    }
}

/// Runs one trial; `Some(state)` describes a failure.
pub fn run_trial(claim: ClaimId, seed: u64, config: &OracleConfig) -> Option<serde_json::Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = match claim {
        ClaimId::SignU => sign_trial(&mut rng, config, SupportKind::Causal),
        ClaimId::SignD => sign_trial(&mut rng, config, SupportKind::Evidential),
        ClaimId::ConditionEquiv => condition_trial(&mut rng, config),
        ClaimId::NonEmptiness => non_emptiness_trial(&mut rng, config),
        ClaimId::BasicImpliesMet => basic_trial(&mut rng, config),
        ClaimId::BinaryAlwaysMet => binary_trial(&mut rng, config),
        ClaimId::Propagation => propagation_trial(&mut rng),
    };
    match result {
        Ok(None) => None,
        Ok(Some(state)) => Some(state),
        Err(e) => Some(json!({ "error": e.to_string() })),
    }
}

fn positive_draw<R: Rng>(rng: &mut R) -> f64 {
    loop {
        // (0, 1]
        let v = 1.0 - rng.gen::<f64>();
        if v >= MIN_DRAW {
            return v;
        }
    }
}

/// Uniform draw from the probability simplex.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let e: Vec<f64> = (0..n).map(|_| -positive_draw(rng).ln()).collect();
        let total: f64 = e.iter().sum();
        let v: Vec<f64> = e.iter().map(|x| x / total).collect();
        if v.iter().all(|&x| x >= MIN_DRAW) {
            return v;
        }
    }
}

/// Evidential support with components uniform on (0, 1].
pub fn random_lambda<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| positive_draw(rng)).collect()
}

fn weights_for<R: Rng>(rng: &mut R, n: usize, focal: usize, config: &OracleConfig) -> Vec<f64> {
    let mut w = random_lambda(rng, n);
    if config.adversarial {
        for (i, x) in w.iter_mut().enumerate() {
            if i != focal && rng.gen_bool(0.3) {
                *x = if rng.gen_bool(0.5) { 0.0 } else { 1e-7 };
            }
        }
    }
    w
}

/// A transition where only `kind`'s support moves.
fn single_sided<R: Rng>(
    rng: &mut R,
    n: usize,
    focal: usize,
    kind: SupportKind,
    config: &OracleConfig,
) -> Transition {
    match kind {
        SupportKind::Causal => {
            let lam = weights_for(rng, n, focal, config);
            Transition::from_vectors(random_simplex(rng, n), random_simplex(rng, n), lam.clone(), lam)
        }
        SupportKind::Evidential => {
            let pi = {
                let mut w = weights_for(rng, n, focal, config);
                let total: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x /= total);
                w
            };
            Transition::from_vectors(pi.clone(), pi, random_lambda(rng, n), random_lambda(rng, n))
        }
    }
}

fn dump(tr: &Transition, focal: usize, kind: SupportKind) -> serde_json::Value {
    json!({
        "kind": kind,
        "focal": focal,
        "pi_old": tr.pi_old,
        "pi_new": tr.pi_new,
        "lambda_old": tr.lambda_old,
        "lambda_new": tr.lambda_new,
    })
}

type Trial = Result<Option<serde_json::Value>>;

fn sign_trial<R: Rng>(rng: &mut R, config: &OracleConfig, kind: SupportKind) -> Trial {
    let n = rng.gen_range(2..=config.max_states.max(2));
    let f = rng.gen_range(0..n);
    let tr = single_sided(rng, n, f, kind, config);
    let indicator = shift_indicator_for(&tr, f, kind)?;
    let d_bel = fuse_belief(&tr.pi_new, &tr.lambda_new)?.values[f]
        - fuse_belief(&tr.pi_old, &tr.lambda_old)?.values[f];
    if sign_eps(indicator.value, SIGN_EPS) == sign_eps(d_bel, SIGN_EPS) {
        return Ok(None);
    }
    let mut state = dump(&tr, f, kind);
    state["indicator"] = json!(indicator.value);
    state["delta_bel"] = json!(d_bel);
    Ok(Some(state))
}

fn condition_trial<R: Rng>(rng: &mut R, config: &OracleConfig) -> Trial {
    let n = rng.gen_range(2..=config.max_states.max(2));
    let old = random_simplex(rng, n);
    // mix in exact ties and one-sided moves now and then
    let new = if rng.gen_bool(0.1) {
        let mut v = old.clone();
        let a = rng.gen_range(0..n);
        let b = (a + 1) % n;
        let shift = rng.gen::<f64>() * v[a];
        v[a] -= shift;
        v[b] += shift;
        v
    } else {
        random_simplex(rng, n)
    };
    let f = rng.gen_range(0..n);
    let i = (f + rng.gen_range(1..n)) % n;
    let cross = new[f] * old[i] - old[f] * new[i];
    let cond = classify_condition(old[f], new[f], old[i], new[i]);
    let s = sign_eps(cross, SIGN_EPS);
    if s == 0 || cond.direction() == s {
        return Ok(None);
    }
    Ok(Some(json!({
        "old": old, "new": new, "focal": f, "competitor": i,
        "cross": cross, "condition": cond,
    })))
}

fn non_emptiness_trial<R: Rng>(rng: &mut R, config: &OracleConfig) -> Trial {
    // draw until the expectation is violated
    for _ in 0..10_000 {
        let n = rng.gen_range(3..=config.max_states.max(3));
        let f = rng.gen_range(0..n);
        let kind = SupportKind::Causal;
        let tr = single_sided(rng, n, f, kind, config);
        let e = derive_expectation_for(&tr, f, kind)?;
        let o = check_expectation_for(e, &tr, f, config.planner.eps_bel)?;
        if o.met {
            continue;
        }
        let failure = |reason: String| {
            let mut state = dump(&tr, f, kind);
            state["reason"] = json!(reason);
            Ok(Some(state))
        };
        return match plan_step(&tr, f, kind, &config.planner) {
            Ok(plan) => {
                let p = plan.partition.as_ref().expect("violation plans carry a partition");
                let et = plan.threshold.expect("violation plans carry a threshold").value;
                let cs = plan.contradiction_sign.unwrap_or(0);
                let below = plan.indicator.terms.iter().any(|t| {
                    sign_eps(t.value, SIGN_EPS) == cs && plan.weights[t.competitor] < et
                });
                if p.in_set.is_empty() || p.out_set.is_empty() {
                    failure("empty In or Out".into())
                } else if below {
                    failure("contradicting hypothesis below the threshold".into())
                } else {
                    Ok(None)
                }
            }
            Err(e) => failure(e.to_string()),
        };
    }
    Err(Error::Invalid("could not draw a violated instance".into()))
}

fn basic_trial<R: Rng>(rng: &mut R, config: &OracleConfig) -> Trial {
    for _ in 0..10_000 {
        let kind = if rng.gen_bool(0.5) {
            SupportKind::Causal
        } else {
            SupportKind::Evidential
        };
        let n = rng.gen_range(2..=config.max_states.max(2));
        let f = rng.gen_range(0..n);
        let mut tr = single_sided(rng, n, f, kind, config);
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                // equal competitor weights
                let c = positive_draw(rng);
                match kind {
                    SupportKind::Causal => {
                        for i in (0..n).filter(|&i| i != f) {
                            tr.lambda_old[i] = c;
                            tr.lambda_new[i] = c;
                        }
                    }
                    SupportKind::Evidential => {
                        let rest = 1.0 - tr.pi_old[f];
                        for i in (0..n).filter(|&i| i != f) {
                            tr.pi_old[i] = rest / (n - 1) as f64;
                        }
                        tr.pi_new = tr.pi_old.clone();
                    }
                }
            }
            _ => {
                // every competitor moves against the focal
                let base = match kind {
                    SupportKind::Causal => tr.pi_old.clone(),
                    SupportKind::Evidential => crate::math::normalize_lambda(&tr.lambda_old)?,
                };
                let up = rng.gen_bool(0.5);
                let scale = rng.gen::<f64>() * 0.9 + 0.05;
                let moved: Vec<f64> = if up {
                    // focal takes a share of everyone else's mass
                    (0..n)
                        .map(|i| if i == f { base[i] + (1.0 - base[i]) * scale } else { base[i] * (1.0 - scale) })
                        .collect()
                } else {
                    // focal gives a share of its mass to the others, in proportion
                    let loss = base[f] * scale;
                    let others = 1.0 - base[f];
                    (0..n)
                        .map(|i| if i == f { base[i] - loss } else { base[i] + loss * base[i] / others })
                        .collect()
                };
                match kind {
                    SupportKind::Causal => tr.pi_new = moved,
                    SupportKind::Evidential => tr.lambda_new = moved,
                }
            }
        }
        if detect_basic_case_for(&tr, f, kind)?.is_none() {
            continue;
        }
        let e = derive_expectation_for(&tr, f, kind)?;
        let o = check_expectation_for(e, &tr, f, config.planner.eps_bel)?;
        if o.met {
            return Ok(None);
        }
        let mut state = dump(&tr, f, kind);
        state["outcome"] = json!(o);
        return Ok(Some(state));
    }
    Err(Error::Invalid("could not draw a basic-case instance".into()))
}

fn binary_trial<R: Rng>(rng: &mut R, config: &OracleConfig) -> Trial {
    let kind = if rng.gen_bool(0.5) {
        SupportKind::Causal
    } else {
        SupportKind::Evidential
    };
    let f = rng.gen_range(0..2);
    let tr = single_sided(rng, 2, f, kind, config);
    let e = derive_expectation_for(&tr, f, kind)?;
    let o = check_expectation_for(e, &tr, f, config.planner.eps_bel)?;
    if o.met {
        return Ok(None);
    }
    let mut state = dump(&tr, f, kind);
    state["outcome"] = json!(o);
    Ok(Some(state))
}

/// A random forest of at most `max_nodes` nodes with 2..=`max_states` states each.
pub fn random_forest<R: Rng>(rng: &mut R, max_nodes: usize, max_states: usize) -> Network {
    let count = rng.gen_range(1..=max_nodes);
    let mut nodes: Vec<NodeDoc> = Vec::with_capacity(count);
    for k in 0..count {
        let arity = rng.gen_range(2..=max_states);
        let id = format!("N{k}");
        let states = (0..arity).map(|s| format!("n{k}_{s}")).collect();
        let parent = if k == 0 || rng.gen_bool(0.25) {
            None
        } else {
            Some(rng.gen_range(0..k))
        };
        let mut node = NodeDoc {
            id,
            states,
            prior: None,
            parent: None,
            cpt: None,
        };
        match parent {
            None => node.prior = Some(exact_simplex(rng, arity)),
            Some(p) => {
                let rows = nodes[p].states.len();
                node.parent = Some(nodes[p].id.clone());
                node.cpt = Some((0..rows).map(|_| exact_simplex(rng, arity)).collect());
            }
        }
        nodes.push(node);
    }
    Network::from_doc(&NetworkDoc {
        id: Some("random".into()),
        nodes,
    })
    .expect("generated networks are valid")
}

fn exact_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v = random_simplex(rng, n);
    let head: f64 = v[..n - 1].iter().sum();
    v[n - 1] = 1.0 - head;
    v
}

fn propagation_trial<R: Rng>(rng: &mut R) -> Trial {
    let net = random_forest(rng, 6, 4);
    let mut order: Vec<usize> = (0..net.len()).filter(|_| rng.gen_bool(0.5)).collect();
    // shuffle grounding order
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
    let mut history = History::initial(&net)?;
    let mut evidence = Vec::new();
    let mut worst = 0.0f64;
    for step in 0..=order.len() {
        let snap = history.latest();
        let exact = oracle_beliefs(&net, &evidence)?;
        for (nb, ex) in snap.nodes.iter().zip(&exact) {
            for (a, b) in nb.bel.iter().zip(ex) {
                worst = worst.max((a - b).abs());
            }
        }
        if step == order.len() {
            break;
        }
        let k = order[step];
        let s = rng.gen_range(0..net.node(k).arity());
        history.ground(&net, &net.node(k).id.clone(), &net.node(k).states[s].clone())?;
        evidence.push((k, s));
    }
    if worst <= 1e-9 {
        return Ok(None);
    }
    Ok(Some(json!({
        "network": net.to_doc(),
        "evidence": evidence,
        "max_abs_error": worst,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::load_network;

    #[test]
    fn single_root_table() {
        let net = load_network(r#"{"nodes":[{"id":"A","states":["s1","s2"],"prior":[0.3,0.7]}]}"#)
            .unwrap();
        let t = joint_distribution(&net).unwrap();
        assert_eq!(t.assignments, vec![(vec![0], 0.3), (vec![1], 0.7)]);
    }

    #[test]
    fn chain_table_is_factor_product() {
        let net = load_network(
            r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.3,0.7]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.9,0.1],[0.2,0.8]]}]}"#,
        )
        .unwrap();
        let t = joint_distribution(&net).unwrap();
        assert_eq!(t.assignments.len(), 4);
        let prior = [0.3, 0.7];
        let cpt = [[0.9, 0.1], [0.2, 0.8]];
        for (a, p) in &t.assignments {
            assert_eq!(*p, prior[a[0]] * cpt[a[0]][a[1]]);
        }
        let total: f64 = t.assignments.iter().map(|r| r.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evidence_on_all_nodes_gives_indicators() {
        let net = load_network(
            r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.3,0.7]},
            {"id":"B","states":["b1","b2","b3"],"parent":"A","cpt":[[0.5,0.1,0.4],[0.2,0.3,0.5]]}]}"#,
        )
        .unwrap();
        let m = oracle_beliefs(&net, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(m, vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]]);
    }

    #[test]
    fn size_bound_is_enforced() {
        let states: Vec<String> = (0..1001).map(|k| format!("s{k}")).collect();
        let prior = vec![1.0 / 1001.0; 1001];
        let nodes: Vec<NodeDoc> = (0..2)
            .map(|k| NodeDoc {
                id: format!("N{k}"),
                states: states.clone(),
                prior: Some(prior.clone()),
                parent: None,
                cpt: None,
            })
            .collect();
        let net = Network::from_doc(&NetworkDoc { id: None, nodes }).unwrap();
        assert!(matches!(joint_distribution(&net), Err(Error::TooLarge(_))));
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = OracleConfig::default();
        let a = check_claims(7, 1, &ClaimId::ALL, &cfg);
        let b = check_claims(7, 1, &ClaimId::ALL, &cfg);
        assert_eq!(a, b);
        assert_eq!(a.claims.len(), ClaimId::ALL.len());
    }

    #[test]
    fn claim_parsing() {
        assert_eq!(parse_claims("all").unwrap().len(), ClaimId::ALL.len());
        assert_eq!(
            parse_claims("signu,SignD").unwrap(),
            vec![ClaimId::SignU, ClaimId::SignD]
        );
        assert!(parse_claims("bogus").is_err());
    }
}
