//! Pearl's π/λ message passing on a directed forest.
//!
//! Each node's λ is its own evidence indicator times the λ-messages from its
//! children; each non-root's π is the parent's outgoing π-message pushed through
//! the CPT. Messages are recomputed from scratch on every call, so the same
//! evidence always yields bit-identical vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Distribution, Network};
use crate::support::{fuse_belief, normalized};

/// π, λ and Bel for one node at one timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeBeliefs {
    pub pi: Vec<f64>,
    pub lambda: Vec<f64>,
    pub bel: Vec<f64>,
    pub alpha: f64,
}

/// Runs both message passes; `evidence[k]` is the observed state of node `k`, if any.
pub fn propagate(network: &Network, evidence: &[Option<usize>]) -> Result<Vec<NodeBeliefs>> {
    let n = network.len();
    assert_eq!(evidence.len(), n, "evidence must cover every node");

    let order = preorder(network);

    // upward pass: children before parents
    let mut lambda: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut up_msgs: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &k in order.iter().rev() {
        let node = network.node(k);
        let mut l = indicator_or_ones(node.arity(), evidence[k]);
        for &c in network.children(k) {
            for (x, m) in l.iter_mut().zip(&up_msgs[c]) {
                *x *= m;
            }
        }
        if let Distribution::Conditional { cpt, .. } = &node.distribution {
            up_msgs[k] = cpt
                .iter()
                .map(|row| row.iter().zip(&l).map(|(p, lv)| p * lv).sum())
                .collect();
        }
        lambda[k] = l;
    }

    // downward pass: parents before children
    let mut pi: Vec<Vec<f64>> = vec![Vec::new(); n];
    for &k in &order {
        let node = network.node(k);
        pi[k] = match &node.distribution {
            Distribution::Prior(prior) => prior.clone(),
            Distribution::Conditional { parent, cpt } => {
                let p = *parent;
                let mut msg: Vec<f64> = pi[p].clone();
                for (x, e) in msg
                    .iter_mut()
                    .zip(indicator_or_ones(network.node(p).arity(), evidence[p]))
                {
                    *x *= e;
                }
                for &sib in network.children(p) {
                    if sib != k {
                        for (x, m) in msg.iter_mut().zip(&up_msgs[sib]) {
                            *x *= m;
                        }
                    }
                }
                let msg = normalized(&msg).ok_or(Error::ContradictoryEvidence)?;
                let mut out = vec![0.0; node.arity()];
                for (row, w) in cpt.iter().zip(&msg) {
                    for (o, p) in out.iter_mut().zip(row) {
                        *o += w * p;
                    }
                }
                normalized(&out).ok_or(Error::ContradictoryEvidence)?
            }
        };
    }

    pi.into_iter()
        .zip(lambda)
        .map(|(pi, lambda)| {
            let bel = fuse_belief(&pi, &lambda)?;
            Ok(NodeBeliefs {
                pi,
                lambda,
                bel: bel.values,
                alpha: bel.alpha,
            })
        })
        .collect()
}

fn indicator_or_ones(n: usize, state: Option<usize>) -> Vec<f64> {
    match state {
        Some(s) => (0..n).map(|k| if k == s { 1.0 } else { 0.0 }).collect(),
        None => vec![1.0; n],
    }
}

fn preorder(network: &Network) -> Vec<usize> {
    let mut order = Vec::with_capacity(network.len());
    let mut stack: Vec<usize> = network.roots().collect();
    stack.reverse();
    while let Some(k) = stack.pop() {
        order.push(k);
        stack.extend(network.children(k).iter().rev());
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::load_network;

    const CHAIN: &str = r#"{"nodes":[
        {"id":"A","states":["a1","a2"],"prior":[0.3,0.7]},
        {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.9,0.1],[0.2,0.8]]}]}"#;

    #[test]
    fn no_evidence_pushes_prior_through_cpt() {
        let net = load_network(CHAIN).unwrap();
        let out = propagate(&net, &[None, None]).unwrap();
        let expect_b = [0.3 * 0.9 + 0.7 * 0.2, 0.3 * 0.1 + 0.7 * 0.8];
        assert!((out[1].pi[0] - expect_b[0]).abs() < 1e-15);
        assert_eq!(out[1].lambda, vec![1.0, 1.0]);
        assert_eq!(out[0].bel, vec![0.3, 0.7]);
    }

    #[test]
    fn child_evidence_updates_parent_lambda() {
        let net = load_network(CHAIN).unwrap();
        let out = propagate(&net, &[None, Some(0)]).unwrap();
        assert_eq!(out[0].lambda, vec![0.9, 0.2]);
        let z = 0.3 * 0.9 + 0.7 * 0.2;
        assert!((out[0].bel[0] - 0.27 / z).abs() < 1e-15);
        assert_eq!(out[1].bel, vec![1.0, 0.0]);
    }

    #[test]
    fn impossible_evidence_is_contradictory() {
        let doc = r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[1.0,0.0]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[1.0,0.0],[0.0,1.0]]}]}"#;
        let net = load_network(doc).unwrap();
        assert!(matches!(
            propagate(&net, &[None, Some(1)]),
            Err(Error::ContradictoryEvidence)
        ));
    }
}
