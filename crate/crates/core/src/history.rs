//! Time-indexed snapshots of π, λ and Bel as evidence is grounded.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::propagation::{propagate, NodeBeliefs};
use crate::support::{fuse_belief, SupportVector, SUM_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grounding {
    pub node: String,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMeta {
    pub id: String,
    pub states: Vec<String>,
}

/// Every node's vectors at one timestep. `nodes` follows the order of [`History::nodes`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: usize,
    pub nodes: Vec<NodeBeliefs>,
    pub grounded: Vec<Grounding>,
}

/// Append-only sequence of snapshots starting at t = 0.
///
/// Histories built by [`History::initial`] and [`History::ground`] record one
/// grounding per timestep. Injected histories carry published vectors directly
/// and have no groundings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    network_id: String,
    nodes: Vec<NodeMeta>,
    snapshots: Vec<Snapshot>,
}

impl History {
    /// The t = 0 history: no evidence.
    pub fn initial(network: &Network) -> Result<Self> {
        let nodes = network
            .nodes()
            .iter()
            .map(|n| NodeMeta {
                id: n.id.clone(),
                states: n.states.clone(),
            })
            .collect();
        let beliefs = propagate(network, &vec![None; network.len()])?;
        Ok(History {
            network_id: network.id().to_string(),
            nodes,
            snapshots: vec![Snapshot {
                t: 0,
                nodes: beliefs,
                grounded: Vec::new(),
            }],
        })
    }

    pub fn network_id(&self) -> &str {
        &self.network_id
    }

    pub fn nodes(&self) -> &[NodeMeta] {
        &self.nodes
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn latest(&self) -> &Snapshot {
        self.snapshots.last().expect("history is never empty")
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn snapshot(&self, t: usize) -> Result<&Snapshot> {
        self.snapshots.get(t).ok_or(Error::UnknownTimestep(t))
    }

    pub fn node_index(&self, id: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    /// Resolves a state by exact label, falling back to a 1-based index (`"2"`).
    pub fn state_index(&self, node: usize, state: &str) -> Result<usize> {
        let meta = &self.nodes[node];
        if let Some(k) = meta.states.iter().position(|s| s == state) {
            return Ok(k);
        }
        match state.parse::<usize>() {
            Ok(k) if (1..=meta.states.len()).contains(&k) => Ok(k - 1),
            _ => Err(Error::UnknownState {
                node: meta.id.clone(),
                state: state.to_string(),
            }),
        }
    }

    /// Computes the snapshot that grounding `node = state` would append, without appending it.
    pub fn preview(&self, network: &Network, node: &str, state: &str) -> Result<Snapshot> {
        if network.id() != self.network_id || network.len() != self.nodes.len() {
            return Err(Error::Invalid(
                "history was not produced from this network".into(),
            ));
        }
        let k = network.node_index(node)?;
        let s = network.state_index(k, state)?;
        let current = self.latest();
        if current.grounded.iter().any(|g| g.node == node) {
            return Err(Error::AlreadyGrounded(node.to_string()));
        }
        if !(current.nodes[k].bel[s] > 0.0) {
            return Err(Error::ZeroProbabilityEvidence {
                node: node.to_string(),
                state: state.to_string(),
            });
        }

        let mut grounded = current.grounded.clone();
        grounded.push(Grounding {
            node: node.to_string(),
            state: network.node(k).states[s].clone(),
        });
        let mut evidence = vec![None; network.len()];
        for g in &grounded {
            let gk = network.node_index(&g.node)?;
            evidence[gk] = Some(network.state_index(gk, &g.state)?);
        }
        let nodes = propagate(network, &evidence).map_err(|e| match e {
            Error::ContradictoryEvidence => Error::ZeroProbabilityEvidence {
                node: node.to_string(),
                state: state.to_string(),
            },
            e => e,
        })?;
        Ok(Snapshot {
            t: current.t + 1,
            nodes,
            grounded,
        })
    }

    /// Grounds `node = state` and appends the repropagated snapshot.
    pub fn ground(&mut self, network: &Network, node: &str, state: &str) -> Result<&Snapshot> {
        let snap = self.preview(network, node, state)?;
        self.snapshots.push(snap);
        Ok(self.latest())
    }
}

/// Functional form of [`History::ground`]: returns the extended history.
pub fn ground_evidence(
    history: &History,
    network: &Network,
    node: &str,
    state: &str,
) -> Result<History> {
    let mut next = history.clone();
    next.ground(network, node, state)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub groundings: Vec<Grounding>,
}

pub fn load_scenario(document: &str) -> Result<ScenarioDoc> {
    Ok(serde_json::from_str(document)?)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<ScenarioDoc> {
    load_scenario(&std::fs::read_to_string(path)?)
}

/// Builds the full history for a network and an ordered list of groundings.
pub fn run_scenario(network: &Network, scenario: &ScenarioDoc) -> Result<History> {
    let mut history = History::initial(network)?;
    for g in &scenario.groundings {
        history.ground(network, &g.node, &g.state)?;
    }
    Ok(history)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedStep {
    pub pi: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Published π/λ vectors for a single node across timesteps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionDoc {
    pub node: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    pub timesteps: Vec<InjectedStep>,
}

pub fn load_injection(document: &str) -> Result<InjectionDoc> {
    Ok(serde_json::from_str(document)?)
}

pub fn load_injection_file(path: impl AsRef<Path>) -> Result<InjectionDoc> {
    load_injection(&std::fs::read_to_string(path)?)
}

/// Builds a single-node history from given π/λ vectors. Bel is always recomputed.
///
/// Without explicit labels, states are named `<node>_<k>` in lower case, 1-based.
pub fn inject_snapshots(doc: &InjectionDoc) -> Result<History> {
    let first = doc
        .timesteps
        .first()
        .ok_or_else(|| Error::Injection("no timesteps".into()))?;
    let n = first.pi.len();
    let states = match &doc.states {
        Some(s) if s.len() != n => {
            return Err(Error::Injection(format!(
                "{} state labels for {n}-state vectors",
                s.len()
            )))
        }
        Some(s) => s.clone(),
        None => (1..=n)
            .map(|k| format!("{}_{k}", doc.node.to_lowercase()))
            .collect(),
    };
    if n < 2 {
        return Err(Error::TooFewStates {
            node: doc.node.clone(),
            count: n,
        });
    }

    let mut snapshots = Vec::with_capacity(doc.timesteps.len());
    for (t, step) in doc.timesteps.iter().enumerate() {
        if step.pi.len() != n || step.lambda.len() != n {
            return Err(Error::Injection(format!(
                "timestep {t} has {} π and {} λ entries, expected {n}",
                step.pi.len(),
                step.lambda.len()
            )));
        }
        let pi = SupportVector::new(step.pi.clone())?;
        let pi_sum = pi.sum();
        if (pi_sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Injection(format!(
                "timestep {t}: π sums to {pi_sum}"
            )));
        }
        let lambda = SupportVector::new(step.lambda.clone())?;
        let bel = fuse_belief(pi.values(), lambda.values())?;
        snapshots.push(Snapshot {
            t,
            nodes: vec![NodeBeliefs {
                pi: pi.into_inner(),
                lambda: lambda.into_inner(),
                bel: bel.values,
                alpha: bel.alpha,
            }],
            grounded: Vec::new(),
        });
    }

    Ok(History {
        network_id: format!("injected:{}", doc.node),
        nodes: vec![NodeMeta {
            id: doc.node.clone(),
            states,
        }],
        snapshots,
    })
}
