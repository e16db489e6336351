//! Tree-structured discrete networks and their JSON description.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::support::SUM_TOLERANCE;

/// One node as written in a network file.
///
/// Roots carry `prior`; every other node carries `parent` and a row-major `cpt`
/// where `cpt[j][k] = P(node = states[k] | parent = parent.states[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub nodes: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Prior(Vec<f64>),
    Conditional { parent: usize, cpt: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub states: Vec<String>,
    pub distribution: Distribution,
}

impl NodeSpec {
    pub fn arity(&self) -> usize {
        self.states.len()
    }

    pub fn parent(&self) -> Option<usize> {
        match self.distribution {
            Distribution::Prior(_) => None,
            Distribution::Conditional { parent, .. } => Some(parent),
        }
    }

    /// Resolves a state by exact label, falling back to a 1-based index (`"2"`).
    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label).or_else(|| {
            label
                .parse::<usize>()
                .ok()
                .filter(|k| (1..=self.states.len()).contains(k))
                .map(|k| k - 1)
        })
    }
}

/// A validated directed forest of discrete nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    id: String,
    nodes: Vec<NodeSpec>,
    children: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl Network {
    pub fn from_doc(doc: &NetworkDoc) -> Result<Self> {
        let mut index = HashMap::with_capacity(doc.nodes.len());
        for (k, node) in doc.nodes.iter().enumerate() {
            if index.insert(node.id.clone(), k).is_some() {
                return Err(Error::DuplicateNode(node.id.clone()));
            }
            if node.states.len() < 2 {
                return Err(Error::TooFewStates {
                    node: node.id.clone(),
                    count: node.states.len(),
                });
            }
            let mut seen = std::collections::HashSet::new();
            if let Some(dup) = node.states.iter().find(|s| !seen.insert(s.as_str())) {
                return Err(Error::Shape {
                    node: node.id.clone(),
                    detail: format!("state `{dup}` listed twice"),
                });
            }
        }

        let mut nodes = Vec::with_capacity(doc.nodes.len());
        for node in &doc.nodes {
            let distribution = match (&node.prior, &node.parent, &node.cpt) {
                (Some(prior), None, None) => {
                    check_row(&node.id, "prior", prior, node.states.len())?;
                    Distribution::Prior(prior.clone())
                }
                (None, Some(parent), Some(cpt)) => {
                    let p = *index.get(parent).ok_or_else(|| Error::UnknownParent {
                        node: node.id.clone(),
                        parent: parent.clone(),
                    })?;
                    let parent_arity = doc.nodes[p].states.len();
                    if cpt.len() != parent_arity {
                        return Err(Error::Shape {
                            node: node.id.clone(),
                            detail: format!(
                                "cpt has {} rows but parent `{parent}` has {parent_arity} states",
                                cpt.len()
                            ),
                        });
                    }
                    for (j, row) in cpt.iter().enumerate() {
                        check_row(&node.id, &format!("cpt row {j}"), row, node.states.len())?;
                    }
                    Distribution::Conditional {
                        parent: p,
                        cpt: cpt.clone(),
                    }
                }
                _ => return Err(Error::AmbiguousDistribution(node.id.clone())),
            };
            nodes.push(NodeSpec {
                id: node.id.clone(),
                states: node.states.clone(),
                distribution,
            });
        }

        // every parent chain must end at a root
        for start in 0..nodes.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = nodes[cur].parent() {
                cur = p;
                steps += 1;
                if steps > nodes.len() {
                    return Err(Error::Cycle(nodes[start].id.clone()));
                }
            }
        }

        let mut children = vec![Vec::new(); nodes.len()];
        for (k, node) in nodes.iter().enumerate() {
            if let Some(p) = node.parent() {
                children[p].push(k);
            }
        }

        Ok(Network {
            id: doc.id.clone().unwrap_or_else(|| "network".to_string()),
            nodes,
            children,
            index,
        })
    }

    pub fn to_doc(&self) -> NetworkDoc {
        NetworkDoc {
            id: Some(self.id.clone()),
            nodes: self
                .nodes
                .iter()
                .map(|n| match &n.distribution {
                    Distribution::Prior(p) => NodeDoc {
                        id: n.id.clone(),
                        states: n.states.clone(),
                        prior: Some(p.clone()),
                        parent: None,
                        cpt: None,
                    },
                    Distribution::Conditional { parent, cpt } => NodeDoc {
                        id: n.id.clone(),
                        states: n.states.clone(),
                        prior: None,
                        parent: Some(self.nodes[*parent].id.clone()),
                        cpt: Some(cpt.clone()),
                    },
                })
                .collect(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> &NodeSpec {
        &self.nodes[k]
    }

    pub fn children(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&k| self.nodes[k].parent().is_none())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_index(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn state_index(&self, node: usize, label: &str) -> Result<usize> {
        self.nodes[node]
            .state_index(label)
            .ok_or_else(|| Error::UnknownState {
                node: self.nodes[node].id.clone(),
                state: label.to_string(),
            })
    }
}

fn check_row(node: &str, what: &str, row: &[f64], arity: usize) -> Result<()> {
    if row.len() != arity {
        return Err(Error::Shape {
            node: node.to_string(),
            detail: format!("{what} has {} entries for {arity} states", row.len()),
        });
    }
    if row.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
        return Err(Error::OutOfRange {
            node: node.to_string(),
            what: what.to_string(),
        });
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::NotNormalized {
            node: node.to_string(),
            what: what.to_string(),
            sum,
        });
    }
    Ok(())
}

/// Parses and validates a network description.
pub fn load_network(document: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(document)?;
    Network::from_doc(&doc)
}

pub fn load_network_file(path: impl AsRef<Path>) -> Result<Network> {
    load_network(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_single_state_root() {
        let err = load_network(r#"{"nodes":[{"id":"A","states":["a1"],"prior":[1.0]}]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::TooFewStates { count: 1, .. }));
    }

    #[test]
    fn rejects_unnormalized_cpt_row() {
        let doc = r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.5,0.5]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.5,0.4],[0.5,0.5]]}]}"#;
        match load_network(doc).unwrap_err() {
            Error::NotNormalized { sum, .. } => assert!((sum - 0.9).abs() < 1e-12),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let cyc = r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"parent":"B","cpt":[[0.5,0.5],[0.5,0.5]]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.5,0.5],[0.5,0.5]]}]}"#;
        assert!(matches!(load_network(cyc).unwrap_err(), Error::Cycle(_)));

        let dup = r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.5,0.5]},
            {"id":"A","states":["a1","a2"],"prior":[0.5,0.5]}]}"#;
        assert!(matches!(load_network(dup).unwrap_err(), Error::DuplicateNode(_)));
    }

    #[test]
    fn rejects_cpt_shape_mismatch_and_mixed_declarations() {
        let rows = r#"{"nodes":[
            {"id":"A","states":["a1","a2","a3"],"prior":[0.2,0.3,0.5]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.5,0.5],[0.5,0.5]]}]}"#;
        assert!(matches!(load_network(rows).unwrap_err(), Error::Shape { .. }));

        let both = r#"{"nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.5,0.5]},
            {"id":"B","states":["b1","b2"],"prior":[0.5,0.5],"parent":"A","cpt":[[0.5,0.5],[0.5,0.5]]}]}"#;
        assert!(matches!(
            load_network(both).unwrap_err(),
            Error::AmbiguousDistribution(_)
        ));

        let orphan = r#"{"nodes":[
            {"id":"B","states":["b1","b2"],"parent":"Z","cpt":[[0.5,0.5],[0.5,0.5]]}]}"#;
        assert!(matches!(
            load_network(orphan).unwrap_err(),
            Error::UnknownParent { .. }
        ));
    }

    #[test]
    fn parse_failure_is_reported() {
        assert!(matches!(load_network("{nodes").unwrap_err(), Error::Parse(_)));
    }

    #[test]
    fn doc_round_trip_preserves_structure() {
        let doc = r#"{"id":"chain","nodes":[
            {"id":"A","states":["a1","a2"],"prior":[0.3,0.7]},
            {"id":"B","states":["b1","b2"],"parent":"A","cpt":[[0.9,0.1],[0.2,0.8]]}]}"#;
        let net = load_network(doc).unwrap();
        assert_eq!(Network::from_doc(&net.to_doc()).unwrap(), net);
        assert_eq!(net.children(0), &[1]);
        assert_eq!(net.roots().collect::<Vec<_>>(), vec![0]);
    }
}
