//! Cross-check message passing against brute-force joint enumeration.

use bbn_explain::oracle::{joint_distribution, oracle_beliefs};
use bbn_explain::{load_network, propagate};

fn main() -> bbn_explain::Result<()> {
    // a small forest: two trees
    let network = load_network(
        r#"{"id": "forest", "nodes": [
            {"id": "Rain", "states": ["yes", "no"], "prior": [0.2, 0.8]},
            {"id": "Wet", "states": ["yes", "no"], "parent": "Rain", "cpt": [[0.9, 0.1], [0.2, 0.8]]},
            {"id": "Slip", "states": ["yes", "no"], "parent": "Wet", "cpt": [[0.3, 0.7], [0.01, 0.99]]},
            {"id": "Coin", "states": ["h", "t"], "prior": [0.5, 0.5]}
        ]}"#,
    )?;

    let joint = joint_distribution(&network)?;
    println!("joint table: {} rows", joint.assignments.len());

    let slip = network.node_index("Slip")?;
    let rain = network.node_index("Rain")?;
    let mut evidence = vec![None; network.len()];
    evidence[slip] = Some(0);

    let fast = propagate(&network, &evidence)?;
    let exact = oracle_beliefs(&network, &[(slip, 0)])?;
    println!("P(Rain | Slip=yes)  propagated {:.6?}", fast[rain].bel);
    println!("                    enumerated {:.6?}", exact[rain]);

    let worst = fast
        .iter()
        .zip(&exact)
        .flat_map(|(a, b)| a.bel.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
    println!("max abs difference over all nodes: {worst:.2e}");
    Ok(())
}
