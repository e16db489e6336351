//! Load a network, ground evidence one node at a time, print π, λ and Bel.
//!
//! ```bash
//! cargo run -p bbn-explain --example propagate_network
//! ```

use bbn_explain::history::load_scenario_file;
use bbn_explain::network::load_network_file;
use bbn_explain::run_scenario;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() -> bbn_explain::Result<()> {
    let network = load_network_file(format!("{FIXTURES}/worked_network.json"))?;
    let scenario = load_scenario_file(format!("{FIXTURES}/worked_scenario.json"))?;
    let history = run_scenario(&network, &scenario)?;

    for snap in history.snapshots() {
        let evidence: Vec<String> = snap
            .grounded
            .iter()
            .map(|g| format!("{}={}", g.node, g.state))
            .collect();
        println!("t={} evidence [{}]", snap.t, evidence.join(", "));
        for (meta, nb) in history.nodes().iter().zip(&snap.nodes) {
            println!(
                "  {}  π {:.4?}  λ {:.4?}  Bel {:.4?}",
                meta.id, nb.pi, nb.lambda, nb.bel
            );
        }
    }
    Ok(())
}
