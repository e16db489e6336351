//! Preview a grounding before committing it, then explain the committed step.

use bbn_explain::network::load_network_file;
use bbn_explain::session::Session;
use bbn_explain::{PlannerConfig, SupportSelection};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() -> bbn_explain::Result<()> {
    let mut session = Session::new(load_network_file(format!("{FIXTURES}/worked_network.json"))?)?;
    session.ground("C", "c_1")?;

    let b = session.history.node_index("B")?;
    for d in ["d_1", "d_2"] {
        let snap = session.preview("D", d)?;
        println!("what if D={d}?  Bel(B) {:.4?}", snap.nodes[b].bel);
    }
    assert_eq!(session.history.len(), 2, "previews do not commit");

    session.ground("D", "d_1")?;
    let (_, text) = session.explain("B", "b_1", 1, 2, SupportSelection::Auto, &PlannerConfig::default())?;
    println!("\n{}", text.text);

    match session.ground("D", "d_2") {
        Err(e) => println!("\nregrounding D: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
