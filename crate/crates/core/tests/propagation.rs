use bbn_explain::history::load_scenario_file;
use bbn_explain::network::load_network_file;
use bbn_explain::oracle::{oracle_beliefs, random_forest};
use bbn_explain::{propagate, run_scenario, History};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn message_passing_matches_enumeration_on_random_forests() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for forest in 0..1000 {
        let net = random_forest(&mut rng, 7, 4);
        let mut evidence = vec![None; net.len()];
        let mut pairs = Vec::new();
        for (k, slot) in evidence.iter_mut().enumerate() {
            if rng.gen_bool(0.4) {
                let s = rng.gen_range(0..net.node(k).arity());
                *slot = Some(s);
                pairs.push((k, s));
            }
        }
        let exact = oracle_beliefs(&net, &pairs).unwrap();
        let beliefs = propagate(&net, &evidence).unwrap();
        for (k, (nb, ex)) in beliefs.iter().zip(&exact).enumerate() {
            assert!(
                close(&nb.bel, ex, 1e-9),
                "forest {forest} node {k}: {:?} vs {:?}",
                nb.bel,
                ex
            );
        }
    }
}

#[test]
fn fixture_network_reproduces_published_vectors() {
    let net = load_network_file(format!("{FIXTURES}/worked_network.json")).unwrap();
    let scenario = load_scenario_file(format!("{FIXTURES}/worked_scenario.json")).unwrap();
    let history = run_scenario(&net, &scenario).unwrap();
    assert_eq!(history.len(), 3);
    let b = history.node_index("B").unwrap();
    let a = history.node_index("A").unwrap();
    let at = |t: usize, k: usize| history.snapshot(t).unwrap().nodes[k].clone();

    assert!(close(&at(0, b).pi, &[0.30, 0.38, 0.32], 1e-3));
    assert!(close(&at(1, b).pi, &[0.30, 0.38, 0.32], 1e-3));
    assert!(close(&at(2, b).pi, &[0.33, 0.46, 0.21], 1e-3));
    // λ(B) is the raw likelihood of c_1
    assert!(close(&at(1, b).lambda, &[0.95, 0.9, 0.01], 1e-12));
    assert!(close(&at(2, b).lambda, &[0.95, 0.9, 0.01], 1e-12));
    assert!(close(&at(1, a).bel, &[0.3955, 0.4678, 0.1367], 1e-3));
    assert!(close(&at(2, a).bel, &[0.455, 0.505, 0.04], 1e-3));
}

#[test]
fn fixture_snapshots_match_enumeration() {
    let net = load_network_file(format!("{FIXTURES}/worked_network.json")).unwrap();
    let scenario = load_scenario_file(format!("{FIXTURES}/worked_scenario.json")).unwrap();
    let history = run_scenario(&net, &scenario).unwrap();
    let mut evidence = Vec::new();
    for (t, snap) in history.snapshots().iter().enumerate() {
        if t > 0 {
            let g = snap.grounded.last().unwrap();
            let k = net.node_index(&g.node).unwrap();
            evidence.push((k, net.state_index(k, &g.state).unwrap()));
        }
        let exact = oracle_beliefs(&net, &evidence).unwrap();
        for (nb, ex) in snap.nodes.iter().zip(&exact) {
            assert!(close(&nb.bel, ex, 1e-9), "t={t}: {:?} vs {:?}", nb.bel, ex);
        }
    }
}

#[test]
fn empty_scenario_is_just_the_prior() {
    let net = load_network_file(format!("{FIXTURES}/worked_network.json")).unwrap();
    let scenario = load_scenario_file(format!("{FIXTURES}/empty_scenario.json")).unwrap();
    let history = run_scenario(&net, &scenario).unwrap();
    assert_eq!(history, History::initial(&net).unwrap());
    for nb in &history.latest().nodes {
        assert!(nb.lambda.iter().all(|&l| l == 1.0));
        assert!(close(&nb.bel, &nb.pi, 1e-12));
    }
}

#[test]
fn impossible_evidence_is_rejected_without_a_snapshot() {
    let net = bbn_explain::load_network(
        r#"{"nodes": [
            {"id": "A", "states": ["a1", "a2"], "prior": [1.0, 0.0]},
            {"id": "B", "states": ["b1", "b2"], "parent": "A", "cpt": [[1.0, 0.0], [0.5, 0.5]]}
        ]}"#,
    )
    .unwrap();
    let mut history = History::initial(&net).unwrap();
    let err = history.ground(&net, "B", "b2").unwrap_err();
    assert_eq!(err.code(), "zero_probability_evidence");
    assert_eq!(history.len(), 1);
    history.ground(&net, "B", "b1").unwrap();
    assert_eq!(history.ground(&net, "B", "b1").unwrap_err().code(), "already_grounded");
}
