//! Runs every randomized claim check and prints the summary table.
//!
//! ```bash
//! cargo run -p bbn-explain --example verify_claims -- 10000 42
//! ```

use bbn_explain::oracle::{check_claims, ClaimId, OracleConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(2_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);

    let report = check_claims(seed, trials, &ClaimId::ALL, &OracleConfig::default());
    print!("{}", report.summary_table());

    if let Some(first) = report.failures.first() {
        println!("\nfirst failure ({}, seed {}):", first.claim, first.seed);
        println!("{}", serde_json::to_string_pretty(&first.state).unwrap());
    }
}
