//! Fuse causal and evidential support into a belief vector.
//!
//! Bel = α · π ⊙ λ, with α chosen so Bel sums to 1.

use bbn_explain::{fuse_belief, SupportVector};

fn main() -> bbn_explain::Result<()> {
    let pi = SupportVector::causal(vec![0.30, 0.38, 0.32])?;
    let lambda = SupportVector::new(vec![0.95, 0.9, 0.01])?;

    let bel = fuse_belief(pi.values(), lambda.values())?;
    println!("π   = {:?}", pi.values());
    println!("λ   = {:?}", lambda.values());
    println!("α   = {:.4}", bel.alpha);
    println!("Bel = {:.4?}", bel.values);

    // λ is only defined up to scale
    let scaled: Vec<f64> = lambda.values().iter().map(|l| l * 40.0).collect();
    let again = fuse_belief(pi.values(), &scaled)?;
    assert!(bel.values.iter().zip(&again.values).all(|(a, b)| (a - b).abs() < 1e-12));
    Ok(())
}
