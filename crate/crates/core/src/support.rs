//! Support vectors and belief fusion.
//!
//! Causal support (π) arrives from a node's parent and is kept normalized.
//! Evidential support (λ) arrives from a node's descendants and is stored raw.
//! Belief is their normalized elementwise product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for probability-sum identities.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A non-negative per-state support vector with at least one positive entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SupportVector(Vec<f64>);

impl SupportVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSupport("empty vector".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSupport(format!(
                "entries must be finite and non-negative: {values:?}"
            )));
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidSupport("all entries are zero".into()));
        }
        Ok(SupportVector(values))
    }

    /// A causal-support vector: additionally required to sum to 1.
    pub fn causal(values: Vec<f64>) -> Result<Self> {
        let v = Self::new(values)?;
        let sum = v.sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidSupport(format!(
                "causal support must sum to 1, got {sum}"
            )));
        }
        Ok(v)
    }

    pub fn uniform(n: usize) -> Self {
        SupportVector(vec![1.0; n])
    }

    pub fn indicator(n: usize, k: usize) -> Self {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        SupportVector(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for SupportVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        SupportVector::new(values)
    }
}

impl From<SupportVector> for Vec<f64> {
    fn from(v: SupportVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for SupportVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Posterior belief over a node's states together with the normalizer that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefVector {
    pub values: Vec<f64>,
    pub alpha: f64,
}

/// Fuses causal and evidential support: `Bel(x) = α · λ(x) · π(x)`.
pub fn fuse_belief(pi: &[f64], lambda: &[f64]) -> Result<BeliefVector> {
    if pi.len() != lambda.len() {
        return Err(Error::LengthMismatch {
            left: pi.len(),
            right: lambda.len(),
        });
    }
    let products: Vec<f64> = pi.iter().zip(lambda).map(|(p, l)| p * l).collect();
    let total: f64 = products.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::ContradictoryEvidence);
    }
    let alpha = 1.0 / total;
    Ok(BeliefVector {
        values: products.into_iter().map(|p| p / total).collect(),
        alpha,
    })
}

/// Scales a non-zero vector to sum 1.
pub(crate) fn normalized(values: &[f64]) -> Option<Vec<f64>> {
    let total: f64 = values.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    Some(values.iter().map(|v| v / total).collect())
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && max_abs_diff(a, b) <= tol
    }

    #[test]
    fn fuses_worked_t1_vectors() {
        let bel = fuse_belief(&[0.30, 0.38, 0.32], &[0.95, 0.9, 0.01]).unwrap();
        assert!(close(&bel.values, &[0.4522, 0.5427, 0.0051], 1e-4), "{bel:?}");
        assert!((bel.alpha - 1.0 / 0.6302).abs() < 1e-12);
    }

    #[test]
    fn fuses_moderated_t2_vectors() {
        let bel = fuse_belief(&[0.33, 0.46, 0.21], &[0.2268, 0.7524, 0.2225]).unwrap();
        assert!(close(&bel.values, &[0.16, 0.74, 0.1], 5e-3), "{bel:?}");
    }

    #[test]
    fn uninformative_evidence_returns_pi() {
        let pi = [0.2, 0.5, 0.3];
        let bel = fuse_belief(&pi, &[1.0, 1.0, 1.0]).unwrap();
        assert!(close(&bel.values, &pi, 1e-15));
    }

    #[test]
    fn all_zero_products_are_rejected() {
        let err = fuse_belief(&[1.0, 0.0], &[0.0, 3.0]).unwrap_err();
        assert!(matches!(err, Error::ContradictoryEvidence));
        assert!(matches!(
            fuse_belief(&[0.5, 0.5], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn support_vector_rejects_bad_entries() {
        assert!(SupportVector::new(vec![0.0, 0.0]).is_err());
        assert!(SupportVector::new(vec![-0.1, 1.0]).is_err());
        assert!(SupportVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!(SupportVector::causal(vec![0.5, 0.4]).is_err());
        assert!(SupportVector::causal(vec![0.5, 0.5]).is_ok());
    }
}
