//! The maps used to verify the convex-transitivity criterion for `T_{g,w}`.

use serde::{Deserialize, Serialize};

use super::polynomial::proof_polynomial;
use crate::error::{Error, Result};
use crate::lattice::CompactVector;
use crate::operator::WeightedTranslation;

/// Scalar in front of `(beta I - T) S^k`: `(beta^k - 1)/(1 - beta)`, and its
/// limit `-k` at `beta = 1`.
fn s_k_factor(beta: f64, k: usize) -> f64 {
    if beta == 1.0 {
        -(k as f64)
    } else {
        (beta.powi(k as i32) - 1.0) / (1.0 - beta)
    }
}

/// `S_k h = (beta^k - 1)/(1 - beta) (beta I - T) S^k h`.
pub fn s_k_map(t: &WeightedTranslation, beta: f64, k: usize, h: &CompactVector) -> Result<CompactVector> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("S_k needs k >= 1".into()));
    }
    let sk = t.right_inverse_power(h, k);
    let shifted = sk.scale_real(beta).sub(&t.apply(&sk));
    Ok(shifted.scale_real(s_k_factor(beta, k)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitivityRow {
    pub k: usize,
    /// `||P_k(T)(beta I - T) f0||_p`
    pub q1: f64,
    /// `||S_k h||_p`
    pub q2: f64,
    /// `||P_k(T) S_k h - h||_p`
    pub q3: f64,
    /// `||(P_k(T) S_k h - h) + beta^k S^k h||_p / ||h||_p`
    pub identity_residual: f64,
}

/// Tabulates the three quantities of the convex-transitivity criterion for
/// each `k` in `ks`, along with the residual of the algebraic identity
/// `P_k(T) S_k h - h = -beta^k S^k h`.
pub fn transitivity_demo(
    t: &WeightedTranslation,
    beta: f64,
    f0: &CompactVector,
    h: &CompactVector,
    ks: impl IntoIterator<Item = usize>,
    p: f64,
) -> Result<Vec<TransitivityRow>> {
    let lattice = *t.lattice();
    let h_norm = h.p_norm(p, &lattice)?;
    let y = f0.scale_real(beta).sub(&t.apply(f0));
    let mut rows = Vec::new();
    for k in ks {
        let poly = proof_polynomial(beta, k)?;
        let q1 = poly.evaluate(t, &y).p_norm(p, &lattice)?;
        let sk_h = s_k_map(t, beta, k, h)?;
        let q2 = sk_h.p_norm(p, &lattice)?;
        let defect = poly.evaluate(t, &sk_h).sub(h);
        let q3 = defect.p_norm(p, &lattice)?;
        let predicted = t.right_inverse_power(h, k).scale_real(beta.powi(k as i32));
        let residual = defect.add(&predicted).p_norm(p, &lattice)?;
        let identity_residual = if h_norm > 0.0 { residual / h_norm } else { residual };
        rows.push(TransitivityRow {
            k,
            q1,
            q2,
            q3,
            identity_residual,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Lattice, StepElement};
    use crate::weights::LatticeWeight;

    fn e(i: i64) -> CompactVector {
        CompactVector::point_mass(i)
    }

    #[test]
    fn s_k_examples() {
        let shift = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let v = s_k_map(&shift, 1.0, 1, &e(1)).unwrap();
        assert!(v.max_abs_diff(&e(1).sub(&e(0))) < 1e-15);
        let two = WeightedTranslation::scaled_shift(1, 2.0).unwrap();
        let v = s_k_map(&two, 4.0, 1, &e(1)).unwrap();
        assert!(v.max_abs_diff(&e(1).sub(&e(0).scale_real(2.0))) < 1e-15);
        let z = s_k_map(&two, 1.0, 3, &CompactVector::zero()).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn identity_holds_for_random_like_data() {
        let g = StepElement::new(-2).unwrap();
        let w = LatticeWeight::new(0.8, 2.5, -3, vec![1.2, 0.6, 3.0, 1.0]).unwrap();
        let t = WeightedTranslation::new(g, w, Lattice::Integers);
        let f0 = CompactVector::from_real(-1, &[1.0, -0.5, 2.0]);
        let h = CompactVector::from_real(2, &[0.3, 0.0, -1.0]);
        for beta in [1.0, 1.3, 2.0] {
            let rows = transitivity_demo(&t, beta, &f0, &h, 1..=25, 2.0).unwrap();
            for r in rows {
                assert!(r.identity_residual < 1e-8, "beta {beta} k {}: {}", r.k, r.identity_residual);
            }
        }
    }

    #[test]
    fn pure_translation_keeps_q3_at_one() {
        let t = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let rows = transitivity_demo(&t, 1.0, &e(0), &e(0), 1..=30, 2.0).unwrap();
        for r in &rows {
            assert!((r.q3 - 1.0).abs() < 1e-12);
        }
        // q1 = ||e_0 - e_k|| / k here, which still tends to zero
        assert!((rows[9].q1 - 2f64.sqrt() / 10.0).abs() < 1e-12);
    }
}
