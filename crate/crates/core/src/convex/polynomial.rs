use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::CompactVector;
use crate::operator::WeightedTranslation;

const SUM_TOLERANCE: f64 = 1e-12;

/// `a_0 t^offset + a_1 t^(offset+1) + ... + a_n t^(offset+n)` with `a_j >= 0`,
/// `sum a_j = 1` and `a_n > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct ConvexPolynomial {
    offset: usize,
    coefficients: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPolynomial {
    offset: usize,
    coefficients: Vec<f64>,
}

impl TryFrom<RawPolynomial> for ConvexPolynomial {
    type Error = Error;

    fn try_from(raw: RawPolynomial) -> Result<Self> {
        ConvexPolynomial::new(raw.offset, raw.coefficients)
    }
}

impl From<ConvexPolynomial> for RawPolynomial {
    fn from(p: ConvexPolynomial) -> Self {
        RawPolynomial {
            offset: p.offset,
            coefficients: p.coefficients,
        }
    }
}

impl ConvexPolynomial {
    pub fn new(offset: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        }
        if let Some(a) = coefficients.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidPolynomial(format!("coefficient {a} is negative or not finite")));
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPolynomial(format!("coefficients sum to {sum}, not 1")));
        }
        if *coefficients.last().unwrap() <= 0.0 {
            return Err(Error::InvalidPolynomial("leading coefficient must be positive".into()));
        }
        Ok(ConvexPolynomial { offset, coefficients })
    }

    /// Normalises nonnegative weights to unit mass and drops zero edges.
    pub fn from_weights(offset: usize, weights: &[f64]) -> Result<Self> {
        let first = weights.iter().position(|a| *a > 0.0);
        let last = weights.iter().rposition(|a| *a > 0.0);
        let (Some(first), Some(last)) = (first, last) else {
            return Err(Error::InvalidPolynomial("all weights are zero".into()));
        };
        if let Some(a) = weights.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidPolynomial(format!("weight {a} is negative or not finite")));
        }
        let kept = &weights[first..=last];
        let mass: f64 = kept.iter().sum();
        ConvexPolynomial::new(offset + first, kept.iter().map(|a| a / mass).collect())
    }

    /// The constant polynomial `1`.
    pub fn identity() -> Self {
        ConvexPolynomial {
            offset: 0,
            coefficients: vec![1.0],
        }
    }

    /// The monomial `t^n`.
    pub fn monomial(n: usize) -> Self {
        ConvexPolynomial {
            offset: n,
            coefficients: vec![1.0],
        }
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.offset + self.coefficients.len() - 1
    }

    /// Coefficient of `t^power`.
    pub fn coefficient(&self, power: usize) -> f64 {
        power
            .checked_sub(self.offset)
            .and_then(|j| self.coefficients.get(j).copied())
            .unwrap_or(0.0)
    }

    /// Coefficients of `t^0 .. t^degree`.
    pub fn dense(&self) -> Vec<f64> {
        (0..=self.degree()).map(|p| self.coefficient(p)).collect()
    }

    /// `P(T) f = sum_j a_j T^{offset+j} f` over one orbit sweep.
    pub fn evaluate(&self, t: &WeightedTranslation, f: &CompactVector) -> CompactVector {
        let mut acc = CompactVector::zero();
        let mut current = t.apply_power(f, self.offset);
        for (j, &a) in self.coefficients.iter().enumerate() {
            if j > 0 {
                current = t.apply(&current);
            }
            if a != 0.0 {
                acc = acc.axpy(a.into(), &current);
            }
        }
        acc
    }

    /// `sum_j a_j x^{offset+j}` for a real argument.
    pub fn eval_scalar(&self, x: f64) -> f64 {
        let inner = self.coefficients.iter().rev().fold(0.0, |acc, a| acc * x + a);
        inner * x.powi(self.offset as i32)
    }
}

/// The polynomial used to verify the convex-transitivity criterion:
/// `(beta - 1)/(beta^k - 1) (beta^{k-1} + beta^{k-2} t + ... + t^{k-1})` for
/// `beta > 1` and `(1 + t + ... + t^{k-1}) / k` for `beta = 1`.
pub fn proof_polynomial(beta: f64, k: usize) -> Result<ConvexPolynomial> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("proof polynomial needs k >= 1".into()));
    }
    let coefficients: Vec<f64> = if beta == 1.0 {
        vec![1.0 / k as f64; k]
    } else {
        // (beta-1) beta^{k-1-j} / (beta^k - 1) = (beta-1) beta^{-1-j} / (1 - beta^{-k})
        let denom = -(-(k as f64) * beta.ln()).exp_m1();
        (0..k)
            .map(|j| (beta - 1.0) * (-((j + 1) as f64) * beta.ln()).exp() / denom)
            .collect()
    };
    // renormalise away the last bits of round-off
    let sum: f64 = coefficients.iter().sum();
    ConvexPolynomial::new(0, coefficients.iter().map(|a| a / sum).collect())
}

/// `(t^{n0} P + Q) / 2`, the combination used to push a convex polynomial's
/// degree above `n0` while keeping it convex.
pub fn lemma_combine(p: &ConvexPolynomial, q: &ConvexPolynomial, n0: usize) -> ConvexPolynomial {
    let degree = (p.degree() + n0).max(q.degree());
    let dense: Vec<f64> = (0..=degree)
        .map(|power| {
            let from_p = power.checked_sub(n0).map_or(0.0, |e| p.coefficient(e));
            0.5 * from_p + 0.5 * q.coefficient(power)
        })
        .collect();
    ConvexPolynomial::from_weights(0, &dense).expect("average of convex polynomials is convex")
}
