//! Weighted translation operators `T_{g,w} f = w * (f * delta_g)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{CompactVector, Lattice, StepElement};
use crate::weights::LatticeWeight;

/// Largest reciprocal weight considered numerically bounded.
const INVERSE_LIMIT: f64 = 1e300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTranslation {
    step: StepElement,
    weight: LatticeWeight,
    lattice: Lattice,
}

/// Raised when `1 / inf w` leaves the representable range, so that the
/// inverse operator (and `S`) are numerically unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnboundedInverse {
    pub inf_weight: f64,
}

impl WeightedTranslation {
    pub fn new(step: StepElement, weight: LatticeWeight, lattice: Lattice) -> Self {
        WeightedTranslation { step, weight, lattice }
    }

    /// Translation by `steps` on the integers with the constant weight `c`.
    pub fn scaled_shift(steps: i64, c: f64) -> Result<Self> {
        Ok(WeightedTranslation::new(
            StepElement::new(steps)?,
            LatticeWeight::constant(c)?,
            Lattice::Integers,
        ))
    }

    pub fn step(&self) -> StepElement {
        self.step
    }

    pub fn weight(&self) -> &LatticeWeight {
        &self.weight
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `sup w`, which bounds the operator norm on every `L^p`.
    pub fn norm_bound(&self) -> f64 {
        self.weight.sup()
    }

    /// The same translation with weight `c * w`, i.e. the operator `c T`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Ok(WeightedTranslation {
            weight: self.weight.scaled(c)?,
            ..self.clone()
        })
    }

    /// `(T f)(x) = w(x) f(x - g)`.
    pub fn apply(&self, f: &CompactVector) -> CompactVector {
        f.translate(1, self.step).multiply_by(|x| self.weight.value(x))
    }

    /// `T^n f = (prod_{i=0}^{n-1} w * delta_{g^i}) (f * delta_{g^n})`.
    pub fn apply_power(&self, f: &CompactVector, n: usize) -> CompactVector {
        if n == 0 {
            return f.clone();
        }
        let product = self.weight.forward_product(self.step, n);
        f.translate(n as i64, self.step)
            .multiply_by(|x| product.ln_value(x).exp())
    }

    /// `f, T f, ..., T^n f` by repeated application.
    pub fn orbit(&self, f: &CompactVector, n: usize) -> Vec<CompactVector> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(f.clone());
        for i in 0..n {
            let next = self.apply(&out[i]);
            out.push(next);
        }
        out
    }

    /// `T^{-1} = T_{g^{-1}, (1/w) * delta_{g^{-1}}}`.
    pub fn inverse(&self) -> WeightedTranslation {
        WeightedTranslation {
            step: self.step.inverse(),
            weight: self.weight.reciprocal().translate(1, self.step.inverse()),
            lattice: self.lattice,
        }
    }

    pub fn inverse_warning(&self) -> Option<UnboundedInverse> {
        let inf = self.weight.inf();
        if !(1.0 / inf).is_finite() || 1.0 / inf > INVERSE_LIMIT {
            Some(UnboundedInverse { inf_weight: inf })
        } else {
            None
        }
    }

    /// `S f = ((1/w) f) * delta_{g^{-1}}`, i.e. `(S f)(x) = f(x + g) / w(x + g)`.
    pub fn right_inverse(&self, f: &CompactVector) -> CompactVector {
        f.multiply_by(|x| (-self.weight.ln_value(x)).exp())
            .translate(-1, self.step)
    }

    /// `S^k h = (prod_{i=1}^{k} w * delta_{g^{-i}})^{-1} (h * delta_{g^{-k}})`.
    pub fn right_inverse_power(&self, h: &CompactVector, k: usize) -> CompactVector {
        if k == 0 {
            return h.clone();
        }
        let product = self.weight.backward_product(self.step, k);
        h.translate(-(k as i64), self.step)
            .multiply_by(|x| (-product.ln_value(x)).exp())
    }

    /// `(T^* phi)(y) = w(y + g) phi(y + g)` for the bilinear pairing.
    pub fn adjoint_apply(&self, phi: &CompactVector) -> CompactVector {
        phi.multiply_by(|x| self.weight.value(x)).translate(-1, self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::C64;

    fn example_two() -> WeightedTranslation {
        let g = StepElement::new(-1).unwrap();
        let w = LatticeWeight::new(1.0, 2.0, 1, vec![]).unwrap().translate(1, g);
        WeightedTranslation::new(g, w, Lattice::Integers)
    }

    fn e(i: i64) -> CompactVector {
        CompactVector::point_mass(i)
    }

    fn assert_close(a: &CompactVector, b: &CompactVector, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "{a:?} vs {b:?}: diff {d}");
    }

    #[test]
    fn apply_examples() {
        let shift = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        assert_close(&shift.apply(&e(0)), &e(1), 0.0);
        let t = example_two();
        assert_close(&t.apply(&e(0)), &e(-1), 0.0);
        assert_close(&t.apply(&e(1)), &e(0).scale_real(2.0), 0.0);
    }

    #[test]
    fn apply_power_examples() {
        let t = example_two();
        assert_eq!(t.apply_power(&e(3), 0), e(3));
        assert_close(&t.apply_power(&e(1), 2), &e(-1).scale_real(2.0), 0.0);
        let c = WeightedTranslation::scaled_shift(1, 1.5).unwrap();
        assert_close(&c.apply_power(&e(0), 7), &e(7).scale_real(1.5f64.powi(7)), 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let id = WeightedTranslation::scaled_shift(1, 1.0).unwrap().inverse();
        assert_eq!(id.step().steps(), -1);
        assert_eq!(id.weight().value(4), 1.0);
        let two = WeightedTranslation::scaled_shift(1, 2.0).unwrap().inverse();
        assert_eq!(two.step().steps(), -1);
        assert_eq!(two.weight().value(-3), 0.5);
        let inv = example_two().inverse();
        assert_eq!(inv.step().steps(), 1);
        for x in -4..5 {
            assert_eq!(inv.weight().value(x), if x >= 1 { 0.5 } else { 1.0 }, "x = {x}");
        }
    }

    #[test]
    fn inverse_undoes_apply() {
        let t = example_two();
        let f = CompactVector::from_real(-3, &[1.0, -2.0, 0.5, 4.0, 3.0, 1.5]);
        assert_close(&t.inverse().apply(&t.apply(&f)), &f, 1e-12);
        assert_close(&t.apply(&t.inverse().apply(&f)), &f, 1e-12);
    }

    #[test]
    fn right_inverse_examples() {
        let shift = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        assert_close(&shift.right_inverse(&e(1)), &e(0), 0.0);
        assert_close(&example_two().right_inverse(&e(-1)), &e(0), 0.0);
        let two = WeightedTranslation::scaled_shift(1, 2.0).unwrap();
        assert_close(&two.right_inverse(&e(1)), &e(0).scale_real(0.5), 0.0);
    }

    #[test]
    fn right_inverse_power_examples() {
        let t = example_two();
        assert_eq!(t.right_inverse_power(&e(2), 0), e(2));
        let two = WeightedTranslation::scaled_shift(1, 2.0).unwrap();
        assert_close(&two.right_inverse_power(&e(2), 2), &e(0).scale_real(0.25), 1e-15);
        assert_close(&t.right_inverse_power(&e(-2), 2), &e(0), 1e-15);
    }

    #[test]
    fn adjoint_examples() {
        let shift = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        assert_close(&shift.adjoint_apply(&e(1)), &e(0), 0.0);
        let t = example_two();
        assert_close(&t.adjoint_apply(&e(-1)), &e(0), 0.0);
        assert_close(&t.adjoint_apply(&e(0)), &e(1).scale_real(2.0), 0.0);
    }

    #[test]
    fn adjoint_duality_on_complex_vectors() {
        let t = example_two();
        let f = CompactVector::new(-2, vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)]);
        let phi = CompactVector::new(-3, vec![C64::new(0.5, -1.0), C64::new(2.0, 0.25), C64::new(1.0, 1.0)]);
        let lhs = t.apply(&f).pair(&phi);
        let rhs = f.pair(&t.adjoint_apply(&phi));
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn tiny_weight_flags_inverse() {
        let t = WeightedTranslation::new(
            StepElement::new(1).unwrap(),
            LatticeWeight::new(1e-305, 1.0, 0, vec![]).unwrap(),
            Lattice::Integers,
        );
        assert!(t.inverse_warning().is_some());
        assert!(example_two().inverse_warning().is_none());
    }
}
