//! Eventually constant, strictly positive weights on the lattice.
//!
//! A weight is a left tail value, a finite core and a right tail value. The
//! class is closed under translation, pointwise product and reciprocal, so
//! every running product of translates is again a `LatticeWeight` and can be
//! evaluated exactly on any finite window.
//!
//! Values are held either directly or as natural logarithms. A product
//! switches to logarithms as soon as some value leaves `[1e-300, 1e300]`;
//! linear products are plain floating point multiplications.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{StepElement, Window};

const LINEAR_MAX: f64 = 1e300;
const LINEAR_MIN: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeWeight {
    left_tail: f64,
    right_tail: f64,
    core_lo: i64,
    core: Vec<f64>,
    scale: Scale,
}

/// Which end of the lattice a running product drifts towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// Side reached by `x + i * offset` as `i` grows.
    pub fn of_offset(offset: i64) -> Side {
        if offset > 0 {
            Side::Right
        } else {
            Side::Left
        }
    }
}

fn in_linear_range(v: f64) -> bool {
    (LINEAR_MIN..=LINEAR_MAX).contains(&v)
}

impl LatticeWeight {
    /// Value `left_tail` for `x < core_lo`, `core[x - core_lo]` on the core and
    /// `right_tail` for `x >= core_lo + core.len()`.
    pub fn new(left_tail: f64, right_tail: f64, core_lo: i64, core: Vec<f64>) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(left_tail) || !ok(right_tail) {
            return Err(Error::InvalidWeight(format!(
                "tails must be positive and finite (left {left_tail}, right {right_tail})"
            )));
        }
        if let Some((j, v)) = core.iter().enumerate().find(|(_, v)| !ok(**v)) {
            return Err(Error::InvalidWeight(format!(
                "core value {v} at index {}",
                core_lo + j as i64
            )));
        }
        let mut w = LatticeWeight {
            left_tail,
            right_tail,
            core_lo,
            core,
            scale: Scale::Linear,
        };
        w.normalize_scale();
        Ok(w)
    }

    pub fn constant(c: f64) -> Result<Self> {
        LatticeWeight::new(c, c, 0, Vec::new())
    }

    /// Samples `f` at indices `lo..=hi`; tails take over outside.
    pub fn sample(
        left_tail: f64,
        right_tail: f64,
        lo: i64,
        hi: i64,
        f: impl Fn(i64) -> f64,
    ) -> Result<Self> {
        let core = if hi >= lo { (lo..=hi).map(f).collect() } else { Vec::new() };
        LatticeWeight::new(left_tail, right_tail, lo, core)
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn core_lo(&self) -> i64 {
        self.core_lo
    }

    /// One past the last core index.
    pub fn core_end(&self) -> i64 {
        self.core_lo + self.core.len() as i64
    }

    fn stored(&self, x: i64) -> f64 {
        if x < self.core_lo {
            self.left_tail
        } else if x >= self.core_end() {
            self.right_tail
        } else {
            self.core[(x - self.core_lo) as usize]
        }
    }

    fn to_ln(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => v.ln(),
            Scale::Log => v,
        }
    }

    fn to_linear(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => v,
            Scale::Log => v.exp(),
        }
    }

    /// Value at lattice index `x` (may over- or underflow for log-held weights).
    pub fn value(&self, x: i64) -> f64 {
        self.to_linear(self.stored(x))
    }

    pub fn ln_value(&self, x: i64) -> f64 {
        self.to_ln(self.stored(x))
    }

    pub fn tail(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.to_linear(self.left_tail),
            Side::Right => self.to_linear(self.right_tail),
        }
    }

    pub fn ln_tail(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.to_ln(self.left_tail),
            Side::Right => self.to_ln(self.right_tail),
        }
    }

    pub fn left_tail(&self) -> f64 {
        self.tail(Side::Left)
    }

    pub fn right_tail(&self) -> f64 {
        self.tail(Side::Right)
    }

    fn all_stored(&self) -> impl Iterator<Item = f64> + '_ {
        [self.left_tail, self.right_tail]
            .into_iter()
            .chain(self.core.iter().copied())
    }

    /// Global supremum, finite for every weight of this type.
    pub fn sup(&self) -> f64 {
        self.to_linear(self.all_stored().fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn inf(&self) -> f64 {
        self.to_linear(self.all_stored().fold(f64::INFINITY, f64::min))
    }

    pub fn ln_inf(&self) -> f64 {
        self.to_ln(self.all_stored().fold(f64::INFINITY, f64::min))
    }

    pub fn ln_sup(&self) -> f64 {
        self.to_ln(self.all_stored().fold(f64::NEG_INFINITY, f64::max))
    }

    fn from_ln_parts(left: f64, right: f64, core_lo: i64, core: Vec<f64>) -> Self {
        let mut w = LatticeWeight {
            left_tail: left,
            right_tail: right,
            core_lo,
            core,
            scale: Scale::Log,
        };
        w.normalize_scale();
        w
    }

    /// Returns to linear storage when every value fits, and trims core entries
    /// that coincide with the adjacent tail.
    fn normalize_scale(&mut self) {
        if self.scale == Scale::Log {
            let fits = self.all_stored().all(|v| in_linear_range(v.exp()));
            if fits {
                self.left_tail = self.left_tail.exp();
                self.right_tail = self.right_tail.exp();
                for v in &mut self.core {
                    *v = v.exp();
                }
                self.scale = Scale::Linear;
            }
        } else if !self.all_stored().all(in_linear_range) {
            self.left_tail = self.left_tail.ln();
            self.right_tail = self.right_tail.ln();
            for v in &mut self.core {
                *v = v.ln();
            }
            self.scale = Scale::Log;
        }
        let lead = self.core.iter().take_while(|v| **v == self.left_tail).count();
        if lead > 0 {
            self.core.drain(..lead);
            self.core_lo += lead as i64;
        }
        let trail = self.core.iter().rev().take_while(|v| **v == self.right_tail).count();
        self.core.truncate(self.core.len() - trail);
    }

    /// `w * delta_{g^n}`, that is `x -> w(x - n g)`.
    pub fn translate(&self, n: i64, g: StepElement) -> LatticeWeight {
        let mut w = self.clone();
        w.core_lo += g.times(n);
        w
    }

    /// Pointwise product.
    pub fn product(&self, other: &LatticeWeight) -> LatticeWeight {
        let lo = self.core_lo.min(other.core_lo);
        let end = self.core_end().max(other.core_end());
        if self.scale == Scale::Linear && other.scale == Scale::Linear {
            let core: Vec<f64> = (lo..end).map(|x| self.stored(x) * other.stored(x)).collect();
            let left = self.left_tail * other.left_tail;
            let right = self.right_tail * other.right_tail;
            if in_linear_range(left) && in_linear_range(right) && core.iter().all(|v| in_linear_range(*v)) {
                let mut w = LatticeWeight {
                    left_tail: left,
                    right_tail: right,
                    core_lo: lo,
                    core,
                    scale: Scale::Linear,
                };
                w.normalize_scale();
                return w;
            }
        }
        let core = (lo..end).map(|x| self.ln_value(x) + other.ln_value(x)).collect();
        LatticeWeight::from_ln_parts(
            self.ln_tail(Side::Left) + other.ln_tail(Side::Left),
            self.ln_tail(Side::Right) + other.ln_tail(Side::Right),
            lo,
            core,
        )
    }

    /// Multiplies by the positive constant `c`.
    pub fn scaled(&self, c: f64) -> Result<LatticeWeight> {
        Ok(self.product(&LatticeWeight::constant(c)?))
    }

    /// `x -> 1 / w(x)`.
    pub fn reciprocal(&self) -> LatticeWeight {
        match self.scale {
            Scale::Linear => {
                let inv = |v: f64| 1.0 / v;
                let core: Vec<f64> = self.core.iter().map(|v| inv(*v)).collect();
                let (l, r) = (inv(self.left_tail), inv(self.right_tail));
                if in_linear_range(l) && in_linear_range(r) && core.iter().all(|v| in_linear_range(*v)) {
                    let mut w = LatticeWeight {
                        left_tail: l,
                        right_tail: r,
                        core_lo: self.core_lo,
                        core,
                        scale: Scale::Linear,
                    };
                    w.normalize_scale();
                    w
                } else {
                    LatticeWeight::from_ln_parts(
                        -self.left_tail.ln(),
                        -self.right_tail.ln(),
                        self.core_lo,
                        self.core.iter().map(|v| -v.ln()).collect(),
                    )
                }
            }
            Scale::Log => LatticeWeight::from_ln_parts(
                -self.left_tail,
                -self.right_tail,
                self.core_lo,
                self.core.iter().map(|v| -v).collect(),
            ),
        }
    }

    /// `prod_{i=1}^{k} w * delta_{g^{-i}}`, the function `x -> prod_{i=1}^{k} w(x + i g)`.
    pub fn backward_product(&self, g: StepElement, k: usize) -> LatticeWeight {
        assert!(k >= 1, "backward product needs k >= 1");
        self.backward_products(g).nth(k - 1).unwrap()
    }

    /// `prod_{i=0}^{k-1} w * delta_{g^i}`, the function `x -> prod_{i=0}^{k-1} w(x - i g)`.
    pub fn forward_product(&self, g: StepElement, k: usize) -> LatticeWeight {
        assert!(k >= 1, "forward product needs k >= 1");
        self.forward_products(g).nth(k - 1).unwrap()
    }

    /// Running backward products for `k = 1, 2, ...`, each built from the last.
    pub fn backward_products(&self, g: StepElement) -> RunningProducts<'_> {
        RunningProducts {
            base: self,
            shift: g.inverse(),
            next_factor: 1,
            current: None,
        }
    }

    /// Running forward products for `k = 1, 2, ...`, each built from the last.
    pub fn forward_products(&self, g: StepElement) -> RunningProducts<'_> {
        RunningProducts {
            base: self,
            shift: g,
            next_factor: 0,
            current: None,
        }
    }

    fn window_fold(&self, window: Window, init: f64, f: fn(f64, f64) -> f64) -> f64 {
        // Only the core can vary inside the window; tails contribute one value each.
        let mut acc = init;
        if window.lo < self.core_lo {
            acc = f(acc, self.left_tail);
        }
        if window.hi >= self.core_end() {
            acc = f(acc, self.right_tail);
        }
        let lo = window.lo.max(self.core_lo);
        let hi = window.hi.min(self.core_end() - 1);
        for x in lo..=hi {
            acc = f(acc, self.core[(x - self.core_lo) as usize]);
        }
        acc
    }

    /// Maximum over the window, in log space.
    pub fn window_ln_max(&self, window: Window) -> f64 {
        self.to_ln(self.window_fold(window, f64::NEG_INFINITY, f64::max))
    }

    pub fn window_ln_min(&self, window: Window) -> f64 {
        self.to_ln(self.window_fold(window, f64::INFINITY, f64::min))
    }

    /// Supremum of the weight restricted to the window.
    pub fn window_sup(&self, window: Window) -> f64 {
        self.to_linear(self.window_fold(window, f64::NEG_INFINITY, f64::max))
    }

    pub fn window_inf(&self, window: Window) -> f64 {
        self.to_linear(self.window_fold(window, f64::INFINITY, f64::min))
    }

    /// Largest relative deviation from `other` over `window`.
    pub fn max_relative_diff(&self, other: &LatticeWeight, window: Window) -> f64 {
        window
            .iter()
            .map(|x| (self.ln_value(x) - other.ln_value(x)).exp_m1().abs())
            .fold(0.0, f64::max)
    }
}

/// Iterator over `prod_{i} w * delta_{g^{shift-steps}}`, extended by one factor per call.
pub struct RunningProducts<'a> {
    base: &'a LatticeWeight,
    shift: StepElement,
    next_factor: i64,
    current: Option<LatticeWeight>,
}

impl Iterator for RunningProducts<'_> {
    type Item = LatticeWeight;

    fn next(&mut self) -> Option<LatticeWeight> {
        let factor = self.base.translate(self.next_factor, self.shift);
        self.next_factor += 1;
        let next = match self.current.take() {
            None => factor,
            Some(prev) => prev.product(&factor),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(s: i64) -> StepElement {
        StepElement::new(s).unwrap()
    }

    fn win(lo: i64, hi: i64) -> Window {
        Window::new(lo, hi).unwrap()
    }

    /// Example 2.7 weight before shifting: 2 for i >= 1, 1 for i <= 0.
    fn step_weight() -> LatticeWeight {
        LatticeWeight::new(1.0, 2.0, 1, vec![]).unwrap()
    }

    /// The same weight moved one step left: 2 for x >= 0, 1 for x <= -1.
    fn shifted_step_weight() -> LatticeWeight {
        step_weight().translate(1, step(-1))
    }

    #[test]
    fn rejects_nonpositive_values() {
        assert!(LatticeWeight::new(0.0, 1.0, 0, vec![]).is_err());
        assert!(LatticeWeight::new(1.0, 1.0, 0, vec![1.0, -2.0]).is_err());
        assert!(LatticeWeight::new(1.0, f64::INFINITY, 0, vec![]).is_err());
    }

    #[test]
    fn translate_examples() {
        let w = shifted_step_weight();
        for x in -6..6 {
            assert_eq!(w.value(x), if x >= 0 { 2.0 } else { 1.0 }, "x = {x}");
        }
        let base = step_weight();
        assert_eq!(base.translate(0, step(3)), base);
        let c = LatticeWeight::constant(1.7).unwrap();
        assert_eq!(c.translate(5, step(-2)).value(11), 1.7);
    }

    #[test]
    fn translate_composes() {
        let w = LatticeWeight::new(0.5, 3.0, -2, vec![1.0, 4.0, 0.25]).unwrap();
        let g = step(3);
        let a = w.translate(2, g).translate(-5, g);
        let b = w.translate(-3, g);
        for x in -30..30 {
            assert_eq!(a.value(x), b.value(x));
        }
    }

    #[test]
    fn product_examples() {
        let w = step_weight();
        assert_eq!(w.product(&LatticeWeight::constant(1.0).unwrap()), w);
        let six = LatticeWeight::constant(2.0).unwrap().product(&LatticeWeight::constant(3.0).unwrap());
        assert_eq!(six.value(-100), 6.0);
        assert_eq!(six.value(100), 6.0);
        let sq = w.product(&w);
        for x in -5..5 {
            assert_eq!(sq.value(x), if x >= 1 { 4.0 } else { 1.0 });
        }
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(LatticeWeight::constant(2.0).unwrap().reciprocal().value(0), 0.5);
        assert_eq!(LatticeWeight::constant(1.0).unwrap().reciprocal().value(0), 1.0);
        let r = step_weight().reciprocal();
        for x in -5..5 {
            assert_eq!(r.value(x), if x >= 1 { 0.5 } else { 1.0 });
        }
    }

    #[test]
    fn backward_product_examples() {
        let c = LatticeWeight::constant(1.5).unwrap();
        let p = c.backward_product(step(2), 7);
        assert!((p.value(3) - 1.5f64.powi(7)).abs() < 1e-12);
        let w = shifted_step_weight();
        let b = w.backward_product(step(-1), 10);
        assert_eq!(b.value(5), 32.0);
        assert_eq!(b.value(0), 1.0);
    }

    #[test]
    fn forward_product_examples() {
        let c = LatticeWeight::constant(0.5).unwrap();
        assert!((c.forward_product(step(1), 4).value(-9) - 0.0625).abs() < 1e-15);
        let w = shifted_step_weight();
        assert_eq!(w.forward_product(step(-1), 10).value(-5), 32.0);
        let one = w.forward_product(step(-1), 1);
        for x in -4..4 {
            assert_eq!(one.value(x), w.value(x));
        }
    }

    #[test]
    fn window_sup_examples() {
        let c = LatticeWeight::constant(3.0).unwrap();
        assert_eq!(c.window_sup(win(-4, 9)), 3.0);
        let w = shifted_step_weight();
        assert_eq!(w.window_sup(win(-5, -1)), 1.0);
        assert_eq!(w.window_sup(win(-5, 0)), 2.0);
        assert_eq!(w.window_inf(win(-5, 0)), 1.0);
    }

    #[test]
    fn log_space_switch_is_transparent() {
        let w = LatticeWeight::new(2.0, 3.0, 0, vec![1.0]).unwrap();
        let big = w.forward_product(step(1), 1200);
        assert_eq!(big.scale(), Scale::Log);
        // at x = -10 every factor w(-10 - i) comes from the left tail
        assert!((big.ln_value(-10) - 1200.0 * 2f64.ln()).abs() < 1e-9);
        let back = big.reciprocal().product(&big);
        assert_eq!(back.scale(), Scale::Linear);
        assert!((back.value(7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn core_is_trimmed_against_tails() {
        let w = LatticeWeight::new(1.0, 2.0, -3, vec![1.0, 1.0, 5.0, 2.0]).unwrap();
        assert_eq!(w.core_lo(), -1);
        assert_eq!(w.core_end(), 0);
        assert_eq!(w.value(-1), 5.0);
    }
}
