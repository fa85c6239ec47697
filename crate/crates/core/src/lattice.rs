//! Lattice groups, aperiodic steps and finitely supported vectors.
//!
//! Two groups are modelled: the integers with counting measure, and the real
//! line sampled on a uniform grid, where each grid point carries mass equal to
//! the spacing. Translations are always whole index shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Lattice {
    Integers,
    GriddedReals { grid_spacing: f64 },
}

impl Lattice {
    pub fn gridded_reals(grid_spacing: f64) -> Result<Self> {
        if !(grid_spacing.is_finite() && grid_spacing > 0.0) {
            return Err(Error::InvalidSpacing(grid_spacing));
        }
        Ok(Lattice::GriddedReals { grid_spacing })
    }

    pub fn grid_spacing(&self) -> f64 {
        match *self {
            Lattice::Integers => 1.0,
            Lattice::GriddedReals { grid_spacing } => grid_spacing,
        }
    }

    /// Mass carried by a single lattice point.
    pub fn measure_weight(&self) -> f64 {
        self.grid_spacing()
    }

    /// Position of lattice index `i` in group units.
    pub fn position(&self, i: i64) -> f64 {
        i as f64 * self.grid_spacing()
    }
}

/// A nonzero translation expressed in lattice units.
///
/// On the integers and on a gridded line every nonzero element generates a
/// non-compact subgroup, so nonzero is the same as aperiodic here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct StepElement(i64);

impl StepElement {
    pub fn new(steps: i64) -> Result<Self> {
        if steps == 0 {
            Err(Error::ZeroStep)
        } else {
            Ok(StepElement(steps))
        }
    }

    pub fn steps(self) -> i64 {
        self.0
    }

    pub fn inverse(self) -> Self {
        StepElement(-self.0)
    }

    /// Index offset of `n` applications of this step.
    pub fn times(self, n: i64) -> i64 {
        n * self.0
    }
}

impl TryFrom<i64> for StepElement {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        StepElement::new(v)
    }
}

impl From<StepElement> for i64 {
    fn from(g: StepElement) -> i64 {
        g.0
    }
}

/// Inclusive interval of lattice indices, the compact surrogate for a set `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn shifted(&self, by: i64) -> Window {
        Window {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }
}

/// Complex function on the lattice with finite support, stored as a dense
/// window starting at `lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactVector {
    lo: i64,
    values: Vec<C64>,
}

impl Default for CompactVector {
    fn default() -> Self {
        CompactVector::zero()
    }
}

impl CompactVector {
    pub fn zero() -> Self {
        CompactVector {
            lo: 0,
            values: Vec::new(),
        }
    }

    pub fn new(lo: i64, values: Vec<C64>) -> Self {
        CompactVector { lo, values }
    }

    pub fn from_real(lo: i64, values: &[f64]) -> Self {
        CompactVector {
            lo,
            values: values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        }
    }

    /// Unit point mass `e_i`.
    pub fn point_mass(i: i64) -> Self {
        CompactVector {
            lo: i,
            values: vec![C64::new(1.0, 0.0)],
        }
    }

    /// Builds a vector from `(index, value)` entries; repeated indices add up.
    pub fn from_sparse(entries: &[(i64, C64)]) -> Self {
        let Some(lo) = entries.iter().map(|e| e.0).min() else {
            return CompactVector::zero();
        };
        let hi = entries.iter().map(|e| e.0).max().unwrap();
        let mut values = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for &(i, v) in entries {
            values[(i - lo) as usize] += v;
        }
        CompactVector { lo, values }
    }

    /// Builds `x -> f(x)` over a window.
    pub fn from_fn(window: Window, f: impl Fn(i64) -> C64) -> Self {
        CompactVector {
            lo: window.lo,
            values: window.iter().map(f).collect(),
        }
    }

    /// First index of the stored window (entries there may be zero).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn stored_len(&self) -> usize {
        self.values.len()
    }

    pub fn stored_window(&self) -> Option<Window> {
        if self.values.is_empty() {
            None
        } else {
            Some(Window {
                lo: self.lo,
                hi: self.lo + self.values.len() as i64 - 1,
            })
        }
    }

    pub fn get(&self, x: i64) -> C64 {
        let j = x - self.lo;
        if j < 0 || j >= self.values.len() as i64 {
            C64::new(0.0, 0.0)
        } else {
            self.values[j as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &v)| (self.lo + j as i64, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    /// Smallest window holding every nonzero entry.
    pub fn support(&self) -> Option<Window> {
        let first = self.values.iter().position(|v| v.norm_sqr() != 0.0)?;
        let last = self.values.iter().rposition(|v| v.norm_sqr() != 0.0)?;
        Some(Window {
            lo: self.lo + first as i64,
            hi: self.lo + last as i64,
        })
    }

    /// Drops leading and trailing zeros.
    pub fn trimmed(&self) -> CompactVector {
        match self.support() {
            None => CompactVector::zero(),
            Some(s) => {
                let a = (s.lo - self.lo) as usize;
                let b = (s.hi - self.lo) as usize;
                CompactVector {
                    lo: s.lo,
                    values: self.values[a..=b].to_vec(),
                }
            }
        }
    }

    /// `f * delta_{g^n}`, that is `x -> f(x - n g)`.
    pub fn translate(&self, n: i64, g: StepElement) -> CompactVector {
        CompactVector {
            lo: self.lo + g.times(n),
            values: self.values.clone(),
        }
    }

    /// `(sum_x |f(x)|^p * mass)^(1/p)` with the lattice point mass.
    pub fn p_norm(&self, p: f64, lattice: &Lattice) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let mass = lattice.measure_weight();
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        if p == 2.0 {
            let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
            return Ok((s * mass).sqrt());
        }
        // scale by the largest modulus so that |v|^p stays representable
        let m = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = self.values.iter().map(|v| (v.norm() / m).powf(p)).sum();
        Ok(m * (s * mass).powf(1.0 / p))
    }

    /// Bilinear pairing `sum_x f(x) * lambda(x)` (no conjugation).
    pub fn pair(&self, functional: &CompactVector) -> C64 {
        let (Some(a), Some(b)) = (self.stored_window(), functional.stored_window()) else {
            return C64::new(0.0, 0.0);
        };
        let lo = a.lo.max(b.lo);
        let hi = a.hi.min(b.hi);
        (lo..=hi).map(|x| self.get(x) * functional.get(x)).sum()
    }

    /// Real inner product of the underlying real vector space, `Re sum conj(f) h`.
    pub fn real_dot(&self, other: &CompactVector) -> f64 {
        let (Some(a), Some(b)) = (self.stored_window(), other.stored_window()) else {
            return 0.0;
        };
        let lo = a.lo.max(b.lo);
        let hi = a.hi.min(b.hi);
        (lo..=hi)
            .map(|x| {
                let (u, v) = (self.get(x), other.get(x));
                u.re * v.re + u.im * v.im
            })
            .sum()
    }

    pub fn scale(&self, c: C64) -> CompactVector {
        CompactVector {
            lo: self.lo,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> CompactVector {
        CompactVector {
            lo: self.lo,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: C64, other: &CompactVector) -> CompactVector {
        let Some(b) = other.stored_window() else {
            return self.clone();
        };
        let Some(a) = self.stored_window() else {
            return other.scale(c);
        };
        let lo = a.lo.min(b.lo);
        let hi = a.hi.max(b.hi);
        CompactVector {
            lo,
            values: (lo..=hi).map(|x| self.get(x) + c * other.get(x)).collect(),
        }
    }

    pub fn add(&self, other: &CompactVector) -> CompactVector {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &CompactVector) -> CompactVector {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// Pointwise product with a real function of the index.
    pub fn multiply_by(&self, f: impl Fn(i64) -> f64) -> CompactVector {
        CompactVector {
            lo: self.lo,
            values: self
                .iter()
                .map(|(x, v)| v * f(x))
                .collect(),
        }
    }

    /// Restriction to `window` together with the squared l2 mass (per point,
    /// unweighted) that fell outside it.
    pub fn restrict(&self, window: Window) -> (CompactVector, f64) {
        let mut outside = 0.0;
        for (x, v) in self.iter() {
            if !window.contains(x) {
                outside += v.norm_sqr();
            }
        }
        let lo = self.lo.max(window.lo);
        let hi = (self.lo + self.values.len() as i64 - 1).min(window.hi);
        let inner = if lo > hi {
            CompactVector::zero()
        } else {
            CompactVector {
                lo,
                values: (lo..=hi).map(|x| self.get(x)).collect(),
            }
        };
        (inner, outside)
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CompactVector) -> f64 {
        let windows = [self.stored_window(), other.stored_window()];
        let lo = windows.iter().flatten().map(|w| w.lo).min();
        let hi = windows.iter().flatten().map(|w| w.hi).max();
        match (lo, hi) {
            (Some(lo), Some(hi)) => (lo..=hi)
                .map(|x| (self.get(x) - other.get(x)).norm())
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn translate_point_masses() {
        let plus = StepElement::new(1).unwrap();
        let minus = StepElement::new(-1).unwrap();
        assert_eq!(CompactVector::point_mass(0).translate(1, plus), CompactVector::point_mass(1));
        assert_eq!(CompactVector::point_mass(0).translate(0, plus), CompactVector::point_mass(0));
        assert_eq!(CompactVector::point_mass(1).translate(2, minus), CompactVector::point_mass(-1));
    }

    #[test]
    fn p_norm_examples() {
        let z = Lattice::Integers;
        assert_eq!(CompactVector::point_mass(0).p_norm(2.0, &z).unwrap(), 1.0);
        let two = CompactVector::from_real(0, &[1.0, 1.0]);
        assert!((two.p_norm(2.0, &z).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let grid = Lattice::gridded_reals(0.25).unwrap();
        assert!((CompactVector::point_mass(0).p_norm(2.0, &grid).unwrap() - 0.5).abs() < 1e-15);
        let three = CompactVector::from_real(-1, &[3.0, 0.0, 4.0]);
        assert!((three.p_norm(1.0, &z).unwrap() - 7.0).abs() < 1e-14);
        assert!((three.p_norm(3.0, &z).unwrap() - 91f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn p_norm_rejects_small_exponent() {
        let e = CompactVector::point_mass(0);
        assert_eq!(e.p_norm(0.5, &Lattice::Integers), Err(Error::InvalidExponent(0.5)));
        assert!(e.p_norm(f64::NAN, &Lattice::Integers).is_err());
    }

    #[test]
    fn pairing_examples() {
        let e0 = CompactVector::point_mass(0);
        let e1 = CompactVector::point_mass(1);
        let e2 = CompactVector::point_mass(2);
        assert_eq!(e0.pair(&e0), c(1.0));
        assert_eq!(e0.pair(&e1), c(0.0));
        let f = CompactVector::from_sparse(&[(1, c(2.0)), (2, c(3.0))]);
        assert_eq!(f.pair(&e2), c(3.0));
        // bilinear, not sesquilinear
        let i = CompactVector::from_sparse(&[(0, C64::new(0.0, 1.0))]);
        assert_eq!(i.pair(&i), c(-1.0));
    }

    #[test]
    fn zero_step_rejected() {
        assert_eq!(StepElement::new(0), Err(Error::ZeroStep));
        assert!(serde_json::from_str::<StepElement>("0").is_err());
    }

    #[test]
    fn empty_window_rejected() {
        assert!(Window::new(3, 2).is_err());
        assert_eq!(Window::new(-2, 2).unwrap().len(), 5);
    }

    #[test]
    fn support_and_trim() {
        let f = CompactVector::from_real(-2, &[0.0, 1.0, 0.0, 2.0, 0.0]);
        assert_eq!(f.support(), Some(Window { lo: -1, hi: 1 }));
        assert_eq!(f.trimmed(), CompactVector::from_real(-1, &[1.0, 0.0, 2.0]));
        assert_eq!(CompactVector::from_real(4, &[0.0]).support(), None);
    }

    #[test]
    fn restrict_reports_outside_mass() {
        let f = CompactVector::from_real(0, &[1.0, 2.0, 3.0]);
        let (r, out) = f.restrict(Window::new(1, 5).unwrap());
        assert_eq!(r, CompactVector::from_real(1, &[2.0, 3.0]));
        assert_eq!(out, 1.0);
        let (r, out) = f.restrict(Window::new(10, 12).unwrap());
        assert!(r.is_zero());
        assert_eq!(out, 14.0);
    }
}
