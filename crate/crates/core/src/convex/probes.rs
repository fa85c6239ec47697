//! Sampled evidence about convex-cyclic vectors and the adjoint point spectrum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CompactVector, C64};
use crate::operator::WeightedTranslation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalProbe {
    /// `max_{0<=n<=horizon} Re Lambda(T^n x)`.
    pub sup_value: f64,
    /// First `n` attaining the maximum.
    pub attained_n: usize,
    /// Whether the running maximum still increased during the last quarter of the horizon.
    pub growth_flag: bool,
}

impl FunctionalProbe {
    /// A functional whose real part stays bounded along the orbit rules `x`
    /// out as a convex-cyclic vector, as far as the horizon can tell.
    pub fn is_witness_candidate(&self) -> bool {
        !self.growth_flag
    }
}

/// For each functional, tracks `Re Lambda(T^n x)` for `n = 0..=horizon`.
/// An unbounded supremum for every nonzero functional is what a convex-cyclic
/// vector must show; a stabilised supremum is reported as a witness candidate.
pub fn hahn_banach_probe(
    t: &WeightedTranslation,
    x: &CompactVector,
    functionals: &[CompactVector],
    horizon: usize,
) -> Result<Vec<FunctionalProbe>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if let Some(i) = functionals.iter().position(|f| f.is_zero()) {
        return Err(Error::ZeroFunctional(i));
    }
    let orbit = t.orbit(x, horizon);
    let quarter = (horizon / 4).max(1);
    let probes = functionals
        .iter()
        .map(|lambda| {
            let values: Vec<f64> = orbit.iter().map(|v| v.pair(lambda).re).collect();
            let mut best = (f64::NEG_INFINITY, 0);
            for (n, &v) in values.iter().enumerate() {
                if v > best.0 {
                    best = (v, n);
                }
            }
            let early_max = values[..=horizon - quarter]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            FunctionalProbe {
                sup_value: best.0,
                attained_n: best.1,
                growth_flag: best.0 > early_max,
            }
        })
        .collect();
    Ok(probes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumVerdict {
    NoEigenvector,
    DecayingCandidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenProbe {
    pub lambda: C64,
    pub horizon: usize,
    /// `|phi((m+1) g)| / |phi(m g)|` at `m = horizon - 1`: growth along `+g`.
    pub forward_ratio: f64,
    /// `|phi(-(m+1) g)| / |phi(-m g)|` at `m = horizon - 1`: growth along `-g`.
    pub backward_ratio: f64,
    /// `|phi(horizon g)|^{1/horizon}` and its counterpart along `-g`.
    pub forward_mean_ratio: f64,
    pub backward_mean_ratio: f64,
    pub verdict: SpectrumVerdict,
}

/// Solves `T^* phi = lambda phi` with `phi(0) = 1` along the coset `g Z`,
/// using `phi(y + g) = lambda phi(y) / w(y + g)`, and reports how both tails
/// grow. A tail that does not decay rules out an `l^q` eigenvector for this
/// `lambda`.
pub fn eigen_recurrence_probe(t: &WeightedTranslation, lambda: C64, horizon: usize) -> Result<EigenProbe> {
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if horizon < 2 {
        return Err(Error::InvalidArgument("horizon must be at least 2".into()));
    }
    let g = t.step();
    let w = t.weight();
    let ln_lambda = lambda.norm().ln();
    // ln |phi(m g)| for m = 0..=horizon, and ln |phi(-m g)|
    let mut forward = vec![0.0; horizon + 1];
    let mut backward = vec![0.0; horizon + 1];
    for m in 1..=horizon {
        forward[m] = forward[m - 1] + ln_lambda - w.ln_value(g.times(m as i64));
        // phi(y) = w(y + g) phi(y + g) / lambda with y = -m g
        backward[m] = backward[m - 1] + w.ln_value(g.times(1 - m as i64)) - ln_lambda;
    }
    let forward_ratio = (forward[horizon] - forward[horizon - 1]).exp();
    let backward_ratio = (backward[horizon] - backward[horizon - 1]).exp();
    let verdict = if forward_ratio >= 1.0 || backward_ratio >= 1.0 {
        SpectrumVerdict::NoEigenvector
    } else {
        SpectrumVerdict::DecayingCandidate
    };
    Ok(EigenProbe {
        lambda,
        horizon,
        forward_ratio,
        backward_ratio,
        forward_mean_ratio: (forward[horizon] / horizon as f64).exp(),
        backward_mean_ratio: (backward[horizon] / horizon as f64).exp(),
        verdict,
    })
}

/// Polar grid of sample points for the spectral sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub modulus_start: f64,
    pub modulus_stop: f64,
    pub modulus_step: f64,
    /// Number of equally spaced arguments in `[0, 2 pi)`.
    pub arguments: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        LambdaGrid {
            modulus_start: 0.25,
            modulus_stop: 4.0,
            modulus_step: 0.25,
            arguments: 16,
        }
    }
}

impl LambdaGrid {
    pub fn points(&self) -> Result<Vec<C64>> {
        if !(self.modulus_start > 0.0 && self.modulus_step > 0.0 && self.modulus_stop >= self.modulus_start)
            || self.arguments == 0
        {
            return Err(Error::InvalidArgument(format!("invalid lambda grid {self:?}")));
        }
        let count = ((self.modulus_stop - self.modulus_start) / self.modulus_step + 1e-9).floor() as usize + 1;
        let mut out = Vec::with_capacity(count * self.arguments);
        for i in 0..count {
            let r = self.modulus_start + i as f64 * self.modulus_step;
            for j in 0..self.arguments {
                let theta = 2.0 * PI * j as f64 / self.arguments as f64;
                out.push(C64::from_polar(r, theta));
            }
        }
        Ok(out)
    }
}

pub fn lambda_sweep(t: &WeightedTranslation, grid: &LambdaGrid, horizon: usize) -> Result<Vec<EigenProbe>> {
    grid.points()?
        .into_iter()
        .map(|l| eigen_recurrence_probe(t, l, horizon))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Lattice, StepElement};
    use crate::weights::LatticeWeight;

    fn example_two() -> WeightedTranslation {
        let g = StepElement::new(-1).unwrap();
        let w = LatticeWeight::new(1.0, 2.0, 1, vec![]).unwrap().translate(1, g);
        WeightedTranslation::new(g, w, Lattice::Integers)
    }

    #[test]
    fn translation_has_bounded_functional() {
        let t = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let e0 = CompactVector::point_mass(0);
        let p = hahn_banach_probe(&t, &e0, std::slice::from_ref(&e0), 50).unwrap();
        assert_eq!(p[0].sup_value, 1.0);
        assert_eq!(p[0].attained_n, 0);
        assert!(!p[0].growth_flag);
        assert!(p[0].is_witness_candidate());
    }

    #[test]
    fn doubling_shift_grows() {
        let t = WeightedTranslation::scaled_shift(1, 2.0).unwrap();
        let lambda = CompactVector::from_real(0, &[1.0; 51]);
        let p = hahn_banach_probe(&t, &CompactVector::point_mass(0), &[lambda], 50).unwrap();
        assert_eq!(p[0].sup_value, 2f64.powi(50));
        assert_eq!(p[0].attained_n, 50);
        assert!(p[0].growth_flag);
    }

    #[test]
    fn negative_functional_reports_signed_max() {
        let t = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let lambda = CompactVector::from_real(0, &[-1.0, -1.0, -1.0]);
        let p = hahn_banach_probe(&t, &CompactVector::point_mass(0), &[lambda], 8).unwrap();
        assert_eq!(p[0].sup_value, 0.0);
        assert_eq!(p[0].attained_n, 3);
    }

    #[test]
    fn zero_functional_rejected() {
        let t = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let fs = [CompactVector::point_mass(0), CompactVector::from_real(3, &[0.0])];
        assert_eq!(
            hahn_banach_probe(&t, &CompactVector::point_mass(0), &fs, 5).unwrap_err(),
            Error::ZeroFunctional(1)
        );
    }

    #[test]
    fn eigen_examples() {
        let t = example_two();
        let one = eigen_recurrence_probe(&t, C64::new(1.0, 0.0), 100).unwrap();
        assert_eq!(one.forward_ratio, 1.0);
        assert_eq!(one.verdict, SpectrumVerdict::NoEigenvector);
        let three = eigen_recurrence_probe(&t, C64::new(3.0, 0.0), 100).unwrap();
        assert!((three.forward_ratio - 3.0).abs() < 1e-12);
        assert!((three.backward_ratio - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(three.verdict, SpectrumVerdict::NoEigenvector);
        let shift = WeightedTranslation::scaled_shift(1, 1.0).unwrap();
        let half = eigen_recurrence_probe(&shift, C64::new(0.5, 0.0), 50).unwrap();
        assert!((half.forward_ratio - 0.5).abs() < 1e-12);
        assert!((half.backward_ratio - 2.0).abs() < 1e-12);
        assert_eq!(half.verdict, SpectrumVerdict::NoEigenvector);
    }

    #[test]
    fn eigen_probe_finds_decaying_candidate() {
        // tails 0.5 on the left and 4 on the right: |lambda| in (0.5, 4) decays both ways
        let w = LatticeWeight::new(0.5, 4.0, 0, vec![]).unwrap();
        let t = WeightedTranslation::new(StepElement::new(1).unwrap(), w, Lattice::Integers);
        let p = eigen_recurrence_probe(&t, C64::new(0.0, 2.0), 60).unwrap();
        assert!((p.forward_ratio - 0.5).abs() < 1e-12);
        assert!((p.backward_ratio - 0.25).abs() < 1e-12);
        assert_eq!(p.verdict, SpectrumVerdict::DecayingCandidate);
    }

    #[test]
    fn eigen_probe_rejects_zero() {
        let t = example_two();
        assert_eq!(eigen_recurrence_probe(&t, C64::new(0.0, 0.0), 10).unwrap_err(), Error::ZeroLambda);
    }

    #[test]
    fn default_grid_shape() {
        let pts = LambdaGrid::default().points().unwrap();
        assert_eq!(pts.len(), 16 * 16);
        assert!((pts.last().unwrap().norm() - 4.0).abs() < 1e-12);
    }
}
