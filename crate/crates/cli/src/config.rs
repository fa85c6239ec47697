//! Experiment configuration: JSON schema, presets and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wtdyn::convex::{HullMethod, HullOptions, LambdaGrid};
use wtdyn::criteria::{CoefficientSchedule, DEFAULT_BUDGET, DEFAULT_TOLERANCE};
use wtdyn::{Lattice, LatticeWeight, StepElement, Window, WeightedTranslation};

use crate::error::{CliError, Result};

pub const PRESETS: [&str; 2] = ["example1", "example2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Integers,
    Reals { grid_spacing: f64 },
}

/// Weight description. Lattice indices are used for `core_lo`; everything
/// else is in group units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `left_tail` below `core_lo`, `core` from `core_lo` on, `right_tail` after.
    /// `shift_steps = n` replaces `w` by `w` translated by `n g`.
    EventuallyConstant {
        left_tail: f64,
        right_tail: f64,
        core_lo: i64,
        #[serde(default)]
        core: Vec<f64>,
        #[serde(default)]
        shift_steps: i64,
    },
    /// `left_tail` for `x <= left_end`, `right_tail` for `x >= right_start`,
    /// linear interpolation through `knots` strictly in between.
    PiecewiseLinear {
        left_tail: f64,
        left_end: f64,
        right_tail: f64,
        right_start: f64,
        knots: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremBConfig {
    /// `[lo, hi]` in group units; the main window when absent.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_n_budget")]
    pub n_budget: usize,
    #[serde(default)]
    pub exclude_fraction: f64,
    #[serde(default = "default_schedule")]
    pub schedule: CoefficientSchedule,
}

impl Default for TheoremBConfig {
    fn default() -> Self {
        TheoremBConfig {
            window: None,
            n_budget: default_n_budget(),
            exclude_fraction: 0.0,
            schedule: default_schedule(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullConfig {
    #[serde(default = "default_hull_method")]
    pub method: HullMethod,
    #[serde(default)]
    pub options: HullOptions,
}

impl Default for HullConfig {
    fn default() -> Self {
        HullConfig {
            method: default_hull_method(),
            options: HullOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    /// Step in group units.
    pub step: f64,
    pub weight: WeightSpec,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub beta: Option<f64>,
    /// `[lo, hi]` in group units; the lattice points inside form the window.
    pub window: [f64; 2],
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub rng_seed: u64,
    /// Number of random functionals drawn by probe-functionals.
    #[serde(default = "default_functionals")]
    pub functionals: usize,
    #[serde(default)]
    pub theorem_b: TheoremBConfig,
    #[serde(default)]
    pub hull: HullConfig,
    #[serde(default)]
    pub lambda_grid: LambdaGrid,
}

fn default_p() -> f64 {
    2.0
}
fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_horizon() -> usize {
    200
}
fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}
fn default_functionals() -> usize {
    8
}
fn default_n_budget() -> usize {
    20
}
fn default_schedule() -> CoefficientSchedule {
    CoefficientSchedule::Uniform
}
fn default_hull_method() -> HullMethod {
    HullMethod::FrankWolfe
}

/// A validated config together with the objects it describes.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub lattice: Lattice,
    pub operator: WeightedTranslation,
    pub window: Window,
    pub theorem_b_window: Window,
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "example1" => Ok(ExperimentConfig {
                group: GroupSpec::Reals { grid_spacing: 0.25 },
                step: -1.0,
                weight: WeightSpec::PiecewiseLinear {
                    left_tail: 1.25,
                    left_end: -1.0,
                    right_tail: 2.0,
                    right_start: 1.0,
                    knots: vec![[-1.0, 1.5], [1.0, 0.5]],
                },
                beta: Some(1.5),
                window: [-10.0, 10.0],
                ..ExperimentConfig::base()
            }),
            "example2" => Ok(ExperimentConfig {
                group: GroupSpec::Integers,
                step: -1.0,
                weight: WeightSpec::EventuallyConstant {
                    left_tail: 1.0,
                    right_tail: 2.0,
                    core_lo: 1,
                    core: Vec::new(),
                    shift_steps: 1,
                },
                beta: Some(1.0),
                window: [-5.0, 5.0],
                theorem_b: TheoremBConfig {
                    window: Some([-10.0, -1.0]),
                    ..TheoremBConfig::default()
                },
                ..ExperimentConfig::base()
            }),
            other => Err(CliError::InvalidConfig(format!(
                "unknown preset {other:?}; expected one of {PRESETS:?}"
            ))),
        }
    }

    fn base() -> Self {
        ExperimentConfig {
            group: GroupSpec::Integers,
            step: 1.0,
            weight: WeightSpec::EventuallyConstant {
                left_tail: 1.0,
                right_tail: 1.0,
                core_lo: 0,
                core: Vec::new(),
                shift_steps: 0,
            },
            p: default_p(),
            beta: None,
            window: [0.0, 0.0],
            budget: default_budget(),
            horizon: default_horizon(),
            tolerance: default_tolerance(),
            rng_seed: 0,
            functionals: default_functionals(),
            theorem_b: TheoremBConfig::default(),
            hull: HullConfig::default(),
            lambda_grid: LambdaGrid::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => CliError::InvalidConfig(e.to_string()),
            _ => CliError::MalformedJson(e),
        })
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match self.group {
            GroupSpec::Integers => Ok(Lattice::Integers),
            GroupSpec::Reals { grid_spacing } => Lattice::gridded_reals(grid_spacing)
                .map_err(|_| CliError::InvalidConfig(format!("grid_spacing must be positive, got {grid_spacing}"))),
        }
    }

    /// Checks every invariant and builds the operator and windows.
    pub fn resolve(self) -> Result<Experiment> {
        let lattice = self.lattice()?;
        let h = lattice.grid_spacing();
        if !self.step.is_finite() || self.step == 0.0 {
            return Err(CliError::InvalidConfig(format!("step must be a nonzero number, got {}", self.step)));
        }
        let ratio = self.step / h;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.abs().max(1.0) {
            return Err(CliError::StepRatio {
                step: self.step,
                grid_spacing: h,
            });
        }
        let g = StepElement::new(ratio.round() as i64)
            .map_err(|_| CliError::InvalidConfig("step rounds to zero lattice steps".into()))?;
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(CliError::InvalidConfig(format!("p must be a finite number >= 1, got {}", self.p)));
        }
        if let Some(beta) = self.beta {
            if !(beta >= 1.0) || !beta.is_finite() {
                return Err(CliError::InvalidConfig(format!("beta must be a finite number >= 1, got {beta}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(CliError::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.budget == 0 || self.horizon < 2 {
            return Err(CliError::InvalidConfig("budget must be positive and horizon at least 2".into()));
        }
        let window = lattice_window(self.window, h)?;
        let theorem_b_window = match self.theorem_b.window {
            Some(w) => lattice_window(w, h)?,
            None => window,
        };
        if !(0.0..1.0).contains(&self.theorem_b.exclude_fraction) {
            return Err(CliError::InvalidConfig("theorem_b.exclude_fraction must lie in [0, 1)".into()));
        }
        self.lambda_grid.points().map_err(|e| CliError::InvalidConfig(e.to_string()))?;
        let weight = build_weight(&self.weight, &lattice, g)?;
        let operator = WeightedTranslation::new(g, weight, lattice);
        Ok(Experiment {
            config: self,
            lattice,
            operator,
            window,
            theorem_b_window,
        })
    }
}

/// Loads a config from a JSON file, or a preset when `path` is `None`.
pub fn load_config(path: Option<&Path>, preset: Option<&str>) -> Result<ExperimentConfig> {
    match (path, preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ExperimentConfig::from_json(&text)
        }
        (None, Some(name)) => ExperimentConfig::preset(name),
        _ => Err(CliError::BadArgument("give exactly one of --config or --preset".into())),
    }
}

fn lattice_window([lo, hi]: [f64; 2], h: f64) -> Result<Window> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(CliError::InvalidConfig(format!("window [{lo}, {hi}] is not finite")));
    }
    let a = (lo / h - 1e-9).ceil() as i64;
    let b = (hi / h + 1e-9).floor() as i64;
    Window::new(a, b).map_err(|_| CliError::InvalidConfig(format!("window [{lo}, {hi}] holds no lattice point")))
}

fn build_weight(spec: &WeightSpec, lattice: &Lattice, g: StepElement) -> Result<LatticeWeight> {
    let invalid = |e: wtdyn::Error| CliError::InvalidConfig(format!("weight: {e}"));
    match spec {
        WeightSpec::EventuallyConstant {
            left_tail,
            right_tail,
            core_lo,
            core,
            shift_steps,
        } => Ok(LatticeWeight::new(*left_tail, *right_tail, *core_lo, core.clone())
            .map_err(invalid)?
            .translate(*shift_steps, g)),
        WeightSpec::PiecewiseLinear {
            left_tail,
            left_end,
            right_tail,
            right_start,
            knots,
        } => {
            if !(left_end < right_start) {
                return Err(CliError::InvalidConfig("weight: left_end must be below right_start".into()));
            }
            if knots.is_empty() || knots.windows(2).any(|k| !(k[0][0] < k[1][0])) {
                return Err(CliError::InvalidConfig("weight: knots must be nonempty with increasing x".into()));
            }
            let h = lattice.grid_spacing();
            let lo = (left_end / h + 1e-9).floor() as i64 + 1;
            let hi = (right_start / h - 1e-9).ceil() as i64 - 1;
            LatticeWeight::sample(*left_tail, *right_tail, lo, hi, |i| interpolate(knots, lattice.position(i)))
                .map_err(invalid)
        }
    }
}

fn interpolate(knots: &[[f64; 2]], x: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first[0] {
        return first[1];
    }
    if x >= last[0] {
        return last[1];
    }
    let i = knots.partition_point(|k| k[0] <= x);
    let [x0, y0] = knots[i - 1];
    let [x1, y1] = knots[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example1_weight() {
        let e = ExperimentConfig::preset("example1").unwrap().resolve().unwrap();
        let w = e.operator.weight();
        assert_eq!(e.operator.step().steps(), -4);
        assert_eq!(e.window, Window::new(-40, 40).unwrap());
        assert_eq!(w.left_tail(), 1.25);
        assert_eq!(w.right_tail(), 2.0);
        assert_eq!(w.value(-4), 1.25);
        assert_eq!(w.value(4), 2.0);
        let ramp: Vec<f64> = (-3..=3).map(|i| w.value(i)).collect();
        assert_eq!(ramp, vec![1.375, 1.25, 1.125, 1.0, 0.875, 0.75, 0.625]);
    }

    #[test]
    fn example2_weight() {
        let e = ExperimentConfig::preset("example2").unwrap().resolve().unwrap();
        let w = e.operator.weight();
        assert_eq!(e.operator.step().steps(), -1);
        assert_eq!(w.value(0), 2.0);
        assert_eq!(w.value(7), 2.0);
        assert_eq!(w.value(-1), 1.0);
        assert_eq!(w.value(-9), 1.0);
        assert_eq!(e.theorem_b_window, Window::new(-10, -1).unwrap());
    }

    #[test]
    fn validation_errors() {
        let mut c = ExperimentConfig::preset("example2").unwrap();
        c.step = 0.0;
        assert!(matches!(c.resolve(), Err(CliError::InvalidConfig(_))));
        let mut c = ExperimentConfig::preset("example1").unwrap();
        c.step = 0.3;
        assert!(matches!(c.resolve(), Err(CliError::StepRatio { .. })));
        let mut c = ExperimentConfig::preset("example1").unwrap();
        c.weight = WeightSpec::EventuallyConstant {
            left_tail: 1.0,
            right_tail: -1.0,
            core_lo: 0,
            core: vec![],
            shift_steps: 0,
        };
        assert!(matches!(c.resolve(), Err(CliError::InvalidConfig(_))));
        assert!(matches!(ExperimentConfig::preset("example3"), Err(CliError::InvalidConfig(_))));
    }

    #[test]
    fn json_errors_are_classified() {
        assert!(matches!(ExperimentConfig::from_json("{"), Err(CliError::MalformedJson(_))));
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"group": {"kind": "integers"}}"#),
            Err(CliError::InvalidConfig(_))
        ));
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"group": {"kind": "integers"}, "step": 1, "window": [-3, 3],
                "weight": {"kind": "eventually_constant", "left_tail": 0.5, "right_tail": 2, "core_lo": 0}}"#,
        )
        .unwrap();
        assert_eq!(c.p, 2.0);
        assert_eq!(c.budget, 200);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let c = ExperimentConfig::preset(name).unwrap();
            let text = serde_json::to_string_pretty(&c).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
        }
    }
}
