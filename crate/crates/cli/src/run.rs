//! Analyses driven by a resolved experiment, each producing a JSON document
//! and, for per-step traces, a CSV table.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use wtdyn::convex::{
    eigen_recurrence_probe, hahn_banach_probe, hull_distance, lambda_sweep, transitivity_demo, SpectrumVerdict,
};
use wtdyn::criteria::{
    hypercyclicity_check, mixing_check, separation_constant, theorem_a_check, theorem_b_statistic, CriterionReport,
    TheoremBReport,
};
use wtdyn::{CompactVector, Window, C64};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;

/// CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &'static [&'static str]) -> Self {
        Table { header, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of one analysis: written as `<name>.json` and `<name>.csv`.
#[derive(Debug, Clone)]
pub struct Output {
    pub name: &'static str,
    pub json: Value,
    pub csv: Option<Table>,
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub horizon: usize,
    pub points: usize,
    pub rejected: usize,
    /// `[re, im]` of every sampled `lambda` whose recurrence decays both ways.
    pub decaying_candidates: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub config: ExperimentConfig,
    pub lattice_window: Window,
    pub step_lattice_units: i64,
    /// Present when the config sets `beta`.
    pub theorem_a: Option<CriterionReport>,
    pub hypercyclicity: CriterionReport,
    pub mixing: CriterionReport,
    /// `N_0` for the main window.
    pub separation_constant: usize,
    pub theorem_b: TheoremBReport,
    pub lambda_sweep: SweepSummary,
    /// Set when `1/w` exceeds the representable range, so `T^{-1}` is unbounded in practice.
    pub inverse_inf_weight: Option<f64>,
    pub evidence: String,
}

pub fn classify(exp: &Experiment) -> Result<ClassifyReport> {
    let c = &exp.config;
    let t = &exp.operator;
    let theorem_a = c
        .beta
        .map(|beta| theorem_a_check(t, beta, exp.window, c.budget, c.tolerance))
        .transpose()?;
    let hypercyclicity = hypercyclicity_check(t, exp.window, c.budget, c.tolerance)?;
    let mixing = mixing_check(t, exp.window, c.budget, c.tolerance)?;
    let theorem_b = theorem_b_statistic(
        t,
        exp.theorem_b_window,
        &c.theorem_b.schedule,
        c.theorem_b.n_budget,
        c.theorem_b.exclude_fraction,
    )?;
    let probes = lambda_sweep(t, &c.lambda_grid, c.horizon)?;
    let candidates: Vec<[f64; 2]> = probes
        .iter()
        .filter(|p| p.verdict == SpectrumVerdict::DecayingCandidate)
        .map(|p| [p.lambda.re, p.lambda.im])
        .collect();
    let lambda_sweep = SweepSummary {
        horizon: c.horizon,
        points: probes.len(),
        rejected: probes.len() - candidates.len(),
        decaying_candidates: candidates,
    };
    let evidence = evidence_line(theorem_a.as_ref(), &hypercyclicity, &mixing, &lambda_sweep);
    Ok(ClassifyReport {
        config: c.clone(),
        lattice_window: exp.window,
        step_lattice_units: t.step().steps(),
        theorem_a,
        hypercyclicity,
        mixing,
        separation_constant: separation_constant(exp.window, t.step()),
        theorem_b,
        lambda_sweep,
        inverse_inf_weight: t.inverse_warning().map(|w| w.inf_weight),
        evidence,
    })
}

fn evidence_line(
    theorem_a: Option<&CriterionReport>,
    hyper: &CriterionReport,
    mixing: &CriterionReport,
    sweep: &SweepSummary,
) -> String {
    let convex = match theorem_a {
        Some(r) if r.verdict.is_pass() => format!("convex-cyclicity criterion holds (beta = {})", r.beta),
        Some(r) => format!("convex-cyclicity criterion fails (beta = {})", r.beta),
        None => "convex-cyclicity criterion not run (no beta)".to_string(),
    };
    let hyper = if hyper.verdict.is_pass() { "hypercyclic" } else { "not hypercyclic" };
    let mixing = if mixing.verdict.is_pass() { "mixing" } else { "not mixing" };
    format!(
        "{convex}; {hyper}; {mixing}; adjoint eigenvalue sweep rejected {} of {} sampled lambda",
        sweep.rejected, sweep.points
    )
}

pub fn classify_output(exp: &Experiment) -> Result<Output> {
    let report = classify(exp)?;
    Ok(Output {
        name: "classify",
        json: serde_json::to_value(&report).expect("report serialises"),
        csv: None,
    })
}

fn envelope(exp: &Experiment, command: &str, options: Value, extra: Value) -> Value {
    let mut doc = json!({
        "command": command,
        "config": exp.config,
        "options": options,
    });
    if let (Value::Object(doc), Value::Object(extra)) = (&mut doc, extra) {
        doc.extend(extra);
    }
    doc
}

fn spec_of(v: &CompactVector) -> String {
    v.iter()
        .filter(|(_, z)| z.norm() != 0.0)
        .map(|(i, z)| format!("{i}:{}", complex_text(z)))
        .collect::<Vec<_>>()
        .join(",")
}

fn complex_text(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im > 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// `p`-norm and support of `T^n seed` for `n = 0..=n_max`.
pub fn orbit(exp: &Experiment, seed: &CompactVector, n_max: usize) -> Result<Output> {
    let p = exp.config.p;
    let mut table = Table::new(&["n", "p_norm", "support_lo", "support_hi"]);
    let mut rows = Vec::new();
    for (n, v) in exp.operator.orbit(seed, n_max).iter().enumerate() {
        let norm = v.p_norm(p, &exp.lattice)?;
        let support = v.support();
        table.push(vec![
            n.to_string(),
            num(norm),
            support.map_or(String::new(), |w| w.lo.to_string()),
            support.map_or(String::new(), |w| w.hi.to_string()),
        ]);
        rows.push(json!({
            "n": n,
            "p_norm": norm,
            "support_lo": support.map(|w| w.lo),
            "support_hi": support.map(|w| w.hi),
        }));
    }
    let json = envelope(
        exp,
        "orbit",
        json!({ "seed_vector": spec_of(seed), "n": n_max }),
        json!({ "rows": rows }),
    );
    Ok(Output {
        name: "orbit",
        json,
        csv: Some(table),
    })
}

/// Distance from `target` to the convex hull of `{T^n seed : n <= N}` for every `N <= n_max`.
pub fn hull(exp: &Experiment, seed: &CompactVector, target: &CompactVector, n_max: usize) -> Result<Output> {
    let hull = &exp.config.hull;
    let result = hull_distance(&exp.operator, seed, target, n_max, hull.method, &hull.options)?;
    let mut table = Table::new(&["N", "distance", "fw_gap", "truncation_mass"]);
    for s in &result.trace {
        table.push(vec![s.n.to_string(), num(s.distance), num(s.fw_gap), num(s.truncation_mass)]);
    }
    let json = envelope(
        exp,
        "hull",
        json!({ "seed_vector": spec_of(seed), "target": spec_of(target), "n": n_max }),
        json!({
            "distance": result.distance,
            "coefficients": result.coefficients,
            "truncation_flagged": result.truncation_flagged,
            "trace": result.trace,
        }),
    );
    Ok(Output {
        name: "hull",
        json,
        csv: Some(table),
    })
}

/// The three convex-transitivity quantities and the identity residual for each `k`.
pub fn demo_transitivity(
    exp: &Experiment,
    f0: &CompactVector,
    h: &CompactVector,
    ks: RangeInclusive<usize>,
) -> Result<Output> {
    let beta = exp.config.beta.unwrap_or(1.0);
    let rows = transitivity_demo(&exp.operator, beta, f0, h, ks.clone(), exp.config.p)?;
    let mut table = Table::new(&["k", "q1", "q2", "q3", "identity_residual"]);
    for r in &rows {
        table.push(vec![r.k.to_string(), num(r.q1), num(r.q2), num(r.q3), num(r.identity_residual)]);
    }
    let json = envelope(
        exp,
        "demo-transitivity",
        json!({
            "f0": spec_of(f0),
            "h": spec_of(h),
            "k": [ks.start(), ks.end()],
            "beta": beta,
        }),
        json!({ "rows": rows }),
    );
    Ok(Output {
        name: "demo-transitivity",
        json,
        csv: Some(table),
    })
}

/// `count` functionals supported on `window`, with coefficients uniform on the
/// closed complex unit disc, drawn from ChaCha8 seeded with `rng_seed`.
pub fn random_functionals(window: Window, count: usize, rng_seed: u64) -> Vec<CompactVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| loop {
            let values = window
                .iter()
                .map(|_| {
                    let r = rng.gen::<f64>().sqrt();
                    let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                    C64::from_polar(r, theta)
                })
                .collect();
            let v = CompactVector::new(window.lo, values);
            if !v.is_zero() {
                break v;
            }
        })
        .collect()
}

/// Sampled Hahn-Banach evidence: `sup_n Re Lambda(T^n x)` for random functionals.
pub fn probe_functionals(exp: &Experiment, x: &CompactVector, count: usize, horizon: usize) -> Result<Output> {
    let functionals = random_functionals(exp.window, count, exp.config.rng_seed);
    let probes = hahn_banach_probe(&exp.operator, x, &functionals, horizon)?;
    let mut table = Table::new(&["functional_id", "sup", "attained_n", "growth_flag"]);
    for (i, p) in probes.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            num(p.sup_value),
            p.attained_n.to_string(),
            p.growth_flag.to_string(),
        ]);
    }
    let entries: Vec<Value> = probes
        .iter()
        .zip(&functionals)
        .enumerate()
        .map(|(i, (p, f))| {
            json!({
                "functional_id": i,
                "sup": p.sup_value,
                "attained_n": p.attained_n,
                "growth_flag": p.growth_flag,
                "functional": spec_of(f),
            })
        })
        .collect();
    let json = envelope(
        exp,
        "probe-functionals",
        json!({ "x": spec_of(x), "count": count, "horizon": horizon }),
        json!({ "probes": entries }),
    );
    Ok(Output {
        name: "probe-functionals",
        json,
        csv: Some(table),
    })
}

/// Adjoint eigenvalue recurrence over the configured `lambda` grid.
pub fn probe_spectrum(exp: &Experiment, horizon: usize) -> Result<Output> {
    let probes = exp
        .config
        .lambda_grid
        .points()?
        .into_iter()
        .map(|l| eigen_recurrence_probe(&exp.operator, l, horizon))
        .collect::<wtdyn::Result<Vec<_>>>()?;
    let mut table = Table::new(&["re_lambda", "im_lambda", "forward_ratio", "backward_ratio", "verdict"]);
    for p in &probes {
        let verdict = match p.verdict {
            SpectrumVerdict::NoEigenvector => "no_eigenvector",
            SpectrumVerdict::DecayingCandidate => "decaying_candidate",
        };
        table.push(vec![
            num(p.lambda.re),
            num(p.lambda.im),
            num(p.forward_ratio),
            num(p.backward_ratio),
            verdict.to_string(),
        ]);
    }
    let json = envelope(
        exp,
        "probe-spectrum",
        json!({ "horizon": horizon }),
        json!({ "probes": probes }),
    );
    Ok(Output {
        name: "probe-spectrum",
        json,
        csv: Some(table),
    })
}

/// The averaged statistic over the theorem-B window for `n = 0..=n_budget`.
pub fn theorem_b(exp: &Experiment, n_budget: usize) -> Result<Output> {
    let b = &exp.config.theorem_b;
    let report = theorem_b_statistic(&exp.operator, exp.theorem_b_window, &b.schedule, n_budget, b.exclude_fraction)?;
    let mut table = Table::new(&["n", "min_phi", "statistic"]);
    for r in &report.rows {
        table.push(vec![r.n.to_string(), num(r.min_phi), num(r.statistic)]);
    }
    let json = envelope(exp, "theorem-b", json!({ "n": n_budget }), json!({ "report": report }));
    Ok(Output {
        name: "theorem-b",
        json,
        csv: Some(table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_sparse_vector;

    fn preset(name: &str) -> Experiment {
        ExperimentConfig::preset(name).unwrap().resolve().unwrap()
    }

    #[test]
    fn orbit_of_e0_under_example2() {
        let out = orbit(&preset("example2"), &CompactVector::point_mass(0), 5).unwrap();
        let table = out.csv.unwrap();
        assert_eq!(table.header, &["n", "p_norm", "support_lo", "support_hi"]);
        let norms: Vec<&str> = table.rows.iter().map(|r| r[1].as_str()).collect();
        assert_eq!(norms, vec!["1"; 6]);
        assert_eq!(table.rows[3][2], "-3");
    }

    #[test]
    fn example_classifications() {
        let one = classify(&preset("example1")).unwrap();
        assert!(one.theorem_a.as_ref().unwrap().verdict.is_pass());
        assert!(one.hypercyclicity.verdict.is_fail());
        let two = classify(&preset("example2")).unwrap();
        assert!(two.theorem_a.as_ref().unwrap().verdict.is_pass());
        assert_eq!(two.lambda_sweep.rejected, two.lambda_sweep.points);
        assert!(two.evidence.contains("rejected 256 of 256"));
    }

    #[test]
    fn constant_weight_fails_everything() {
        let mut c = ExperimentConfig::preset("example2").unwrap();
        c.weight = crate::config::WeightSpec::EventuallyConstant {
            left_tail: 1.0,
            right_tail: 1.0,
            core_lo: 0,
            core: vec![],
            shift_steps: 0,
        };
        let r = classify(&c.resolve().unwrap()).unwrap();
        assert!(r.theorem_a.unwrap().verdict.is_fail());
        assert!(r.hypercyclicity.verdict.is_fail());
        assert!(r.mixing.verdict.is_fail());
    }

    #[test]
    fn spec_text_round_trips() {
        let v = parse_sparse_vector("-1:2,0:0.5-0.25i,4:i").unwrap();
        assert_eq!(parse_sparse_vector(&spec_of(&v)).unwrap(), v);
    }

    #[test]
    fn functionals_are_reproducible_and_in_the_disc() {
        let w = Window::new(-3, 3).unwrap();
        let a = random_functionals(w, 4, 7);
        assert_eq!(a, random_functionals(w, 4, 7));
        assert_ne!(a, random_functionals(w, 4, 8));
        assert!(a.iter().all(|f| f.values().len() == 7 && f.max_abs() <= 1.0));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), num(0.5)]);
        t.push(vec![num(2.5e-16), num(-3e20)]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n2.5e-16,-3e20\n");
        assert_eq!("2.5e-16".parse::<f64>().unwrap(), 2.5e-16);
    }
}
