//! Windowed liminf criteria for convex-cyclicity, hypercyclicity and mixing of
//! weighted translations, plus the necessary-condition statistic.
//!
//! Every check works with two statistics per `k`:
//!
//! * `c_k = max_{x in K} prod_{i=1}^{k} w(x + i g) / sigma_k`
//! * `d_k = sigma_k / min_{x in K} prod_{i=0}^{k-1} w(x - i g)`
//!
//! where `K` is the window and `sigma_k` is `beta^k`, `k`, or `1` depending on
//! the branch. Because weights are eventually constant, both sequences are
//! exactly `C r^k / sigma_k` once every new factor comes from a tail, so their
//! limits are decided from the tail values. Verdicts come from that tail
//! analysis; the sequences up to the budget are reported as evidence.

use serde::{Deserialize, Serialize};

use crate::convex::ConvexPolynomial;
use crate::error::{Error, Result};
use crate::lattice::{StepElement, Window};
use crate::operator::WeightedTranslation;
use crate::weights::{LatticeWeight, Side};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_BUDGET: usize = 200;

/// Relative slack under which two growth rates count as equal.
const RATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    BetaGt1,
    BetaEq1,
    Hypercyclic,
    Mixing,
}

/// `sigma_k = base^k * k^(linear as exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Normaliser {
    base: f64,
    linear: bool,
}

impl Normaliser {
    fn ln(&self, k: usize) -> f64 {
        let mut v = k as f64 * self.base.ln();
        if self.linear {
            v += (k as f64).ln();
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Zero,
    Positive,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// The backward-product statistic `c_k`.
    Backward,
    /// The reciprocal forward-product statistic `d_k`.
    Forward,
}

/// Asymptotics of one statistic: for `k >= regime_start` it equals
/// `constant * ratio^k * (1/k or k or 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBehaviour {
    pub tail_side: Side,
    pub tail_weight: f64,
    /// Per-step ratio `tail / beta` (or its reciprocal for `d_k`).
    pub ratio: f64,
    pub regime_start: usize,
    pub limit: Limit,
}

/// Witness that a statistic does not tend to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub statistic: Statistic,
    /// Window point realising the extreme product from `regime_start` on.
    pub witness_point: i64,
    pub tail_side: Side,
    pub tail_weight: f64,
    /// Lower bound `value_k >= witness_constant * growth^k (* k^{+-1})` for `k >= regime_start`.
    pub witness_constant: f64,
    pub growth: f64,
    pub limit: Limit,
    pub global_inf_weight: f64,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass { budget: usize },
    Fail { certificate: Box<Certificate> },
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Fail { certificate } => Some(certificate),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Verdict::Pass { budget } => format!("PASS({budget})"),
            Verdict::Fail { .. } => "FAIL".to_string(),
            Verdict::Inconclusive => "INCONCLUSIVE".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub branch: Branch,
    pub beta: f64,
    pub window: Window,
    pub budget: usize,
    pub tolerance: f64,
    pub c_sequence: Vec<f64>,
    pub d_sequence: Vec<f64>,
    /// Minimum of each sequence over `k <= budget`.
    pub liminf_estimates: [f64; 2],
    /// Whether each estimate is below the tolerance.
    pub below_tolerance: [bool; 2],
    /// For the mixing branch: whether the last quarter of each sequence is below tolerance.
    pub last_quarter_below_tolerance: Option<[bool; 2]>,
    pub c_tail: TailBehaviour,
    pub d_tail: TailBehaviour,
    pub verdict: Verdict,
}

/// Smallest `j >= 0` such that `x + j * offset` lies in the tail on the far
/// side of the core for every `x` in the window.
fn first_tail_index(w: &LatticeWeight, window: Window, offset: i64) -> usize {
    let j = if offset > 0 {
        let need = w.core_end() - window.lo;
        if need <= 0 { 0 } else { (need + offset - 1) / offset }
    } else {
        let d = -offset;
        let need = window.hi - w.core_lo() + 1;
        if need <= 0 { 0 } else { (need + d - 1) / d }
    };
    j as usize
}

fn classify_rate(ln_rate: f64, tie: Limit) -> Limit {
    let scale = 1.0f64.max(ln_rate.abs());
    if ln_rate.abs() <= RATE_EPS * scale {
        tie
    } else if ln_rate < 0.0 {
        Limit::Zero
    } else {
        Limit::Divergent
    }
}

/// `K \cap (K + n g) = \emptyset` for every `n` above the returned value.
pub fn separation_constant(window: Window, g: StepElement) -> usize {
    ((window.hi - window.lo) / g.steps().abs()) as usize
}

fn run_check(
    t: &WeightedTranslation,
    branch: Branch,
    beta: f64,
    normaliser: Normaliser,
    window: Window,
    budget: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    let w = t.weight();
    let g = t.step();

    let mut ln_c = Vec::with_capacity(budget);
    let mut ln_d = Vec::with_capacity(budget);
    let mut c_arg = Vec::with_capacity(budget);
    let mut d_arg = Vec::with_capacity(budget);
    for (k, (back, fwd)) in w
        .backward_products(g)
        .zip(w.forward_products(g))
        .take(budget)
        .enumerate()
    {
        let k = k + 1;
        let (xb, lb) = argmax_ln(&back, window);
        let (xf, lf) = argmin_ln(&fwd, window);
        ln_c.push(lb - normaliser.ln(k));
        ln_d.push(normaliser.ln(k) - lf);
        c_arg.push(xb);
        d_arg.push(xf);
    }

    // Tail structure of the two statistics.
    let c_side = Side::of_offset(g.steps());
    let d_side = Side::of_offset(-g.steps());
    let c_start = first_tail_index(w, window, g.steps()).saturating_sub(1).max(1);
    let d_start = first_tail_index(w, window, -g.steps()).max(1);
    let ln_b = w.ln_tail(c_side);
    let ln_f = w.ln_tail(d_side);
    let ln_base = normaliser.base.ln();
    let c_limit = classify_rate(
        ln_b - ln_base,
        if normaliser.linear { Limit::Zero } else { Limit::Positive },
    );
    let d_limit = classify_rate(
        ln_base - ln_f,
        if normaliser.linear { Limit::Divergent } else { Limit::Positive },
    );
    let c_tail = TailBehaviour {
        tail_side: c_side,
        tail_weight: ln_b.exp(),
        ratio: (ln_b - ln_base).exp(),
        regime_start: c_start,
        limit: c_limit,
    };
    let d_tail = TailBehaviour {
        tail_side: d_side,
        tail_weight: ln_f.exp(),
        ratio: (ln_base - ln_f).exp(),
        regime_start: d_start,
        limit: d_limit,
    };

    let c_sequence: Vec<f64> = ln_c.iter().map(|v| v.exp()).collect();
    let d_sequence: Vec<f64> = ln_d.iter().map(|v| v.exp()).collect();
    let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let liminf_estimates = [min(&c_sequence), min(&d_sequence)];
    let below_tolerance = liminf_estimates.map(|v| v < tolerance);
    let last_quarter_below_tolerance = (branch == Branch::Mixing).then(|| {
        let from = budget - (budget / 4).max(1);
        [
            c_sequence[from..].iter().all(|v| *v < tolerance),
            d_sequence[from..].iter().all(|v| *v < tolerance),
        ]
    });

    let verdict = if c_limit == Limit::Zero && d_limit == Limit::Zero {
        Verdict::Pass { budget }
    } else {
        let (stat, tail, ln_seq, args, ln_rate) = if c_limit != Limit::Zero {
            (Statistic::Backward, &c_tail, &ln_c, &c_arg, ln_b - ln_base)
        } else {
            (Statistic::Forward, &d_tail, &ln_d, &d_arg, ln_base - ln_f)
        };
        let start = tail.regime_start;
        let (point, constant) = witness(t, stat, window, start, ln_seq, args, ln_rate, normaliser);
        let global_inf = w.inf();
        let description = describe(branch, stat, tail, global_inf, beta);
        Verdict::Fail {
            certificate: Box::new(Certificate {
                statistic: stat,
                witness_point: point,
                tail_side: tail.tail_side,
                tail_weight: tail.tail_weight,
                witness_constant: constant,
                growth: ln_rate.exp(),
                limit: tail.limit,
                global_inf_weight: global_inf,
                description,
            }),
        }
    };

    Ok(CriterionReport {
        branch,
        beta,
        window,
        budget,
        tolerance,
        c_sequence,
        d_sequence,
        liminf_estimates,
        below_tolerance,
        last_quarter_below_tolerance,
        c_tail,
        d_tail,
        verdict,
    })
}

#[allow(clippy::too_many_arguments)]
fn witness(
    t: &WeightedTranslation,
    stat: Statistic,
    window: Window,
    start: usize,
    ln_seq: &[f64],
    args: &[i64],
    ln_rate: f64,
    normaliser: Normaliser,
) -> (i64, f64) {
    // value_k = constant * exp(k ln_rate) * (k^{-1} for c, k for d when linear)
    let poly = |k: usize| -> f64 {
        if !normaliser.linear {
            0.0
        } else if stat == Statistic::Backward {
            -(k as f64).ln()
        } else {
            (k as f64).ln()
        }
    };
    let (ln_value, point) = if start <= ln_seq.len() {
        (ln_seq[start - 1], args[start - 1])
    } else {
        // regime lies beyond the budget; evaluate it directly
        let w = t.weight();
        let g = t.step();
        match stat {
            Statistic::Backward => {
                let p = w.backward_product(g, start);
                let (x, v) = argmax_ln(&p, window);
                (v - normaliser.ln(start), x)
            }
            Statistic::Forward => {
                let p = w.forward_product(g, start);
                let (x, v) = argmin_ln(&p, window);
                (normaliser.ln(start) - v, x)
            }
        }
    };
    let ln_constant = ln_value - start as f64 * ln_rate - poly(start);
    (point, ln_constant.exp())
}

fn describe(branch: Branch, stat: Statistic, tail: &TailBehaviour, inf_w: f64, beta: f64) -> String {
    let side = match tail.tail_side {
        Side::Left => "left",
        Side::Right => "right",
    };
    let norm = match branch {
        Branch::BetaGt1 => format!("beta^k with beta = {beta}"),
        Branch::BetaEq1 => "k".to_string(),
        Branch::Hypercyclic | Branch::Mixing => "1".to_string(),
    };
    match stat {
        Statistic::Backward => format!(
            "backward products on the window pick up the {side} tail weight {} per step \
             (inf w = {inf_w}); normalised by {norm} they do not tend to 0",
            tail.tail_weight
        ),
        Statistic::Forward => format!(
            "forward products on the window pick up the {side} tail weight {} per step \
             (inf w = {inf_w}); {norm} divided by them does not tend to 0",
            tail.tail_weight
        ),
    }
}

fn argmax_ln(p: &LatticeWeight, window: Window) -> (i64, f64) {
    let target = p.window_ln_max(window);
    let x = window.iter().find(|&x| p.ln_value(x) == target).unwrap_or(window.lo);
    (x, target)
}

fn argmin_ln(p: &LatticeWeight, window: Window) -> (i64, f64) {
    let target = p.window_ln_min(window);
    let x = window.iter().find(|&x| p.ln_value(x) == target).unwrap_or(window.lo);
    (x, target)
}

/// The sufficient condition for convex-cyclicity with scalar `beta >= 1`.
pub fn theorem_a_check(
    t: &WeightedTranslation,
    beta: f64,
    window: Window,
    budget: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    if !(beta >= 1.0) || !beta.is_finite() {
        return Err(Error::InvalidBeta(beta));
    }
    if beta > 1.0 {
        let n = Normaliser { base: beta, linear: false };
        run_check(t, Branch::BetaGt1, beta, n, window, budget, tolerance)
    } else {
        let n = Normaliser { base: 1.0, linear: true };
        run_check(t, Branch::BetaEq1, beta, n, window, budget, tolerance)
    }
}

/// Unnormalised liminf conditions characterising hypercyclicity.
pub fn hypercyclicity_check(
    t: &WeightedTranslation,
    window: Window,
    budget: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    let n = Normaliser { base: 1.0, linear: false };
    run_check(t, Branch::Hypercyclic, 1.0, n, window, budget, tolerance)
}

/// Full-limit version of the hypercyclicity conditions (topological mixing).
pub fn mixing_check(
    t: &WeightedTranslation,
    window: Window,
    budget: usize,
    tolerance: f64,
) -> Result<CriterionReport> {
    let n = Normaliser { base: 1.0, linear: false };
    run_check(t, Branch::Mixing, 1.0, n, window, budget, tolerance)
}

/// How the convex coefficients `a_0..a_n` are chosen for each `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientSchedule {
    /// `a_j = 1/(n+1)`.
    Uniform,
    /// First `n+1` coefficients of a fixed polynomial, renormalised to sum 1.
    Truncated { polynomial: ConvexPolynomial },
}

impl CoefficientSchedule {
    fn coefficients(&self, n: usize) -> Option<Vec<f64>> {
        match self {
            CoefficientSchedule::Uniform => Some(vec![1.0 / (n + 1) as f64; n + 1]),
            CoefficientSchedule::Truncated { polynomial } => {
                let a = polynomial.coefficients();
                let head: Vec<f64> = a.iter().copied().chain(std::iter::repeat(0.0)).take(n + 1).collect();
                let mass: f64 = head.iter().sum();
                (mass > 0.0).then(|| head.iter().map(|v| v / mass).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBRow {
    pub n: usize,
    pub min_phi: f64,
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBReport {
    pub window: Window,
    pub separation_constant: usize,
    /// Power of the first term, `separation_constant + 1`.
    pub offset: usize,
    pub exclude_fraction: f64,
    pub rows: Vec<TheoremBRow>,
}

/// Evaluates `Phi_n(x) = sum_{j<=n} a_j prod_{i=0}^{N_0+j-1} w(x - i g)` over the
/// window and reports `1 / min_x Phi_n(x)` for `n = 0..=n_budget`.
///
/// The first power `N_0` is one more than the separation constant, so every
/// power used moves the window off itself. `exclude_fraction` drops that share
/// of window points with the smallest `Phi_n` before taking the minimum.
pub fn theorem_b_statistic(
    t: &WeightedTranslation,
    window: Window,
    schedule: &CoefficientSchedule,
    n_budget: usize,
    exclude_fraction: f64,
) -> Result<TheoremBReport> {
    if !(0.0..1.0).contains(&exclude_fraction) {
        return Err(Error::InvalidArgument(format!(
            "exclude_fraction must lie in [0, 1), got {exclude_fraction}"
        )));
    }
    let sep = separation_constant(window, t.step());
    let offset = sep + 1;
    let points: Vec<i64> = window.iter().collect();
    // ln of prod_{i=0}^{m-1} w(x - i g) for m = offset..=offset+n_budget
    let ln_products: Vec<Vec<f64>> = t
        .weight()
        .forward_products(t.step())
        .skip(offset - 1)
        .take(n_budget + 1)
        .map(|p| points.iter().map(|&x| p.ln_value(x)).collect())
        .collect();
    let drop = (exclude_fraction * points.len() as f64).floor() as usize;

    let mut rows = Vec::with_capacity(n_budget + 1);
    for n in 0..=n_budget {
        let a = schedule.coefficients(n).ok_or_else(|| {
            Error::InvalidPolynomial(format!("no coefficient mass among the first {} terms", n + 1))
        })?;
        let mut ln_phi: Vec<f64> = (0..points.len())
            .map(|p| {
                let terms = a
                    .iter()
                    .enumerate()
                    .filter(|(_, aj)| **aj > 0.0)
                    .map(|(j, aj)| aj.ln() + ln_products[j][p]);
                log_sum_exp(terms)
            })
            .collect();
        ln_phi.sort_by(|x, y| x.total_cmp(y));
        let ln_min = ln_phi[drop.min(ln_phi.len() - 1)];
        rows.push(TheoremBRow {
            n,
            min_phi: ln_min.exp(),
            statistic: (-ln_min).exp(),
        });
    }
    Ok(TheoremBReport {
        window,
        separation_constant: sep,
        offset,
        exclude_fraction,
        rows,
    })
}

fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.map(|v| (v - m).exp()).sum::<f64>().ln()
}
