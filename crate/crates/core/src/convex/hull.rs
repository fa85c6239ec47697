//! Distance from a target to the convex hull of a finite orbit segment,
//! `min { ||sum_n a_n T^n seed - target||_2 : a in simplex }`.
//!
//! The objective is the quadratic `a^T G a - 2 b^T a + c` with the Gram matrix
//! of the orbit vectors, so Frank-Wolfe steps take exact line searches and
//! report a duality gap. Two reference solvers exist for small instances: a
//! brute-force grid over the simplex and an exhaustive enumeration of faces.

use serde::{Deserialize, Serialize};

use super::polynomial::ConvexPolynomial;
use crate::error::{Error, Result};
use crate::lattice::{CompactVector, Window};
use crate::operator::WeightedTranslation;

/// Truncation mass above which a distance is flagged.
pub const TRUNCATION_FLAG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HullMethod {
    FrankWolfe,
    /// Exhaustive grid with spacing `1/resolution` on the simplex.
    Oracle { resolution: usize },
    /// Least squares on every face of the simplex; exact for test-scale orbits.
    FaceEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullOptions {
    pub max_iters: usize,
    pub gap_tol: f64,
    /// Use away steps in Frank-Wolfe (linear convergence on polytopes).
    pub away_steps: bool,
    /// Restrict every orbit vector to this window and account for the dropped mass.
    pub support_window: Option<Window>,
    /// Largest number of lattice points allowed without a window.
    pub support_cap: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions {
            max_iters: 100_000,
            gap_tol: 1e-14,
            away_steps: true,
            support_window: None,
            support_cap: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullStep {
    /// Orbit budget: the hull of `T^0 seed .. T^n seed`.
    pub n: usize,
    pub distance: f64,
    /// Frank-Wolfe gap on the squared distance at exit (0 for the reference solvers).
    pub fw_gap: f64,
    /// l2 norm of the mass of the orbit and target that fell outside the window.
    pub truncation_mass: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullResult {
    pub distance: f64,
    pub coefficients: ConvexPolynomial,
    pub trace: Vec<HullStep>,
    pub truncation_flagged: bool,
}

/// Orbit vectors and target restricted to a common window, as dense real
/// coordinates (real and imaginary parts interleaved).
struct Problem {
    columns: Vec<Vec<f64>>,
    target: Vec<f64>,
    mass: f64,
    /// Truncation mass of each orbit vector, and of the target.
    column_truncation: Vec<f64>,
    target_truncation: f64,
}

impl Problem {
    fn build(
        t: &WeightedTranslation,
        seed: &CompactVector,
        target: &CompactVector,
        n: usize,
        opts: &HullOptions,
    ) -> Result<Problem> {
        let orbit = t.orbit(seed, n);
        let mass = t.lattice().measure_weight();
        let window = match opts.support_window {
            Some(w) => w,
            None => {
                let windows: Vec<Window> = orbit
                    .iter()
                    .chain(std::iter::once(target))
                    .filter_map(|v| v.stored_window())
                    .collect();
                let lo = windows.iter().map(|w| w.lo).min().unwrap_or(0);
                let hi = windows.iter().map(|w| w.hi).max().unwrap_or(0);
                let size = (hi - lo + 1) as usize;
                if size > opts.support_cap {
                    return Err(Error::SupportCap {
                        size,
                        cap: opts.support_cap,
                    });
                }
                Window { lo, hi }
            }
        };
        let dense = |v: &CompactVector| -> (Vec<f64>, f64) {
            let (inside, outside) = v.restrict(window);
            let mut out = Vec::with_capacity(2 * window.len());
            for x in window.iter() {
                let z = inside.get(x);
                out.push(z.re);
                out.push(z.im);
            }
            (out, (outside * mass).sqrt())
        };
        let mut columns = Vec::with_capacity(n + 1);
        let mut column_truncation = Vec::with_capacity(n + 1);
        for v in &orbit {
            let (c, m) = dense(v);
            columns.push(c);
            column_truncation.push(m);
        }
        let (target, target_truncation) = dense(target);
        Ok(Problem {
            columns,
            target,
            mass,
            column_truncation,
            target_truncation,
        })
    }

    fn truncation_upto(&self, n: usize) -> f64 {
        self.column_truncation[..=n]
            .iter()
            .copied()
            .fold(self.target_truncation, f64::max)
    }

    fn quadratic(&self, n: usize) -> Quadratic {
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.mass };
        let cols = &self.columns[..=n];
        let gram = cols
            .iter()
            .map(|ci| cols.iter().map(|cj| dot(ci, cj)).collect())
            .collect();
        let linear = cols.iter().map(|c| dot(c, &self.target)).collect();
        Quadratic {
            gram,
            linear,
            constant: dot(&self.target, &self.target),
        }
    }

    /// Distance evaluated from the vectors themselves.
    fn distance(&self, a: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, t) in self.target.iter().enumerate() {
            let v: f64 = a.iter().zip(&self.columns).map(|(ai, c)| ai * c[i]).sum();
            s += (v - t) * (v - t);
        }
        (s * self.mass).sqrt()
    }
}

/// `f(a) = a^T G a - 2 b^T a + c`.
struct Quadratic {
    gram: Vec<Vec<f64>>,
    linear: Vec<f64>,
    constant: f64,
}

impl Quadratic {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, a: &[f64]) -> f64 {
        let ga = self.gram_times(a);
        dot(a, &ga) - 2.0 * dot(&self.linear, a) + self.constant
    }

    fn gram_times(&self, a: &[f64]) -> Vec<f64> {
        self.gram.iter().map(|row| dot(row, a)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct FwOutcome {
    gap: f64,
    iterations: usize,
}

/// Frank-Wolfe on the simplex from the starting point `a`, optionally with
/// away steps. Ties in the linear minimisation oracle go to the smallest index.
fn frank_wolfe(q: &Quadratic, a: &mut [f64], opts: &HullOptions) -> FwOutcome {
    let n = q.dim();
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let ga = q.gram_times(a);
        let grad: Vec<f64> = (0..n).map(|i| 2.0 * (ga[i] - q.linear[i])).collect();
        let grad_dot_a = dot(&grad, a);
        let mut toward = 0;
        for i in 1..n {
            if grad[i] < grad[toward] {
                toward = i;
            }
        }
        gap = grad_dot_a - grad[toward];
        if gap <= opts.gap_tol {
            break;
        }
        iterations += 1;
        let a_ga = dot(a, &ga);

        let mut away = None;
        if opts.away_steps {
            for i in 0..n {
                if a[i] > 0.0 && away.is_none_or(|v: usize| grad[i] > grad[v]) {
                    away = Some(i);
                }
            }
        }
        let away_gain = away.map_or(f64::NEG_INFINITY, |v| grad[v] - grad_dot_a);

        if away_gain > gap && away.is_some_and(|v| a[v] < 1.0) {
            // direction a - e_v, step bounded by a_v / (1 - a_v)
            let v = away.unwrap();
            let curvature = a_ga - 2.0 * ga[v] + q.gram[v][v];
            let slope = grad_dot_a - grad[v];
            let max_step = a[v] / (1.0 - a[v]);
            let step = if curvature > 0.0 { (-slope / (2.0 * curvature)).min(max_step) } else { max_step };
            if !(step > 0.0) {
                break;
            }
            for x in a.iter_mut() {
                *x *= 1.0 + step;
            }
            if step >= max_step {
                a[v] = 0.0;
            } else {
                a[v] -= step;
            }
        } else {
            // direction e_j - a
            let j = toward;
            let curvature = q.gram[j][j] - 2.0 * ga[j] + a_ga;
            let slope = grad[j] - grad_dot_a;
            let step = if curvature > 0.0 { (-slope / (2.0 * curvature)).clamp(0.0, 1.0) } else { 1.0 };
            if !(step > 0.0) {
                break;
            }
            for x in a.iter_mut() {
                *x *= 1.0 - step;
            }
            a[j] += step;
        }
        // keep the iterate on the simplex despite round-off
        let s: f64 = a.iter().sum();
        for x in a.iter_mut() {
            *x = x.max(0.0) / s;
        }
    }
    FwOutcome { gap, iterations }
}

/// Exhaustive grid `a = counts / resolution` over the simplex.
fn grid_oracle(q: &Quadratic, resolution: usize) -> Result<Vec<f64>> {
    let n = q.dim();
    let points = binomial(resolution + n - 1, n - 1);
    if points > 5e8 {
        return Err(Error::InvalidArgument(format!(
            "grid oracle would visit {points:.3e} points; reduce the resolution or the orbit budget"
        )));
    }
    let mut counts = vec![0usize; n];
    let mut best = (f64::INFINITY, vec![0.0; n]);
    fn walk(q: &Quadratic, counts: &mut [usize], i: usize, left: usize, res: usize, best: &mut (f64, Vec<f64>)) {
        if i + 1 == counts.len() {
            counts[i] = left;
            let a: Vec<f64> = counts.iter().map(|&c| c as f64 / res as f64).collect();
            let v = q.value(&a);
            if v < best.0 {
                *best = (v, a);
            }
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            walk(q, counts, i + 1, left - c, res, best);
        }
    }
    walk(q, &mut counts, 0, resolution, resolution, &mut best);
    Ok(best.1)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Minimises over every face of the simplex by solving the affinely
/// constrained least-squares problem on the face and keeping feasible points.
fn face_enumeration(q: &Quadratic) -> Result<Vec<f64>> {
    let n = q.dim();
    if n > 20 {
        return Err(Error::InvalidArgument(format!("face enumeration over {n} vertices is too large")));
    }
    let mut best = (f64::INFINITY, vec![0.0; n]);
    for mask in 1u32..(1u32 << n) {
        let face: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let m = face.len();
        // [2G_S 1; 1^T 0] [a; mu] = [2 b_S; 1]
        let mut sys = vec![vec![0.0; m + 2]; m + 1];
        for (r, &i) in face.iter().enumerate() {
            for (c, &j) in face.iter().enumerate() {
                sys[r][c] = 2.0 * q.gram[i][j];
            }
            sys[r][m] = 1.0;
            sys[r][m + 1] = 2.0 * q.linear[i];
        }
        for c in 0..m {
            sys[m][c] = 1.0;
        }
        sys[m][m + 1] = 1.0;
        let Some(sol) = solve_dense(sys) else { continue };
        if sol[..m].iter().any(|v| *v < -1e-12) {
            continue;
        }
        let mut a = vec![0.0; n];
        for (r, &i) in face.iter().enumerate() {
            a[i] = sol[r].max(0.0);
        }
        let s: f64 = a.iter().sum();
        a.iter_mut().for_each(|x| *x /= s);
        let v = q.value(&a);
        if v < best.0 {
            best = (v, a);
        }
    }
    Ok(best.1)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    let scale = m
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Distance from `target` to `co{T^n seed : n <= orbit_budget}` in the l2
/// geometry of the lattice, with the trace over orbit budgets `0..=orbit_budget`.
///
/// Frank-Wolfe starts from the point mass at `n = 0` and warm-starts each
/// larger budget from the previous optimum, so the trace never increases.
pub fn hull_distance(
    t: &WeightedTranslation,
    seed: &CompactVector,
    target: &CompactVector,
    orbit_budget: usize,
    method: HullMethod,
    opts: &HullOptions,
) -> Result<HullResult> {
    if !(opts.gap_tol > 0.0) || opts.max_iters == 0 {
        return Err(Error::InvalidArgument("gap_tol and max_iters must be positive".into()));
    }
    let problem = Problem::build(t, seed, target, orbit_budget, opts)?;
    let mut trace = Vec::with_capacity(orbit_budget + 1);
    let mut a = vec![1.0];
    for n in 0..=orbit_budget {
        let q = problem.quadratic(n);
        let (gap, iterations) = match method {
            HullMethod::FrankWolfe => {
                a.resize(n + 1, 0.0);
                let out = frank_wolfe(&q, &mut a, opts);
                (out.gap.max(0.0), out.iterations)
            }
            HullMethod::Oracle { resolution } => {
                if resolution == 0 {
                    return Err(Error::InvalidArgument("grid resolution must be positive".into()));
                }
                a = grid_oracle(&q, resolution)?;
                (0.0, 0)
            }
            HullMethod::FaceEnumeration => {
                a = face_enumeration(&q)?;
                (0.0, 0)
            }
        };
        let distance = problem.distance(&a);
        trace.push(HullStep {
            n,
            distance,
            fw_gap: gap,
            truncation_mass: problem.truncation_upto(n),
            iterations,
        });
    }
    let last = trace.last().unwrap();
    let coefficients = ConvexPolynomial::from_weights(0, &a)?;
    Ok(HullResult {
        distance: last.distance,
        coefficients,
        truncation_flagged: last.truncation_mass > TRUNCATION_FLAG,
        trace,
    })
}
