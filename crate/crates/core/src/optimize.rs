//! Tightening the extended bounds by minimizing over their free probability
//! vectors.
//!
//! [`optimize_gamma`] runs projected gradient descent on the simplex with a
//! backtracking step; [`golden_section_gamma1`] is an independent
//! one-dimensional search for qubits. Neither claims global optimality.

use crate::bounds::{gamma_bound, ineq3_bound, qfi_bound};
use crate::entropy::unit_interval;
use crate::error::{Error, Result};
use crate::quantum::{sample_probability, stream_rng, ProbabilityVector};

/// Interior floor applied after every simplex projection.
pub const SIMPLEX_FLOOR: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Outer rounds of the alternating (γ, ξ) search.
pub const JOINT_MAX_ROUNDS: usize = 50;
/// Random interior starts added on top of the uniform start when `d >= 3`.
pub const MULTI_STARTS: usize = 5;

const INITIAL_STEP: f64 = 0.1;
const MAX_HALVINGS: usize = 60;
const MULTI_START_SEED: u64 = 0x6a09_e667;

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub gamma_star: ProbabilityVector,
    pub bound_star: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct JointOptimizationResult {
    pub gamma_star: ProbabilityVector,
    pub xi_star: ProbabilityVector,
    pub bound_star: f64,
    pub rounds: usize,
    pub converged: bool,
}

/// Euclidean projection onto the probability simplex (sort and threshold).
pub fn project_to_simplex_exact(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Simplex projection followed by the interior floor: every entry ends up at
/// least [`SIMPLEX_FLOOR`] and the vector still sums to one.
pub fn project_to_simplex(v: &[f64]) -> ProbabilityVector {
    let n = v.len();
    let exact = project_to_simplex_exact(v);
    let total: f64 = exact.iter().sum();
    let shrink = 1.0 - n as f64 * SIMPLEX_FLOOR;
    let floored = exact
        .iter()
        .map(|&x| SIMPLEX_FLOOR + shrink * x / total)
        .collect();
    ProbabilityVector::renormalized(floored, 1e-9).expect("projection lies on the simplex")
}

/// Gradient of [`gamma_bound`] with respect to `γ`.
pub fn gamma_gradient(lambda: &[f64], gamma: &[f64], fidelity: f64, d: usize) -> Vec<f64> {
    let d = d as f64;
    let s: f64 = lambda.iter().zip(gamma).map(|(l, g)| l * g).sum();
    let ds = 1.0 / s + (1.0 - fidelity) * (-d / (s * s)) / (d / s - 1.0);
    lambda
        .iter()
        .zip(gamma)
        .map(|(&l, &g)| if l > 0.0 { l * ds - l / g } else { 0.0 })
        .collect()
}

/// Gradients of [`ineq3_bound`] with respect to `γ` and `ξ`. The `-ln min ξ`
/// term is differentiated at the first minimizing index.
pub fn ineq3_gradients(
    lambda: &[f64],
    gamma: &[f64],
    xi: &[f64],
    fidelity: f64,
) -> (Vec<f64>, Vec<f64>) {
    let s: f64 = (0..lambda.len())
        .map(|k| lambda[k] * gamma[k] * xi[k])
        .sum();
    let ds = (fidelity - s) / (s * (1.0 - s));
    let grad_gamma = (0..lambda.len())
        .map(|k| {
            if lambda[k] > 0.0 {
                lambda[k] * xi[k] * ds - lambda[k] / gamma[k]
            } else {
                0.0
            }
        })
        .collect();
    let argmin = (0..xi.len())
        .min_by(|&a, &b| xi[a].total_cmp(&xi[b]))
        .unwrap_or(0);
    let grad_xi = (0..xi.len())
        .map(|k| {
            let g = lambda[k] * gamma[k] * ds;
            if k == argmin {
                g - 1.0 / xi[k]
            } else {
                g
            }
        })
        .collect();
    (grad_gamma, grad_xi)
}

struct Descent {
    point: ProbabilityVector,
    value: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

/// Projected gradient descent with a halving line search that starts at
/// [`INITIAL_STEP`] every iteration. Stops once an accepted step improves the
/// objective by less than `tol`, or when no step size improves it at all.
fn projected_gradient(
    objective: impl Fn(&ProbabilityVector) -> f64,
    gradient: impl Fn(&ProbabilityVector) -> Vec<f64>,
    start: ProbabilityVector,
    tol: f64,
    max_iter: usize,
) -> Descent {
    let mut point = start;
    let mut value = objective(&point);
    let mut history = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let grad = gradient(&point);
        let mut step = INITIAL_STEP;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = point.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
            let candidate = project_to_simplex(&trial);
            let cv = objective(&candidate);
            if cv <= value {
                accepted = Some((candidate, cv));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, cv)) = accepted else {
            converged = true;
            break;
        };
        let decrease = value - cv;
        point = candidate;
        value = cv;
        history.push(value);
        iterations += 1;
        if decrease < tol {
            converged = true;
            break;
        }
    }
    Descent {
        point,
        value,
        iterations,
        converged,
        history,
    }
}

fn finite_or_inf(r: Result<f64>) -> f64 {
    match r {
        Ok(v) if v.is_finite() => v,
        _ => f64::INFINITY,
    }
}

fn validate(lambda: &ProbabilityVector, fidelity: f64, d: usize) -> Result<f64> {
    if d < 2 || lambda.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: lambda.len(),
        });
    }
    unit_interval("F", fidelity)
}

/// Minimizes [`gamma_bound`] over `γ`, starting from uniform `γ` (where the
/// bound equals the QFI). For `d >= 3` five seeded random interior starts are
/// tried as well and the best result is kept.
pub fn optimize_gamma(
    lambda: &ProbabilityVector,
    fidelity: f64,
    d: usize,
    tol: f64,
    max_iter: usize,
) -> Result<OptimizationResult> {
    let f = validate(lambda, fidelity, d)?;
    let objective = |g: &ProbabilityVector| finite_or_inf(gamma_bound(lambda, g, f, d));
    let gradient = |g: &ProbabilityVector| gamma_gradient(lambda, g, f, d);

    let uniform = ProbabilityVector::uniform(d);
    if !objective(&uniform).is_finite() {
        return Err(Error::Invariant(
            "objective is not finite at uniform gamma".into(),
        ));
    }
    let mut starts = vec![uniform];
    if d >= 3 {
        starts.extend(
            (0..MULTI_STARTS as u64)
                .map(|k| sample_probability(&mut stream_rng(MULTI_START_SEED, k), d, 0.05)),
        );
    }

    let best = starts
        .into_iter()
        .map(|s| projected_gradient(objective, gradient, s, tol, max_iter))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    Ok(OptimizationResult {
        gamma_star: best.point,
        bound_star: best.value,
        iterations: best.iterations,
        converged: best.converged,
        history: best.history,
    })
}

/// Golden-section search for the best `γ = [γ₁, 1 - γ₁]` on
/// `[1e-9, 1 - 1e-9]`, stopping when the bracket is narrower than `tol`.
pub fn golden_section_gamma1(
    lambda: &ProbabilityVector,
    fidelity: f64,
    tol: f64,
) -> Result<OptimizationResult> {
    let f = validate(lambda, fidelity, 2)?;
    let objective = |g1: f64| {
        let gamma = ProbabilityVector::renormalized(vec![g1, 1.0 - g1], 1e-12)
            .expect("bracket lies in (0, 1)");
        finite_or_inf(gamma_bound(lambda, &gamma, f, 2))
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (SIMPLEX_FLOOR, 1.0 - SIMPLEX_FLOOR);
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let (mut fc, mut fe) = (objective(c), objective(e));
    let mut iterations = 0;
    let mut history = Vec::new();
    while b - a > tol {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = objective(e);
        }
        history.push(fc.min(fe));
        iterations += 1;
    }
    let g1 = 0.5 * (a + b);
    let bound_star = objective(g1);
    Ok(OptimizationResult {
        gamma_star: ProbabilityVector::renormalized(vec![g1, 1.0 - g1], 1e-12)?,
        bound_star,
        iterations,
        converged: true,
        history,
    })
}

/// Alternating minimization of [`ineq3_bound`] over `γ` and `ξ`, each block by
/// projected gradient. This goes beyond the `γ`-only tightening; the `ξ` block
/// is nonsmooth at ties in `min ξ` and is handled by a subgradient.
pub fn optimize_gamma_xi(
    lambda: &ProbabilityVector,
    fidelity: f64,
    tol: f64,
    max_rounds: usize,
) -> Result<JointOptimizationResult> {
    let d = lambda.len();
    let f = validate(lambda, fidelity, d)?;
    let mut gamma = ProbabilityVector::uniform(d);
    let mut xi = ProbabilityVector::uniform(d);
    let mut value = finite_or_inf(ineq3_bound(lambda, &gamma, &xi, f));
    if !value.is_finite() {
        return Err(Error::Invariant(
            "objective is not finite at uniform start".into(),
        ));
    }
    let mut converged = false;
    let mut rounds = 0;
    while rounds < max_rounds {
        let g_step = {
            let xi = &xi;
            projected_gradient(
                |g| finite_or_inf(ineq3_bound(lambda, g, xi, f)),
                |g| ineq3_gradients(lambda, g, xi, f).0,
                gamma.clone(),
                tol,
                DEFAULT_MAX_ITER,
            )
        };
        gamma = g_step.point;
        let x_step = {
            let gamma = &gamma;
            projected_gradient(
                |x| finite_or_inf(ineq3_bound(lambda, gamma, x, f)),
                |x| ineq3_gradients(lambda, gamma, x, f).1,
                xi.clone(),
                tol,
                DEFAULT_MAX_ITER,
            )
        };
        xi = x_step.point;
        rounds += 1;
        let decrease = value - x_step.value;
        value = x_step.value;
        if decrease < tol {
            converged = true;
            break;
        }
    }
    Ok(JointOptimizationResult {
        gamma_star: gamma,
        xi_star: xi,
        bound_star: value,
        rounds,
        converged,
    })
}

/// `qfi - optimized bound` at one instance; nonnegative up to rounding.
pub fn qfi_improvement(result: &OptimizationResult, fidelity: f64, d: usize) -> Result<f64> {
    Ok(qfi_bound(fidelity, d)? - result.bound_star)
}
