//! Randomized property suite behind the `verify` subcommand.
//!
//! Each property is a margin function: it draws one random instance and
//! returns a number that must be `>= -tolerance`. For inequalities the margin
//! is `bound - value`; for identities it is `-|difference|`.
//!
//! Trial `t` of property `k` draws from ChaCha8 stream `(k << 32) | t` under
//! the run seed, so any failure is replayable from `(seed, property, trial)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{
    beta_bound_max, beta_bound_min, entanglement_fidelity, entropy_exchange,
    entropy_exchange_kraus, full_report, gamma_bound, general_bound, ineq2_bound, ineq3_bound,
    qfi_bound, BoundParameters,
};
use crate::closed_form::{depol_entropy_closed, depol_fidelity_closed};
use crate::entropy::{
    binary_relative_entropy, classical_relative_entropy, quantum_relative_entropy,
    von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace_r, ComplexMatrix};
use crate::optimize::{optimize_gamma, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::quantum::{
    apply_channel, depolarizing_channel, extend_to_joint, purify, purify_in_basis, sample_channel,
    sample_density, sample_probability, sample_unitary, stream_rng, DensityMatrix, KrausChannel,
    ProbabilityVector, PureState,
};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    /// When set, channel-dependent properties use this channel (and its
    /// dimension) instead of random ones.
    pub channel: Option<KrausChannel>,
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub trial: usize,
    pub margin: f64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub tolerance: f64,
    pub trials: usize,
    pub worst_margin: f64,
    pub failure: Option<Failure>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub outcomes: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }
}

struct Ctx<'a> {
    rng: ChaCha8Rng,
    dim: usize,
    channel: Option<&'a KrausChannel>,
}

/// One random channel instance with its purification already pushed through.
struct Instance {
    d: usize,
    channel: KrausChannel,
    lambda: ProbabilityVector,
    psi: PureState,
    joint: DensityMatrix,
    fidelity: f64,
    entropy: f64,
}

impl Ctx<'_> {
    fn instance(&mut self) -> Result<Instance> {
        let (d, channel) = match self.channel {
            Some(ch) => (ch.dim(), ch.clone()),
            None => {
                let d = self.dim;
                let n = self.rng.gen_range(1..=d * d);
                (d, sample_channel(&mut self.rng, d, n))
            }
        };
        let lambda = sample_probability(&mut self.rng, d, 0.0);
        let psi = purify(&lambda)?;
        let joint = extend_to_joint(&channel, &psi)?;
        let fidelity = entanglement_fidelity(&psi, &joint)?;
        let entropy = entropy_exchange(&joint)?;
        Ok(Instance {
            d,
            channel,
            lambda,
            psi,
            joint,
            fidelity,
            entropy,
        })
    }

    fn interior(&mut self, d: usize) -> ProbabilityVector {
        sample_probability(&mut self.rng, d, 0.02)
    }
}

type Check = fn(&mut Ctx) -> Result<f64>;

struct Property {
    name: &'static str,
    tolerance: f64,
    check: Check,
}

#[rustfmt::skip]
fn properties() -> Vec<Property> {
    vec![
        Property { name: "eig_reconstruction", tolerance: 1e-10, check: eig_reconstruction },
        Property { name: "extension_partial_trace", tolerance: 1e-10, check: extension_partial_trace },
        Property { name: "entropy_exchange_environment_route", tolerance: 1e-9, check: environment_route },
        Property { name: "depolarizing_fidelity_closed_form", tolerance: 1e-9, check: depol_fidelity },
        Property { name: "depolarizing_entropy_closed_form", tolerance: 1e-8, check: depol_entropy },
        Property { name: "von_neumann_unitary_invariance", tolerance: 1e-9, check: unitary_invariance },
        Property { name: "qfi_validity", tolerance: 1e-9, check: qfi_validity },
        Property { name: "general_bound_validity", tolerance: 1e-9, check: general_validity },
        Property { name: "ineq2_validity", tolerance: 1e-9, check: ineq2_validity },
        Property { name: "ineq3_validity", tolerance: 1e-9, check: ineq3_validity },
        Property { name: "ineq4_validity", tolerance: 1e-9, check: ineq4_validity },
        Property { name: "beta_max_validity", tolerance: 1e-9, check: beta_max_validity },
        Property { name: "beta_min_validity", tolerance: 1e-9, check: beta_min_validity },
        Property { name: "bound_ordering_chain", tolerance: 1e-9, check: ordering_chain },
        Property { name: "relative_entropy_binary_lower_bound", tolerance: 1e-12, check: binary_lower_bound },
        Property { name: "relative_entropy_equality_condition", tolerance: 1e-10, check: equality_condition },
        Property { name: "pinching_monotonicity", tolerance: 1e-10, check: pinching_monotonicity },
        Property { name: "optimized_bound_sandwich", tolerance: 1e-9, check: optimizer_sandwich },
        Property { name: "report_invariant", tolerance: 1e-9, check: report_invariant },
    ]
}

fn eig_reconstruction(ctx: &mut Ctx) -> Result<f64> {
    let n = [2, 3, 4, 9][ctx.rng.gen_range(0..4)];
    let g = ComplexMatrix::from_fn(n, |_, _| {
        crate::linalg::C64::new(ctx.rng.gen_range(-1.0..1.0), ctx.rng.gen_range(-1.0..1.0))
    });
    let h = g.hermitian_part();
    let e = hermitian_eig(&h)?;
    let trace_gap = (e.eigenvalues.iter().sum::<f64>() - h.trace().re).abs();
    Ok(-(e.reconstruct().max_abs_diff(&h)).max(trace_gap))
}

fn extension_partial_trace(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let out = apply_channel(&inst.channel, &DensityMatrix::diagonal(&inst.lambda))?;
    let reduced = partial_trace_r(inst.joint.matrix(), inst.d, inst.d)?;
    Ok(-reduced.max_abs_diff(out.matrix()))
}

fn environment_route(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let via_w = entropy_exchange_kraus(&inst.channel, &DensityMatrix::diagonal(&inst.lambda))?;
    Ok(-(inst.entropy - via_w).abs())
}

fn depol_instance(ctx: &mut Ctx) -> Result<(f64, f64, f64, f64)> {
    let p: f64 = ctx.rng.gen();
    let lambda: f64 = ctx.rng.gen();
    let u = sample_unitary(&mut ctx.rng, 2);
    let psi = purify_in_basis(&ProbabilityVector::new(vec![lambda, 1.0 - lambda])?, &u)?;
    let joint = extend_to_joint(&depolarizing_channel(p)?, &psi)?;
    Ok((
        p,
        lambda,
        entanglement_fidelity(&psi, &joint)?,
        entropy_exchange(&joint)?,
    ))
}

fn depol_fidelity(ctx: &mut Ctx) -> Result<f64> {
    let (p, lambda, f, _) = depol_instance(ctx)?;
    Ok(-(f - depol_fidelity_closed(p, lambda)?).abs())
}

fn depol_entropy(ctx: &mut Ctx) -> Result<f64> {
    let (p, lambda, _, s) = depol_instance(ctx)?;
    Ok(-(s - depol_entropy_closed(p, lambda)?).abs())
}

fn unitary_invariance(ctx: &mut Ctx) -> Result<f64> {
    let d = ctx.dim;
    let rho = sample_density(&mut ctx.rng, d);
    let u = sample_unitary(&mut ctx.rng, d);
    let rotated = DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint())?;
    Ok(-(von_neumann_entropy(&rotated)? - von_neumann_entropy(&rho)?).abs())
}

fn qfi_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    Ok(qfi_bound(inst.fidelity, inst.d)? - inst.entropy)
}

fn general_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let sigma = sample_density(&mut ctx.rng, inst.d * inst.d);
    Ok(general_bound(&inst.psi, &inst.joint, &sigma)? - inst.entropy)
}

fn ineq2_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let gamma = ctx.interior(inst.d);
    let rho_q2 = DensityMatrix::diagonal(&ctx.interior(inst.d));
    let out = apply_channel(&inst.channel, &DensityMatrix::diagonal(&inst.lambda))?;
    Ok(ineq2_bound(&inst.lambda, &gamma, &rho_q2, inst.fidelity, &out)? - inst.entropy)
}

fn ineq3_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let gamma = ctx.interior(inst.d);
    let xi = ctx.interior(inst.d);
    Ok(ineq3_bound(&inst.lambda, &gamma, &xi, inst.fidelity)? - inst.entropy)
}

fn ineq4_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let gamma = ctx.interior(inst.d);
    Ok(gamma_bound(&inst.lambda, &gamma, inst.fidelity, inst.d)? - inst.entropy)
}

fn beta_max_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let lo = 1.0 / (inst.d * inst.d) as f64;
    let beta = ctx.rng.gen_range(lo..1.0);
    Ok(beta_bound_max(inst.fidelity, beta, inst.d)? - inst.entropy)
}

fn beta_min_validity(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let hi = 1.0 / (inst.d * inst.d) as f64;
    let beta = hi * (1.0 - ctx.rng.gen::<f64>());
    Ok(beta_bound_min(inst.fidelity, beta)? - inst.entropy)
}

/// `S ≤ ineq1 = ineq2 ≤ ineq3` for the product ancilla `diag(γ) ⊗ diag(ξ)`,
/// and `S ≤ ineq4 = ineq3(ξ uniform)`.
fn ordering_chain(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let gamma = ctx.interior(inst.d);
    let xi = ctx.interior(inst.d);
    let report = full_report(
        &inst.lambda,
        &inst.channel,
        &BoundParameters {
            gamma: Some(gamma.clone()),
            xi: Some(xi),
            ..Default::default()
        },
    )?;
    let ineq1 = report.ineq1.ok_or(Error::Singular(0.0))?;
    let at_uniform_xi = ineq3_bound(
        &inst.lambda,
        &gamma,
        &ProbabilityVector::uniform(inst.d),
        inst.fidelity,
    )?;
    Ok([
        ineq1 - report.entropy_exchange,
        -(ineq1 - report.ineq2).abs(),
        report.ineq3 - report.ineq2,
        report.ineq4 - report.entropy_exchange,
        -(at_uniform_xi - report.ineq4).abs(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min))
}

fn binary_lower_bound(ctx: &mut Ctx) -> Result<f64> {
    let n = ctx.dim * ctx.dim;
    let p = sample_probability(&mut ctx.rng, n, 0.0);
    let q = sample_probability(&mut ctx.rng, n, 0.0);
    Ok(classical_relative_entropy(&p, &q)? - binary_relative_entropy(p[0], q[0])?)
}

/// Pairs with `q_k / p_k = (1 - q₁)/(1 - p₁)` for every `k ≥ 2`, where the
/// binary lower bound on `D(p‖q)` is tight.
fn equality_condition(ctx: &mut Ctx) -> Result<f64> {
    let n = ctx.dim * ctx.dim;
    let p = sample_probability(&mut ctx.rng, n, 0.01);
    let q1: f64 = ctx.rng.gen_range(0.01..0.99);
    let ratio = (1.0 - q1) / (1.0 - p[0]);
    let mut q = vec![q1];
    q.extend(p[1..].iter().map(|pk| pk * ratio));
    let q = ProbabilityVector::renormalized(q, 1e-9)?;
    let gap = classical_relative_entropy(&p, &q)? - binary_relative_entropy(p[0], q[0])?;
    Ok(-gap.abs())
}

fn pinching_monotonicity(ctx: &mut Ctx) -> Result<f64> {
    let d = ctx.dim;
    let rho = sample_density(&mut ctx.rng, d);
    let sigma = sample_density(&mut ctx.rng, d);
    let u = sample_unitary(&mut ctx.rng, d);
    let basis: Vec<PureState> = (0..d)
        .map(|k| PureState::new(u.column(k)))
        .collect::<Result<_>>()?;
    let p = crate::quantum::pinch(&rho, &basis)?;
    let q = crate::quantum::pinch(&sigma, &basis)?;
    Ok(quantum_relative_entropy(&rho, &sigma)? - classical_relative_entropy(&p, &q)?)
}

fn optimizer_sandwich(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let opt = optimize_gamma(
        &inst.lambda,
        inst.fidelity,
        inst.d,
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
    )?;
    let qfi = qfi_bound(inst.fidelity, inst.d)?;
    Ok((opt.bound_star - inst.entropy).min(qfi - opt.bound_star))
}

fn report_invariant(ctx: &mut Ctx) -> Result<f64> {
    let inst = ctx.instance()?;
    let params = BoundParameters {
        gamma: Some(ctx.interior(inst.d)),
        xi: Some(ctx.interior(inst.d)),
        ..Default::default()
    };
    Ok(full_report(&inst.lambda, &inst.channel, &params)?.worst_slack())
}

fn run_property(index: usize, prop: &Property, config: &VerifyConfig) -> PropertyOutcome {
    let results: Vec<(usize, Result<f64>)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let dim = config.dims[trial % config.dims.len()];
            let mut ctx = Ctx {
                rng: stream_rng(config.seed, ((index as u64) << 32) | trial as u64),
                dim,
                channel: config.channel.as_ref(),
            };
            (trial, (prop.check)(&mut ctx))
        })
        .collect();

    let mut worst_margin = f64::INFINITY;
    let mut failure = None;
    for (trial, res) in results {
        let (margin, detail) = match res {
            Ok(m) if m.is_nan() => (f64::NEG_INFINITY, "margin is NaN".to_string()),
            Ok(m) => (m, String::new()),
            Err(e) => (f64::NEG_INFINITY, e.to_string()),
        };
        worst_margin = worst_margin.min(margin);
        if margin < -prop.tolerance && failure.is_none() {
            failure = Some(Failure {
                trial,
                margin,
                detail,
            });
        }
    }
    PropertyOutcome {
        name: prop.name,
        tolerance: prop.tolerance,
        trials: config.trials,
        worst_margin,
        failure,
    }
}

pub fn property_names() -> Vec<&'static str> {
    properties().iter().map(|p| p.name).collect()
}

/// Runs every property for `config.trials` trials.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    if config.trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            range: ">= 1",
        });
    }
    if config.dims.is_empty() || config.dims.iter().any(|&d| d < 2) {
        return Err(Error::OutOfRange {
            name: "dims",
            value: config.dims.iter().copied().min().unwrap_or(0) as f64,
            range: "non-empty, each >= 2",
        });
    }
    let outcomes = properties()
        .iter()
        .enumerate()
        .map(|(i, p)| run_property(i, p, config))
        .collect();
    Ok(VerifyReport {
        seed: config.seed,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let report = run_verify(&VerifyConfig {
            seed: 42,
            trials: 10,
            dims: vec![2, 3],
            channel: None,
        })
        .unwrap();
        for o in &report.outcomes {
            assert!(o.passed(), "{} failed: {:?}", o.name, o.failure);
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = VerifyConfig {
            seed: 1,
            trials: 0,
            dims: vec![2],
            channel: None,
        };
        assert!(run_verify(&cfg).is_err());
    }

    #[test]
    fn fixed_channel_is_used() {
        let report = run_verify(&VerifyConfig {
            seed: 3,
            trials: 4,
            dims: vec![2],
            channel: Some(depolarizing_channel(0.4).unwrap()),
        })
        .unwrap();
        assert!(report.passed());
    }
}
