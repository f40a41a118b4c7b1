//! Entanglement fidelity, entropy exchange, and the family of Fano-type upper
//! bounds on the entropy exchange.
//!
//! Every bound has the shape `S(ρ, 𝓔) ≤ B`, where the reference and system
//! are both `d`-dimensional and `ρ = Σ λ_k |k⟩⟨k|` is purified as
//! `|ψ⟩ = Σ √λ_k |k⟩|k⟩`:
//!
//! * [`qfi_bound`]: `H(F) + (1 - F) ln(d² - 1)`.
//! * [`general_bound`]: `-g(F, q₁) - Tr ρ_joint ln σ` for any full-rank
//!   ancilla state `σ`, with `q₁ = ⟨ψ|σ|ψ⟩` and `g` the binary relative
//!   entropy.
//! * [`ineq2_bound`]: the general bound at `σ = Σ γ_k |k⟩⟨k| ⊗ ρ_Q2`.
//! * [`ineq3_bound`]: the above with `ρ_Q2 = diag(ξ)` and the last trace
//!   relaxed to `-ln min ξ`.
//! * [`gamma_bound`]: the above at uniform `ξ`.
//! * [`beta_bound_max`], [`beta_bound_min`]: the general bound for ancillas
//!   that have `|ψ⟩` as an extremal eigenvector.
//!
//! A bound of `+∞` is valid but carries no information. An undefined bound
//! (singular ancilla, so `ln σ` does not exist) is an error instead.

use crate::entropy::{binary_entropy, binary_relative_entropy, unit_interval, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, tensor_product, ComplexMatrix, EigenDecomposition, C64};
use crate::quantum::{
    apply_channel, basis_through, extend_to_joint, pinch, purify, DensityMatrix, KrausChannel,
    ProbabilityVector, PureState,
};

/// Imaginary parts up to this size are rounding noise and get discarded.
pub const IMAGINARY_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for an ancilla state whose logarithm is taken.
pub const POSITIVE_DEFINITE_TOL: f64 = 1e-10;
/// Slack used when checking `S ≤ bound`.
pub const BOUND_SLACK: f64 = 1e-9;

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue(z.im.abs()));
    }
    Ok(z.re)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::OutOfRange {
            name: "d",
            value: d as f64,
            range: "d >= 2",
        });
    }
    Ok(())
}

fn positive_definite_eig(m: &DensityMatrix) -> Result<EigenDecomposition> {
    let eig = hermitian_eig(m.matrix())?;
    let min = eig.min_eigenvalue();
    if min <= POSITIVE_DEFINITE_TOL {
        return Err(Error::Singular(min));
    }
    Ok(eig)
}

/// `Tr(ρ ln σ)` for positive definite `σ`.
fn trace_log(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let eig = positive_definite_eig(sigma)?;
    let mut total = 0.0;
    for (&s, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        total += real_part(rho.matrix().expectation(v))? * s.ln();
    }
    Ok(total)
}

/// `-Σ λ_k ln γ_k`, infinite when some `γ_k = 0` carries weight `λ_k > 0`.
pub fn cross_log(lambda: &ProbabilityVector, gamma: &ProbabilityVector) -> Result<f64> {
    check_len(lambda.len(), gamma.len())?;
    let mut total = 0.0;
    for (&l, &g) in lambda.iter().zip(gamma.iter()) {
        if l <= 0.0 {
            continue;
        }
        if g <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total -= l * g.ln();
    }
    Ok(total)
}

/// `F(ρ, 𝓔) = ⟨ψ|ρ_joint|ψ⟩`.
pub fn entanglement_fidelity(psi: &PureState, rho_joint: &DensityMatrix) -> Result<f64> {
    check_len(psi.dim(), rho_joint.dim())?;
    let f = real_part(rho_joint.matrix().expectation(psi.amplitudes()))?;
    unit_interval("F", f)
}

/// Entropy exchange: von Neumann entropy of the joint output state.
pub fn entropy_exchange(rho_joint: &DensityMatrix) -> Result<f64> {
    von_neumann_entropy(rho_joint)
}

/// Entropy exchange from the environment side: the entropy of
/// `W_ij = Tr(E_i ρ E_j†)`, which shares its nonzero spectrum with the joint
/// output state.
pub fn entropy_exchange_kraus(ch: &KrausChannel, rho: &DensityMatrix) -> Result<f64> {
    check_len(ch.dim(), rho.dim())?;
    let ops = ch.operators();
    let left: Vec<ComplexMatrix> = ops.iter().map(|e| e * rho.matrix()).collect();
    let adj: Vec<ComplexMatrix> = ops.iter().map(ComplexMatrix::adjoint).collect();
    let w = ComplexMatrix::from_fn(ops.len(), |i, j| (&left[i] * &adj[j]).trace());
    von_neumann_entropy(&DensityMatrix::new(w)?)
}

/// Quantum Fano inequality `H(F) + (1 - F) ln(d² - 1)`.
pub fn qfi_bound(fidelity: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    let f = unit_interval("F", fidelity)?;
    let d2 = (d * d) as f64;
    Ok(binary_entropy(f)? + (1.0 - f) * (d2 - 1.0).ln())
}

/// `-g(F, q₁) - Tr(ρ_joint ln σ)` with `q₁ = ⟨ψ|σ|ψ⟩`, both diagonals read off
/// in an orthonormal basis that starts with `ψ`.
pub fn general_bound(
    psi: &PureState,
    rho_joint: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64> {
    check_len(psi.dim(), rho_joint.dim())?;
    check_len(rho_joint.dim(), sigma.dim())?;
    let cross = trace_log(rho_joint, sigma)?;
    let basis = basis_through(psi)?;
    let p = pinch(rho_joint, &basis)?;
    let q = pinch(sigma, &basis)?;
    Ok(-binary_relative_entropy(p[0], q[0])? - cross)
}

/// Product ancilla `Σ γ_k |k⟩⟨k| ⊗ ρ_Q2`.
pub fn product_ancilla(gamma: &ProbabilityVector, rho_q2: &DensityMatrix) -> Result<DensityMatrix> {
    check_len(gamma.len(), rho_q2.dim())?;
    DensityMatrix::new(tensor_product(
        &ComplexMatrix::from_real_diagonal(gamma),
        rho_q2.matrix(),
    ))
}

/// General bound specialized to a product ancilla:
/// `-g(F, q₁) - Σ λ_k ln γ_k - Tr(𝓔(ρ) ln ρ_Q2)`,
/// `q₁ = Σ γ_k λ_k ⟨k|ρ_Q2|k⟩`.
///
/// `λ` is the spectrum of the input state and `|k⟩` its eigenbasis, so
/// `ρ_Q2` and `𝓔(ρ)` must be expressed in that basis.
pub fn ineq2_bound(
    lambda: &ProbabilityVector,
    gamma: &ProbabilityVector,
    rho_q2: &DensityMatrix,
    fidelity: f64,
    channel_output: &DensityMatrix,
) -> Result<f64> {
    let d = lambda.len();
    check_dim(d)?;
    check_len(d, gamma.len())?;
    check_len(d, rho_q2.dim())?;
    check_len(d, channel_output.dim())?;
    let f = unit_interval("F", fidelity)?;
    let system_term = -trace_log(channel_output, rho_q2)?;
    let reference_term = cross_log(lambda, gamma)?;
    if reference_term.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut q1 = 0.0;
    for k in 0..d {
        q1 += gamma[k] * lambda[k] * rho_q2.matrix()[(k, k)].re;
    }
    Ok(-binary_relative_entropy(f, q1)? + reference_term + system_term)
}

/// `H(F) + ln(s / min ξ) + (1 - F) ln(1/s - 1) - Σ λ_k ln γ_k` with
/// `s = Σ λ_i γ_i ξ_i`.
pub fn ineq3_bound(
    lambda: &ProbabilityVector,
    gamma: &ProbabilityVector,
    xi: &ProbabilityVector,
    fidelity: f64,
) -> Result<f64> {
    let d = lambda.len();
    check_dim(d)?;
    check_len(d, gamma.len())?;
    check_len(d, xi.len())?;
    let f = unit_interval("F", fidelity)?;
    let xi_min = xi.iter().copied().fold(f64::INFINITY, f64::min);
    if xi_min <= 0.0 {
        return Err(Error::OutOfRange {
            name: "min xi",
            value: xi_min,
            range: "(0, 1]",
        });
    }
    let reference_term = cross_log(lambda, gamma)?;
    if reference_term.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let s: f64 = (0..d).map(|k| lambda[k] * gamma[k] * xi[k]).sum();
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange {
            name: "sum lambda*gamma*xi",
            value: s,
            range: "(0, 1)",
        });
    }
    let tail = if f < 1.0 {
        (1.0 - f) * (1.0 / s - 1.0).ln()
    } else {
        0.0
    };
    Ok(binary_entropy(f)? + (s / xi_min).ln() + tail + reference_term)
}

/// `H(F) + ln s + (1 - F) ln(d/s - 1) - Σ λ_k ln γ_k` with `s = Σ λ_i γ_i`.
/// Uniform `γ` recovers [`qfi_bound`].
pub fn gamma_bound(
    lambda: &ProbabilityVector,
    gamma: &ProbabilityVector,
    fidelity: f64,
    d: usize,
) -> Result<f64> {
    check_dim(d)?;
    check_len(d, lambda.len())?;
    check_len(d, gamma.len())?;
    let f = unit_interval("F", fidelity)?;
    let reference_term = cross_log(lambda, gamma)?;
    if reference_term.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let s: f64 = lambda.iter().zip(gamma.iter()).map(|(l, g)| l * g).sum();
    gamma_objective(s, reference_term, f, d as f64)
}

/// Shared tail of [`gamma_bound`] once `s` and `-Σ λ ln γ` are known.
pub(crate) fn gamma_objective(s: f64, reference_term: f64, f: f64, d: f64) -> Result<f64> {
    if !(s > 0.0 && s < d) {
        return Err(Error::OutOfRange {
            name: "sum lambda*gamma",
            value: s,
            range: "(0, d)",
        });
    }
    let tail = if f < 1.0 {
        (1.0 - f) * (d / s - 1.0).ln()
    } else {
        0.0
    };
    Ok(binary_entropy(f)? + s.ln() + tail + reference_term)
}

/// `H(F) - F ln(1/β_max - 1) + ln(d² - 1)`: the general bound for an ancilla
/// with `ψ` as top eigenvector (eigenvalue `β_max`) and the rest of the
/// spectrum flat.
pub fn beta_bound_max(fidelity: f64, beta_max: f64, d: usize) -> Result<f64> {
    check_dim(d)?;
    let f = unit_interval("F", fidelity)?;
    let d2 = (d * d) as f64;
    if !(beta_max >= 1.0 / d2 && beta_max < 1.0) {
        return Err(Error::OutOfRange {
            name: "beta_max",
            value: beta_max,
            range: "[1/d^2, 1)",
        });
    }
    Ok(binary_entropy(f)? - f * (1.0 / beta_max - 1.0).ln() + (d2 - 1.0).ln())
}

/// `H(F) + (1 - F) ln(1/β_min - 1)`: the general bound for an ancilla with
/// `ψ` as bottom eigenvector (eigenvalue `β_min`).
///
/// `β_min` is the smallest eigenvalue of a state on at least four dimensions,
/// so it is accepted on `(0, 1/4]`.
pub fn beta_bound_min(fidelity: f64, beta_min: f64) -> Result<f64> {
    let f = unit_interval("F", fidelity)?;
    if !(beta_min > 0.0 && beta_min <= 0.25) {
        return Err(Error::OutOfRange {
            name: "beta_min",
            value: beta_min,
            range: "(0, 1/4]",
        });
    }
    let tail = if f < 1.0 {
        (1.0 - f) * (1.0 / beta_min - 1.0).ln()
    } else {
        0.0
    };
    Ok(binary_entropy(f)? + tail)
}

/// Free parameters of the bound family. Unset fields default to the choices
/// under which every extension collapses to the QFI: uniform `γ` and `ξ`,
/// `ρ_Q2 = diag(ξ)`, `σ = diag(γ) ⊗ ρ_Q2`, `β = 1/d²`.
#[derive(Clone, Debug, Default)]
pub struct BoundParameters {
    pub gamma: Option<ProbabilityVector>,
    pub xi: Option<ProbabilityVector>,
    pub rho_q2: Option<DensityMatrix>,
    pub sigma: Option<DensityMatrix>,
    pub beta_max: Option<f64>,
    pub beta_min: Option<f64>,
}

/// Parameters actually used for a report, after defaults are filled in.
#[derive(Clone, Debug)]
pub struct ResolvedParameters {
    pub gamma: ProbabilityVector,
    pub xi: ProbabilityVector,
    pub rho_q2: DensityMatrix,
    pub sigma: DensityMatrix,
    pub beta_max: f64,
    pub beta_min: f64,
}

/// Every bound plus the exact entropy exchange for one `(λ, 𝓔)` instance.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub dim: usize,
    pub fidelity: f64,
    pub entropy_exchange: f64,
    pub qfi: f64,
    /// `None` when the ancilla `σ` is singular and the bound is undefined.
    pub ineq1: Option<f64>,
    pub ineq2: f64,
    pub ineq3: f64,
    pub ineq4: f64,
    pub beta_max_bound: f64,
    pub beta_min_bound: f64,
    pub parameters: ResolvedParameters,
}

impl BoundReport {
    /// `(name, value)` for every bound field, in display order.
    pub fn bounds(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("qfi", Some(self.qfi)),
            ("ineq1", self.ineq1),
            ("ineq2", Some(self.ineq2)),
            ("ineq3", Some(self.ineq3)),
            ("ineq4", Some(self.ineq4)),
            ("beta_max_bound", Some(self.beta_max_bound)),
            ("beta_min_bound", Some(self.beta_min_bound)),
        ]
    }

    /// Smallest `bound - S` over the finite bounds.
    pub fn worst_slack(&self) -> f64 {
        self.bounds()
            .into_iter()
            .filter_map(|(_, b)| b.filter(|x| x.is_finite()))
            .map(|b| b - self.entropy_exchange)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the purification of `diag(λ)`, runs the channel, and evaluates every
/// bound. Fails if the result violates `S ≤ bound` for a finite bound, or if
/// the two routes to the entropy exchange disagree.
pub fn full_report(
    lambda: &ProbabilityVector,
    channel: &KrausChannel,
    params: &BoundParameters,
) -> Result<BoundReport> {
    let d = lambda.len();
    check_dim(d)?;
    check_len(d, channel.dim())?;

    let gamma = params
        .gamma
        .clone()
        .unwrap_or_else(|| ProbabilityVector::uniform(d));
    let xi = params
        .xi
        .clone()
        .unwrap_or_else(|| ProbabilityVector::uniform(d));
    check_len(d, gamma.len())?;
    check_len(d, xi.len())?;
    let rho_q2 = match &params.rho_q2 {
        Some(r) => r.clone(),
        None => DensityMatrix::diagonal(&xi),
    };
    check_len(d, rho_q2.dim())?;
    let sigma = match &params.sigma {
        Some(s) => s.clone(),
        None => product_ancilla(&gamma, &rho_q2)?,
    };
    let d2 = (d * d) as f64;
    let beta_max = params.beta_max.unwrap_or(1.0 / d2);
    let beta_min = params.beta_min.unwrap_or(1.0 / d2);
    if beta_min > 1.0 / d2 {
        return Err(Error::OutOfRange {
            name: "beta_min",
            value: beta_min,
            range: "(0, 1/d^2]",
        });
    }

    let psi = purify(lambda)?;
    let joint = extend_to_joint(channel, &psi)?;
    let rho = DensityMatrix::diagonal(lambda);
    let output = apply_channel(channel, &rho)?;

    let fidelity = entanglement_fidelity(&psi, &joint)?;
    let entropy_exchange = entropy_exchange(&joint)?;
    let via_kraus = entropy_exchange_kraus(channel, &rho)?;
    if (entropy_exchange - via_kraus).abs() > BOUND_SLACK {
        return Err(Error::Invariant(format!(
            "entropy exchange {entropy_exchange} disagrees with environment route {via_kraus}"
        )));
    }

    let ineq1 = match general_bound(&psi, &joint, &sigma) {
        Ok(b) => Some(b),
        Err(Error::Singular(_)) => None,
        Err(e) => return Err(e),
    };
    let report = BoundReport {
        dim: d,
        fidelity,
        entropy_exchange,
        qfi: qfi_bound(fidelity, d)?,
        ineq1,
        ineq2: ineq2_bound(lambda, &gamma, &rho_q2, fidelity, &output)?,
        ineq3: ineq3_bound(lambda, &gamma, &xi, fidelity)?,
        ineq4: gamma_bound(lambda, &gamma, fidelity, d)?,
        beta_max_bound: beta_bound_max(fidelity, beta_max, d)?,
        beta_min_bound: beta_bound_min(fidelity, beta_min)?,
        parameters: ResolvedParameters {
            gamma,
            xi,
            rho_q2,
            sigma,
            beta_max,
            beta_min,
        },
    };
    for (name, bound) in report.bounds() {
        if let Some(b) = bound {
            if entropy_exchange > b + BOUND_SLACK {
                return Err(Error::Invariant(format!(
                    "entropy exchange {entropy_exchange} exceeds {name} = {b}"
                )));
            }
        }
    }
    Ok(report)
}

/// [`full_report`] for an input state given as a matrix.
///
/// The state's eigenbasis becomes the working basis: `λ` is its spectrum in
/// descending order, `γ` and `ξ` are indexed against that order, and the
/// channel plus any supplied `ρ_Q2` / `σ` are rotated into the eigenbasis.
pub fn full_report_for_state(
    rho: &DensityMatrix,
    channel: &KrausChannel,
    params: &BoundParameters,
) -> Result<BoundReport> {
    let d = rho.dim();
    check_len(d, channel.dim())?;
    let eig = hermitian_eig(rho.matrix())?;
    let lambda = ProbabilityVector::renormalized(eig.eigenvalues.clone(), 1e-8)?;
    let u = ComplexMatrix::from_columns(&eig.eigenvectors)?;
    let rotate = |m: &ComplexMatrix, w: &ComplexMatrix| &(&w.adjoint() * m) * w;

    let operators = channel.operators().iter().map(|e| rotate(e, &u)).collect();
    let rotated = KrausChannel::new(operators)?;
    let lifted = tensor_product(&ComplexMatrix::identity(d), &u);
    let mut local = params.clone();
    if let Some(r) = &params.rho_q2 {
        local.rho_q2 = Some(DensityMatrix::new(rotate(r.matrix(), &u))?);
    }
    if let Some(s) = &params.sigma {
        local.sigma = Some(DensityMatrix::new(rotate(s.matrix(), &lifted))?);
    }
    full_report(&lambda, &rotated, &local)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use super::*;
    use crate::quantum::{
        depolarizing_channel, purify_in_basis, random_unitary, sample_channel, sample_density,
        sample_probability, stream_rng,
    };

    fn pv(w: &[f64]) -> ProbabilityVector {
        ProbabilityVector::new(w.to_vec()).unwrap()
    }

    fn joint_for(lambda: &ProbabilityVector, ch: &KrausChannel) -> (PureState, DensityMatrix) {
        let psi = purify(lambda).unwrap();
        let joint = extend_to_joint(ch, &psi).unwrap();
        (psi, joint)
    }

    #[test]
    fn identity_channel_fidelity_and_entropy() {
        let lambda = pv(&[0.3, 0.7]);
        let (psi, joint) = joint_for(&lambda, &KrausChannel::identity(2));
        assert!((entanglement_fidelity(&psi, &joint).unwrap() - 1.0).abs() < 1e-15);
        assert!(entropy_exchange(&joint).unwrap().abs() < 1e-14);
    }

    #[test]
    fn fully_depolarized_bell_state() {
        let lambda = pv(&[0.5, 0.5]);
        let ch = depolarizing_channel(1.0).unwrap();
        let (psi, joint) = joint_for(&lambda, &ch);
        assert!((entanglement_fidelity(&psi, &joint).unwrap() - 0.25).abs() < 1e-15);
        assert!((entropy_exchange(&joint).unwrap() - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn fully_depolarized_pure_state() {
        let lambda = pv(&[0.0, 1.0]);
        let (_, joint) = joint_for(&lambda, &depolarizing_channel(1.0).unwrap());
        assert!((entropy_exchange(&joint).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn fidelity_does_not_depend_on_purifying_basis() {
        let lambda = pv(&[0.1, 0.9]);
        let ch = depolarizing_channel(0.6).unwrap();
        let (psi0, joint0) = joint_for(&lambda, &ch);
        let f0 = entanglement_fidelity(&psi0, &joint0).unwrap();
        for seed in 0..10 {
            let psi = purify_in_basis(&lambda, &random_unitary(seed, 2)).unwrap();
            let joint = extend_to_joint(&ch, &psi).unwrap();
            assert!((entanglement_fidelity(&psi, &joint).unwrap() - f0).abs() <= 1e-10);
        }
    }

    #[test]
    fn kraus_route_matches_joint_entropy() {
        for seed in 0..30 {
            let mut rng = stream_rng(7, seed);
            let d = 2 + (seed as usize % 2);
            let ch = sample_channel(&mut rng, d, 1 + seed as usize % 4);
            let rho = sample_density(&mut rng, d);
            let eig = hermitian_eig(rho.matrix()).unwrap();
            let lambda = ProbabilityVector::renormalized(eig.eigenvalues.clone(), 1e-8).unwrap();
            let u = ComplexMatrix::from_columns(&eig.eigenvectors).unwrap();
            let psi = purify_in_basis(&lambda, &u).unwrap();
            let joint = extend_to_joint(&ch, &psi).unwrap();
            let s_joint = entropy_exchange(&joint).unwrap();
            let s_env = entropy_exchange_kraus(&ch, &rho).unwrap();
            assert!((s_joint - s_env).abs() <= 1e-9, "{s_joint} vs {s_env}");
        }
    }

    #[test]
    fn qfi_values() {
        assert_eq!(qfi_bound(1.0, 2).unwrap(), 0.0);
        assert!((qfi_bound(0.25, 2).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((qfi_bound(0.0, 2).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(qfi_bound(0.5, 1).is_err());
        assert!(qfi_bound(1.5, 2).is_err());
    }

    #[test]
    fn general_bound_at_uniform_ancilla_is_qfi() {
        for seed in 0..10 {
            let mut rng = stream_rng(3, seed);
            let d = 2 + (seed as usize % 2);
            let ch = sample_channel(&mut rng, d, 3);
            let lambda = sample_probability(&mut rng, d, 0.0);
            let (psi, joint) = joint_for(&lambda, &ch);
            let f = entanglement_fidelity(&psi, &joint).unwrap();
            let b = general_bound(&psi, &joint, &DensityMatrix::maximally_mixed(d * d)).unwrap();
            assert!((b - qfi_bound(f, d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn general_bound_with_joint_state_as_ancilla() {
        let mut rng = stream_rng(5, 0);
        let ch = sample_channel(&mut rng, 2, 4);
        let (psi, joint) = joint_for(&pv(&[0.35, 0.65]), &ch);
        let b = general_bound(&psi, &joint, &joint).unwrap();
        assert!(b >= entropy_exchange(&joint).unwrap() - 1e-10);
    }

    #[test]
    fn general_bound_rejects_singular_ancilla() {
        let (psi, joint) = joint_for(&pv(&[0.5, 0.5]), &depolarizing_channel(0.3).unwrap());
        let singular = DensityMatrix::diagonal(&pv(&[0.5, 0.5, 0.0, 0.0]));
        assert!(matches!(
            general_bound(&psi, &joint, &singular),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn ineq2_matches_general_bound_on_product_ancilla() {
        for seed in 0..20 {
            let mut rng = stream_rng(11, seed);
            let d = 2 + (seed as usize % 2);
            let ch = sample_channel(&mut rng, d, 2);
            let lambda = sample_probability(&mut rng, d, 0.0);
            let gamma = sample_probability(&mut rng, d, 0.01);
            let rho_q2 = sample_density(&mut rng, d);
            let (psi, joint) = joint_for(&lambda, &ch);
            let f = entanglement_fidelity(&psi, &joint).unwrap();
            let out = apply_channel(&ch, &DensityMatrix::diagonal(&lambda)).unwrap();
            let b2 = ineq2_bound(&lambda, &gamma, &rho_q2, f, &out).unwrap();
            let sigma = product_ancilla(&gamma, &rho_q2).unwrap();
            let b1 = general_bound(&psi, &joint, &sigma).unwrap();
            assert!((b1 - b2).abs() <= 1e-10, "{b1} vs {b2}");
        }
    }

    #[test]
    fn ineq2_reduces_to_qfi() {
        let lambda = pv(&[0.2, 0.8]);
        let ch = depolarizing_channel(0.4).unwrap();
        let (psi, joint) = joint_for(&lambda, &ch);
        let f = entanglement_fidelity(&psi, &joint).unwrap();
        let out = apply_channel(&ch, &DensityMatrix::diagonal(&lambda)).unwrap();
        let b = ineq2_bound(
            &lambda,
            &ProbabilityVector::uniform(2),
            &DensityMatrix::maximally_mixed(2),
            f,
            &out,
        )
        .unwrap();
        assert!((b - qfi_bound(f, 2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ineq2_zero_gamma_is_infinite_and_singular_rho_q2_is_error() {
        let lambda = pv(&[0.5, 0.5]);
        let out = DensityMatrix::maximally_mixed(2);
        let gamma = pv(&[1.0, 0.0]);
        let b = ineq2_bound(
            &lambda,
            &gamma,
            &DensityMatrix::maximally_mixed(2),
            0.5,
            &out,
        )
        .unwrap();
        assert!(b.is_infinite());
        let singular = DensityMatrix::diagonal(&pv(&[1.0, 0.0]));
        assert!(matches!(
            ineq2_bound(
                &lambda,
                &ProbabilityVector::uniform(2),
                &singular,
                0.5,
                &out
            ),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn ineq3_reductions() {
        let lambda = pv(&[0.1, 0.6, 0.3]);
        let gamma = pv(&[0.5, 0.2, 0.3]);
        let u = ProbabilityVector::uniform(3);
        for f in [0.0, 0.3, 0.9, 1.0] {
            let q = qfi_bound(f, 3).unwrap();
            assert!((ineq3_bound(&lambda, &u, &u, f).unwrap() - q).abs() < 1e-12);
            let b3 = ineq3_bound(&lambda, &gamma, &u, f).unwrap();
            let b4 = gamma_bound(&lambda, &gamma, f, 3).unwrap();
            assert!((b3 - b4).abs() < 1e-12);
        }
    }

    #[test]
    fn ineq3_rejects_zero_xi() {
        let lambda = pv(&[0.5, 0.5]);
        let u = ProbabilityVector::uniform(2);
        assert!(ineq3_bound(&lambda, &u, &pv(&[1.0, 0.0]), 0.5).is_err());
        assert!(ineq3_bound(&lambda, &pv(&[0.0, 1.0]), &u, 0.5)
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn gamma_bound_reduces_to_qfi() {
        let lambda = pv(&[0.1, 0.9]);
        for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let b = gamma_bound(&lambda, &ProbabilityVector::uniform(2), f, 2).unwrap();
            assert!((b - qfi_bound(f, 2).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn gamma_bound_at_perfect_fidelity() {
        // H(1) + ln 0.9 + 0 - ln 0.9
        let b = gamma_bound(&pv(&[1.0, 0.0]), &pv(&[0.9, 0.1]), 1.0, 2).unwrap();
        assert!(b.abs() < 1e-15);
    }

    #[test]
    fn gamma_bound_argument_checks() {
        let l = pv(&[0.5, 0.5]);
        assert!(gamma_bound(&l, &pv(&[0.2, 0.3, 0.5]), 0.5, 2).is_err());
        assert!(gamma_bound(&l, &l, 0.5, 3).is_err());
        assert!(gamma_bound(&pv(&[0.5, 0.5]), &pv(&[0.0, 1.0]), 0.5, 2)
            .unwrap()
            .is_infinite());
        assert!(gamma_bound(&pv(&[0.0, 1.0]), &pv(&[0.0, 1.0]), 0.5, 2)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn beta_bounds_reduce_to_qfi() {
        for d in [2usize, 3] {
            let b = 1.0 / (d * d) as f64;
            for f in [0.0, 0.4, 1.0] {
                let q = qfi_bound(f, d).unwrap();
                assert!((beta_bound_max(f, b, d).unwrap() - q).abs() < 1e-12);
                assert!((beta_bound_min(f, b).unwrap() - q).abs() < 1e-12);
            }
        }
        assert!(beta_bound_max(1.0, 0.25, 2).unwrap().abs() < 1e-15);
        assert_eq!(beta_bound_min(1.0, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn beta_bounds_are_monotone_away_from_qfi() {
        let d = 2;
        for f in [0.1, 0.5, 0.9] {
            let q = qfi_bound(f, d).unwrap();
            let mut prev = q;
            for i in 1..50 {
                let beta = 0.25 + 0.7 * i as f64 / 50.0;
                let b = beta_bound_max(f, beta, d).unwrap();
                assert!(b >= prev - 1e-15);
                prev = b;
            }
            let mut prev = q;
            for i in 1..50 {
                let beta = 0.25 * (1.0 - i as f64 / 50.0);
                let b = beta_bound_min(f, beta).unwrap();
                assert!(b >= prev - 1e-15);
                prev = b;
            }
        }
    }

    #[test]
    fn beta_bound_ranges() {
        assert!(beta_bound_max(0.5, 0.2, 2).is_err());
        assert!(beta_bound_max(0.5, 1.0, 2).is_err());
        assert!(beta_bound_min(0.5, 0.0).is_err());
        assert!(beta_bound_min(0.5, 0.3).is_err());
    }

    #[test]
    fn report_for_identity_channel() {
        let r = full_report(
            &pv(&[0.3, 0.7]),
            &KrausChannel::identity(2),
            &Default::default(),
        )
        .unwrap();
        assert!(r.entropy_exchange.abs() < 1e-14);
        assert!((r.fidelity - 1.0).abs() < 1e-15);
        for (_, b) in r.bounds() {
            assert!(b.unwrap() >= -1e-15);
        }
    }

    #[test]
    fn report_defaults_collapse_to_qfi() {
        let r = full_report(
            &pv(&[0.1, 0.9]),
            &depolarizing_channel(0.5).unwrap(),
            &Default::default(),
        )
        .unwrap();
        assert!((r.ineq3 - r.qfi).abs() <= 1e-12);
        assert!((r.ineq4 - r.qfi).abs() <= 1e-12);
        assert!((r.beta_max_bound - r.qfi).abs() <= 1e-12);
        assert!(r.worst_slack() >= -1e-9);
    }

    #[test]
    fn report_with_singular_sigma_leaves_ineq1_undefined() {
        let params = BoundParameters {
            gamma: Some(pv(&[1.0, 0.0])),
            ..Default::default()
        };
        let r = full_report(
            &pv(&[1.0, 0.0]),
            &depolarizing_channel(0.5).unwrap(),
            &params,
        )
        .unwrap();
        assert!(r.ineq1.is_none());
        assert!(r.ineq4.is_finite());
    }

    #[test]
    fn report_for_rotated_state_matches_diagonal_report() {
        let lambda = pv(&[0.8, 0.2]);
        let u = random_unitary(17, 2);
        let rho =
            DensityMatrix::new(&(&u * &ComplexMatrix::from_real_diagonal(&lambda)) * &u.adjoint())
                .unwrap();
        let ch = depolarizing_channel(0.7).unwrap();
        let params = BoundParameters {
            gamma: Some(pv(&[0.6, 0.4])),
            ..Default::default()
        };
        let a = full_report_for_state(&rho, &ch, &params).unwrap();
        let b = full_report(&lambda, &ch, &params).unwrap();
        assert!((a.fidelity - b.fidelity).abs() < 1e-12);
        assert!((a.entropy_exchange - b.entropy_exchange).abs() < 1e-12);
        assert!((a.ineq4 - b.ineq4).abs() < 1e-12);
    }
}
