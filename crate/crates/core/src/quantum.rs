//! States, channels and the operations used to build the joint
//! reference+system picture: purification, Kraus application, extension of a
//! channel by the identity on the reference, and pinching in a fixed basis.

use std::ops::Deref;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    complete_orthonormal_basis, gram_schmidt, hermitian_eig, norm, orthonormality_residual,
    partial_trace_r, tensor_product, ComplexMatrix, C64,
};

/// Slack on probability sums, traces and normalization.
pub const NORM_TOL: f64 = 1e-10;
/// Negative weights down to this value are clamped to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Completeness slack on Kraus operators.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(weights, NORM_TOL)
    }

    /// Validates with a caller-chosen tolerance on the sum.
    pub fn with_tolerance(mut weights: Vec<f64>, sum_tol: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        for (k, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(Error::InvalidProbability(format!(
                    "entry {k} is not finite"
                )));
            }
            if *w < 0.0 {
                if *w < -NEGATIVE_SLACK {
                    return Err(Error::InvalidProbability(format!(
                        "entry {k} = {w} is negative"
                    )));
                }
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > sum_tol {
            return Err(Error::InvalidProbability(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// Clamps tiny negatives and rescales to unit sum. Used on numerically
    /// computed spectra and pinchings; fails if the sum is off by more than
    /// `sum_tol`.
    pub fn renormalized(mut weights: Vec<f64>, sum_tol: f64) -> Result<Self> {
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > sum_tol {
            return Err(Error::InvalidProbability(format!("weights sum to {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbabilityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Unit-norm state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(amplitudes))
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.0)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let herm = mat.hermiticity_residual();
        if herm > NORM_TOL {
            return Err(Error::InvalidDensity(format!(
                "hermiticity residual {herm:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min = hermitian_eig(&mat)?.min_eigenvalue();
        if min < -NORM_TOL {
            return Err(Error::InvalidDensity(format!(
                "eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self(mat.hermitian_part()))
    }

    /// `diag(weights)`.
    pub fn diagonal(weights: &ProbabilityVector) -> Self {
        Self(ComplexMatrix::from_real_diagonal(weights))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(operators, COMPLETENESS_TOL)
    }

    pub fn with_tolerance(operators: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Completeness(f64::INFINITY));
        };
        let dim = first.dim();
        if let Some(bad) = operators.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let ch = Self { dim, operators };
        let residual = ch.completeness_residual();
        if residual.is_nan() || residual > tol {
            return Err(Error::Completeness(residual));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Largest entrywise deviation of `Σ E†E` from the identity.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim);
        for e in &self.operators {
            sum = &sum + &(&e.adjoint() * e);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }
}

/// Pauli matrices `[X, Y, Z]`.
pub fn paulis() -> [ComplexMatrix; 3] {
    let z0 = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::from_fn(2, |r, c| if r != c { one } else { z0 }),
        ComplexMatrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => z0,
        }),
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0]),
    ]
}

/// `Σ_k √λ_k |k⟩|k⟩` on `C^d ⊗ C^d`.
pub fn purify(lambda: &ProbabilityVector) -> Result<PureState> {
    let d = lambda.len();
    if d < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: d,
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for (k, &l) in lambda.iter().enumerate() {
        amps[k * d + k] = C64::new(l.sqrt(), 0.0);
    }
    PureState::new(amps)
}

/// Purification of `U diag(λ) U†`: `Σ_k √λ_k |k⟩ ⊗ U|k⟩`.
pub fn purify_in_basis(lambda: &ProbabilityVector, unitary: &ComplexMatrix) -> Result<PureState> {
    let d = lambda.len();
    if unitary.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: unitary.dim(),
        });
    }
    let psi = purify(lambda)?;
    let lifted = tensor_product(&ComplexMatrix::identity(d), unitary);
    PureState::new(lifted.mat_vec(psi.amplitudes()))
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Σ_i E_i ρ E_i†`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dims(ch.dim, rho.dim())?;
    let mut out = ComplexMatrix::zeros(ch.dim);
    for e in &ch.operators {
        out = &out + &(&(e * rho.matrix()) * &e.adjoint());
    }
    DensityMatrix::new(out)
}

/// Joint output `(I ⊗ 𝓔)(|ψ⟩⟨ψ|)` for a purification on `C^d ⊗ C^d`.
pub fn extend_to_joint(ch: &KrausChannel, psi: &PureState) -> Result<DensityMatrix> {
    let d = ch.dim;
    check_dims(d * d, psi.dim())?;
    let id = ComplexMatrix::identity(d);
    let mut out = ComplexMatrix::zeros(d * d);
    for e in &ch.operators {
        let branch = tensor_product(&id, e).mat_vec(psi.amplitudes());
        out = &out + &ComplexMatrix::outer(&branch);
    }
    DensityMatrix::new(out)
}

/// Diagonal of `ρ` in an orthonormal basis: `p_k = ⟨k|ρ|k⟩`.
pub fn pinch(rho: &DensityMatrix, basis: &[PureState]) -> Result<ProbabilityVector> {
    let n = rho.dim();
    check_dims(n, basis.len())?;
    let vectors: Vec<Vec<C64>> = basis.iter().map(|b| b.amplitudes().to_vec()).collect();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidBasis(f64::INFINITY));
    }
    let residual = orthonormality_residual(&vectors);
    if residual > NORM_TOL {
        return Err(Error::InvalidBasis(residual));
    }
    let diag: Vec<f64> = vectors
        .iter()
        .map(|v| rho.matrix().expectation(v).re.max(0.0))
        .collect();
    ProbabilityVector::renormalized(diag, NORM_TOL)
}

/// Orthonormal basis of the joint space whose first element is `psi`.
pub fn basis_through(psi: &PureState) -> Result<Vec<PureState>> {
    complete_orthonormal_basis(psi.amplitudes(), psi.dim())?
        .into_iter()
        .map(PureState::new)
        .collect()
}

/// Qubit depolarizing channel with Kraus operators
/// `√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z`.
pub fn depolarizing_channel(p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            range: "[0, 1]",
        });
    }
    let [x, y, z] = paulis();
    let w = (p / 4.0).sqrt();
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
        x.scale_real(w),
        y.scale_real(w),
        z.scale_real(w),
    ])
}

/// Deterministic generator for stream `stream` under `seed`.
///
/// Every trial of a randomized suite gets its own ChaCha8 stream, so a single
/// failing trial can be replayed from `(seed, stream)` alone.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn ginibre_columns(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<C64>> {
    (0..cols)
        .map(|_| (0..rows).map(|_| gaussian_c64(rng)).collect())
        .collect()
}

/// Haar-random unitary: Gram–Schmidt QR of a Ginibre matrix, which fixes
/// the diagonal of R to be positive real.
pub fn sample_unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    loop {
        if let Some(q) = gram_schmidt(&ginibre_columns(rng, d, d)) {
            return ComplexMatrix::from_columns(&q).expect("square by construction");
        }
    }
}

/// Random channel from a Haar-distributed `(n·d) × d` isometry cut into
/// `n` Kraus blocks.
pub fn sample_channel(rng: &mut impl Rng, d: usize, num_kraus: usize) -> KrausChannel {
    let rows = num_kraus * d;
    let cols = loop {
        if let Some(q) = gram_schmidt(&ginibre_columns(rng, rows, d)) {
            break q;
        }
    };
    let operators = (0..num_kraus)
        .map(|blk| ComplexMatrix::from_fn(d, |i, j| cols[j][blk * d + i]))
        .collect();
    KrausChannel::new(operators).expect("isometry blocks are complete")
}

/// Random full-rank density matrix `G G† / Tr(G G†)` with `G` Ginibre.
pub fn sample_density(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(d, |_, _| gaussian_c64(rng));
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / tr).hermitian_part()).expect("Ginibre state is valid")
}

/// Flat-Dirichlet probability vector with every entry at least `floor`.
pub fn sample_probability(rng: &mut impl Rng, d: usize, floor: f64) -> ProbabilityVector {
    let raw: Vec<f64> = (0..d)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln() + floor)
        .collect();
    let total: f64 = raw.iter().sum();
    ProbabilityVector::renormalized(raw.iter().map(|x| x / total).collect(), 1e-9)
        .expect("positive weights")
}

pub fn random_unitary(seed: u64, d: usize) -> ComplexMatrix {
    sample_unitary(&mut ChaCha8Rng::seed_from_u64(seed), d)
}

pub fn random_channel(seed: u64, d: usize, num_kraus: usize) -> KrausChannel {
    sample_channel(&mut ChaCha8Rng::seed_from_u64(seed), d, num_kraus)
}

pub fn random_density(seed: u64, d: usize) -> DensityMatrix {
    sample_density(&mut ChaCha8Rng::seed_from_u64(seed), d)
}

/// Reduced state of the reference system of a purification.
pub fn reference_state(psi: &PureState, d: usize) -> Result<ComplexMatrix> {
    crate::linalg::partial_trace_q(&psi.projector(), d, d)
}

/// Reduced state of the system half of a joint operator.
pub fn system_state(joint: &DensityMatrix, d: usize) -> Result<ComplexMatrix> {
    partial_trace_r(joint.matrix(), d, d)
}
