//! Classical and quantum entropic functionals, in nats.
//!
//! `0 ln 0 = 0` throughout. Divergent relative entropies are returned as
//! `f64::INFINITY`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner};
use crate::quantum::{DensityMatrix, ProbabilityVector};

/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-10;

const UNIT_SLACK: f64 = 1e-12;

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Accepts `x` in `[0, 1]` up to rounding slack and clamps it.
pub(crate) fn unit_interval(name: &'static str, x: f64) -> Result<f64> {
    // `contains` is false for NaN, so NaN is rejected here too.
    if !(-UNIT_SLACK..=1.0 + UNIT_SLACK).contains(&x) {
        return Err(Error::OutOfRange {
            name,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `H(x) = -x ln x - (1-x) ln(1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = unit_interval("x", x)?;
    Ok(-xlnx(x) - xlnx(1.0 - x))
}

pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    // `0.0 - sum` rather than `-sum` so a pure state yields +0, not -0.
    0.0 - p.iter().map(|&x| xlnx(x)).sum::<f64>()
}

/// Spectrum of a density matrix as a probability vector.
pub fn spectrum(rho: &DensityMatrix) -> Result<ProbabilityVector> {
    let eig = hermitian_eig(rho.matrix())?;
    ProbabilityVector::renormalized(eig.eigenvalues, 1e-8)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&spectrum(rho)?))
}

/// `S(ρ‖σ) = Tr ρ ln ρ - Tr ρ ln σ`, via both eigendecompositions.
pub fn quantum_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let er = hermitian_eig(rho.matrix())?;
    let es = hermitian_eig(sigma.matrix())?;

    let mut cross = 0.0;
    for (&r, a) in er.eigenvalues.iter().zip(&er.eigenvectors) {
        if r <= 0.0 {
            continue;
        }
        for (&s, b) in es.eigenvalues.iter().zip(&es.eigenvectors) {
            let overlap = inner(a, b).norm_sqr();
            if s > SUPPORT_TOL {
                cross += r * overlap * s.ln();
            } else if r > SUPPORT_TOL && overlap > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        }
    }
    let neg_entropy: f64 = er.eigenvalues.iter().map(|&r| xlnx(r.max(0.0))).sum();
    Ok(neg_entropy - cross)
}

/// `D(p‖q) = Σ p_k ln(p_k / q_k)`.
pub fn classical_relative_entropy(p: &ProbabilityVector, q: &ProbabilityVector) -> Result<f64> {
    relative_entropy_slices(p, q)
}

fn relative_entropy_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut total = 0.0;
    for (&pk, &qk) in p.iter().zip(q) {
        if pk <= 0.0 {
            continue;
        }
        if qk <= 1e-15 {
            if pk > 1e-12 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        total += pk * (pk / qk).ln();
    }
    Ok(total)
}

/// Relative entropy between the two-outcome distributions `[p, 1-p]` and
/// `[q, 1-q]`.
pub fn binary_relative_entropy(p: f64, q: f64) -> Result<f64> {
    let p = unit_interval("p", p)?;
    let q = unit_interval("q", q)?;
    relative_entropy_slices(&[p, 1.0 - p], &[q, 1.0 - q])
}

/// Classical Fano bound `H(P_s) + (1 - P_s) ln(n - 1)` on `H(X|Y)`.
pub fn classical_fano_bound(success: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange {
            name: "n",
            value: n as f64,
            range: "n >= 2",
        });
    }
    let ps = unit_interval("Ps", success)?;
    Ok(binary_entropy(ps)? + (1.0 - ps) * ((n - 1) as f64).ln())
}
