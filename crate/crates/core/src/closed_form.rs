//! Closed-form fidelity and entropy exchange of the qubit depolarizing
//! channel acting on `ρ = U diag(λ, 1-λ) U†`. Both are independent of `U`.

use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::quantum::ProbabilityVector;

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            name,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `F = 1 + p (λ² - λ - 1/2)`.
pub fn depol_fidelity_closed(p: f64, lambda: f64) -> Result<f64> {
    check_unit("p", p)?;
    check_unit("lambda", lambda)?;
    Ok(1.0 + p * (lambda * lambda - lambda - 0.5))
}

/// `θ = √(p² + 12 p² λ(1-λ) + 4(1-p) - 16 p λ(1-λ))`, radicand clamped at 0
/// when it is negative by no more than 1e-12.
pub fn depol_theta(p: f64, lambda: f64) -> Result<f64> {
    check_unit("p", p)?;
    check_unit("lambda", lambda)?;
    let m = lambda * (1.0 - lambda);
    let radicand = p * p + 12.0 * p * p * m + 4.0 * (1.0 - p) - 16.0 * p * m;
    if radicand < -1e-12 {
        return Err(Error::ClosedFormMismatch(format!(
            "theta radicand {radicand}"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

/// Spectrum of the joint output state:
/// `[pλ/2, (1-λ)p/2, 1/2 - p/4 + θ/4, 1/2 - p/4 - θ/4]`.
pub fn depol_joint_spectrum(p: f64, lambda: f64) -> Result<ProbabilityVector> {
    let theta = depol_theta(p, lambda)?;
    let raw = vec![
        p * lambda / 2.0,
        (1.0 - lambda) * p / 2.0,
        0.5 - p / 4.0 + theta / 4.0,
        0.5 - p / 4.0 - theta / 4.0,
    ];
    if let Some(bad) = raw.iter().find(|&&x| x < -1e-9) {
        return Err(Error::ClosedFormMismatch(format!("negative weight {bad}")));
    }
    ProbabilityVector::renormalized(raw, 1e-9).map_err(|e| Error::ClosedFormMismatch(e.to_string()))
}

/// Shannon entropy of [`depol_joint_spectrum`].
pub fn depol_entropy_closed(p: f64, lambda: f64) -> Result<f64> {
    Ok(shannon_entropy(&depol_joint_spectrum(p, lambda)?))
}
