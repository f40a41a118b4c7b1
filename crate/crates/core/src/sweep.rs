//! Depolarizing-channel sweep: exact entropy exchange, QFI and the
//! γ-optimized bound as functions of the depolarizing strength `p`.
//!
//! Grid point `i` draws its basis rotation from stream `i` of the seed, so the
//! output does not depend on evaluation order.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::bounds::{entanglement_fidelity, entropy_exchange, qfi_bound, BOUND_SLACK};
use crate::closed_form::{depol_entropy_closed, depol_fidelity_closed};
use crate::error::{Error, Result};
use crate::optimize::golden_section_gamma1;
use crate::quantum::{
    depolarizing_channel, extend_to_joint, purify_in_basis, sample_unitary, stream_rng,
    ProbabilityVector,
};

/// Closed forms and simulation must agree to this tolerance on every row.
pub const CLOSED_FORM_TOL: f64 = 1e-8;

pub const CSV_HEADER: [&str; 6] = [
    "p",
    "fidelity",
    "entropy_exchange",
    "qfi",
    "ineq4_opt",
    "gamma1_star",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub fidelity: f64,
    pub entropy_exchange: f64,
    pub qfi: f64,
    pub optimized_bound: f64,
    pub gamma1_star: f64,
}

impl SweepRow {
    fn values(&self) -> [f64; 6] {
        [
            self.p,
            self.fidelity,
            self.entropy_exchange,
            self.qfi,
            self.optimized_bound,
            self.gamma1_star,
        ]
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub lambda: f64,
    pub p_steps: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            p_steps: 101,
            seed: 42,
            tol: 1e-10,
        }
    }
}

/// One grid point: simulate, cross-check against the closed forms, optimize.
pub fn sweep_point(lambda: f64, p: f64, seed: u64, stream: u64, tol: f64) -> Result<SweepRow> {
    let weights = ProbabilityVector::new(vec![lambda, 1.0 - lambda])?;
    let channel = depolarizing_channel(p)?;
    let u = sample_unitary(&mut stream_rng(seed, stream), 2);
    let psi = purify_in_basis(&weights, &u)?;
    let joint = extend_to_joint(&channel, &psi)?;
    let fidelity = entanglement_fidelity(&psi, &joint)?;
    let entropy = entropy_exchange(&joint)?;

    let f_closed = depol_fidelity_closed(p, lambda)?;
    let s_closed = depol_entropy_closed(p, lambda)?;
    if (fidelity - f_closed).abs() > CLOSED_FORM_TOL || (entropy - s_closed).abs() > CLOSED_FORM_TOL
    {
        return Err(Error::ClosedFormMismatch(format!(
            "p = {p}: F = {fidelity} vs {f_closed}, S = {entropy} vs {s_closed}"
        )));
    }

    let opt = golden_section_gamma1(&weights, fidelity, tol)?;
    let row = SweepRow {
        p,
        fidelity,
        entropy_exchange: entropy,
        qfi: qfi_bound(fidelity, 2)?,
        optimized_bound: opt.bound_star,
        gamma1_star: opt.gamma_star[0],
    };
    if row.entropy_exchange > row.optimized_bound + BOUND_SLACK
        || row.optimized_bound > row.qfi + BOUND_SLACK
    {
        return Err(Error::Invariant(format!(
            "p = {p}: expected S <= optimized <= qfi, got {} / {} / {}",
            row.entropy_exchange, row.optimized_bound, row.qfi
        )));
    }
    Ok(row)
}

/// Evaluates a uniform grid of `p_steps` points on `[0, 1]` in parallel and
/// returns the rows ordered by `p`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.p_steps < 2 {
        return Err(Error::OutOfRange {
            name: "p_steps",
            value: config.p_steps as f64,
            range: ">= 2",
        });
    }
    if !(0.0..=1.0).contains(&config.lambda) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: config.lambda,
            range: "[0, 1]",
        });
    }
    let last = (config.p_steps - 1) as f64;
    (0..config.p_steps)
        .into_par_iter()
        .map(|i| {
            sweep_point(
                config.lambda,
                i as f64 / last,
                config.seed,
                i as u64,
                config.tol,
            )
        })
        .collect()
}

/// Seventeen significant digits; parses back to the identical `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.values().map(format_float))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Invariant(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let mut v = [0.0; 6];
        for (k, field) in record.iter().enumerate().take(6) {
            v[k] = field.parse().map_err(|_| {
                Error::Invariant(format!(
                    "row {line}, column {}: bad number {field:?}",
                    CSV_HEADER[k]
                ))
            })?;
        }
        rows.push(SweepRow {
            p: v[0],
            fidelity: v[1],
            entropy_exchange: v[2],
            qfi: v[3],
            optimized_bound: v[4],
            gamma1_star: v[5],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_is_noiseless() {
        let rows = run_sweep(&SweepConfig {
            p_steps: 3,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(rows.len(), 3);
        let r0 = rows[0];
        assert_eq!(r0.p, 0.0);
        assert!((r0.fidelity - 1.0).abs() < 1e-12);
        assert!(r0.entropy_exchange.abs() < 1e-9);
        assert!(r0.qfi.abs() < 1e-9 && r0.optimized_bound.abs() < 1e-9);
        assert_eq!(rows[1].p, 0.5);
        assert_eq!(rows[2].p, 1.0);
    }

    #[test]
    fn rejects_degenerate_grid() {
        let cfg = SweepConfig {
            p_steps: 1,
            ..Default::default()
        };
        assert!(run_sweep(&cfg).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rows = run_sweep(&SweepConfig {
            p_steps: 7,
            ..Default::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows, back);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("p,fidelity,entropy_exchange,qfi,ineq4_opt,gamma1_star\n"));
    }
}
