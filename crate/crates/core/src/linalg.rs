//! Dense complex linear algebra for small square matrices.
//!
//! Matrices are stored row-major. Joint indices on a bipartite space `R ⊗ Q`
//! follow `k_R * d_Q + k_Q`, so the reference system is the slow index.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Off-diagonal magnitude below which the Jacobi iteration stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Sweep budget for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Entrywise slack accepted on Hermitian inputs before symmetrizing.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            for (j, z) in row.into_iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(z);
            }
        }
        Ok(Self { dim, data })
    }

    /// Real rows, convenience for tests and fixed operators.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let dim = columns.len();
        if let Some(bad) = columns.iter().find(|c| c.len() != dim) {
            return Err(Error::NotSquare {
                rows: bad.len(),
                cols: dim,
            });
        }
        Ok(Self::from_fn(dim, |i, j| columns[j][i]))
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        inner(v, &self.mat_vec(v))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M - M†`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dims");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference on mismatched dims");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product `a ⊗ b`; block `(i, j)` is `a[i, j] * b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    ComplexMatrix::from_fn(da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
}

fn check_bipartite(m: &ComplexMatrix, d_r: usize, d_q: usize) -> Result<()> {
    if d_r == 0 || d_q == 0 || m.dim != d_r * d_q {
        return Err(Error::DimensionMismatch {
            expected: d_r * d_q,
            found: m.dim,
        });
    }
    Ok(())
}

/// Traces out the reference (slow) factor of an `R ⊗ Q` operator.
pub fn partial_trace_r(m: &ComplexMatrix, d_r: usize, d_q: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_r, d_q)?;
    Ok(ComplexMatrix::from_fn(d_q, |i, j| {
        (0..d_r).map(|k| m[(k * d_q + i, k * d_q + j)]).sum()
    }))
}

/// Traces out the system (fast) factor of an `R ⊗ Q` operator.
pub fn partial_trace_q(m: &ComplexMatrix, d_r: usize, d_q: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, d_r, d_q)?;
    Ok(ComplexMatrix::from_fn(d_r, |i, j| {
        (0..d_q).map(|k| m[(i * d_q + k, j * d_q + k)]).sum()
    }))
}

/// Spectrum and eigenvectors of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl EigenDecomposition {
    /// `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut out = ComplexMatrix::zeros(n);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

fn max_off_diagonal(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input is accepted when it is Hermitian to within [`HERMITIAN_TOL`]
/// entrywise and is symmetrized before iterating.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_finite() {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let n = m.dim;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = JACOBI_TOL * scale.max(1.0);

    let mut sweeps = 0;
    loop {
        let off = max_off_diagonal(&a);
        if off < tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n).map(|k| (a[(k, k)].re, v.column(k))).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi step annihilating `a[p, q]`.
///
/// The rotation is `J = diag(1, conj(u)) · [[c, s], [-s, c]]` on the `(p, q)`
/// plane, where `u` is the phase of `a[p, q]`; `a ← J† a J`, `v ← v J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let u = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -u.conj() * s;
    let jqq = u.conj() * c;

    let n = a.dim;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

/// Orthonormalizes `columns` in place order with two passes of modified
/// Gram–Schmidt. Returns `None` if a column is numerically dependent.
pub fn gram_schmidt(columns: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(columns.len());
    for col in columns {
        let w = orthogonal_residual(col, &out);
        let nrm = norm(&w);
        if nrm < 1e-12 {
            return None;
        }
        out.push(w.into_iter().map(|z| z / nrm).collect());
    }
    Some(out)
}

fn orthogonal_residual(v: &[C64], basis: &[Vec<C64>]) -> Vec<C64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let proj = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
    }
    w
}

/// Extends the unit vector `v` to an orthonormal basis of `C^dim` whose
/// first element is `v` itself.
pub fn complete_orthonormal_basis(v: &[C64], dim: usize) -> Result<Vec<Vec<C64>>> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    let nrm = norm(v);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(nrm));
    }
    let mut basis = vec![v.to_vec()];
    for j in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = vec![ZERO; dim];
        e[j] = ONE;
        let w = orthogonal_residual(&e, &basis);
        let wn = norm(&w);
        if wn < 1e-8 {
            continue;
        }
        basis.push(w.into_iter().map(|z| z / wn).collect());
    }
    Ok(basis)
}

/// Largest entrywise deviation of the Gram matrix of `vectors` from identity.
pub fn orthonormality_residual(vectors: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(a, b) - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_projectors() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert_eq!(
            tensor_product(&p, &p),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0])
        );
    }

    #[test]
    fn kron_z_z() {
        assert_eq!(
            tensor_product(&pauli_z(), &pauli_z()),
            ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0])
        );
    }

    #[test]
    fn kron_block_layout() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let k = tensor_product(&a, &pauli_x());
        // block (0,1) is 2·X
        assert_eq!(k[(0, 3)], C64::new(2.0, 0.0));
        assert_eq!(k[(1, 2)], C64::new(2.0, 0.0));
        assert_eq!(k[(0, 2)], C64::new(0.0, 0.0));
        // block (1,0) is 3·X
        assert_eq!(k[(3, 0)], C64::new(3.0, 0.0));
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        let r = partial_trace_r(&m, 2, 2).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_purification() {
        let (l0, l1) = (0.3f64, 0.7f64);
        let mut psi = vec![ZERO; 4];
        psi[0] = C64::new(l0.sqrt(), 0.0);
        psi[3] = C64::new(l1.sqrt(), 0.0);
        let r = partial_trace_r(&ComplexMatrix::outer(&psi), 2, 2).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.3, 0.7])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(0.5, 0.5)],
            vec![C64::new(0.2, -1.0), C64::new(2.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_fn(3, |i, j| C64::new(i as f64 + 1.0, j as f64 - 1.0));
        let k = tensor_product(&a, &b);
        let expect_q = b.scale(a.trace());
        let expect_r = a.scale(b.trace());
        assert!(partial_trace_r(&k, 2, 3).unwrap().max_abs_diff(&expect_q) < 1e-12);
        assert!(partial_trace_q(&k, 2, 3).unwrap().max_abs_diff(&expect_r) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_split() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace_r(&m, 3, 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_of_paulis() {
        let z = hermitian_eig(&pauli_z()).unwrap();
        assert_eq!(z.eigenvalues, vec![1.0, -1.0]);
        let x = hermitian_eig(&pauli_x()).unwrap();
        assert!((x.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((x.eigenvalues[1] + 1.0).abs() < 1e-14);
        assert!(x.reconstruct().max_abs_diff(&pauli_x()) < 1e-14);
    }

    #[test]
    fn eig_of_complex_hermitian() {
        // Pauli Y has off-diagonal entries with a pure imaginary phase.
        let y = ComplexMatrix::from_rows(vec![
            vec![ZERO, C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), ZERO],
        ])
        .unwrap();
        let e = hermitian_eig(&y).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&y) < 1e-14);
        assert!(orthonormality_residual(&e.eigenvectors) < 1e-14);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_of_degenerate_matrix() {
        let m = ComplexMatrix::identity(3).scale_real(2.0);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![2.0; 3]);
        assert!(orthonormality_residual(&e.eigenvectors) < 1e-15);
    }

    #[test]
    fn basis_from_canonical_vector() {
        let mut e1 = vec![ZERO; 4];
        e1[0] = ONE;
        let b = complete_orthonormal_basis(&e1, 4).unwrap();
        for (k, v) in b.iter().enumerate() {
            for (i, z) in v.iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((z - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn basis_two_dim_complement() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = vec![C64::new(h, 0.0), C64::new(h, 0.0)];
        let b = complete_orthonormal_basis(&v, 2).unwrap();
        assert_eq!(b[0], v);
        // second vector is (e1 - e2)/√2 up to a phase
        let overlap = inner(&[C64::new(h, 0.0), C64::new(-h, 0.0)], &b[1]).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_keeps_first_vector_exactly() {
        let raw = [C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.7, -0.1)];
        let n = norm(&raw);
        let v: Vec<C64> = raw.iter().map(|z| z / n).collect();
        let b = complete_orthonormal_basis(&v, 3).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], v);
        assert!(orthonormality_residual(&b) < 1e-10);
    }

    #[test]
    fn basis_rejects_non_unit() {
        let v = vec![ONE, ONE];
        assert!(matches!(
            complete_orthonormal_basis(&v, 2),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn from_rows_rejects_ragged_and_nan() {
        assert!(ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE]]).is_err());
        assert!(matches!(
            ComplexMatrix::from_rows(vec![vec![C64::new(f64::NAN, 0.0)]]),
            Err(Error::NonFinite { .. })
        ));
    }
}
