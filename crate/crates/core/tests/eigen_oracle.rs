//! The Jacobi eigensolver against an independent oracle: roots of the
//! characteristic polynomial `det(H - tI)`, located by sign changes and
//! bisection, with the determinant from a partially pivoted complex LU.

use fano_core::linalg::{hermitian_eig, ComplexMatrix, C64};
use fano_core::quantum::stream_rng;
use rand::Rng;

fn det(m: &ComplexMatrix) -> C64 {
    let n = m.dim();
    let mut a: Vec<Vec<C64>> = (0..n)
        .map(|r| (0..n).map(|c| m[(r, c)]).collect())
        .collect();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&x, &y| a[x][k].norm().total_cmp(&a[y][k].norm()))
            .unwrap();
        if a[pivot][k].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let factor = a[r][k] / a[k][k];
            let (upper, lower) = a.split_at_mut(r);
            for (dst, src) in lower[0][k..].iter_mut().zip(&upper[k][k..]) {
                *dst -= factor * src;
            }
        }
    }
    det
}

/// `det(H - tI)` is real for Hermitian `H`.
fn char_poly(h: &ComplexMatrix, t: f64) -> f64 {
    let shifted = h - &ComplexMatrix::identity(h.dim()).scale_real(t);
    det(&shifted).re
}

fn oracle_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let radius: f64 = (0..h.dim())
        .map(|r| (0..h.dim()).map(|c| h[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let grid = 20_000;
    let step = 2.0 * radius / grid as f64;
    let mut roots = Vec::new();
    let mut lo = -radius;
    let mut f_lo = char_poly(h, lo);
    for i in 1..=grid {
        let hi = -radius + i as f64 * step;
        let f_hi = char_poly(h, hi);
        if f_lo == 0.0 {
            roots.push(lo);
        } else if f_lo.signum() != f_hi.signum() && f_hi != 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = char_poly(h, mid);
                if fm == 0.0 || b - a < 1e-15 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

fn random_hermitian(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = stream_rng(seed, n as u64);
    let g = ComplexMatrix::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    g.hermitian_part()
}

#[test]
fn eigenvalues_match_characteristic_polynomial_roots() {
    for seed in 0..20 {
        for n in [2, 3, 4, 6] {
            let h = random_hermitian(seed, n);
            let oracle = oracle_eigenvalues(&h);
            let eig = hermitian_eig(&h).unwrap();
            assert_eq!(
                oracle.len(),
                n,
                "seed {seed}, n {n}: oracle found {oracle:?}"
            );
            for (a, b) in eig.eigenvalues.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9, "seed {seed}, n {n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn eigenvectors_satisfy_eigen_equation() {
    for seed in 0..20 {
        let h = random_hermitian(seed, 5);
        let eig = hermitian_eig(&h).unwrap();
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let hv = h.mat_vec(v);
            let residual = hv
                .iter()
                .zip(v)
                .map(|(a, b)| (a - b * lambda).norm())
                .fold(0.0, f64::max);
            assert!(residual < 1e-10, "seed {seed}: residual {residual}");
        }
    }
}

#[test]
fn known_pauli_spectrum() {
    // σ_y has eigenvalues ±1.
    let y = ComplexMatrix::from_rows(vec![
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
    .unwrap();
    let eig = hermitian_eig(&y).unwrap();
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
    assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-14);
}
