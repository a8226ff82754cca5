//! Hermitian basis of the Lie algebra u(N).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The `N²` generators of U(N): the identity followed by the generalized
/// Gell-Mann matrices (symmetric pairs, antisymmetric pairs, then diagonals).
///
/// All are Hermitian and mutually orthogonal under `tr(X_j X_k)`. The
/// Gell-Mann matrices have `tr(X²) = 2`; the identity has `tr = N`. For
/// `N = 2` this is `{1, σx, σy, σz}`.
pub fn generator_basis(n: usize) -> Result<Vec<DMatrix<Complex64>>> {
    if n < 1 {
        return Err(invalid("dim", "gauge group dimension must be at least 1"));
    }
    let mut basis = Vec::with_capacity(n * n);
    basis.push(DMatrix::identity(n, n));

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();
    for &(j, k) in &pairs {
        let mut s = DMatrix::from_element(n, n, ZERO);
        s[(j, k)] = Complex64::new(1.0, 0.0);
        s[(k, j)] = Complex64::new(1.0, 0.0);
        basis.push(s);
    }
    for &(j, k) in &pairs {
        let mut a = DMatrix::from_element(n, n, ZERO);
        a[(j, k)] = Complex64::new(0.0, -1.0);
        a[(k, j)] = Complex64::new(0.0, 1.0);
        basis.push(a);
    }
    for l in 1..n {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut d = DMatrix::from_element(n, n, ZERO);
        for j in 0..l {
            d[(j, j)] = Complex64::new(scale, 0.0);
        }
        d[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
        basis.push(d);
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
        (a * b).trace()
    }

    #[test]
    fn scalar_case() {
        let b = generator_basis(1).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0][(0, 0)], Complex64::new(1.0, 0.0));
        assert!(generator_basis(0).is_err());
    }

    #[test]
    fn two_by_two_is_identity_plus_paulis() {
        let b = generator_basis(2).unwrap();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let expected = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ];
        for (m, e) in b.iter().zip(expected) {
            let rows = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
            for (x, y) in rows.iter().zip(e) {
                assert!((x - y).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn hermitian_and_trace_orthogonal() {
        for n in 1..=5 {
            let b = generator_basis(n).unwrap();
            assert_eq!(b.len(), n * n);
            for (j, x) in b.iter().enumerate() {
                assert!((x - x.adjoint()).norm() < 1e-14);
                for (k, y) in b.iter().enumerate() {
                    let t = trace_product(x, y);
                    if j == k {
                        let expected = if j == 0 { n as f64 } else { 2.0 };
                        assert!((t.re - expected).abs() < 1e-13 && t.im.abs() < 1e-14);
                    } else {
                        assert!(t.norm() < 1e-14, "n={n} j={j} k={k}");
                    }
                }
            }
        }
    }
}
