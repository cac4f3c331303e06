//! Dense symmetric eigensolvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Eigenpairs of a symmetric matrix sorted by ascending eigenvalue.
/// Column `i` of the returned matrix belongs to eigenvalue `i`.
pub fn symmetric_eigen_ascending(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;

/// Leading `k` eigenpairs of a symmetric positive semi-definite matrix by power
/// iteration with deflation. Eigenvalues come out in descending order.
pub fn power_eigenpairs(m: &DMatrix<f64>, k: usize, tol: f64) -> Vec<(f64, DVector<f64>)> {
    let n = m.nrows();
    let mut work = m.clone();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(n) {
        // fixed, non-degenerate start direction
        let seed = DVector::from_fn(n, |i, _| 1.0 + ((i as f64 + 1.0) * 0.754_877_666).fract());
        let mut v = &work * &seed;
        if v.norm() == 0.0 {
            v = seed;
        }
        v.normalize_mut();
        let mut lambda = 0.0;
        for _ in 0..POWER_MAX_ITER {
            let mut next = &work * &v;
            let norm = next.norm();
            if norm == 0.0 {
                lambda = 0.0;
                break;
            }
            next /= norm;
            let delta = (&next - &v).norm();
            v = next;
            lambda = v.dot(&(&work * &v));
            if delta < tol {
                break;
            }
        }
        work -= lambda * &v * v.transpose();
        out.push((lambda, v));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascending_eigenpairs_have_small_residuals() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0]);
        let (vals, vecs) = symmetric_eigen_ascending(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (i, &l) in vals.iter().enumerate() {
            let v = vecs.column(i);
            assert!((&m * v - l * v).norm() <= 1e-8 * m.norm());
        }
    }

    #[test]
    fn power_iteration_agrees_with_dense_solver() {
        let m = DMatrix::from_row_slice(3, 3, &[5.0, 2.0, 0.0, 2.0, 3.0, 1.0, 0.0, 1.0, 1.0]);
        let (vals, _) = symmetric_eigen_ascending(&m);
        let top = power_eigenpairs(&m, 2, POWER_TOL);
        assert!((top[0].0 - vals[2]).abs() < 1e-9);
        assert!((top[1].0 - vals[1]).abs() < 1e-9);
        assert!(top[0].1.dot(&top[1].1).abs() < 1e-6);
    }
}
