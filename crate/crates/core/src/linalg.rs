//! Small dense kernels shared by the certification sweeps.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Columns are dependent iff `sigma_min <= RANK_TOLERANCE * sigma_max`.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    a.singular_values().iter().copied().collect()
}

/// Full column rank under the relative singular-value threshold.
pub fn has_full_column_rank(a: &DMatrix<Complex64>) -> bool {
    if a.ncols() == 0 {
        return true;
    }
    if a.nrows() < a.ncols() {
        return false;
    }
    let sv = singular_values(a);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    min > RANK_TOLERANCE * max
}

/// Numerical rank under the same relative threshold.
pub fn rank(a: &DMatrix<Complex64>) -> usize {
    let sv = singular_values(a);
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > RANK_TOLERANCE * max).count()
}

/// Smallest and largest eigenvalue of a Hermitian matrix. Orders 1 and 2
/// use closed forms, larger orders the symmetric eigensolver.
pub fn extreme_eigenvalues(h: &DMatrix<Complex64>) -> (f64, f64) {
    match h.nrows() {
        0 => (f64::INFINITY, f64::NEG_INFINITY),
        1 => (h[(0, 0)].re, h[(0, 0)].re),
        2 => {
            let a = h[(0, 0)].re;
            let d = h[(1, 1)].re;
            let mid = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let r = (half * half + h[(0, 1)].norm_sqr()).sqrt();
            (mid - r, mid + r)
        }
        _ => {
            let eig = SymmetricEigen::new(h.clone());
            let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let max = eig
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            (min, max)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(m: usize, n: usize, v: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_row_iterator(m, n, v.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn rank_of_dependent_columns() {
        let a = real(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        assert!(!has_full_column_rank(&a));
        assert_eq!(rank(&a), 1);
        let b = real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(has_full_column_rank(&b));
    }

    #[test]
    fn zero_column_is_dependent() {
        let a = real(2, 1, &[0.0, 0.0]);
        assert!(!has_full_column_rank(&a));
    }

    #[test]
    fn wide_matrix_is_never_full_column_rank() {
        let a = real(1, 2, &[1.0, 0.0]);
        assert!(!has_full_column_rank(&a));
    }

    #[test]
    fn closed_form_matches_eigensolver() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.3, -0.4),
                Complex64::new(0.3, 0.4),
                Complex64::new(2.0, 0.0),
            ],
        );
        let (lo, hi) = extreme_eigenvalues(&h);
        let eig = SymmetricEigen::new(h);
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((lo - ev[0]).abs() < 1e-14);
        assert!((hi - ev[1]).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let h = real(3, 3, &[3.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]);
        let (lo, hi) = extreme_eigenvalues(&h);
        assert!((lo - 0.5).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
    }
}
