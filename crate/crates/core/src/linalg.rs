//! Thin wrappers around the dense Hermitian eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigenvalues (real) and matching eigenvector columns of a Hermitian
/// matrix, sorted by descending eigenvalue.
pub fn eigh_desc(matrix: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let decomp = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..decomp.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        decomp.eigenvalues[b]
            .partial_cmp(&decomp.eigenvalues[a])
            .expect("Hermitian eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(matrix.nrows(), matrix.ncols());
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &decomp.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn eigvalsh(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let decomp = SymmetricEigen::new(matrix.clone());
    let mut values: Vec<f64> = decomp.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    values
}

/// Real trace of a (nominally Hermitian) matrix.
pub fn trace_re(matrix: &DMatrix<Complex64>) -> f64 {
    matrix.diagonal().iter().map(|z| z.re).sum()
}

/// Tr(A·B) without forming the product.
pub fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let mut sum = Complex64::default();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            sum += a[(i, j)] * b[(j, i)];
        }
    }
    sum
}

/// Largest eigenpair residual ‖Av − λv‖ over ‖A‖ (operator norm taken as
/// max |λ|). Used to audit the solver against its accuracy target.
pub fn eigh_residual(matrix: &DMatrix<Complex64>) -> f64 {
    let (values, vectors) = eigh_desc(matrix);
    let scale = values
        .iter()
        .map(|v| v.abs())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst = 0.0_f64;
    for (i, &lambda) in values.iter().enumerate() {
        let v = vectors.column(i);
        let residual = (matrix * v - v * Complex64::new(lambda, 0.0)).norm();
        worst = worst.max(residual);
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian_fixture(n: usize) -> DMatrix<Complex64> {
        let raw = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(
                ((i * 7 + j * 3) % 11) as f64 / 11.0,
                ((i * 5 + j * 2) % 7) as f64 / 7.0 - 0.5,
            )
        });
        &raw * raw.adjoint()
    }

    #[test]
    fn eigenvalues_sorted_descending_and_real_for_psd() {
        let m = hermitian_fixture(8);
        let values = eigvalsh(&m);
        assert!(values.windows(2).all(|w| w[0] >= w[1]));
        assert!(values.iter().all(|&v| v > -1e-10));
    }

    #[test]
    fn reconstruction_from_eigenpairs() {
        let m = hermitian_fixture(6);
        let (values, vectors) = eigh_desc(&m);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            6,
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        let rebuilt = &vectors * diag * vectors.adjoint();
        assert!((&m - rebuilt).norm() < 1e-10 * m.norm());
    }

    #[test]
    fn residual_meets_accuracy_target() {
        for n in [1, 2, 5, 12, 40] {
            let m = hermitian_fixture(n);
            assert!(
                eigh_residual(&m) <= crate::tolerances::EIGEN_RESIDUAL,
                "residual too large at n = {n}"
            );
        }
    }

    #[test]
    fn trace_product_matches_full_product() {
        let a = hermitian_fixture(5);
        let b = hermitian_fixture(5) + DMatrix::identity(5, 5);
        let direct = (&a * &b).diagonal().iter().sum::<Complex64>();
        assert!((trace_product(&a, &b) - direct).norm() < 1e-12);
    }
}
