use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this count as zero. Laplacians assembled from ±1
/// matrices have well separated spectra at desk scale.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub zero_tol: f64,
}

impl Spectrum {
    /// Number of eigenvalues below `zero_tol`.
    pub fn kernel_dim(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l < self.zero_tol).count()
    }

    /// Orthonormal basis of the numerical kernel.
    pub fn kernel_basis(&self) -> DMatrix<f64> {
        let k = self.kernel_dim();
        self.eigenvectors.columns(0, k).into_owned()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&self.eigenvalues) * v.transpose()
    }

    /// CSV with header `index,eigenvalue`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            out.push_str(&format!("{i},{l}\n"));
        }
        out
    }
}

/// Dense symmetric eigendecomposition, sorted ascending.
pub fn eigendecompose(l: &DMatrix<f64>, zero_tol: f64) -> Result<Spectrum> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch { expected: l.nrows(), got: l.ncols() });
    }
    let scale = l.amax().max(1.0);
    let asym = (l - l.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let n = l.nrows();
    if n == 0 {
        return Ok(Spectrum { eigenvalues: DVector::zeros(0), eigenvectors: DMatrix::zeros(0, 0), zero_tol });
    }
    let eig = SymmetricEigen::new(l.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum { eigenvalues, eigenvectors, zero_tol })
}
