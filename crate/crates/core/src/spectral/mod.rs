//! Hodge Laplacians and what can be read off them: spectra, the Hodge
//! decomposition of edge flows, Betti numbers and the dominant eigenvalue.

mod decompose;
mod eigen;
mod power;
mod rank;

use nalgebra::DMatrix;

use crate::boundary::{boundary_matrix_1, boundary_matrix_2};
use crate::complex::CellComplex;
use crate::error::{Error, Result};

pub use decompose::{hodge_decompose, HodgeDecomposer, HodgeParts};
pub use eigen::{eigendecompose, Spectrum, DEFAULT_ZERO_TOL};
pub use power::{lambda_max, lambda_max_with, PowerIteration};
pub use rank::{betti_numbers, betti_numbers_numerical, integer_rank};

/// `L_k = L_k^low + L_k^up` with both summands kept.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeLaplacian {
    pub k: usize,
    /// `B_kᵀ B_k`, zero for `k = 0`.
    pub lower: DMatrix<f64>,
    /// `B_{k+1} B_{k+1}ᵀ`, zero for `k = 2`.
    pub upper: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

/// Assembles `L_k` for `k ∈ {0, 1, 2}`. Entries are integers, so the
/// floating-point result is exact.
pub fn hodge_laplacian(complex: &CellComplex, k: usize) -> Result<HodgeLaplacian> {
    if k > 2 {
        return Err(Error::InvalidConfig(format!("Hodge Laplacian of dimension {k}; cells stop at 2")));
    }
    let n = complex.num_cells(k);
    let lower = match k {
        0 => DMatrix::zeros(n, n),
        1 => {
            let b = boundary_matrix_1(complex).to_dense();
            b.transpose() * b
        }
        _ => {
            let b = boundary_matrix_2(complex).to_dense();
            b.transpose() * b
        }
    };
    let upper = match k {
        0 => {
            let b = boundary_matrix_1(complex).to_dense();
            &b * b.transpose()
        }
        1 => {
            let b = boundary_matrix_2(complex).to_dense();
            &b * b.transpose()
        }
        _ => DMatrix::zeros(n, n),
    };
    let full = &lower + &upper;
    Ok(HodgeLaplacian { k, lower, upper, full })
}
