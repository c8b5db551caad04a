use crate::boundary::{boundary_matrix_1, boundary_matrix_2, SparseIntMatrix};
use crate::complex::CellComplex;
use crate::error::{Error, Result};

use super::{eigendecompose, hodge_laplacian};

/// Rank over ℚ by fraction-free (Bareiss) elimination in `i128`.
///
/// Every intermediate entry is a minor of the input; incidence matrices of
/// cell complexes keep these tiny, but overflow is still reported rather than
/// wrapped.
#[allow(clippy::needless_range_loop)] // row ops read two rows of `a` at once
pub fn integer_rank(matrix: &SparseIntMatrix) -> Result<usize> {
    let mut a: Vec<Vec<i128>> = matrix
        .to_dense_int()
        .into_iter()
        .map(|row| row.into_iter().map(i128::from).collect())
        .collect();
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot_row) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot_row);
        let pivot = a[rank][col];
        for r in rank + 1..rows {
            let factor = a[r][col];
            for c in col..cols {
                let lhs = pivot.checked_mul(a[r][c]).ok_or(Error::RankOverflow)?;
                let rhs = factor.checked_mul(a[rank][c]).ok_or(Error::RankOverflow)?;
                let num = lhs.checked_sub(rhs).ok_or(Error::RankOverflow)?;
                debug_assert_eq!(num % prev_pivot, 0);
                a[r][c] = num / prev_pivot;
            }
        }
        prev_pivot = pivot;
        rank += 1;
    }
    Ok(rank)
}

/// `(β₀, β₁, β₂)` from exact ranks: `β_k = N_k − rank B_k − rank B_{k+1}`.
pub fn betti_numbers(complex: &CellComplex) -> Result<(usize, usize, usize)> {
    let r1 = integer_rank(&boundary_matrix_1(complex))?;
    let r2 = integer_rank(&boundary_matrix_2(complex))?;
    let (n0, n1, n2) = complex.counts();
    Ok((n0 - r1, n1 - r1 - r2, n2 - r2))
}

/// `(dim ker L₀, dim ker L₁, dim ker L₂)` counted from eigenvalues below `zero_tol`.
pub fn betti_numbers_numerical(complex: &CellComplex, zero_tol: f64) -> Result<(usize, usize, usize)> {
    let mut dims = [0; 3];
    for (k, d) in dims.iter_mut().enumerate() {
        let l = hodge_laplacian(complex, k)?;
        *d = eigendecompose(&l.full, zero_tol)?.kernel_dim();
    }
    Ok((dims[0], dims[1], dims[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    #[test]
    fn fixture_betti_numbers() {
        assert_eq!(betti_numbers(&Fixture::TorusCc.build()).unwrap(), (1, 2, 1));
        assert_eq!(betti_numbers(&Fixture::FilledSquare.build()).unwrap(), (1, 0, 0));
        assert_eq!(betti_numbers(&Fixture::C4.build()).unwrap(), (1, 1, 0));
        assert_eq!(betti_numbers(&Fixture::SiouxFalls.build()).unwrap(), (1, 0, 0));
    }

    #[test]
    fn square_b1_rank() {
        assert_eq!(integer_rank(&boundary_matrix_1(&Fixture::FilledSquare.build())).unwrap(), 3);
    }

    #[test]
    fn numerical_agrees_on_torus() {
        assert_eq!(betti_numbers_numerical(&Fixture::TorusCc.build(), 1e-9).unwrap(), (1, 2, 1));
    }
}
