use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SVD};

use crate::boundary::{boundary_matrix_1, boundary_matrix_2, Cochain};
use crate::complex::CellComplex;
use crate::error::Result;

/// Gradient, curl and harmonic parts of an edge flow, with the potentials
/// that generate the first two.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    pub gradient: Cochain,
    pub curl: Cochain,
    pub harmonic: Cochain,
    /// φ with `gradient = B₁ᵀ φ`.
    pub node_potential: Cochain,
    /// η with `curl = B₂ η`.
    pub cell_potential: Cochain,
    /// `‖B₁ᵀφ − f‖` and `‖B₂η − f‖`.
    pub residuals: (f64, f64),
}

impl HodgeParts {
    /// CSV with header `edge_index,gradient,curl,harmonic`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("edge_index,gradient,curl,harmonic\n");
        let rows = self.gradient.values().iter().zip(self.curl.values()).zip(self.harmonic.values());
        for (i, ((g, c), h)) in rows.enumerate() {
            let _ = writeln!(out, "{i},{g},{c},{h}");
        }
        out
    }
}

/// Minimum-norm least squares through a thin SVD. Singular values below
/// `max(rows, cols) · ε · σ_max` are treated as zero.
#[derive(Clone, Debug)]
struct MinNormSolver {
    rows: usize,
    cols: usize,
    svd: Option<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl MinNormSolver {
    fn new(a: DMatrix<f64>) -> Self {
        let (rows, cols) = a.shape();
        let svd = (rows > 0 && cols > 0).then(|| SVD::new(a, true, true));
        MinNormSolver { rows, cols, svd }
    }

    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let Some(svd) = &self.svd else {
            return DVector::zeros(self.cols);
        };
        let (u, v_t) = (svd.u.as_ref().expect("u computed"), svd.v_t.as_ref().expect("v_t computed"));
        let smax = svd.singular_values.max();
        let cutoff = smax * self.rows.max(self.cols) as f64 * f64::EPSILON;
        let mut coeffs = u.transpose() * b;
        for (c, &s) in coeffs.iter_mut().zip(svd.singular_values.iter()) {
            *c = if s > cutoff { *c / s } else { 0.0 };
        }
        v_t.transpose() * coeffs
    }
}

/// Precomputed factorizations for decomposing many flows on one complex.
#[derive(Clone, Debug)]
pub struct HodgeDecomposer {
    coboundary: DMatrix<f64>,
    curl_map: DMatrix<f64>,
    gradient_solver: MinNormSolver,
    curl_solver: MinNormSolver,
}

impl HodgeDecomposer {
    pub fn new(complex: &CellComplex) -> Self {
        let coboundary = boundary_matrix_1(complex).to_dense().transpose();
        let curl_map = boundary_matrix_2(complex).to_dense();
        HodgeDecomposer {
            gradient_solver: MinNormSolver::new(coboundary.clone()),
            curl_solver: MinNormSolver::new(curl_map.clone()),
            coboundary,
            curl_map,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.coboundary.nrows()
    }

    pub fn decompose(&self, f: &Cochain) -> Result<HodgeParts> {
        let n1 = self.num_edges();
        if f.dim() != 1 {
            return Err(crate::error::Error::DimensionMismatch { expected: 1, got: f.dim() });
        }
        if f.len() != n1 {
            return Err(crate::error::Error::DimensionMismatch { expected: n1, got: f.len() });
        }
        let fv = f.to_vector();
        let phi = self.gradient_solver.solve(&fv);
        let eta = self.curl_solver.solve(&fv);
        let gradient = &self.coboundary * &phi;
        let curl = &self.curl_map * &eta;
        let harmonic = &fv - &gradient - &curl;
        let residuals = ((&gradient - &fv).norm(), (&curl - &fv).norm());
        Ok(HodgeParts {
            gradient: Cochain::from_vector(1, &gradient),
            curl: Cochain::from_vector(1, &curl),
            harmonic: Cochain::from_vector(1, &harmonic),
            node_potential: Cochain::from_vector(0, &phi),
            cell_potential: Cochain::from_vector(2, &eta),
            residuals,
        })
    }
}

/// Splits an edge flow into gradient (`Im B₁ᵀ`), curl (`Im B₂`) and harmonic
/// (`ker L₁`) parts using minimum-norm potentials.
pub fn hodge_decompose(complex: &CellComplex, f: &Cochain) -> Result<HodgeParts> {
    f.check_on(complex, 1)?;
    HodgeDecomposer::new(complex).decompose(f)
}
