//! Polynomial filters over a shift operator on edge flows.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::boundary::Cochain;
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::spectral::{hodge_laplacian, lambda_max_with, PowerIteration};

/// Choice of shift operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShiftOperatorKind {
    /// `L₁` with every 2-cell.
    CellularL1,
    /// `L₁` keeping only 2-cells bounded by exactly three edges.
    SimplicialL1,
    /// `B₁ᵀ B₁`.
    EdgeLaplacian,
    /// `D − A` of the simple line graph of the 1-skeleton.
    LineGraphLaplacian,
    LowerL1,
    UpperL1,
    L0,
    L2,
}

impl ShiftOperatorKind {
    pub const ALL: [ShiftOperatorKind; 8] = [
        ShiftOperatorKind::CellularL1,
        ShiftOperatorKind::SimplicialL1,
        ShiftOperatorKind::EdgeLaplacian,
        ShiftOperatorKind::LineGraphLaplacian,
        ShiftOperatorKind::LowerL1,
        ShiftOperatorKind::UpperL1,
        ShiftOperatorKind::L0,
        ShiftOperatorKind::L2,
    ];

    /// The four edge operators compared in the denoising benchmark.
    pub const BENCHMARK: [ShiftOperatorKind; 4] = [
        ShiftOperatorKind::CellularL1,
        ShiftOperatorKind::SimplicialL1,
        ShiftOperatorKind::EdgeLaplacian,
        ShiftOperatorKind::LineGraphLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShiftOperatorKind::CellularL1 => "cellular",
            ShiftOperatorKind::SimplicialL1 => "simplicial",
            ShiftOperatorKind::EdgeLaplacian => "edge",
            ShiftOperatorKind::LineGraphLaplacian => "linegraph",
            ShiftOperatorKind::LowerL1 => "lower",
            ShiftOperatorKind::UpperL1 => "upper",
            ShiftOperatorKind::L0 => "l0",
            ShiftOperatorKind::L2 => "l2",
        }
    }

    /// Dimension of the cells the operator acts on.
    pub fn cell_dim(self) -> usize {
        match self {
            ShiftOperatorKind::L0 => 0,
            ShiftOperatorKind::L2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ShiftOperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShiftOperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShiftOperatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown operator `{s}`")))
    }
}

pub fn build_shift_operator(complex: &CellComplex, kind: ShiftOperatorKind) -> Result<DMatrix<f64>> {
    use ShiftOperatorKind::*;
    Ok(match kind {
        CellularL1 => hodge_laplacian(complex, 1)?.full,
        SimplicialL1 => {
            let triangles = complex.retain_two_cells(|c| c.len() == 3);
            hodge_laplacian(&triangles, 1)?.full
        }
        EdgeLaplacian | LowerL1 => hodge_laplacian(complex, 1)?.lower,
        UpperL1 => hodge_laplacian(complex, 1)?.upper,
        LineGraphLaplacian => line_graph_laplacian(complex),
        L0 => hodge_laplacian(complex, 0)?.full,
        L2 => {
            if complex.num_two_cells() == 0 {
                return Err(Error::IncompatibleKind {
                    kind: kind.to_string(),
                    reason: "complex has no 2-cells".into(),
                });
            }
            hodge_laplacian(complex, 2)?.full
        }
    })
}

/// `D − A` of the line graph: edges are adjacent when they share an
/// endpoint. Orientation plays no part, and parallel edges count once.
pub fn line_graph_laplacian(complex: &CellComplex) -> DMatrix<f64> {
    let n = complex.num_edges();
    let mut l = DMatrix::zeros(n, n);
    for edges in complex.incidence() {
        for (i, a) in edges.iter().enumerate() {
            for b in &edges[i + 1..] {
                l[(a.0, b.0)] = -1.0;
                l[(b.0, a.0)] = -1.0;
            }
        }
    }
    for i in 0..n {
        let degree: f64 = -(0..n).filter(|&j| j != i).map(|j| l[(i, j)]).sum::<f64>();
        l[(i, i)] = degree;
    }
    l
}

/// `H(S) = Σ h_ℓ S^ℓ`. The coefficient count fixes the order.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyFilter {
    coeffs: Vec<f64>,
}

impl PolyFilter {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidConfig("polynomial filter needs at least one coefficient".into()));
        }
        Ok(PolyFilter { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Scalar response `H(λ)` (Horner).
    pub fn response(&self, lambda: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &h| acc * lambda + h)
    }

    /// `H(S) f` by Horner's rule; `S^ℓ` is never formed.
    pub fn apply_vec(&self, shift: &DMatrix<f64>, f: &DVector<f64>) -> DVector<f64> {
        let mut coeffs = self.coeffs.iter().rev();
        let top = *coeffs.next().expect("nonempty");
        let mut y = f * top;
        for &h in coeffs {
            y = shift * y;
            y.axpy(h, f, 1.0);
        }
        y
    }
}

pub fn apply_poly_filter(filter: &PolyFilter, shift: &DMatrix<f64>, f: &Cochain) -> Result<Cochain> {
    check_shape(shift, f)?;
    Ok(Cochain::from_vector(f.dim(), &filter.apply_vec(shift, &f.to_vector())))
}

/// Pointwise `H(λ)`.
pub fn frequency_response(filter: &PolyFilter, lambdas: &[f64]) -> Vec<f64> {
    lambdas.iter().map(|&l| filter.response(l)).collect()
}

/// CSV with header `lambda,response`.
pub fn frequency_response_csv(filter: &PolyFilter, lambdas: &[f64]) -> String {
    let mut out = String::from("lambda,response\n");
    for (l, r) in lambdas.iter().zip(frequency_response(filter, lambdas)) {
        out.push_str(&format!("{l},{r}\n"));
    }
    out
}

/// The low-pass denoiser `f ↦ (I − S/λ_max)^order f`.
#[derive(Clone, Debug)]
pub struct LowpassDenoiser {
    shift: DMatrix<f64>,
    lambda_max: f64,
    order: usize,
}

impl LowpassDenoiser {
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shift(&self) -> &DMatrix<f64> {
        &self.shift
    }

    /// `H(λ) = (1 − λ/λ_max)^order`.
    pub fn response(&self, lambda: f64) -> f64 {
        (1.0 - lambda / self.lambda_max).powi(self.order as i32)
    }

    /// Expanded monomial coefficients `C(order, ℓ) (−1/λ_max)^ℓ`.
    pub fn to_poly_filter(&self) -> PolyFilter {
        let mut coeffs = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for l in 0..=self.order {
            coeffs.push(binom * (-1.0 / self.lambda_max).powi(l as i32));
            binom = binom * (self.order - l) as f64 / (l + 1) as f64;
        }
        PolyFilter { coeffs }
    }

    pub fn apply_vec(&self, f: &DVector<f64>) -> DVector<f64> {
        let mut y = f.clone();
        let scale = -1.0 / self.lambda_max;
        for _ in 0..self.order {
            let sy = &self.shift * &y;
            y.axpy(scale, &sy, 1.0);
        }
        y
    }

    pub fn apply(&self, f: &Cochain) -> Result<Cochain> {
        check_shape(&self.shift, f)?;
        Ok(Cochain::from_vector(f.dim(), &self.apply_vec(&f.to_vector())))
    }
}

pub fn lowpass_denoiser(shift: &DMatrix<f64>, order: usize, seed: u64) -> Result<LowpassDenoiser> {
    lowpass_denoiser_with(shift, order, PowerIteration { seed, ..PowerIteration::default() })
}

pub fn lowpass_denoiser_with(shift: &DMatrix<f64>, order: usize, power: PowerIteration) -> Result<LowpassDenoiser> {
    if shift.amax() == 0.0 {
        return Err(Error::InvalidConfig("low-pass denoiser needs a nonzero shift operator".into()));
    }
    let lambda_max = lambda_max_with(shift, power)?;
    Ok(LowpassDenoiser { shift: shift.clone(), lambda_max, order })
}

fn check_shape(shift: &DMatrix<f64>, f: &Cochain) -> Result<()> {
    if !shift.is_square() {
        return Err(Error::DimensionMismatch { expected: shift.nrows(), got: shift.ncols() });
    }
    if shift.nrows() != f.len() {
        return Err(Error::DimensionMismatch { expected: shift.nrows(), got: f.len() });
    }
    Ok(())
}
