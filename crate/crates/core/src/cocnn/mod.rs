//! Convolutional layers on cochains.
//!
//! Three layer shapes are provided, all of the form `σ(Σ_t A_t X_t W_t)`:
//!
//! * [`ConvLayer`] with [`Shift::Polynomial`]: `σ(H s W)` where `H` is a
//!   polynomial in a Hodge Laplacian or another incidence-derived matrix.
//! * [`ConvLayer`] with [`Shift::Split`]: `σ(L^low s W₀ + s W₁ + L^up s W₂)`,
//!   weighting the gradient and curl parts separately.
//! * [`InterDimLayer`]: a split or polynomial base on dimension `j` plus
//!   couplings `G_i s_i W̃_i` from neighbouring dimensions through
//!   (co)boundary matrices.
//!
//! Backward passes are analytic; [`gradcheck`] compares them with central
//! finite differences.

mod gradcheck;

use nalgebra::DMatrix;
use rand::Rng;

use crate::boundary::boundary_matrix;
use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::spectral::hodge_laplacian;

pub use gradcheck::{gradcheck, gradcheck_layer, random_instance, GradcheckInstance, LayerKind, FD_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Nonlinearity {
    Identity,
    Relu,
    Tanh,
}

impl Nonlinearity {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => x,
            Nonlinearity::Relu => x.max(0.0),
            Nonlinearity::Tanh => x.tanh(),
        }
    }

    /// Derivative at the pre-activation `x`. ReLU uses 0 at the kink.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Nonlinearity::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
        }
    }

    /// Odd nonlinearities commute with sign flips, which is what orientation
    /// equivariance needs.
    pub fn is_odd(self) -> bool {
        !matches!(self, Nonlinearity::Relu)
    }
}

impl std::str::FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Nonlinearity::Identity),
            "relu" => Ok(Nonlinearity::Relu),
            "tanh" => Ok(Nonlinearity::Tanh),
            _ => Err(Error::Parse(format!("unknown nonlinearity `{s}`"))),
        }
    }
}

/// Features on the `dim`-cells: one row per cell, one column per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    pub dim: usize,
    pub values: DMatrix<f64>,
}

impl Feature {
    pub fn new(dim: usize, values: DMatrix<f64>) -> Self {
        Feature { dim, values }
    }

    pub fn channels(&self) -> usize {
        self.values.ncols()
    }
}

/// Operator part of a [`ConvLayer`].
#[derive(Clone, Debug, PartialEq)]
pub enum Shift {
    /// A single `N_k × N_k` matrix `H`; one weight.
    Polynomial(DMatrix<f64>),
    /// `(L^low, L^up)`; three weights for the lower, identity and upper terms.
    Split { lower: DMatrix<f64>, upper: DMatrix<f64> },
}

impl Shift {
    /// `L^low` and `L^up` of dimension `k`.
    pub fn split_from(complex: &CellComplex, k: usize) -> Result<Shift> {
        let l = hodge_laplacian(complex, k)?;
        Ok(Shift::Split { lower: l.lower, upper: l.upper })
    }

    /// `Σ h_ℓ L_k^ℓ` as a dense matrix.
    pub fn polynomial_from(complex: &CellComplex, k: usize, coeffs: &[f64]) -> Result<Shift> {
        let l = hodge_laplacian(complex, k)?.full;
        let n = l.nrows();
        let mut h = DMatrix::zeros(n, n);
        for &c in coeffs.iter().rev() {
            h = &h * &l + DMatrix::identity(n, n) * c;
        }
        Ok(Shift::Polynomial(h))
    }

    fn size(&self) -> usize {
        match self {
            Shift::Polynomial(h) => h.nrows(),
            Shift::Split { lower, .. } => lower.nrows(),
        }
    }

    fn num_weights(&self) -> usize {
        match self {
            Shift::Polynomial(_) => 1,
            Shift::Split { .. } => 3,
        }
    }

    /// Operators per weight; `None` is the identity.
    fn operators(&self) -> Vec<Option<&DMatrix<f64>>> {
        match self {
            Shift::Polynomial(h) => vec![Some(h)],
            Shift::Split { lower, upper } => vec![Some(lower), None, Some(upper)],
        }
    }
}

/// Per-weight and per-input gradients of a scalar loss.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<DMatrix<f64>>,
    pub inputs: Vec<DMatrix<f64>>,
}

/// Common interface used by [`gradcheck_layer`] and for stacking.
pub trait Layer {
    /// Number of feature inputs the layer consumes.
    fn num_inputs(&self) -> usize;
    fn weights(&self) -> &[DMatrix<f64>];
    fn weights_mut(&mut self) -> &mut [DMatrix<f64>];
    fn nonlinearity(&self) -> Nonlinearity;
    fn preactivation(&self, inputs: &[&DMatrix<f64>]) -> Result<DMatrix<f64>>;
    fn backward_terms(&self, inputs: &[&DMatrix<f64>], grad_pre: &DMatrix<f64>) -> Result<Gradients>;

    fn forward(&self, inputs: &[&DMatrix<f64>]) -> Result<DMatrix<f64>> {
        let nl = self.nonlinearity();
        Ok(self.preactivation(inputs)?.map(|x| nl.apply(x)))
    }

    /// Gradients given `∂loss/∂output`.
    fn backward(&self, inputs: &[&DMatrix<f64>], upstream: &DMatrix<f64>) -> Result<Gradients> {
        let z = self.preactivation(inputs)?;
        if z.shape() != upstream.shape() {
            return Err(Error::ShapeMismatch(format!(
                "upstream gradient is {:?}, layer output is {:?}",
                upstream.shape(),
                z.shape()
            )));
        }
        let nl = self.nonlinearity();
        let grad_pre = z.zip_map(upstream, |x, g| nl.derivative(x) * g);
        self.backward_terms(inputs, &grad_pre)
    }
}

/// One term `A X W` of a pre-activation; `op = None` means `A = I`.
struct Term<'a> {
    op: Option<&'a DMatrix<f64>>,
    input: usize,
    weight: usize,
}

fn apply_op(op: Option<&DMatrix<f64>>, x: &DMatrix<f64>) -> DMatrix<f64> {
    match op {
        Some(a) => a * x,
        None => x.clone(),
    }
}

fn check_term(term: &Term, inputs: &[&DMatrix<f64>], weights: &[DMatrix<f64>], rows: usize) -> Result<()> {
    let x = inputs[term.input];
    let w = &weights[term.weight];
    let (op_rows, op_cols) = term.op.map(|a| a.shape()).unwrap_or((x.nrows(), x.nrows()));
    if op_rows != rows || op_cols != x.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "operator {op_rows}x{op_cols} cannot map input {} with {} rows into {rows} rows",
            term.input,
            x.nrows()
        )));
    }
    if x.ncols() != w.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "input {} has {} channels but weight {} expects {}",
            term.input,
            x.ncols(),
            term.weight,
            w.nrows()
        )));
    }
    Ok(())
}

fn terms_forward(terms: &[Term], inputs: &[&DMatrix<f64>], weights: &[DMatrix<f64>], rows: usize) -> Result<DMatrix<f64>> {
    let f_out = weights[0].ncols();
    let mut z = DMatrix::zeros(rows, f_out);
    for t in terms {
        check_term(t, inputs, weights, rows)?;
        z += apply_op(t.op, inputs[t.input]) * &weights[t.weight];
    }
    Ok(z)
}

fn terms_backward(terms: &[Term], inputs: &[&DMatrix<f64>], weights: &[DMatrix<f64>], grad_pre: &DMatrix<f64>) -> Gradients {
    let mut gw: Vec<DMatrix<f64>> = weights.iter().map(|w| DMatrix::zeros(w.nrows(), w.ncols())).collect();
    let mut gx: Vec<DMatrix<f64>> = inputs.iter().map(|x| DMatrix::zeros(x.nrows(), x.ncols())).collect();
    for t in terms {
        let ax = apply_op(t.op, inputs[t.input]);
        gw[t.weight] += ax.transpose() * grad_pre;
        let back = grad_pre * weights[t.weight].transpose();
        gx[t.input] += match t.op {
            Some(a) => a.transpose() * back,
            None => back,
        };
    }
    Gradients { weights: gw, inputs: gx }
}

fn check_weights(weights: &[DMatrix<f64>], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::ShapeMismatch(format!("expected {expected} weight matrices, got {}", weights.len())));
    }
    let shape = weights[0].shape();
    if let Some(w) = weights.iter().find(|w| w.shape() != shape) {
        return Err(Error::ShapeMismatch(format!("weight shapes differ: {:?} vs {:?}", shape, w.shape())));
    }
    Ok(())
}

/// A single-dimension convolution layer.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvLayer {
    pub dim: usize,
    pub shift: Shift,
    weights: Vec<DMatrix<f64>>,
    pub nonlinearity: Nonlinearity,
}

impl ConvLayer {
    pub fn new(dim: usize, shift: Shift, weights: Vec<DMatrix<f64>>, nonlinearity: Nonlinearity) -> Result<Self> {
        check_weights(&weights, shift.num_weights())?;
        if let Shift::Split { lower, upper } = &shift {
            if lower.shape() != upper.shape() {
                return Err(Error::ShapeMismatch("lower and upper Laplacians differ in shape".into()));
            }
        }
        Ok(ConvLayer { dim, shift, weights, nonlinearity })
    }

    /// Layer with weights drawn uniformly from `±√(6 / (F_in + F_out))`.
    pub fn init<R: Rng + ?Sized>(
        dim: usize,
        shift: Shift,
        f_in: usize,
        f_out: usize,
        nonlinearity: Nonlinearity,
        rng: &mut R,
    ) -> Self {
        let weights = (0..shift.num_weights()).map(|_| init_weight(f_in, f_out, rng)).collect();
        ConvLayer { dim, shift, weights, nonlinearity }
    }

    pub fn f_in(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn f_out(&self) -> usize {
        self.weights[0].ncols()
    }

    fn terms(&self) -> Vec<Term<'_>> {
        self.shift
            .operators()
            .into_iter()
            .enumerate()
            .map(|(i, op)| Term { op, input: 0, weight: i })
            .collect()
    }
}

impl Layer for ConvLayer {
    fn num_inputs(&self) -> usize {
        1
    }

    fn weights(&self) -> &[DMatrix<f64>] {
        &self.weights
    }

    fn weights_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.weights
    }

    fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    fn preactivation(&self, inputs: &[&DMatrix<f64>]) -> Result<DMatrix<f64>> {
        check_input_count(inputs, 1)?;
        terms_forward(&self.terms(), inputs, &self.weights, self.shift.size())
    }

    fn backward_terms(&self, inputs: &[&DMatrix<f64>], grad_pre: &DMatrix<f64>) -> Result<Gradients> {
        check_input_count(inputs, 1)?;
        Ok(terms_backward(&self.terms(), inputs, &self.weights, grad_pre))
    }
}

/// Which (co)boundary matrix couples another dimension into the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMap {
    /// `B_k`, mapping `k`-cochains to `(k−1)`-cochains.
    Boundary(usize),
    /// `B_kᵀ`, mapping `(k−1)`-cochains to `k`-cochains.
    Coboundary(usize),
}

impl CouplingMap {
    pub fn source_dim(self) -> usize {
        match self {
            CouplingMap::Boundary(k) => k,
            CouplingMap::Coboundary(k) => k - 1,
        }
    }

    pub fn target_dim(self) -> usize {
        match self {
            CouplingMap::Boundary(k) => k - 1,
            CouplingMap::Coboundary(k) => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub map: CouplingMap,
    pub operator: DMatrix<f64>,
    pub weight: DMatrix<f64>,
}

impl Coupling {
    pub fn new(complex: &CellComplex, map: CouplingMap, weight: DMatrix<f64>) -> Result<Self> {
        let k = match map {
            CouplingMap::Boundary(k) | CouplingMap::Coboundary(k) => k,
        };
        let b = boundary_matrix(complex, k)
            .ok_or_else(|| Error::ShapeMismatch(format!("no boundary matrix B_{k}")))?
            .to_dense();
        let operator = match map {
            CouplingMap::Boundary(_) => b,
            CouplingMap::Coboundary(_) => b.transpose(),
        };
        Ok(Coupling { map, operator, weight })
    }
}

/// `σ(Φ(s_j) + Σ_i G_i s_i W̃_i)` where `Φ` is the base layer's pre-activation.
#[derive(Clone, Debug, PartialEq)]
pub struct InterDimLayer {
    pub base: ConvLayer,
    pub couplings: Vec<Coupling>,
    // base weights followed by coupling weights, so Layer::weights_mut sees all of them
    weights: Vec<DMatrix<f64>>,
}

impl InterDimLayer {
    pub fn new(base: ConvLayer, couplings: Vec<Coupling>) -> Result<Self> {
        for c in &couplings {
            if c.map.target_dim() != base.dim {
                return Err(Error::ShapeMismatch(format!(
                    "coupling {:?} maps into dimension {}, layer works on {}",
                    c.map,
                    c.map.target_dim(),
                    base.dim
                )));
            }
            if c.operator.nrows() != base.shift.size() {
                return Err(Error::ShapeMismatch("coupling operator row count differs from N_j".into()));
            }
            if c.weight.ncols() != base.f_out() {
                return Err(Error::ShapeMismatch("coupling weight output width differs from the base".into()));
            }
        }
        let mut weights = base.weights.clone();
        weights.extend(couplings.iter().map(|c| c.weight.clone()));
        Ok(InterDimLayer { base, couplings, weights })
    }

    fn terms(&self) -> Vec<Term<'_>> {
        let mut terms = self.base.terms();
        let nb = self.base.weights.len();
        for (i, c) in self.couplings.iter().enumerate() {
            terms.push(Term { op: Some(&c.operator), input: i + 1, weight: nb + i });
        }
        terms
    }
}

impl Layer for InterDimLayer {
    fn num_inputs(&self) -> usize {
        1 + self.couplings.len()
    }

    fn weights(&self) -> &[DMatrix<f64>] {
        &self.weights
    }

    fn weights_mut(&mut self) -> &mut [DMatrix<f64>] {
        &mut self.weights
    }

    fn nonlinearity(&self) -> Nonlinearity {
        self.base.nonlinearity
    }

    fn preactivation(&self, inputs: &[&DMatrix<f64>]) -> Result<DMatrix<f64>> {
        check_input_count(inputs, self.num_inputs())?;
        terms_forward(&self.terms(), inputs, &self.weights, self.base.shift.size())
    }

    fn backward_terms(&self, inputs: &[&DMatrix<f64>], grad_pre: &DMatrix<f64>) -> Result<Gradients> {
        check_input_count(inputs, self.num_inputs())?;
        Ok(terms_backward(&self.terms(), inputs, &self.weights, grad_pre))
    }
}

fn check_input_count(inputs: &[&DMatrix<f64>], expected: usize) -> Result<()> {
    if inputs.len() != expected {
        return Err(Error::ShapeMismatch(format!("expected {expected} inputs, got {}", inputs.len())));
    }
    Ok(())
}

/// Uniform in `[−a, a]` with `a = √(6 / (F_in + F_out))`.
pub fn init_weight<R: Rng + ?Sized>(f_in: usize, f_out: usize, rng: &mut R) -> DMatrix<f64> {
    let a = (6.0 / (f_in + f_out) as f64).sqrt();
    DMatrix::from_fn(f_in, f_out, |_, _| rng.gen_range(-a..=a))
}

pub fn conv_forward(layer: &ConvLayer, s: &Feature) -> Result<Feature> {
    if s.dim != layer.dim {
        return Err(Error::ShapeMismatch(format!("feature on dimension {}, layer on {}", s.dim, layer.dim)));
    }
    Ok(Feature::new(layer.dim, layer.forward(&[&s.values])?))
}

pub fn interdim_forward(layer: &InterDimLayer, s_j: &Feature, couplings_in: &[Feature]) -> Result<Feature> {
    if s_j.dim != layer.base.dim {
        return Err(Error::ShapeMismatch(format!("feature on dimension {}, layer on {}", s_j.dim, layer.base.dim)));
    }
    if couplings_in.len() != layer.couplings.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} coupling inputs for {} couplings",
            couplings_in.len(),
            layer.couplings.len()
        )));
    }
    for (c, f) in layer.couplings.iter().zip(couplings_in) {
        if c.map.source_dim() != f.dim {
            return Err(Error::ShapeMismatch(format!(
                "coupling {:?} reads dimension {}, got a feature on {}",
                c.map,
                c.map.source_dim(),
                f.dim
            )));
        }
    }
    let mut inputs = vec![&s_j.values];
    inputs.extend(couplings_in.iter().map(|f| &f.values));
    Ok(Feature::new(layer.base.dim, layer.forward(&inputs)?))
}

/// Gradients of `Σ upstream ⊙ output` with respect to weights and inputs.
pub fn backward<L: Layer + ?Sized>(layer: &L, inputs: &[&DMatrix<f64>], upstream: &DMatrix<f64>) -> Result<Gradients> {
    layer.backward(inputs, upstream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::Fixture;

    #[test]
    fn identity_polynomial_layer_is_identity() {
        let layer = ConvLayer::new(1, Shift::Polynomial(DMatrix::identity(4, 4)), vec![DMatrix::identity(2, 2)], Nonlinearity::Identity)
            .unwrap();
        let s = Feature::new(1, DMatrix::from_fn(4, 2, |i, j| (i * 2 + j) as f64 - 3.0));
        assert_eq!(conv_forward(&layer, &s).unwrap(), s);
    }

    #[test]
    fn split_with_only_middle_weight() {
        let c = Fixture::SiouxFalls.build();
        let w1 = DMatrix::from_row_slice(2, 3, &[0.5, -1.0, 0.25, 1.5, 0.0, -0.75]);
        let zero = DMatrix::zeros(2, 3);
        let layer = ConvLayer::new(1, Shift::split_from(&c, 1).unwrap(), vec![zero.clone(), w1.clone(), zero], Nonlinearity::Tanh)
            .unwrap();
        let s = Feature::new(1, DMatrix::from_fn(38, 2, |i, j| ((i + 3 * j) as f64).sin()));
        let out = conv_forward(&layer, &s).unwrap();
        assert!((out.values - (&s.values * &w1).map(f64::tanh)).amax() < 1e-15);
    }

    #[test]
    fn linear_identity_gradient() {
        let layer = ConvLayer::new(1, Shift::Polynomial(DMatrix::identity(3, 3)), vec![DMatrix::from_element(2, 2, 0.3)], Nonlinearity::Identity)
            .unwrap();
        let s = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.0, 3.0]);
        let g = DMatrix::from_row_slice(3, 2, &[0.1, -0.2, 0.3, 0.4, -0.5, 0.6]);
        let grads = layer.backward(&[&s], &g).unwrap();
        assert_eq!(grads.weights[0], s.transpose() * &g);
        let zero = layer.backward(&[&s], &DMatrix::zeros(3, 2)).unwrap();
        assert!(zero.weights[0].iter().chain(zero.inputs[0].iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn shape_errors() {
        let layer = ConvLayer::new(1, Shift::Polynomial(DMatrix::identity(3, 3)), vec![DMatrix::identity(2, 2)], Nonlinearity::Relu)
            .unwrap();
        assert!(matches!(
            conv_forward(&layer, &Feature::new(1, DMatrix::zeros(4, 2))),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            conv_forward(&layer, &Feature::new(1, DMatrix::zeros(3, 5))),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(layer.backward(&[&DMatrix::zeros(3, 2)], &DMatrix::zeros(2, 2)).is_err());
        assert!(ConvLayer::new(1, Shift::Polynomial(DMatrix::identity(3, 3)), vec![], Nonlinearity::Relu).is_err());
    }

    #[test]
    fn coupling_must_target_layer_dimension() {
        let c = Fixture::FilledSquare.build();
        let base = ConvLayer::new(1, Shift::split_from(&c, 1).unwrap(), vec![DMatrix::zeros(2, 2); 3], Nonlinearity::Identity)
            .unwrap();
        let wrong = Coupling::new(&c, CouplingMap::Boundary(1), DMatrix::zeros(2, 2)).unwrap();
        assert!(InterDimLayer::new(base.clone(), vec![wrong]).is_err());
        let ok = Coupling::new(&c, CouplingMap::Coboundary(1), DMatrix::zeros(2, 2)).unwrap();
        assert!(InterDimLayer::new(base, vec![ok]).is_ok());
    }

    #[test]
    fn nonlinearity_flags() {
        assert!(Nonlinearity::Tanh.is_odd());
        assert!(Nonlinearity::Identity.is_odd());
        assert!(!Nonlinearity::Relu.is_odd());
        assert_eq!("tanh".parse::<Nonlinearity>().unwrap(), Nonlinearity::Tanh);
    }
}
