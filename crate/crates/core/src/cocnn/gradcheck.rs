use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConvLayer, Coupling, CouplingMap, InterDimLayer, Layer, Nonlinearity, Shift};
use crate::complex::random_grid_patch;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Pre-activations closer than this to the ReLU kink trigger a resample.
const KINK_MARGIN: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerKind {
    /// `σ(H s W)`.
    Eq5,
    /// `σ(L^low s W₀ + s W₁ + L^up s W₂)`.
    Eq6,
    /// Split base on edges plus node and 2-cell couplings.
    Eq7,
}

impl std::str::FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq5" => Ok(LayerKind::Eq5),
            "eq6" => Ok(LayerKind::Eq6),
            "eq7" => Ok(LayerKind::Eq7),
            _ => Err(Error::Parse(format!("unknown layer `{s}` (expected eq5, eq6 or eq7)"))),
        }
    }
}

pub enum GradcheckInstance {
    Conv { layer: ConvLayer, inputs: Vec<DMatrix<f64>>, upstream: DMatrix<f64> },
    InterDim { layer: InterDimLayer, inputs: Vec<DMatrix<f64>>, upstream: DMatrix<f64> },
}

fn uniform<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// A random small layer and inputs on a random planar patch (at most nine
/// edges, at most four channels).
pub fn random_instance(kind: LayerKind, nonlinearity: Nonlinearity, seed: u64) -> Result<GradcheckInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols = rng.gen_range(2..=3);
    let complex = random_grid_patch(2, cols, &mut rng).to_complex()?;
    let n1 = complex.num_edges();
    let f_in = rng.gen_range(1..=4);
    let f_out = rng.gen_range(1..=4);
    let upstream = uniform(n1, f_out, &mut rng);
    let input = uniform(n1, f_in, &mut rng);
    Ok(match kind {
        LayerKind::Eq5 => {
            let coeffs: Vec<f64> = (0..3).map(|l| rng.gen_range(-1.0..1.0) / 6f64.powi(l)).collect();
            let shift = Shift::polynomial_from(&complex, 1, &coeffs)?;
            let layer = ConvLayer::init(1, shift, f_in, f_out, nonlinearity, &mut rng);
            GradcheckInstance::Conv { layer, inputs: vec![input], upstream }
        }
        LayerKind::Eq6 => {
            let layer = ConvLayer::init(1, Shift::split_from(&complex, 1)?, f_in, f_out, nonlinearity, &mut rng);
            GradcheckInstance::Conv { layer, inputs: vec![input], upstream }
        }
        LayerKind::Eq7 => {
            let base = ConvLayer::init(1, Shift::split_from(&complex, 1)?, f_in, f_out, nonlinearity, &mut rng);
            let f_node = rng.gen_range(1..=4);
            let f_cell = rng.gen_range(1..=4);
            let couplings = vec![
                Coupling::new(&complex, CouplingMap::Coboundary(1), super::init_weight(f_node, f_out, &mut rng))?,
                Coupling::new(&complex, CouplingMap::Boundary(2), super::init_weight(f_cell, f_out, &mut rng))?,
            ];
            let inputs = vec![
                input,
                uniform(complex.num_nodes(), f_node, &mut rng),
                uniform(complex.num_two_cells(), f_cell, &mut rng),
            ];
            GradcheckInstance::InterDim { layer: InterDimLayer::new(base, couplings)?, inputs, upstream }
        }
    })
}

impl GradcheckInstance {
    fn run(&mut self) -> Result<f64> {
        match self {
            GradcheckInstance::Conv { layer, inputs, upstream } => gradcheck_layer(layer, inputs, upstream),
            GradcheckInstance::InterDim { layer, inputs, upstream } => gradcheck_layer(layer, inputs, upstream),
        }
    }

    fn min_abs_preactivation(&self) -> Result<f64> {
        let z = match self {
            GradcheckInstance::Conv { layer, inputs, .. } => layer.preactivation(&refs(inputs))?,
            GradcheckInstance::InterDim { layer, inputs, .. } => layer.preactivation(&refs(inputs))?,
        };
        Ok(z.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())))
    }
}

fn refs(inputs: &[DMatrix<f64>]) -> Vec<&DMatrix<f64>> {
    inputs.iter().collect()
}

/// Worst error between analytic and central-difference gradients over every
/// weight and input entry of a random instance. ReLU instances are redrawn
/// until no pre-activation sits within 1e-2 of the kink.
pub fn gradcheck(kind: LayerKind, nonlinearity: Nonlinearity, seed: u64) -> Result<f64> {
    for attempt in 0..1000u64 {
        let sub = if attempt == 0 { seed } else { derive_seed(seed, &[attempt]) };
        let mut instance = random_instance(kind, nonlinearity, sub)?;
        if nonlinearity == Nonlinearity::Relu && instance.min_abs_preactivation()? < KINK_MARGIN {
            continue;
        }
        return instance.run();
    }
    Err(Error::InvalidConfig("could not draw a ReLU instance away from the kink".into()))
}

/// Error measure `|a − n| / max(|a|, |n|, 1)`: relative for gradients of
/// unit size or larger, absolute below that.
fn gradient_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

/// Compares `backward` against central differences of the scalar loss
/// `Σ upstream ⊙ forward(inputs)`.
pub fn gradcheck_layer<L: Layer + ?Sized>(layer: &mut L, inputs: &[DMatrix<f64>], upstream: &DMatrix<f64>) -> Result<f64> {
    let analytic = layer.backward(&refs(inputs), upstream)?;
    // Σ g ⊙ (Y⁺ − Y⁻) keeps the cancellation per entry
    let diff_loss = |plus: &DMatrix<f64>, minus: &DMatrix<f64>| -> f64 {
        upstream.iter().zip(plus.iter().zip(minus.iter())).map(|(g, (p, m))| g * (p - m)).sum::<f64>() / (2.0 * FD_STEP)
    };
    let mut worst: f64 = 0.0;

    for w in 0..layer.weights().len() {
        let (rows, cols) = layer.weights()[w].shape();
        for i in 0..rows {
            for j in 0..cols {
                let orig = layer.weights()[w][(i, j)];
                layer.weights_mut()[w][(i, j)] = orig + FD_STEP;
                let plus = layer.forward(&refs(inputs))?;
                layer.weights_mut()[w][(i, j)] = orig - FD_STEP;
                let minus = layer.forward(&refs(inputs))?;
                layer.weights_mut()[w][(i, j)] = orig;
                worst = worst.max(gradient_error(analytic.weights[w][(i, j)], diff_loss(&plus, &minus)));
            }
        }
    }

    let mut work: Vec<DMatrix<f64>> = inputs.to_vec();
    for x in 0..inputs.len() {
        let (rows, cols) = inputs[x].shape();
        for i in 0..rows {
            for j in 0..cols {
                let orig = inputs[x][(i, j)];
                work[x][(i, j)] = orig + FD_STEP;
                let plus = layer.forward(&refs(&work))?;
                work[x][(i, j)] = orig - FD_STEP;
                let minus = layer.forward(&refs(&work))?;
                work[x][(i, j)] = orig;
                worst = worst.max(gradient_error(analytic.inputs[x][(i, j)], diff_loss(&plus, &minus)));
            }
        }
    }
    Ok(worst)
}
