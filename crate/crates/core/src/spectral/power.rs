use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Settings for [`lambda_max_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIteration {
    pub rel_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration { rel_tol: 1e-6, max_iters: 10_000, seed: 0 }
    }
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from a
/// seeded random start.
pub fn lambda_max(l: &DMatrix<f64>, rel_tol: f64, max_iters: usize, seed: u64) -> Result<f64> {
    lambda_max_with(l, PowerIteration { rel_tol, max_iters, seed })
}

/// Stops once the Rayleigh quotient has settled to `rel_tol / 100` between
/// iterations and the eigen-residual `‖Lv − ρv‖` is below `√rel_tol · ρ`.
/// The Rayleigh quotient error is quadratic in the residual, so this bounds
/// the eigenvalue error well inside `rel_tol`.
pub fn lambda_max_with(l: &DMatrix<f64>, opts: PowerIteration) -> Result<f64> {
    let n = l.nrows();
    if n == 0 || l.amax() == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    v /= v.norm();
    let mut rho = 0.0;
    for _ in 0..opts.max_iters {
        let w = l * &v;
        let next = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            // start vector landed in the kernel; L is nonzero so reseed along a column
            let j = l.column_iter().position(|c| c.amax() > 0.0).unwrap_or(0);
            v = l.column(j).into_owned();
            v /= v.norm();
            continue;
        }
        let residual = (&w - &v * next).norm();
        let settled = (next - rho).abs() <= 1e-2 * opts.rel_tol * next.abs();
        rho = next;
        v = w / wn;
        if settled && residual <= opts.rel_tol.sqrt() * rho {
            return Ok(rho);
        }
    }
    Err(Error::NoConvergence(opts.max_iters))
}
