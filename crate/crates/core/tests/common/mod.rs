#![allow(dead_code)]

use cellhodge::complex::{build_complex_with, random_grid_patch, CellComplex};
use cellhodge::fixtures::Fixture;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixtures() -> Vec<(&'static str, CellComplex)> {
    Fixture::ALL.iter().map(|f| (f.name(), f.build())).collect()
}

/// Random planar patch with 2..=5 rows and columns.
pub fn random_patch(seed: u64) -> CellComplex {
    let mut r = rng(seed);
    let rows = r.gen_range(2..=5);
    let cols = r.gen_range(2..=5);
    random_grid_patch(rows, cols, &mut r).to_complex().expect("grid patch is planar")
}

pub fn random_vec(n: usize, r: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn random_matrix(rows: usize, cols: usize, r: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-1.0..1.0))
}

/// D − A of the 1-skeleton, counting parallel edges with multiplicity.
pub fn graph_laplacian_oracle(c: &CellComplex) -> DMatrix<f64> {
    let n = c.num_nodes();
    let mut l = DMatrix::zeros(n, n);
    for e in c.edges() {
        let (a, b) = (e.tail.0, e.head.0);
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
    }
    l
}

/// Numerical rank through singular values; an oracle independent of the
/// integer elimination in the library.
pub fn svd_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone().svd(false, false).singular_values.iter().filter(|&&s| s > 1e-9).count()
}

pub fn permutation_matrix(perm: &[usize]) -> DMatrix<f64> {
    // row new, column old
    let n = perm.len();
    let mut p = DMatrix::zeros(n, n);
    for (old, &new) in perm.iter().enumerate() {
        p[(new, old)] = 1.0;
    }
    p
}

pub struct Relabeled {
    pub complex: CellComplex,
    /// `node[old] = new`, and likewise for edges and cells.
    pub node: Vec<usize>,
    pub edge: Vec<usize>,
    pub cell: Vec<usize>,
}

/// Same complex with nodes, edges and 2-cells renumbered at random.
pub fn relabel(c: &CellComplex, r: &mut impl Rng) -> Relabeled {
    let shuffled = |n: usize, r: &mut dyn rand::RngCore| {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(r);
        p
    };
    let node = shuffled(c.num_nodes(), r);
    let edge = shuffled(c.num_edges(), r);
    let cell = shuffled(c.num_two_cells(), r);
    let mut edges = vec![(0, 0); c.num_edges()];
    for (old, e) in c.edges().iter().enumerate() {
        edges[edge[old]] = (node[e.tail.0], node[e.head.0]);
    }
    let mut cells = vec![Vec::new(); c.num_two_cells()];
    for (old, cell_ref) in c.two_cells().iter().enumerate() {
        cells[cell[old]] = cell_ref.boundary().iter().map(|s| (edge[s.edge.0], s.sign.as_i8() as i64)).collect();
    }
    let complex = build_complex_with(c.num_nodes(), &edges, &cells, c.options()).expect("relabeling preserves validity");
    Relabeled { complex, node, edge, cell }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}
