//! Boundary and coboundary operators.
//!
//! `B₁` sends an edge `[tail, head]` to `tail − head`, so its column carries
//! `+1` at the tail row and `−1` at the head row. Much of the literature uses
//! `head − tail`; every result here is stated for the tail-minus-head
//! convention. `B₂` sends a 2-cell to the signed sum of its boundary edges.
//!
//! Matrices are exact integers. Floats appear only once a Laplacian or a
//! cochain product is formed.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::complex::{CellComplex, EdgeId};
use crate::error::{Error, Result};

/// A real vector over the `dim`-cells of a complex, relative to their
/// reference orientations. Chains and cochains share this representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    dim: usize,
    values: Vec<f64>,
}

impl Cochain {
    pub fn new(dim: usize, values: Vec<f64>) -> Self {
        Cochain { dim, values }
    }

    pub fn zeros(dim: usize, len: usize) -> Self {
        Cochain { dim, values: vec![0.0; len] }
    }

    /// Indicator of a single cell.
    pub fn indicator(dim: usize, len: usize, index: usize) -> Self {
        let mut values = vec![0.0; len];
        values[index] = 1.0;
        Cochain { dim, values }
    }

    pub fn from_vector(dim: usize, v: &DVector<f64>) -> Self {
        Cochain { dim, values: v.iter().copied().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Cochain) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// Checks that this cochain lives on the `dim`-cells of `complex`.
    pub fn check_on(&self, complex: &CellComplex, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.dim });
        }
        let n = complex.num_cells(dim);
        if self.values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.values.len() });
        }
        Ok(())
    }

    /// CSV with header `dim,index,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.dim, i, v);
        }
        out
    }

    /// Parses the `dim,index,value` CSV. Rows may come in any order but every
    /// index in `0..n` must appear exactly once and all rows share one `dim`.
    pub fn parse_csv(text: &str) -> Result<Cochain> {
        // Blank lines and `#` comments (e.g. seed headers) are skipped.
        let mut lines = text.lines().filter(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        match lines.next().map(str::trim) {
            Some("dim,index,value") => {}
            other => return Err(Error::Parse(format!("expected header dim,index,value, got {other:?}"))),
        }
        let mut dim = None;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [d, i, v] = fields[..] else {
                return Err(Error::Parse(format!("row {}: expected 3 fields", lineno + 1)));
            };
            let d: usize = d.parse().map_err(|_| Error::Parse(format!("row {}: bad dim {d:?}", lineno + 1)))?;
            if d > 2 {
                return Err(Error::Parse(format!("row {}: dim {d} exceeds 2", lineno + 1)));
            }
            if *dim.get_or_insert(d) != d {
                return Err(Error::Parse(format!("row {}: mixed dimensions", lineno + 1)));
            }
            let i: usize = i.parse().map_err(|_| Error::Parse(format!("row {}: bad index {i:?}", lineno + 1)))?;
            let v: f64 = v.parse().map_err(|_| Error::Parse(format!("row {}: bad value {v:?}", lineno + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("row {}: non-finite value", lineno + 1)));
            }
            entries.push((i, v));
        }
        let n = entries.len();
        let mut values = vec![None; n];
        for (i, v) in entries {
            let slot = values
                .get_mut(i)
                .ok_or_else(|| Error::Parse(format!("index {i} out of range for {n} rows")))?;
            if slot.replace(v).is_some() {
                return Err(Error::Parse(format!("index {i} appears twice")));
            }
        }
        Ok(Cochain { dim: dim.unwrap_or(0), values: values.into_iter().map(|v| v.unwrap_or(0.0)).collect() })
    }
}

/// Integer matrix with ±1 entries, stored as column-major triplets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    /// `B_k` maps `k`-chains to `(k−1)`-chains.
    degree: usize,
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `(row, col, value)` triplets sorted by column, then row.
    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let start = self.entries.partition_point(|e| e.1 < col);
        self.entries[start..].iter().take_while(move |e| e.1 == col).map(|e| (e.0, e.2))
    }

    pub fn to_dense_int(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            out[r][c] += v;
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            out[(r, c)] += v as f64;
        }
        out
    }

    /// Triplet CSV with header `row,col,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for &(r, c, v) in &self.entries {
            let _ = writeln!(out, "{r},{c},{v}");
        }
        out
    }

    fn from_columns(rows: usize, degree: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns.len();
        let mut entries = Vec::new();
        for (c, mut col) in columns.into_iter().enumerate() {
            col.sort_by_key(|e| e.0);
            entries.extend(col.into_iter().map(|(r, v)| (r, c, v)));
        }
        SparseIntMatrix { rows, cols, degree, entries }
    }
}

/// `B₁` (`N₀ × N₁`): `+1` at the tail, `−1` at the head of each edge.
pub fn boundary_matrix_1(complex: &CellComplex) -> SparseIntMatrix {
    let columns = complex
        .edges()
        .iter()
        .map(|e| vec![(e.tail.0, 1), (e.head.0, -1)])
        .collect();
    SparseIntMatrix::from_columns(complex.num_nodes(), 1, columns)
}

/// `B₂` (`N₁ × N₂`): the traversal sign of each boundary edge.
pub fn boundary_matrix_2(complex: &CellComplex) -> SparseIntMatrix {
    let columns = complex
        .two_cells()
        .iter()
        .map(|cell| cell.boundary().iter().map(|r| (r.edge.0, r.sign.as_i8() as i64)).collect())
        .collect();
    SparseIntMatrix::from_columns(complex.num_edges(), 2, columns)
}

/// `B_k` for `k ∈ {1, 2}`.
pub fn boundary_matrix(complex: &CellComplex, k: usize) -> Option<SparseIntMatrix> {
    match k {
        1 => Some(boundary_matrix_1(complex)),
        2 => Some(boundary_matrix_2(complex)),
        _ => None,
    }
}

/// `B c`: lowers a `k`-chain to a `(k−1)`-chain.
pub fn apply_boundary(matrix: &SparseIntMatrix, chain: &Cochain) -> Result<Cochain> {
    if chain.dim != matrix.degree {
        return Err(Error::DimensionMismatch { expected: matrix.degree, got: chain.dim });
    }
    if chain.len() != matrix.cols {
        return Err(Error::DimensionMismatch { expected: matrix.cols, got: chain.len() });
    }
    let mut out = vec![0.0; matrix.rows];
    for &(r, c, v) in &matrix.entries {
        out[r] += v as f64 * chain.values[c];
    }
    Ok(Cochain::new(matrix.degree - 1, out))
}

/// `Bᵀ f`: raises a `(k−1)`-cochain to a `k`-cochain.
pub fn apply_coboundary(matrix: &SparseIntMatrix, cochain: &Cochain) -> Result<Cochain> {
    if cochain.dim + 1 != matrix.degree {
        return Err(Error::DimensionMismatch { expected: matrix.degree - 1, got: cochain.dim });
    }
    if cochain.len() != matrix.rows {
        return Err(Error::DimensionMismatch { expected: matrix.rows, got: cochain.len() });
    }
    let mut out = vec![0.0; matrix.cols];
    for &(r, c, v) in &matrix.entries {
        out[c] += v as f64 * cochain.values[r];
    }
    Ok(Cochain::new(matrix.degree, out))
}

/// Exact integer product `B₁ B₂` as a dense `N₀ × N₂` table.
pub fn boundary_product(complex: &CellComplex) -> Vec<Vec<i64>> {
    let b1 = boundary_matrix_1(complex);
    let b2 = boundary_matrix_2(complex);
    let mut out = vec![vec![0i64; b2.cols()]; b1.rows()];
    for &(edge, cell, s) in b2.entries() {
        for (node, v) in b1.column(edge) {
            out[node][cell] += v * s;
        }
    }
    out
}

pub(crate) fn check_exact(complex: &CellComplex) -> Result<()> {
    for (row, line) in boundary_product(complex).iter().enumerate() {
        if let Some(col) = line.iter().position(|&v| v != 0) {
            return Err(Error::BoundaryNotExact { row, col });
        }
    }
    Ok(())
}

/// Diagonal change of basis for reversing the reference orientation of the
/// edges in `flips`: `−1` on flipped edges, `+1` elsewhere.
///
/// Under this change `B₁ → B₁ D`, `B₂ → D B₂` and 1-cochains `f → D f`. The
/// matching complex comes from [`CellComplex::with_flipped_edges`].
pub fn orientation_flip_transform(complex: &CellComplex, flips: &[EdgeId]) -> Result<DMatrix<f64>> {
    let n = complex.num_edges();
    let mut diag = DVector::from_element(n, 1.0);
    for e in flips {
        if e.0 >= n {
            return Err(Error::DanglingReference(format!("flip of edge {}", e.0)));
        }
        diag[e.0] = -diag[e.0];
    }
    Ok(DMatrix::from_diagonal(&diag))
}
