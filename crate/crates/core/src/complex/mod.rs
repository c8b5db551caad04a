//! Combinatorial regular cell complexes of dimension at most two.
//!
//! A complex is stored as a node count, a list of edges whose stored
//! `(tail, head)` order is the reference orientation, and a list of 2-cells.
//! Each 2-cell is a closed, non-self-intersecting walk of signed edges; the
//! traversal direction of the walk is the cell's reference orientation.
//! Index order always equals input order.

mod io;
mod planar;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boundary;
use crate::error::{Error, Result};

pub use io::{parse_complex_json, ComplexJson};
pub use planar::{
    faces_from_rotation_system, faces_from_rotation_system_with, random_grid_patch, PlanarGraph,
    RotationJson,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellId(pub usize);

/// Traversal direction of an edge relative to its reference orientation.
///
/// `Minus` orders before `Plus`, matching the integer values −1 < +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_int(value: i64) -> Option<Sign> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub tail: NodeId,
    pub head: NodeId,
}

impl OrientedEdge {
    pub fn new(tail: usize, head: usize) -> Self {
        OrientedEdge { tail: NodeId(tail), head: NodeId(head) }
    }

    pub fn reversed(self) -> Self {
        OrientedEdge { tail: self.head, head: self.tail }
    }

    /// Endpoints in traversal order for the given sign.
    pub fn traverse(self, sign: Sign) -> (NodeId, NodeId) {
        match sign {
            Sign::Plus => (self.tail, self.head),
            Sign::Minus => (self.head, self.tail),
        }
    }

    pub fn touches(self, node: NodeId) -> bool {
        self.tail == node || self.head == node
    }
}

/// An edge together with the direction it is traversed in.
///
/// Ordered lexicographically by `(edge, sign)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedEdgeRef {
    pub edge: EdgeId,
    pub sign: Sign,
}

impl SignedEdgeRef {
    pub fn plus(edge: usize) -> Self {
        SignedEdgeRef { edge: EdgeId(edge), sign: Sign::Plus }
    }

    pub fn minus(edge: usize) -> Self {
        SignedEdgeRef { edge: EdgeId(edge), sign: Sign::Minus }
    }

    pub fn flipped(self) -> Self {
        SignedEdgeRef { edge: self.edge, sign: self.sign.flipped() }
    }
}

impl fmt::Display for SignedEdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}e{}", self.sign, self.edge.0)
    }
}

/// A 2-cell given by its oriented boundary walk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoCell {
    boundary: Vec<SignedEdgeRef>,
}

impl TwoCell {
    /// Wraps a boundary walk. Structural checks happen when the cell is added
    /// to a complex, since they need the edge list.
    pub fn new(boundary: Vec<SignedEdgeRef>) -> Self {
        TwoCell { boundary }
    }

    pub fn boundary(&self) -> &[SignedEdgeRef] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Representative of the cyclic-rotation class: the walk rotated so its
    /// smallest `(edge, sign)` entry comes first. The orientation is kept.
    pub fn canonical(&self) -> TwoCell {
        let Some((start, _)) = self.boundary.iter().enumerate().min_by_key(|(_, r)| **r) else {
            return self.clone();
        };
        let mut boundary = self.boundary.clone();
        boundary.rotate_left(start);
        TwoCell { boundary }
    }

    /// The same cell with the opposite orientation: order reversed, every sign negated.
    pub fn reversed(&self) -> TwoCell {
        TwoCell { boundary: self.boundary.iter().rev().map(|r| r.flipped()).collect() }
    }
}

impl fmt::Display for TwoCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.boundary.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Free-function form of [`TwoCell::canonical`].
pub fn canonicalize_two_cell(cell: &TwoCell) -> TwoCell {
    cell.canonical()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Accept several edges between the same pair of nodes. Needed for
    /// compact complexes such as the 4-node torus. Also lowers the minimum
    /// 2-cell boundary length from 3 to 2.
    pub allow_parallel_edges: bool,
}

impl BuildOptions {
    pub fn multigraph() -> Self {
        BuildOptions { allow_parallel_edges: true }
    }

    fn min_boundary_len(self) -> usize {
        if self.allow_parallel_edges {
            2
        } else {
            3
        }
    }
}

/// A validated regular cell complex. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    num_nodes: usize,
    edges: Vec<OrientedEdge>,
    two_cells: Vec<TwoCell>,
    options: BuildOptions,
}

impl CellComplex {
    pub fn new(
        num_nodes: usize,
        edges: Vec<OrientedEdge>,
        two_cells: Vec<TwoCell>,
        options: BuildOptions,
    ) -> Result<Self> {
        validate_edges(num_nodes, &edges, options)?;
        for (idx, cell) in two_cells.iter().enumerate() {
            validate_two_cell(idx, cell, &edges, options)?;
        }
        let complex = CellComplex { num_nodes, edges, two_cells, options };
        boundary::check_exact(&complex)?;
        Ok(complex)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_two_cells(&self) -> usize {
        self.two_cells.len()
    }

    /// `(N₀, N₁, N₂)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.num_nodes, self.edges.len(), self.two_cells.len())
    }

    /// Number of cells of dimension `k`; zero for `k > 2`.
    pub fn num_cells(&self, k: usize) -> usize {
        match k {
            0 => self.num_nodes,
            1 => self.edges.len(),
            2 => self.two_cells.len(),
            _ => 0,
        }
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> OrientedEdge {
        self.edges[id.0]
    }

    pub fn two_cells(&self) -> &[TwoCell] {
        &self.two_cells
    }

    pub fn options(&self) -> BuildOptions {
        self.options
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_nodes as i64 - self.edges.len() as i64 + self.two_cells.len() as i64
    }

    /// Incident edges per node, in edge-index order.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.num_nodes];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.tail.0].push(EdgeId(i));
            out[e.head.0].push(EdgeId(i));
        }
        out
    }

    /// The same complex with the reference orientation of every edge in
    /// `flips` reversed. Signs inside 2-cell walks are updated so each cell
    /// describes the same oriented walk.
    pub fn with_flipped_edges(&self, flips: &[EdgeId]) -> Result<CellComplex> {
        let mut flipped = vec![false; self.edges.len()];
        for e in flips {
            if e.0 >= self.edges.len() {
                return Err(Error::DanglingReference(format!("flip of edge {}", e.0)));
            }
            flipped[e.0] = !flipped[e.0];
        }
        let edges = self
            .edges
            .iter()
            .zip(&flipped)
            .map(|(e, &f)| if f { e.reversed() } else { *e })
            .collect();
        let two_cells = self
            .two_cells
            .iter()
            .map(|c| {
                TwoCell::new(
                    c.boundary
                        .iter()
                        .map(|r| if flipped[r.edge.0] { r.flipped() } else { *r })
                        .collect(),
                )
            })
            .collect();
        CellComplex::new(self.num_nodes, edges, two_cells, self.options)
    }

    /// Keeps only the 2-cells accepted by `keep`, preserving order.
    pub fn retain_two_cells(&self, mut keep: impl FnMut(&TwoCell) -> bool) -> CellComplex {
        CellComplex {
            num_nodes: self.num_nodes,
            edges: self.edges.clone(),
            two_cells: self.two_cells.iter().filter(|c| keep(c)).cloned().collect(),
            options: self.options,
        }
    }

    /// The 1-skeleton without any 2-cells.
    pub fn one_skeleton(&self) -> CellComplex {
        self.retain_two_cells(|_| false)
    }
}

/// Builds a complex from raw indices: edges as `(tail, head)`, 2-cells as
/// walks of `(edge, sign)` with sign ±1.
pub fn build_complex(
    num_nodes: usize,
    edges: &[(usize, usize)],
    two_cells: &[Vec<(usize, i64)>],
) -> Result<CellComplex> {
    build_complex_with(num_nodes, edges, two_cells, BuildOptions::default())
}

pub fn build_complex_with(
    num_nodes: usize,
    edges: &[(usize, usize)],
    two_cells: &[Vec<(usize, i64)>],
    options: BuildOptions,
) -> Result<CellComplex> {
    let edges = edges.iter().map(|&(t, h)| OrientedEdge::new(t, h)).collect();
    let mut cells = Vec::with_capacity(two_cells.len());
    for (idx, walk) in two_cells.iter().enumerate() {
        let mut boundary = Vec::with_capacity(walk.len());
        for &(edge, sign) in walk {
            let sign = Sign::from_int(sign).ok_or_else(|| {
                Error::Parse(format!("2-cell {idx}: sign {sign} is not 1 or -1"))
            })?;
            boundary.push(SignedEdgeRef { edge: EdgeId(edge), sign });
        }
        cells.push(TwoCell::new(boundary));
    }
    CellComplex::new(num_nodes, edges, cells, options)
}

fn validate_edges(num_nodes: usize, edges: &[OrientedEdge], options: BuildOptions) -> Result<()> {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for n in [e.tail, e.head] {
            if n.0 >= num_nodes {
                return Err(Error::DanglingReference(format!(
                    "edge {i} references node {} but there are {num_nodes} nodes",
                    n.0
                )));
            }
        }
        if e.tail == e.head {
            return Err(Error::SelfLoop { edge: i, node: e.tail.0 });
        }
        let key = (e.tail.0.min(e.head.0), e.tail.0.max(e.head.0));
        if let Some(&original) = seen.get(&key) {
            if !options.allow_parallel_edges {
                return Err(Error::DuplicateEdge { edge: i, original, a: key.0, b: key.1 });
            }
        } else {
            seen.insert(key, i);
        }
    }
    Ok(())
}

fn validate_two_cell(
    idx: usize,
    cell: &TwoCell,
    edges: &[OrientedEdge],
    options: BuildOptions,
) -> Result<()> {
    let walk = cell.boundary();
    let min = options.min_boundary_len();
    if walk.len() < min {
        return Err(Error::ShortBoundary { cell: idx, len: walk.len(), min });
    }
    for r in walk {
        if r.edge.0 >= edges.len() {
            return Err(Error::DanglingReference(format!(
                "2-cell {idx} references edge {} but there are {} edges",
                r.edge.0,
                edges.len()
            )));
        }
    }
    let mut used_edges = vec![false; edges.len()];
    for r in walk {
        if std::mem::replace(&mut used_edges[r.edge.0], true) {
            return Err(Error::SelfIntersecting { cell: idx, what: format!("edge {}", r.edge.0) });
        }
    }
    let steps: Vec<(NodeId, NodeId)> = walk.iter().map(|r| edges[r.edge.0].traverse(r.sign)).collect();
    for i in 0..steps.len() {
        let next = (i + 1) % steps.len();
        if steps[i].1 != steps[next].0 {
            return Err(Error::OpenPath {
                cell: idx,
                detail: format!(
                    "{} ends at node {} but {} starts at node {}",
                    walk[i], steps[i].1 .0, walk[next], steps[next].0 .0
                ),
            });
        }
    }
    let mut visited = HashMap::new();
    for (start, _) in &steps {
        if visited.insert(*start, ()).is_some() {
            return Err(Error::SelfIntersecting { cell: idx, what: format!("node {}", start.0) });
        }
    }
    Ok(())
}
