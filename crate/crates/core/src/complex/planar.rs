//! Face extraction from a rotation system.
//!
//! A rotation system lists, for every node, its incident edges in
//! counterclockwise order. Each edge contributes two darts (one per
//! direction). Leaving a node along a dart and repeatedly turning to the
//! next edge in the rotation of the node just reached traces one face; every
//! dart lies on exactly one face.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BuildOptions, CellComplex, EdgeId, OrientedEdge, SignedEdgeRef, TwoCell};
use crate::error::{Error, Result};

/// An embedded graph: edges plus a counterclockwise rotation per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarGraph {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub rotation: Vec<Vec<usize>>,
}

impl PlanarGraph {
    pub fn to_complex(&self) -> Result<CellComplex> {
        faces_from_rotation_system(self.num_nodes, &self.edges, &self.rotation)
    }
}

/// JSON layout for a rotation system. `coordinates` is informational only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationJson {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub rotation: Vec<Vec<usize>>,
    #[serde(default)]
    pub coordinates: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub multigraph: bool,
}

impl RotationJson {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_complex(&self) -> Result<CellComplex> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let options = BuildOptions {
            allow_parallel_edges: self.multigraph,
        };
        faces_from_rotation_system_with(self.nodes, &edges, &self.rotation, options)
    }
}

/// Builds a complex whose 2-cells are the bounded faces of a connected plane
/// graph. The outer face is the one with the longest boundary; ties go to the
/// lexicographically smallest sorted edge set.
pub fn faces_from_rotation_system(num_nodes: usize, edges: &[(usize, usize)], rotation: &[Vec<usize>]) -> Result<CellComplex> {
    faces_from_rotation_system_with(num_nodes, edges, rotation, BuildOptions::default())
}

pub fn faces_from_rotation_system_with(
    num_nodes: usize,
    edges: &[(usize, usize)],
    rotation: &[Vec<usize>],
    options: BuildOptions,
) -> Result<CellComplex> {
    let oriented: Vec<OrientedEdge> = edges.iter().map(|&(t, h)| OrientedEdge::new(t, h)).collect();
    // validates node ranges, self-loops and duplicates before the traversal indexes anything
    CellComplex::new(num_nodes, oriented.clone(), Vec::new(), options)?;

    if rotation.len() != num_nodes {
        return Err(Error::IncompleteRotation(format!(
            "{} rotation lists for {num_nodes} nodes",
            rotation.len()
        )));
    }
    // position[v] maps edge -> slot in the rotation around v
    let mut position: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_nodes];
    for (v, order) in rotation.iter().enumerate() {
        for (slot, &e) in order.iter().enumerate() {
            let Some(edge) = oriented.get(e) else {
                return Err(Error::IncompleteRotation(format!("node {v} lists unknown edge {e}")));
            };
            if !edge.touches(super::NodeId(v)) {
                return Err(Error::IncompleteRotation(format!(
                    "node {v} lists edge {e} which is not incident to it"
                )));
            }
            if position[v].iter().any(|&(seen, _)| seen == e) {
                return Err(Error::IncompleteRotation(format!("node {v} lists edge {e} twice")));
            }
            position[v].push((e, slot));
        }
    }
    for (e, edge) in oriented.iter().enumerate() {
        for end in [edge.tail.0, edge.head.0] {
            if !position[end].iter().any(|&(seen, _)| seen == e) {
                return Err(Error::IncompleteRotation(format!(
                    "edge {e} missing from the rotation of node {end}"
                )));
            }
        }
    }
    if !is_connected(num_nodes, edges) {
        return Err(Error::NonPlanarTraversal("underlying graph is not connected".into()));
    }

    let slot_of =
        |v: usize, e: usize| -> usize { position[v].iter().find(|&&(seen, _)| seen == e).map(|&(_, s)| s).unwrap_or(0) };
    // dart 2e runs tail->head, dart 2e+1 runs head->tail
    let num_darts = 2 * oriented.len();
    let mut visited = vec![false; num_darts];
    let mut faces: Vec<Vec<SignedEdgeRef>> = Vec::new();
    for start in 0..num_darts {
        if visited[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut dart = start;
        while !visited[dart] {
            visited[dart] = true;
            let e = dart / 2;
            let forward = dart % 2 == 0;
            walk.push(if forward {
                SignedEdgeRef::plus(e)
            } else {
                SignedEdgeRef::minus(e)
            });
            let arrive = if forward { oriented[e].head.0 } else { oriented[e].tail.0 };
            let order = &rotation[arrive];
            let next_edge = order[(slot_of(arrive, e) + 1) % order.len()];
            dart = if oriented[next_edge].tail.0 == arrive {
                2 * next_edge
            } else {
                2 * next_edge + 1
            };
        }
        if dart != start {
            return Err(Error::NonPlanarTraversal(format!(
                "face walk from dart {start} did not close"
            )));
        }
        faces.push(walk);
    }

    let euler = num_nodes as i64 - oriented.len() as i64 + faces.len() as i64;
    if euler != 2 {
        return Err(Error::NonPlanarTraversal(format!(
            "V - E + F = {euler} with {} faces; a connected plane graph gives 2",
            faces.len()
        )));
    }

    let outer = outer_face_index(&faces);
    let two_cells = faces
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != outer)
        .map(|(_, walk)| TwoCell::new(walk))
        .collect();
    CellComplex::new(num_nodes, oriented, two_cells, options)
}

fn outer_face_index(faces: &[Vec<SignedEdgeRef>]) -> usize {
    let key = |walk: &Vec<SignedEdgeRef>| {
        let mut set: Vec<EdgeId> = walk.iter().map(|r| r.edge).collect();
        set.sort();
        set
    };
    let mut best = 0;
    for i in 1..faces.len() {
        let (a, b) = (&faces[i], &faces[best]);
        if a.len() > b.len() || (a.len() == b.len() && key(a) < key(b)) {
            best = i;
        }
    }
    best
}

fn is_connected(num_nodes: usize, edges: &[(usize, usize)]) -> bool {
    if num_nodes == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); num_nodes];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; num_nodes];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Random plane graph on a `rows × cols` lattice: all lattice edges, plus one
/// diagonal in roughly half of the unit squares. Edge order and orientations
/// are shuffled. Every face is a triangle or a square, and the outer face is
/// the lattice perimeter.
pub fn random_grid_patch<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> PlanarGraph {
    assert!(rows >= 2 && cols >= 2, "grid patch needs at least 2x2 nodes");
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
            if r + 1 < rows && c + 1 < cols && rng.gen_bool(0.5) {
                if rng.gen_bool(0.5) {
                    edges.push((id(r, c), id(r + 1, c + 1)));
                } else {
                    edges.push((id(r, c + 1), id(r + 1, c)));
                }
            }
        }
    }
    edges.shuffle(rng);
    for e in edges.iter_mut() {
        if rng.gen_bool(0.5) {
            *e = (e.1, e.0);
        }
    }
    let coord = |v: usize| ((v % cols) as f64, (v / cols) as f64);
    let rotation = (0..rows * cols)
        .map(|v| {
            let (x0, y0) = coord(v);
            let mut around: Vec<(f64, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, &(a, b))| {
                    let (x1, y1) = coord(if a == v { b } else { a });
                    ((y1 - y0).atan2(x1 - x0), i)
                })
                .collect();
            around.sort_by(|a, b| a.0.total_cmp(&b.0));
            around.into_iter().map(|(_, i)| i).collect()
        })
        .collect();
    PlanarGraph {
        num_nodes: rows * cols,
        edges,
        rotation,
    }
}
