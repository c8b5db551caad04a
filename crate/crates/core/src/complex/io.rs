use serde::{Deserialize, Serialize};

use super::{build_complex_with, BuildOptions, CellComplex};
use crate::error::Result;

/// On-disk complex layout:
/// `{"nodes": N0, "edges": [[tail, head], ...], "two_cells": [[[edge, sign], ...], ...]}`.
///
/// The optional `multigraph` flag admits parallel edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub two_cells: Vec<Vec<(usize, i64)>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub multigraph: bool,
}

impl ComplexJson {
    pub fn build(&self) -> Result<CellComplex> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let options = BuildOptions { allow_parallel_edges: self.multigraph };
        build_complex_with(self.nodes, &edges, &self.two_cells, options)
    }
}

impl From<&CellComplex> for ComplexJson {
    fn from(c: &CellComplex) -> Self {
        ComplexJson {
            nodes: c.num_nodes(),
            edges: c.edges().iter().map(|e| [e.tail.0, e.head.0]).collect(),
            two_cells: c
                .two_cells()
                .iter()
                .map(|cell| {
                    cell.boundary().iter().map(|r| (r.edge.0, r.sign.as_i8() as i64)).collect()
                })
                .collect(),
            multigraph: c.options().allow_parallel_edges,
        }
    }
}

/// Parses and validates a complex from JSON text.
pub fn parse_complex_json(text: &str) -> Result<CellComplex> {
    let raw: ComplexJson = serde_json::from_str(text)?;
    raw.build()
}

impl CellComplex {
    /// Compact JSON, one edge or cell per line.
    pub fn to_json(&self) -> String {
        let raw = ComplexJson::from(self);
        let mut out = String::new();
        out.push_str(&format!("{{\n  \"nodes\": {},\n", raw.nodes));
        if raw.multigraph {
            out.push_str("  \"multigraph\": true,\n");
        }
        out.push_str("  \"edges\": [");
        push_list(&mut out, raw.edges.iter().map(|e| format!("[{}, {}]", e[0], e[1])));
        out.push_str("],\n  \"two_cells\": [");
        push_list(
            &mut out,
            raw.two_cells.iter().map(|cell| {
                let parts: Vec<String> =
                    cell.iter().map(|(e, s)| format!("[{e}, {s}]")).collect();
                format!("[{}]", parts.join(", "))
            }),
        );
        out.push_str("]\n}\n");
        out
    }
}

fn push_list(out: &mut String, items: impl Iterator<Item = String>) {
    let items: Vec<String> = items.collect();
    if items.is_empty() {
        return;
    }
    out.push('\n');
    for (i, item) in items.iter().enumerate() {
        out.push_str("    ");
        out.push_str(item);
        if i + 1 < items.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ");
}
