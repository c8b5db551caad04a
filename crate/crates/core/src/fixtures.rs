//! Built-in complexes.
//!
//! * `torus_cc`: a 2×2 periodic grid. Four nodes, eight edges (two parallel
//!   edges between each pair of grid neighbours), four square faces.
//! * `filled_square`: the 4-cycle with its interior as one 2-cell.
//! * `c4`: the bare 4-cycle.
//! * `sioux_falls`: the 24-node Sioux Falls road network, with every bounded
//!   face of its planar embedding as a 2-cell.

use std::fmt;
use std::str::FromStr;

use crate::complex::{build_complex, build_complex_with, BuildOptions, CellComplex, RotationJson};
use crate::error::{Error, Result};

pub const SIOUX_FALLS_ROTATION: &str = include_str!("../../../fixtures/sioux_falls_rotation.json");

/// Source nodes (top two rows of the network, 0-based) for trajectory flows.
pub const SIOUX_FALLS_SOURCES: [usize; 6] = [0, 1, 2, 3, 4, 5];
/// Sink nodes (bottom row of the network, 0-based).
pub const SIOUX_FALLS_SINKS: [usize; 4] = [12, 19, 20, 23];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fixture {
    TorusCc,
    FilledSquare,
    C4,
    SiouxFalls,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::TorusCc, Fixture::FilledSquare, Fixture::C4, Fixture::SiouxFalls];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::TorusCc => "torus_cc",
            Fixture::FilledSquare => "filled_square",
            Fixture::C4 => "c4",
            Fixture::SiouxFalls => "sioux_falls",
        }
    }

    /// File name used under `fixtures/`.
    pub fn file_name(self) -> &'static str {
        match self {
            Fixture::TorusCc => "torus.json",
            Fixture::FilledSquare => "filled_square.json",
            Fixture::C4 => "c4.json",
            Fixture::SiouxFalls => "sioux_falls.json",
        }
    }

    pub fn build(self) -> CellComplex {
        let built = match self {
            Fixture::TorusCc => torus(),
            Fixture::FilledSquare => {
                build_complex(4, &SQUARE, &[vec![(0, 1), (1, 1), (2, 1), (3, 1)]])
            }
            Fixture::C4 => build_complex(4, &SQUARE, &[]),
            Fixture::SiouxFalls => RotationJson::parse(SIOUX_FALLS_ROTATION).and_then(|r| r.to_complex()),
        };
        built.expect("built-in fixture is valid")
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s || f.file_name().trim_end_matches(".json") == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Looks up a built-in complex by name.
pub fn fixture(name: &str) -> Result<CellComplex> {
    Ok(name.parse::<Fixture>()?.build())
}

const SQUARE: [(usize, usize); 4] = [(0, 1), (1, 2), (2, 3), (3, 0)];

fn torus() -> Result<CellComplex> {
    // node (r, c) = 2r + c; h(r, c) runs (r, c) -> (r, c+1), v(r, c) runs (r, c) -> (r+1, c)
    let node = |r: usize, c: usize| 2 * (r % 2) + (c % 2);
    let h = |r: usize, c: usize| 2 * (r % 2) + (c % 2);
    let v = |r: usize, c: usize| 4 + 2 * (r % 2) + (c % 2);
    let mut edges = vec![(0, 0); 8];
    for r in 0..2 {
        for c in 0..2 {
            edges[h(r, c)] = (node(r, c), node(r, c + 1));
            edges[v(r, c)] = (node(r, c), node(r + 1, c));
        }
    }
    let mut cells = Vec::new();
    for r in 0..2 {
        for c in 0..2 {
            cells.push(vec![(h(r, c), 1), (v(r, c + 1), 1), (h(r + 1, c), -1), (v(r, c), -1)]);
        }
    }
    build_complex_with(4, &edges, &cells, BuildOptions::multigraph())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(Fixture::TorusCc.build().counts(), (4, 8, 4));
        assert_eq!(Fixture::FilledSquare.build().counts(), (4, 4, 1));
        assert_eq!(Fixture::C4.build().counts(), (4, 4, 0));
        assert_eq!(Fixture::SiouxFalls.build().counts(), (24, 38, 15));
    }

    #[test]
    fn euler() {
        assert_eq!(Fixture::TorusCc.build().euler_characteristic(), 0);
        assert_eq!(Fixture::FilledSquare.build().euler_characteristic(), 1);
        assert_eq!(Fixture::C4.build().euler_characteristic(), 0);
    }

    #[test]
    fn lookup() {
        assert_eq!(fixture("torus_cc").unwrap().counts(), (4, 8, 4));
        assert_eq!(fixture("torus").unwrap().counts(), (4, 8, 4));
        assert!(matches!(fixture("klein"), Err(Error::UnknownFixture(_))));
    }
}
