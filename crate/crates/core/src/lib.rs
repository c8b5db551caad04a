//! Signal processing on regular cell complexes.
//!
//! Complexes of dimension at most two are described combinatorially
//! ([`complex`]), turned into integer boundary matrices ([`boundary`]) and
//! Hodge Laplacians ([`spectral`]), which in turn drive polynomial filters
//! ([`filters`]), a flow-denoising benchmark ([`experiment`]) and cochain
//! convolution layers ([`cocnn`]).
//!
//! Sign convention: the boundary of an edge `[tail, head]` is `tail − head`.

pub mod boundary;
pub mod cocnn;
pub mod complex;
pub mod error;
pub mod experiment;
pub mod filters;
pub mod fixtures;
pub mod flowgen;
pub mod seed;
pub mod spectral;

pub use boundary::{Cochain, SparseIntMatrix};
pub use complex::{CellComplex, EdgeId, NodeId, SignedEdgeRef, TwoCell};
pub use error::{Error, Result};
