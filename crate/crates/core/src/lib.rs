//! Keller graphs, their clique-existence CNF encoding, symmetry breaking and
//! case splitting, an embedded CDCL solver with DRAT output, a DRAT checker,
//! and exact cube-tiling verification.

pub mod cli;
pub mod dratcheck;
pub mod encoder;
pub mod error;
pub mod kellergraph;
pub mod pipeline;
pub mod satkit;
pub mod symmetry;
pub mod tilinglab;

pub use error::{Error, Result};
