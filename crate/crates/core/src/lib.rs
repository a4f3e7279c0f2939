//! Fan-blowup bandwidth tools: sparsifiers for strong products with a path,
//! the star metric, volume-respecting embeddings and fan certificates.

pub mod certificate;
pub mod cli;
pub mod crossing;
pub mod decomposition;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracles;
pub mod pipeline;
pub mod product;
pub mod seeds;
pub mod sparsifier;
pub mod star_metric;
pub mod volumes;

pub use error::{Error, Result};
