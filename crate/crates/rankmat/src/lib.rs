//! Cut-rank, laminar tree decompositions, finite semigroups and Kronecker
//! products of semigroup matrices, at sizes where everything can be checked
//! exhaustively.

pub mod caps;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod formats;
pub mod kronecker;
pub mod rank;
pub mod recovery;
pub mod semigroup;
pub mod structures;
pub mod suites;
pub mod trees;

pub use error::{Error, Result};
