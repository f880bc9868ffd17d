//! Words in a free group, their Magnus expansions, and decomposition into
//! simple commutators.

mod decompose;
mod magnus;
mod tree;
mod word;

pub use decompose::{decompose_simple_quasi, decompose_with_limits, DecomposeError, DecomposeLimits};
pub use magnus::{lcs_depth, magnus, LcsDepth, MagnusSeries};
pub use tree::CommutatorTree;
pub use word::{FreeWord, WordError};
