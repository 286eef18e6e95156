//! Arithmetic and birational invariants of algebraic tori over number
//! fields, computed on Galois lattices: flasque resolutions, Tate
//! cohomology via Smith normal form, Brauer/R-equivalence class groups,
//! weak-approximation defects and Tate-Shafarevich groups.

pub mod abelian;
pub mod arithmetic;
pub mod cohomology;
pub mod flasque;
pub mod group;
pub mod lattice;
pub mod matrix;
pub mod reductive;
pub mod sampling;
pub mod verify;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("invalid group data: {0}")]
    BadGroup(String),
    #[error("invalid subgroup: {0}")]
    BadSubgroup(String),
    #[error("invalid lattice: {0}")]
    BadLattice(String),
    #[error("unsupported cohomology degree {0} (expected -1, 0, 1 or 2)")]
    BadDegree(i32),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("internal error: {0}")]
    Internal(String),
}
