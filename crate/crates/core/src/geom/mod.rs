//! Cones, dual cones, lattice points and polytope volumes, all exact.

mod cone;
mod polytope;

pub use cone::{dual_cone, enumerate_lattice_points, Cone, RatVec};
pub use polytope::{polytope_volume, LatticePolytope, Normalization};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("linear functional is not strictly positive on the cone; the region is unbounded")]
    Unbounded,
    #[error("empty polytope")]
    Empty,
}
