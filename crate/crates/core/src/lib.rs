//! Exact toric laboratory: singularity invariants, toric MMP runs, difficulty ladders,
//! stringy E-functions and explicit termination bounds.

pub mod bounds;
pub mod difficulty;
pub mod geom;
pub mod linalg;
pub mod lp;
pub mod mmp;
pub mod nvol;
pub mod rat;
pub mod stringy;
pub mod error;
pub mod random;
pub mod toric;
pub mod verify;

pub use error::{Result, ToricError};

pub use rat::{Int, Rat};
