//! Fans, toric pairs and their classical invariants.

mod discrepancy;
mod fan;
pub mod fixtures;
mod invariants;
mod pair;
mod terminalize;

pub use discrepancy::{alpha_invariant, lct, mld, nef_vertices, At, Threshold};
pub use fan::{Fan, SimplexData, Wall};
pub use invariants::{
    cartier_index, divisor_dot_power, divisor_polytope, divisor_volume, even_betti, lc_volume_lower_bound,
    local_cartier_index, local_class_group_exponent, numerical_invariants, ray_dot_power, rho_of_ray,
    topological_invariants, NumericalInvariants, TopologicalInvariants,
};
pub use pair::{LatticePoint, LogDiscrepancyFunction, Mode, PairData, Support, ToricPair, WallCurve};
pub use terminalize::{is_terminal, terminalize, Terminalization};
