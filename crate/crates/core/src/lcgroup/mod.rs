//! Nets, norms, and flow smoothing for locally compact groups `ℝᵈ`.

pub mod flow;
pub mod net;

pub use flow::{lc_lipschitz_bound, lc_lipschitz_check, lc_refinement_check, Flow, LcDistance, LcParams, LcQuadrature};
pub use net::{check_net_invariants, norm_symmetry_check, packing_bound, quasi_subadditivity_check, NetGraph};
