//! End-to-end protocols: thermal bipartite entanglement and its erasure,
//! cluster-like states at finite temperature, and the Smolin-like state.

pub mod bipartite;
pub mod cluster;
pub mod smolin;
pub mod sweep;

pub use bipartite::{
    bipartite_thermal, erase_entanglement, erasure_beam, occupation, occupation_at_temperature,
    BipartiteResult, Steps, ThermalParams,
};
pub use cluster::{
    bisect_threshold, cluster_boundaries, cluster_point, cluster_state, cluster_sweep,
    ClusterBoundaries, ClusterRow, ClusterShape,
};
pub use smolin::{
    epr_basis_transform, epr_pairs, epr_via_interface, smolin_generate, smolin_trajectory,
    smolin_unlock, tied_kappa, tied_probe, to_epr_basis, unlock_point, unlock_sweep, SmolinParams,
    SmolinTrajectory, UnlockResult, UnlockRow,
};
pub use sweep::{fmt_float, SweepResult, CLUSTER_HEADER, UNLOCK_HEADER};
