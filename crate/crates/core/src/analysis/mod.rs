//! Parameter-plane sweeps and the grid verifiers built on them.

pub mod grid;
pub mod regions;
pub mod sweep;
pub mod verify;

pub use grid::{nodes, Grid, Node, PlaneRegion, Window};
pub use regions::{
    first_appearance, m4_candidates, near_predicate_boundary, region_flags_m4, region_predicate_m4,
    RegionVerdict, RowScan, SwitchPoint,
};
pub use sweep::{
    cost_estimate, sweep, sweep_plane, Cell, RegionMap, SweepConfig, CSV_HEADER, DEFAULT_BUDGET,
};
pub use verify::{
    check_conjecture_chain, check_monotone_on_scale, four_sensor_scale, known_scale, uniform_gap,
    verify_cor41, verify_counterexample, verify_prop51, verify_thm41, verify_thm42, Axis,
    ChainEvidence, Counterexample, CounterexampleEvidence, Probe, StrictSets, VerificationReport,
    PROP51_CASES,
};
