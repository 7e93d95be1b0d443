//! Optimal placement of binary sensors for locating an intruder among a
//! finite set of points.
//!
//! A placement distributes `M` identical sensors over `N` points. Each
//! sensor raises an alarm with probability `p_d` when the intruder is at its
//! point and `p_f` otherwise; a fusion centre picks the MAP location. The
//! crate evaluates the resulting error probability exactly, searches all
//! placements (integer partitions of `M`) for the optimum and relates the
//! optima through the majorization order.

pub mod analysis;
pub mod detection;
pub mod error;
pub mod majorization;
pub mod model;
pub mod montecarlo;
pub mod partitions;

pub use detection::{
    admissible_placements, closed_form_pe2, error_probability, evaluate_all, map_decide,
    optimal_placements, ErrorProbability, Optimum, TIE_EPSILON,
};
pub use error::{Error, Result};
pub use majorization::{
    chain_sort, compare, compare_counts, is_chain, ChainCheck, MajorizationVerdict, PlacementScale,
};
pub use model::{
    alarm_count_at_point, conditional_pmf, observation_count, ObservationIndex, Placement,
    PmfTable, SensorModel,
};
pub use montecarlo::{simulate, SimResult, TieRule};
pub use partitions::{enumerate_partitions, partition_count, PartitionSet};
