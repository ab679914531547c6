//! Bounded remainder sets: admissible volumes, explicit constructions, exact
//! multiset indicators and the discrepancy harness.

mod boxes;
mod construct;
mod discrepancy;
mod infinite;
mod volume;

pub use boxes::{chi_eval, count_coset_in_interval, AdelicBox, PAdicBall, WeightedBox, WeightedBoxSet};
pub use construct::{construct_brs, construct_special, construct_volume, decompose_general, BrsConstruction, Decomposition};
pub use discrepancy::{
    chi_along_orbit, discrepancy_series, plateau_holds, series_from_counts, strictly_growing, DiscrepancyRow,
};
pub use infinite::{extend_box_set, reduce_to_finite, SparseAdele};
pub use volume::{
    character_volume_identity, choose_n, enumerate_volumes, special_gamma, special_parts, volume_xi, VolumeElement,
};
