//! Exact verification of the dimension counts behind CR conditions on
//! curvature and torsion for G2 and Spin(7) structures.

// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod constraints;
pub mod exact;
pub mod frames;
pub mod rank;
pub mod report;
pub mod suites;
pub mod vcp;
