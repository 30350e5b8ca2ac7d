//! Spin concurrence of two delocalised fermions on a one-dimensional lattice,
//! computed through Berry phases and cross-checked against explicit
//! operator algebra, Wootters' formula and Hubbard-model scattering.
//!
//! Site indices are 0-based throughout this API. Serialized states, config
//! files and the command-line tool use 1-based sites.

pub mod angle;
pub mod berry_lattice;
pub mod error;
pub mod fock;
pub mod heisenberg;
pub mod hubbard;
pub mod lattice;
pub mod measures;
pub mod registry;
pub mod report;
pub mod spin_geometry;
pub mod sweep;

pub use error::{Error, Result};
pub use lattice::{make_singlet, make_triplet, product_state, RegionPartition, SectorWeights, TwoElectronState};
pub use registry::{Named, Registry};
pub use report::{Cell, ReportDocument};
