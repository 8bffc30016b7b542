//! Numerical ranges of composition operators on the Hardy space `H^2(D)`
//! whose symbols are finite-order elliptic automorphisms.

pub mod comparison;
pub mod disk_maps;
pub mod error;
pub mod hardy_operator;
pub mod numrange;
pub mod order2;
pub mod order3;
pub mod report;
pub mod spectral_bounds;

pub use error::{Error, Result};
