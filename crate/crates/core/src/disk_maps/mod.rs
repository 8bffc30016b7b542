//! Moebius maps, finite-order elliptic automorphisms of the disk and
//! truncated Taylor series.

mod moebius;
mod series;
mod symbol;

pub use moebius::MoebiusMap;
pub use series::TaylorSeries;
pub(crate) use series::inner_unchecked;
pub use symbol::{EllipticSymbol, DEFAULT_MODULUS_CAP};
