//! Numerical-range boundaries of finite matrices from the support function
//! `Lambda(alpha) = lambda_max((e^{-i alpha} T + e^{i alpha} T^*) / 2)`.

mod eigen;
mod geometry;
mod sweep;

pub use eigen::{dense_top_eigenpair, lanczos_top_eigenpair, top_eigenpair, EigenOptions, EigenPair};
pub use geometry::{hausdorff, hull_from_support, BoundaryPolyline, PARALLEL_GAP};
pub use sweep::{
    hermitian_part, support_function, symmetry_defect, uniform_angles, write_support_csv, SupportSample,
};
