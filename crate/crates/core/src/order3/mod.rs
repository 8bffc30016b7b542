//! Order-3 symbols: the support cubic, the determinant root problem and the
//! sextic boundary curve with its tangential cubic.

pub mod checks;
pub mod cubic;
pub mod curve;
pub mod geometry;

pub use checks::{curve_suite, order3_suite};
pub use curve::{
    flexes, foci_check, inflexional_tangent_defect, singularity_report, write_envelope_csv, CuspCheck, DualCubic,
    FociReport, Flex, SexticCoefficients, SexticCurve, SingularityReport, CUSP_TOL, FOCAL_TOL,
};
pub use geometry::{
    chebyshev_zeta, det_closed, det_m_identity, envelope, envelope_point, eqc_residual, l_constant, m_matrix,
    stationary_angles, support_derivative, support_root, DetIdentity, Order3Geometry, EQC_TOL, NEAR_BOUNDARY,
};
