//! Quadrature over compact models, finite parts of volume expansions and
//! the integrated Gauss–Bonnet-type identities.

mod laurent;
mod quadrature;
mod verify;

pub use laurent::{renormalized_volume, LaurentSeries, NormalFormVolume};
pub use quadrature::{
    integrate_local, integrate_pointwise, model_volume, pairwise_sum, reference_point, sphere_volume_by_rule,
    IntegrationOptions, QuadratureRule, DEFAULT_NODES_PER_AXIS,
};
pub use verify::{
    conformal_pfaffian, gbc_coefficient, gbc_sides, integrate_scalar, verify_cgb, verify_gbc, verify_gbc_routes,
    verify_main_theorem_coefficient, verify_renormalized_volume, verify_worked_examples, weyl_laplacian_residual,
    PfaffianRoute,
};
