//! Straight normal ambient metrics of Einstein manifolds and the checks that
//! relate ambient natural tensors to base quantities.

mod chart;
mod checks;
mod conformal;
mod fields;

pub use chart::{build_ambient, AmbientChart, AmbientPoint, MAX_LAMBDA_RHO};
pub use checks::{
    ambient_christoffels, ambient_constant, ambient_curvature, ambient_laplacian_homogeneous, ambient_ricci_flatness,
    ambient_values, check_straightenable, dilation_homogeneity,
};
pub use conformal::{
    conformal_pfaffian_ambient, conformal_pfaffian_einstein, conformal_pfaffian_routes, MAX_AMBIENT_LAPLACIANS,
};
pub use fields::NaturalTensor;
