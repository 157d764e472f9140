//! Charts, model manifolds and jet-exact local Riemannian geometry.

mod chart;
mod local;
mod model;

pub use chart::{
    Chart, CoordinateRange, FlatChart, FubiniStudyChart, HyperbolicChart, PerturbedSphereChart, ProductChart,
    ScaledChart, SphereChart,
};
pub use local::{jet_inverse, LocalGeometry, MetricJet};
pub use model::{
    by_name, cp2_fubini_study, flat, hyperbolic_normal_form, perturbed_sphere, product_of_spheres, s2_power, scaled,
    sphere, unit_sphere_volume, ManifoldModel, ManifoldSpec, CATALOG_NAMES, DEFAULT_PERTURBATION,
};
