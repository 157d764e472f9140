//! Fixtures shared by the benchmarks.

use pecurv_core::ambient::{build_ambient, AmbientChart, AmbientPoint};
use pecurv_core::geometry;
use pecurv_core::invariants::random_weyl;
use pecurv_core::DenseTensor;

/// A random algebraic Weyl tensor in dimension `dim` with the Euclidean metric.
pub fn weyl_fixture(dim: usize) -> (DenseTensor, DenseTensor) {
    (random_weyl(dim, 7).expect("dim >= 4"), DenseTensor::euclidean_metric(dim))
}

/// Ambient chart over `(S²)^m` and a point above the base.
pub fn ambient_fixture(m: usize) -> (AmbientChart, AmbientPoint) {
    let chart = build_ambient(&geometry::s2_power(m)).expect("Einstein base");
    let x: Vec<f64> = (0..2 * m).map(|i| if i % 2 == 0 { 0.9 + 0.1 * i as f64 } else { 1.3 }).collect();
    (chart, AmbientPoint::new(1.2, &x, 0.05))
}
