use std::f64::consts::PI;

use pecurv_core::ambient::NaturalTensor;
use pecurv_core::geometry::{self, ManifoldModel};
use pecurv_core::integrate::*;
use pecurv_core::invariants::NaturalScalar;
use pecurv_core::Error;

fn quad(nodes: usize) -> IntegrationOptions {
    IntegrationOptions::quadrature(nodes)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn scalar_integrals_on_models() {
    let one = NaturalTensor::from_natural_scalar(NaturalScalar::Unit);
    let v = integrate_scalar(&one, &geometry::sphere(4, 1.0), &quad(16)).unwrap();
    assert!(rel(v, 8.0 * PI * PI / 3.0) < 1e-8);
    let wn = NaturalTensor::weyl_norm();
    let s2s2 = integrate_scalar(&wn, &geometry::s2_power(2), &IntegrationOptions::default()).unwrap();
    assert!(rel(s2s2, 256.0 * PI * PI / 3.0) < 1e-10);
    let s2s2_q = integrate_scalar(&wn, &geometry::s2_power(2), &quad(12)).unwrap();
    assert!(rel(s2s2_q, 256.0 * PI * PI / 3.0) < 1e-8);
    let cp2 = integrate_scalar(&wn, &geometry::cp2_fubini_study(), &IntegrationOptions::default()).unwrap();
    assert!(rel(cp2, 48.0 * PI * PI) < 1e-10);
    assert!(matches!(integrate_scalar(&one, &geometry::hyperbolic_normal_form(4), &quad(4)), Err(Error::NonCompact(_))));
}

#[test]
fn chern_gauss_bonnet_on_models() {
    let models = [geometry::sphere(4, 1.0), geometry::s2_power(2), geometry::cp2_fubini_study(), geometry::s2_power(3)];
    for m in &models {
        let r = verify_cgb(m, &IntegrationOptions::default(), 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
    }
    // by quadrature, including a non-homogeneous metric
    for m in [geometry::sphere(4, 1.0), geometry::cp2_fubini_study(), geometry::perturbed_sphere(4, 0.1).unwrap()] {
        let r = verify_cgb(&m, &quad(16), 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
    }
    assert!(matches!(verify_cgb(&geometry::sphere(3, 1.0), &quad(4), 1e-6), Err(Error::OddDimension(3))));
}

fn gbc_models() -> Vec<ManifoldModel> {
    vec![geometry::sphere(4, 1.0), geometry::s2_power(2), geometry::cp2_fubini_study(), geometry::s2_power(3), geometry::s2_power(4)]
}

#[test]
fn einstein_gauss_bonnet_both_routes() {
    for m in gbc_models() {
        for r in verify_gbc_routes(&m, &IntegrationOptions::default(), 1e-6).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }
    let bumpy = geometry::perturbed_sphere(4, 0.1).unwrap();
    assert!(matches!(verify_gbc(&bumpy, PfaffianRoute::Einstein, &quad(4), 1e-6), Err(Error::NotEinstein(_))));
}

#[test]
fn gbc_four_dimensional_terms() {
    // 16π² = 16π²/3 + (1/8)·256π²/3
    let (lhs, rhs) = gbc_sides(&geometry::s2_power(2), PfaffianRoute::Einstein, &IntegrationOptions::default()).unwrap();
    assert!(rel(lhs, 16.0 * PI * PI) < 1e-12);
    assert!(rel(rhs, lhs) < 1e-10);
    assert_eq!(gbc_coefficient(4, 2), 1.0);
    assert_eq!(gbc_coefficient(6, 2), -0.25);
    assert_eq!(gbc_coefficient(6, 3), 1.0);
}

#[test]
fn six_dimensional_terms_close() {
    let m = geometry::s2_power(3);
    let x = reference_point(m.chart.as_ref());
    let p26 = conformal_pfaffian(&m, 2, &x, PfaffianRoute::Einstein).unwrap();
    assert!((p26 + 24.0 / 25.0).abs() < 1e-10, "{p26}");
    let pf3 = NaturalScalar::PfaffianWeyl { ell: 3 }
        .evaluate(&geometry::LocalGeometry::at(m.chart.as_ref(), &x, 2).unwrap())
        .unwrap()
        .value();
    // 64π³ = (1/125)·15·64π³ − (1/4)·64π³·𝒫 + 64π³·Pf₃(W)
    let closure = 15.0 / 125.0 - 0.25 * p26 + pf3;
    assert!((closure - 1.0).abs() < 1e-10, "{closure}");
}

#[test]
fn renormalized_volumes() {
    let r4 = verify_renormalized_volume(&geometry::hyperbolic_normal_form(4), 1e-12).unwrap();
    assert!(r4.pass && (r4.lhs - 4.0 * PI * PI / 3.0).abs() < 1e-12, "{r4:?}");
    let r6 = verify_renormalized_volume(&geometry::hyperbolic_normal_form(6), 1e-12).unwrap();
    assert!(r6.pass && (r6.lhs + 8.0 * PI.powi(3) / 15.0).abs() < 1e-12, "{r6:?}");
    assert!(matches!(verify_renormalized_volume(&geometry::sphere(4, 1.0), 1e-12), Err(Error::NonNormalForm(_))));
}

#[test]
fn main_theorem_coefficients() {
    let cases = [
        (geometry::s2_power(3), NaturalScalar::WeylNorm),
        (geometry::s2_power(4), NaturalScalar::WeylNorm),
        (geometry::s2_power(4), NaturalScalar::PfaffianWeyl { ell: 3 }),
        (geometry::s2_power(3), NaturalScalar::PfaffianWeyl { ell: 3 }),
        (geometry::s2_power(3), NaturalScalar::WeylBasis { degree: 3, index: 2 }),
    ];
    for (m, s) in cases {
        let r = verify_main_theorem_coefficient(&m, s, &IntegrationOptions::default(), 1e-7).unwrap();
        assert!(r.pass, "{r:?}");
    }
    let err = verify_main_theorem_coefficient(&geometry::s2_power(3), NaturalScalar::ScalarCurvature, &IntegrationOptions::default(), 1e-7);
    assert!(matches!(err, Err(Error::Unsupported(_))));
}

#[test]
fn worked_examples_on_einstein_products() {
    for m in [geometry::s2_power(2), geometry::cp2_fubini_study()] {
        for r in verify_worked_examples(&m, &IntegrationOptions::default(), 1e-8).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }
}

#[test]
fn worked_examples_on_perturbed_sphere() {
    let m = geometry::perturbed_sphere(4, 0.1).unwrap();
    let reports = verify_worked_examples(&m, &quad(16), 1e-6).unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert!(r.pass, "{r:?}");
    }
}
