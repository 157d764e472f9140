mod common;

use std::time::Instant;

use approx::assert_relative_eq;
use itertools::Itertools;
use pecurv_core::geometry::{self, LocalGeometry, ManifoldModel};
use pecurv_core::invariants::*;
use pecurv_core::{DenseTensor, Variance};
use common::pf_oracle;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(model: &ManifoldModel, seed: u64, order: usize) -> LocalGeometry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = model.chart.sample_point(&mut rng, 0.1);
    LocalGeometry::at(model.chart.as_ref(), &p, order).unwrap()
}

#[test]
fn delta_expansion_matches_permutation_oracle() {
    for dim in 4..=6 {
        let g = DenseTensor::euclidean_metric(dim);
        for seed in 0..3 {
            let w = random_weyl(dim, 100 + seed).unwrap();
            for ell in 0..=dim / 2 {
                let fast = pf_ell(&w, &g, ell).unwrap();
                let oracle = pf_oracle(&w, ell);
                let brute = pf_ell_brute_force(&w, &g, &g, ell).unwrap();
                let scale = oracle.abs().max(1.0);
                assert!((fast - oracle).abs() <= 1e-10 * scale, "dim {dim} ell {ell}: {fast} {oracle}");
                assert!((brute - oracle).abs() <= 1e-10 * scale);
            }
        }
    }
}

#[test]
fn pf1_of_weyl_vanishes() {
    for dim in [4, 6, 8] {
        let g = DenseTensor::euclidean_metric(dim);
        let w = random_weyl(dim, 5).unwrap();
        assert!(pf_ell(&w, &g, 1).unwrap().abs() < 1e-12);
    }
}

#[test]
fn model_pfaffians() {
    let cases = [("s4", 3.0), ("s2xs2", 1.0), ("cp2", 24.0)];
    for (name, want) in cases {
        let geo = sample(&geometry::by_name(name).unwrap(), 3, 2);
        let pf = pfaffian(&geo.riemann().unwrap().values(), &geo.inverse_metric().values()).unwrap();
        assert_relative_eq!(pf, want, epsilon = 1e-9);
    }
    let geo = sample(&geometry::by_name("s2xs2").unwrap(), 4, 2);
    let pf2w = pf_ell(&geo.weyl().unwrap().values(), &geo.inverse_metric().values(), 2).unwrap();
    assert_relative_eq!(pf2w, 2.0 / 3.0, epsilon = 1e-10);
    let basis = weyl_basis(&geo.weyl().unwrap().values(), &geo.metric().values(), &geo.inverse_metric().values(), 2).unwrap();
    assert_relative_eq!(basis[0], 16.0 / 3.0, epsilon = 1e-10);
}

#[test]
fn einstein_expansion_closes_on_catalog() {
    for name in ["s4", "s2xs2", "cp2", "s2^3"] {
        let model = geometry::by_name(name).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = model.chart.sample_point(&mut rng, 0.1);
        let r = einstein_pfaffian_expansion(&model, &p, 1e-9);
        assert!(r.pass, "{r:?}");
    }
    let pert = geometry::perturbed_sphere(4, 0.1).unwrap();
    let r = einstein_pfaffian_expansion(&pert, &[0.5, 1.0, 1.5, 0.3], 1e-9);
    assert!(!r.pass);
}

#[test]
fn quartic_pfaffian_in_eight_dimensions_is_fast() {
    let w = random_weyl(8, 1).unwrap();
    let g = DenseTensor::euclidean_metric(8);
    let start = Instant::now();
    let pf = pf_ell(&w, &g, 4).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
    let basis = weyl_basis(&w, &g, &g, 4).unwrap();
    let rhs = pfaffian_from_basis(&basis, 4).unwrap();
    assert!((pf - rhs).abs() <= 1e-10 * pf.abs().max(1.0));
}

#[test]
fn invariants_scale_with_their_weight() {
    let base = geometry::perturbed_sphere(6, 0.2).unwrap();
    let p = [0.7, 1.3, 2.0, 0.9, 1.6, 0.4];
    let invariants = [
        NaturalScalar::ScalarCurvature,
        NaturalScalar::WeylNorm,
        NaturalScalar::WeylBasis { degree: 3, index: 1 },
        NaturalScalar::WeylBasis { degree: 3, index: 2 },
        NaturalScalar::WeylBasis { degree: 4, index: 6 },
        NaturalScalar::PfaffianWeyl { ell: 3 },
        NaturalScalar::PfaffianRiemann { ell: 2 },
        NaturalScalar::PfaffianRiemann { ell: 3 },
    ];
    let g1 = LocalGeometry::at(base.chart.as_ref(), &p, 2).unwrap();
    for c in [2.0, 1.0 / 3.0] {
        let scaled = geometry::scaled(&base, c);
        let gc = LocalGeometry::at(scaled.chart.as_ref(), &p, 2).unwrap();
        for inv in invariants {
            let v1 = inv.value_at(&g1).unwrap();
            let vc = inv.value_at(&gc).unwrap();
            let want = c.powi(v1.weight) * v1.value;
            assert!((vc.value - want).abs() <= 1e-9 * want.abs().max(1e-12), "{inv} c={c}: {} vs {want}", vc.value);
        }
    }
}

#[test]
fn iterated_operator_on_product_of_spheres() {
    // homogeneous: Δ|W|² = 0, so I₁ reduces to the constant coefficient
    let model = geometry::s2_power(3);
    let geo = sample(&model, 2, 4);
    let wn = NaturalScalar::WeylNorm.evaluate(&geo).unwrap();
    let i1 = i_ell_operator(&wn, 2, 1, &model, &geo).unwrap();
    assert_relative_eq!(i1.value(), -0.8 * wn.value(), epsilon = 1e-9);
    assert_relative_eq!(wn.value(), 48.0 / 5.0, epsilon = 1e-9);
}

#[test]
fn divergence_scalars_vanish_on_einstein_models() {
    // D/(n−4) through the Cotton tensor
    for name in ["s2xs2", "cp2", "s2^3"] {
        let geo = sample(&geometry::by_name(name).unwrap(), 6, 4);
        assert!(weyl_cotton_divergence(&geo).unwrap().value().abs() < 1e-9, "{name}");
        let t = weyl_square_tensor(&geo).unwrap();
        assert!(double_divergence(&geo, &t, -2).unwrap().value().abs() < 1e-9, "{name}");
    }
}

#[test]
fn divergence_route_reproduces_cotton_form() {
    // D = (n−4)∇^a(W_{abcd}C^{cdb}) on non-Einstein metrics
    for n in [5usize, 6] {
        let m = geometry::perturbed_sphere(n, 0.3).unwrap();
        let p: Vec<f64> = (0..n).map(|i| 0.6 + 0.25 * i as f64).collect();
        let geo = LocalGeometry::at(m.chart.as_ref(), &p, 4).unwrap();
        let d = double_divergence(&geo, &weyl_square_tensor(&geo).unwrap(), -2).unwrap().value();
        let wc = weyl_cotton_divergence(&geo).unwrap().value();
        assert!(wc.abs() > 1e-4);
        assert_relative_eq!(d, (n as f64 - 4.0) * wc, max_relative = 1e-10);
    }
}

#[test]
fn cubic_weyl_tensors_are_symmetric_with_known_traces() {
    let geo = sample(&geometry::perturbed_sphere(5, 0.2).unwrap(), 1, 2);
    let (t1, t2) = cubic_weyl_tensors(&geo).unwrap();
    let (t1, t2) = (t1.values(), t2.values());
    assert!(t1.max_abs_diff(&t1.permute_slots(&[1, 0]).unwrap()) < 1e-12);
    assert!(t2.max_abs_diff(&t2.permute_slots(&[1, 0]).unwrap()) < 1e-12);
    let gi = geo.inverse_metric().values();
    let tr = |t: &DenseTensor| -> f64 { (0..5).cartesian_product(0..5).map(|(a, b)| gi.get(&[a, b]) * t.get(&[a, b])).sum() };
    let w = geo.weyl().unwrap().values();
    let w31 = weyl_contraction(&w, &geo.metric().values(), &gi, CUBIC_BASIS[0]).unwrap();
    assert!(tr(&t1).abs() < 1e-12);
    assert_relative_eq!(tr(&t2), w31, max_relative = 1e-10);
}

fn arb_weyl() -> impl Strategy<Value = (usize, u64)> {
    (4usize..=6, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prop_pfaffian_basis_identities((dim, seed) in arb_weyl()) {
        let w = random_weyl(dim, seed).unwrap();
        let g = DenseTensor::euclidean_metric(dim);
        for ell in 2..=4 {
            let r = low_order_pfaffian_identity(&w, &g, &g, ell, 1e-10);
            prop_assert!(r.pass, "{:?}", r);
        }
        let (l, r) = cubic_rearrangement(&w, &g, &g).unwrap();
        prop_assert!((l - r).abs() <= 1e-11 * l.abs().max(1.0));
        let (l, r) = quartic_rearrangement(&w, &g, &g).unwrap();
        prop_assert!((l - r).abs() <= 1e-11 * l.abs().max(1.0));
    }

    #[test]
    fn prop_projection_idempotent((dim, seed) in arb_weyl()) {
        let w = random_weyl(dim, seed).unwrap();
        let g = DenseTensor::euclidean_metric(dim);
        prop_assert!(symmetry_residuals(&w, &g).unwrap().max() < 1e-12);
        let again = weyl_project(&w, &g, &g).unwrap();
        prop_assert!(again.max_abs_diff(&w) < 1e-13);
    }

    #[test]
    fn prop_pfaffian_is_homogeneous((dim, seed) in arb_weyl(), s in 0.1f64..3.0) {
        let w = random_weyl(dim, seed).unwrap();
        let g = DenseTensor::euclidean_metric(dim);
        for ell in 0..=dim / 2 {
            let a = pf_ell(&w.scaled(s), &g, ell).unwrap();
            let b = s.powi(ell as i32) * pf_ell(&w, &g, ell).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}

#[test]
fn general_metric_pfaffian_matches_orthonormal_frame() {
    // Pf_ℓ is frame independent: compare a metric g with the Euclidean pullback
    let n = 5;
    let w = random_weyl(n, 8).unwrap();
    let a = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |i| if i[0] == i[1] { 1.0 + 0.3 * i[0] as f64 } else if i[0] < i[1] { 0.2 } else { 0.0 });
    // g = AᵀA, and W pulled back by A: W'_{abcd} = A_{ia}A_{jb}A_{kc}A_{ld}W_{ijkl}
    let g = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |i| (0..n).map(|k| a.get(&[k, i[0]]) * a.get(&[k, i[1]])).sum());
    let gi = g.inverse().unwrap();
    let wp = DenseTensor::from_fn(n, vec![Variance::Lower; 4], |idx| {
        let mut s = 0.0;
        for (i, j, k, l) in (0..n).cartesian_product(0..n).cartesian_product(0..n).cartesian_product(0..n).map(|(((i, j), k), l)| (i, j, k, l)) {
            s += a.get(&[i, idx[0]]) * a.get(&[j, idx[1]]) * a.get(&[k, idx[2]]) * a.get(&[l, idx[3]]) * w.get(&[i, j, k, l]);
        }
        s
    });
    let e = DenseTensor::euclidean_metric(n);
    for ell in 1..=2 {
        let x = pf_ell(&wp, &gi, ell).unwrap();
        let y = pf_ell(&w, &e, ell).unwrap();
        assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        let z = pf_ell_brute_force(&wp, &g, &gi, ell).unwrap();
        assert!((z - y).abs() <= 1e-10 * y.abs().max(1.0));
    }
}
