//! One PASS/FAIL line per acceptance criterion. Runs as a plain binary so the
//! lines are always printed; exits nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use itertools::Itertools;
use pecurv_core::ambient::*;
use pecurv_core::geometry::{self, LocalGeometry, ManifoldModel};
use pecurv_core::integrate::*;
use pecurv_core::invariants::*;
use pecurv_core::tensor::KroneckerDelta;
use pecurv_core::{CheckReport, DenseTensor, Jet, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    summary: String,
}

impl Outcome {
    fn from_reports(reports: &[CheckReport], extra: &str) -> Self {
        let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
        let worst = reports.iter().map(|r| r.abs_err.min(r.rel_err)).fold(0.0, f64::max);
        let mut summary = format!("{} checks, worst err {worst:.2e}", reports.len());
        if !extra.is_empty() {
            summary.push_str(&format!("; {extra}"));
        }
        for r in failed.iter().take(3) {
            summary.push_str(&format!("; failed {} ({}) lhs={} rhs={}", r.id, r.detail.clone().unwrap_or_default(), r.lhs, r.rhs));
        }
        Outcome { pass: failed.is_empty(), summary }
    }
}

fn value_check(id: &str, got: f64, want: f64, tol: f64) -> CheckReport {
    CheckReport::compare(id, "reference value", got, want, tol)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in 2..=8 {
        for k in 2..=n {
            let big = KroneckerDelta::new(k, n);
            let small = KroneckerDelta::new(k - 1, n);
            let factor = (n - k + 1) as f64 / k as f64;
            let mut check = |u: &[usize], l: &[usize]| {
                worst = worst.max((big.trace_last(u, l) - factor * small.entry(u, l)).abs());
                count += 1;
            };
            // both sides are antisymmetric in the upper indices, so sorted distinct
            // upper tuples with every lower permutation cover all nonzero entries
            for u in (0..n).combinations(k - 1) {
                for l in u.iter().copied().permutations(k - 1) {
                    check(&u, &l);
                }
                // entries that must vanish: repeated upper index, lower index outside
                if k >= 3 {
                    let mut rep = u.clone();
                    rep[1] = rep[0];
                    check(&rep, &u);
                }
                if let Some(out) = (0..n).find(|c| !u.contains(c)) {
                    let mut l = u.clone();
                    l[0] = out;
                    check(&u, &l);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst <= 1e-12 && secs < 10.0,
        summary: format!("{count} entries, max abs err {worst:.2e}, {secs:.2}s"),
    })
}

fn criterion_2() -> Result<Outcome> {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut oracle_worst = 0.0f64;
    let mut pf4_dim8_max = 0.0f64;
    for dim in [4usize, 5, 6, 8] {
        let g = DenseTensor::euclidean_metric(dim);
        for seed in 0..100 {
            let w = random_weyl(dim, 1000 * dim as u64 + seed)?;
            for ell in 2..=4 {
                let t = Instant::now();
                reports.push(low_order_pfaffian_identity(&w, &g, &g, ell, 1e-10));
                if dim == 8 && ell == 4 {
                    pf4_dim8_max = pf4_dim8_max.max(t.elapsed().as_secs_f64());
                }
                if dim <= 6 && 2 * ell <= dim {
                    let fast = pf_ell(&w, &g, ell)?;
                    let oracle = common::pf_oracle(&w, ell);
                    oracle_worst = oracle_worst.max((fast - oracle).abs() / oracle.abs().max(1e-300));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut out = Outcome::from_reports(
        &reports,
        &format!("oracle rel err {oracle_worst:.2e}, Pf4 dim 8 max {pf4_dim8_max:.3}s/point, {secs:.1}s"),
    );
    out.pass &= oracle_worst <= 1e-10 && pf4_dim8_max < 1.0 && secs < 300.0;
    Ok(out)
}

fn criterion_3() -> Result<Outcome> {
    let cases = [
        (geometry::sphere(4, 1.0), 8.0 * PI * PI),
        (geometry::s2_power(2), 16.0 * PI * PI),
        (geometry::cp2_fubini_study(), 12.0 * PI * PI),
        (geometry::s2_power(3), 8.0 * (2.0 * PI).powi(3)),
    ];
    let mut reports = Vec::new();
    for (m, want) in cases {
        let r = verify_cgb(&m, &IntegrationOptions::default(), 1e-6)?;
        reports.push(value_check(&format!("cgb-value-{}", m.name), r.lhs, want, 1e-6));
        reports.push(r);
    }
    // a non-homogeneous metric through quadrature
    reports.push(verify_cgb(&geometry::perturbed_sphere(4, 0.1)?, &IntegrationOptions::quadrature(16), 1e-6)?);
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_4() -> Result<Outcome> {
    let mut reports = Vec::new();
    for m in [geometry::sphere(4, 1.0), geometry::s2_power(2), geometry::cp2_fubini_study(), geometry::s2_power(3), geometry::s2_power(4)] {
        reports.extend(verify_gbc_routes(&m, &IntegrationOptions::default(), 1e-6)?);
    }
    let wn = NaturalTensor::weyl_norm();
    let s2s2 = integrate_scalar(&wn, &geometry::s2_power(2), &IntegrationOptions::quadrature(16))?;
    reports.push(value_check("weyl-norm-s2xs2", s2s2, 256.0 * PI * PI / 3.0, 1e-6));
    let cp2 = integrate_scalar(&wn, &geometry::cp2_fubini_study(), &IntegrationOptions::quadrature(16))?;
    reports.push(value_check("weyl-norm-cp2", cp2, 48.0 * PI * PI, 1e-6));
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_5() -> Result<Outcome> {
    let u = |x: &[Jet]| &x[0].sin() * &x[1].cos() + x[2].scale(0.3);
    let mut reports = Vec::new();
    for m in [geometry::sphere(4, 1.0), geometry::s2_power(2), geometry::cp2_fubini_study(), geometry::s2_power(3)] {
        let chart = build_ambient(&m)?;
        reports.push(ambient_ricci_flatness(&chart, 20, 2024, 1e-8));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for w in [-4.0, -1.5, 0.0, 2.0] {
            let p = chart.sample_point(&mut rng);
            reports.push(ambient_curvature(&chart, &p, 1e-9));
            reports.push(ambient_christoffels(&chart, &p, 1e-10));
            reports.push(ambient_laplacian_homogeneous(&chart, &u, w, &p, 1e-8));
        }
    }
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_6() -> Result<Outcome> {
    let mut reports = Vec::new();
    let models = [
        geometry::sphere(4, 1.0),
        geometry::s2_power(2),
        geometry::cp2_fubini_study(),
        geometry::sphere(6, 1.0),
        geometry::s2_power(3),
        geometry::sphere(8, 1.0),
        geometry::s2_power(4),
    ];
    let base_x = [0.9, 1.2, 0.8, 2.0, 1.1, 0.3, 0.7, 1.4];
    for m in &models {
        let chart = build_ambient(m)?;
        let n = m.dim();
        let x = &base_x[..n];
        for ell in 2..=n / 2 {
            reports.push(conformal_pfaffian_routes(&chart, ell, x, 1e-7).with_detail(m.name.clone()));
        }
        if n == 4 {
            let geo = LocalGeometry::at(m.chart.as_ref(), x, 2)?;
            let wn = NaturalScalar::WeylNorm.evaluate(&geo)?.value();
            let amb = conformal_pfaffian_ambient(&chart, 2, x)?;
            reports.push(value_check(&format!("p24-{}", m.name), amb, wn / 8.0, 1e-12));
        }
    }
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_7() -> Result<Outcome> {
    let mut reports = Vec::new();
    let bumpy = geometry::perturbed_sphere(4, 0.1)?;
    let opts = IntegrationOptions::quadrature(16);
    let parts = integrate_local(&bumpy, 4, 2, &opts, |geo| {
        let wn = NaturalScalar::WeylNorm.evaluate(geo)?;
        let lap = geo.scalar_laplacian(&wn)?.value();
        Ok(vec![lap, lap.abs()])
    })?;
    reports.push(CheckReport::compare_scaled("integral-laplacian-weyl-norm", "divergence integrates to zero", parts[0], 0.0, parts[1], 1e-6));

    let s2_4 = geometry::s2_power(4);
    let x = [0.9, 1.2, 0.8, 2.0, 1.1, 0.3, 0.7, 1.4];
    let geo = LocalGeometry::at(s2_4.chart.as_ref(), &x, 4)?;
    let (t1, t2) = cubic_weyl_tensors(&geo)?;
    for (i, t) in [t1, t2].iter().enumerate() {
        let d = double_divergence(&geo, t, -4)?.value();
        reports.push(CheckReport::compare_scaled(format!("weight-8-scalar-{}", i + 1), "vanishes on (S2)^4", d, 0.0, 1.0, 1e-8));
    }

    for m in [geometry::sphere(4, 1.0), geometry::s2_power(2), geometry::cp2_fubini_study(), geometry::s2_power(3)] {
        let p = m.chart.sample_point(&mut ChaCha8Rng::seed_from_u64(3), 0.1);
        let geo = LocalGeometry::at(m.chart.as_ref(), &p, 4)?;
        let d = weyl_cotton_divergence(&geo)?.value();
        reports.push(CheckReport::compare_scaled(format!("cotton-divergence-{}", m.name), "vanishes on Einstein models", d, 0.0, 1.0, 1e-8));
    }
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_8() -> Result<Outcome> {
    let mut reports = Vec::new();
    for (n, want) in [(4, 4.0 * PI * PI / 3.0), (6, -8.0 * PI.powi(3) / 15.0)] {
        let m = geometry::hyperbolic_normal_form(n);
        let v = renormalized_volume(&NormalFormVolume::from_model(&m)?)?;
        reports.push(value_check(&format!("rvol-value-{n}"), v, want, 1e-12));
        reports.push(verify_renormalized_volume(&m, 1e-12)?);
    }
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_9() -> Result<Outcome> {
    let cases: [(ManifoldModel, NaturalScalar); 3] = [
        (geometry::s2_power(3), NaturalScalar::WeylNorm),
        (geometry::s2_power(4), NaturalScalar::WeylNorm),
        (geometry::s2_power(4), NaturalScalar::PfaffianWeyl { ell: 3 }),
    ];
    let mut reports = Vec::new();
    for (m, s) in cases {
        reports.push(verify_main_theorem_coefficient(&m, s, &IntegrationOptions::default(), 1e-7)?.with_detail(format!("{s} on {}", m.name)));
    }
    Ok(Outcome::from_reports(&reports, ""))
}

fn criterion_10() -> Result<Outcome> {
    let m = geometry::s2_power(2);
    let reports = verify_worked_examples(&m, &IntegrationOptions::default(), 1e-8)?;
    let ids = reports.iter().map(|r| r.id.as_str()).join(",");
    let mut out = Outcome::from_reports(&reports, &ids);
    out.pass &= reports.iter().any(|r| r.id == "delta-weyl");
    // ΔW identity at a second, generic point
    let x = [0.7, 2.1, 1.9, 4.0];
    let (res, scale) = weyl_laplacian_residual(&m, &x)?;
    out.pass &= res <= 1e-8 * scale.max(1.0);
    Ok(out)
}

fn main() {
    let criteria: [fn() -> Result<Outcome>; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let start = Instant::now();
    let mut all = true;
    for (i, f) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f().unwrap_or_else(|e| Outcome { pass: false, summary: format!("error: {e}") });
        all &= out.pass;
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {tag} ({:.1}s) {}", i + 1, t.elapsed().as_secs_f64(), out.summary);
    }
    println!("acceptance total {:.1}s", start.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
