use pecurv_core::ambient::{self, build_ambient, AmbientChart};
use pecurv_core::geometry::{self, LocalGeometry, ManifoldModel};
use pecurv_core::integrate::{self, reference_point, IntegrationOptions};
use pecurv_core::invariants::{self, NaturalScalar};
use pecurv_core::tensor::KroneckerDelta;
use pecurv_core::{CheckReport, DenseTensor, Error, Jet, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;

/// A named group of checks.
pub struct Suite {
    pub name: &'static str,
    pub anchor: &'static str,
    pub default_manifold: Option<&'static str>,
    pub default_tol: f64,
    /// Highest metric jet order the suite needs for this configuration.
    pub jet_order: fn(&RunConfig) -> std::result::Result<usize, String>,
    pub run: fn(&Suite, &RunConfig) -> Result<Vec<CheckReport>>,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "kronecker",
        anchor: "generalized Kronecker delta trace recursion",
        default_manifold: None,
        default_tol: 1e-12,
        jet_order: |_| Ok(0),
        run: run_kronecker,
    },
    Suite {
        name: "pfaffian-identities",
        anchor: "Pfaffians of random Weyl tensors in the contraction basis",
        default_manifold: None,
        default_tol: 1e-10,
        jet_order: |_| Ok(0),
        run: run_pfaffian_identities,
    },
    Suite {
        name: "cgb",
        anchor: "Chern-Gauss-Bonnet: the Pfaffian integrates to (2π)^{n/2}χ",
        default_manifold: Some("s4"),
        default_tol: 1e-6,
        jet_order: |_| Ok(2),
        run: run_cgb,
    },
    Suite {
        name: "gbc",
        anchor: "Einstein Gauss-Bonnet formula with conformal Pfaffian terms",
        default_manifold: Some("s2xs2"),
        default_tol: 1e-6,
        jet_order: ambient_pfaffian_order,
        run: run_gbc,
    },
    Suite {
        name: "ambient-ricci",
        anchor: "ambient metric over an Einstein base is Ricci-flat",
        default_manifold: Some("s4"),
        default_tol: 1e-8,
        jet_order: |_| Ok(2),
        run: run_ambient_ricci,
    },
    Suite {
        name: "ambient-curvature",
        anchor: "ambient curvature is the lifted Weyl tensor",
        default_manifold: Some("s4"),
        default_tol: 1e-9,
        jet_order: |_| Ok(2),
        run: run_ambient_curvature,
    },
    Suite {
        name: "ambient-christoffel",
        anchor: "ambient Christoffel symbols in closed form",
        default_manifold: Some("s4"),
        default_tol: 1e-10,
        jet_order: |_| Ok(1),
        run: run_ambient_christoffel,
    },
    Suite {
        name: "ambient-laplacian",
        anchor: "ambient Laplacian of homogeneous extensions",
        default_manifold: Some("s4"),
        default_tol: 1e-8,
        jet_order: |_| Ok(2),
        run: run_ambient_laplacian,
    },
    Suite {
        name: "conformal-pfaffian",
        anchor: "ambient and Einstein routes to the conformal Pfaffian invariants agree",
        default_manifold: Some("s2^3"),
        default_tol: 1e-7,
        jet_order: ambient_pfaffian_order,
        run: run_conformal_pfaffian,
    },
    Suite {
        name: "divergence",
        anchor: "divergences integrate to zero and the Cotton divergence vanishes on Einstein models",
        default_manifold: Some("perturbed-s4"),
        default_tol: 1e-6,
        jet_order: |_| Ok(4),
        run: run_divergence,
    },
    Suite {
        name: "rvol",
        anchor: "renormalized volume as the finite part of the volume expansion",
        default_manifold: None,
        default_tol: 1e-12,
        jet_order: |_| Ok(0),
        run: run_rvol,
    },
    Suite {
        name: "iterated-laplacian",
        anchor: "iterated ambient Laplacian integrates to the closed-form multiple",
        default_manifold: Some("s2^3"),
        default_tol: 1e-7,
        jet_order: iterated_laplacian_order,
        run: run_iterated_laplacian,
    },
    Suite {
        name: "worked-examples",
        anchor: "integration by parts closures and the Laplacian of the Weyl tensor",
        default_manifold: Some("s2xs2"),
        default_tol: 1e-8,
        jet_order: |_| Ok(4),
        run: run_worked_examples,
    },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

impl Suite {
    pub fn tol(&self, cfg: &RunConfig) -> f64 {
        cfg.tol.unwrap_or(self.default_tol)
    }

    fn manifold_name<'a>(&self, cfg: &'a RunConfig) -> Option<&'a str> {
        cfg.manifold.as_deref().or(self.default_manifold)
    }

    fn model(&self, cfg: &RunConfig) -> Result<ManifoldModel> {
        match self.manifold_name(cfg) {
            Some(name) => geometry::by_name(name),
            None => Err(Error::Unsupported(format!("suite `{}` takes no manifold", self.name))),
        }
    }
}

fn model_dim(cfg: &RunConfig, fallback: &str) -> std::result::Result<usize, String> {
    let name = cfg.manifold.as_deref().unwrap_or(fallback);
    geometry::by_name(name).map(|m| m.dim()).map_err(|e| e.to_string())
}

// Ambient Pf₂ needs the most Laplacians: n/2 − 2 of them, two jet orders each.
fn ambient_pfaffian_order(cfg: &RunConfig) -> std::result::Result<usize, String> {
    let n = model_dim(cfg, "s2xs2")?;
    Ok(2 + 2 * (n / 2).saturating_sub(2))
}

fn iterated_laplacian_order(cfg: &RunConfig) -> std::result::Result<usize, String> {
    let n = model_dim(cfg, "s2^3")?;
    let scalar: NaturalScalar = cfg.invariant.as_deref().unwrap_or("weyl-norm").parse().map_err(|e: Error| e.to_string())?;
    let k = (-scalar.weight() / 2) as usize;
    Ok(scalar.derivative_order() + 2 * (n / 2).saturating_sub(k))
}

fn ambient_chart(suite: &Suite, cfg: &RunConfig) -> Result<AmbientChart> {
    build_ambient(&suite.model(cfg)?)
}

fn ambient_points(chart: &AmbientChart, count: usize, seed: u64) -> Vec<ambient::AmbientPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| chart.sample_point(&mut rng)).collect()
}

fn tagged(reports: Vec<CheckReport>, tag: &str) -> Vec<CheckReport> {
    reports
        .into_iter()
        .map(|r| match &r.detail {
            Some(_) => r,
            None => r.with_detail(tag.to_string()),
        })
        .collect()
}

/// Largest dimension the exhaustive Kronecker check accepts.
const KRONECKER_MAX_DIM: usize = 9;

fn run_kronecker(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let dim = cfg.dim.unwrap_or(8);
    if !(2..=KRONECKER_MAX_DIM).contains(&dim) {
        return Err(Error::Unsupported(format!("kronecker suite covers dimensions 2..={KRONECKER_MAX_DIM}")));
    }
    let mut out = Vec::new();
    for n in 2..=dim {
        for k in 2..=n {
            let res = KroneckerDelta::new(k, n).trace_recursion_residual();
            out.push(
                CheckReport::compare_scaled(format!("kronecker-{k}-{n}"), s.anchor, res, 0.0, 1.0, s.tol(cfg))
                    .with_detail(format!("k={k} n={n}")),
            );
        }
    }
    Ok(out)
}

fn run_pfaffian_identities(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let dim = cfg.dim.unwrap_or(6);
    let samples = cfg.samples.unwrap_or(100);
    let g = DenseTensor::euclidean_metric(dim);
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let seed = cfg.seed().wrapping_add(i as u64);
        let w = invariants::random_weyl(dim, seed)?;
        // one record per sample: the worst of Pf₂, Pf₃, Pf₄
        let worst = (2..=4)
            .map(|ell| invariants::low_order_pfaffian_identity(&w, &g, &g, ell, s.tol(cfg)))
            .max_by(|a, b| badness(a).total_cmp(&badness(b)))
            .expect("nonempty");
        out.push(worst.with_detail(format!("sample {i}, seed {seed}")));
    }
    Ok(out)
}

fn badness(r: &CheckReport) -> f64 {
    if r.pass {
        r.abs_err.min(r.rel_err)
    } else {
        f64::INFINITY
    }
}

fn run_cgb(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    Ok(tagged(vec![integrate::verify_cgb(&m, &IntegrationOptions::default(), s.tol(cfg))?], &m.name))
}

fn run_gbc(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    Ok(tagged(integrate::verify_gbc_routes(&m, &IntegrationOptions::default(), s.tol(cfg))?, &m.name))
}

fn run_ambient_ricci(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chart = ambient_chart(s, cfg)?;
    Ok(vec![ambient::ambient_ricci_flatness(&chart, cfg.samples.unwrap_or(20), cfg.seed(), s.tol(cfg))])
}

fn run_ambient_curvature(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chart = ambient_chart(s, cfg)?;
    let pts = ambient_points(&chart, cfg.samples.unwrap_or(5), cfg.seed());
    Ok(tagged(pts.iter().map(|p| ambient::ambient_curvature(&chart, p, s.tol(cfg))).collect(), &chart.base().name))
}

fn run_ambient_christoffel(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chart = ambient_chart(s, cfg)?;
    let pts = ambient_points(&chart, cfg.samples.unwrap_or(5), cfg.seed());
    Ok(tagged(pts.iter().map(|p| ambient::ambient_christoffels(&chart, p, s.tol(cfg))).collect(), &chart.base().name))
}

fn run_ambient_laplacian(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let chart = ambient_chart(s, cfg)?;
    let u = |x: &[Jet]| &x[0].sin() * &x[1].cos() + x[2].scale(0.3);
    let weights = [-4.0, -1.5, 0.0, 2.0];
    let pts = ambient_points(&chart, cfg.samples.unwrap_or(weights.len()), cfg.seed());
    Ok(pts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let w = weights[i % weights.len()];
            ambient::ambient_laplacian_homogeneous(&chart, &u, w, p, s.tol(cfg))
                .with_detail(format!("{} w={w}", chart.base().name))
        })
        .collect())
}

fn run_conformal_pfaffian(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    let chart = build_ambient(&m)?;
    let n = m.dim();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let x = reference_point(m.chart.as_ref());
    Ok(tagged((2..=n / 2).map(|ell| ambient::conformal_pfaffian_routes(&chart, ell, &x, s.tol(cfg))).collect(), &m.name))
}

fn run_divergence(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    let tol = s.tol(cfg);
    let parts = integrate::integrate_local(&m, 4, 2, &IntegrationOptions::default(), |geo| {
        let wn = NaturalScalar::WeylNorm.evaluate(geo)?;
        let lap = geo.scalar_laplacian(&wn)?.value();
        Ok(vec![lap, lap.abs()])
    })?;
    let mut out = vec![CheckReport::compare_scaled(
        "integral-laplacian-weyl-norm",
        "the Laplacian of the Weyl norm integrates to zero",
        parts[0],
        0.0,
        parts[1],
        tol,
    )
    .with_detail(m.name.clone())];
    if m.einstein_lambda.is_some() {
        let p = m.chart.sample_point(&mut ChaCha8Rng::seed_from_u64(cfg.seed()), 0.1);
        let geo = LocalGeometry::at(m.chart.as_ref(), &p, 4)?;
        let d = invariants::weyl_cotton_divergence(&geo)?.value();
        out.push(
            CheckReport::compare_scaled("cotton-divergence", "the Cotton divergence vanishes on Einstein models", d, 0.0, 1.0, tol)
                .with_detail(m.name.clone()),
        );
    }
    Ok(out)
}

fn run_rvol(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = match &cfg.manifold {
        Some(name) => geometry::by_name(name)?,
        None => geometry::hyperbolic_normal_form(cfg.n.unwrap_or(4)),
    };
    Ok(vec![integrate::verify_renormalized_volume(&m, s.tol(cfg))?.with_detail(m.name.clone())])
}

fn run_iterated_laplacian(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    let scalar: NaturalScalar = cfg.invariant.as_deref().unwrap_or("weyl-norm").parse()?;
    let r = integrate::verify_main_theorem_coefficient(&m, scalar, &IntegrationOptions::default(), s.tol(cfg))?;
    Ok(vec![r.with_detail(format!("{scalar} on {}", m.name))])
}

fn run_worked_examples(s: &Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let m = s.model(cfg)?;
    Ok(tagged(integrate::verify_worked_examples(&m, &IntegrationOptions::default(), s.tol(cfg))?, &m.name))
}
