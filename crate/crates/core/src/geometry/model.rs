use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::chart::{
    Chart, FlatChart, FubiniStudyChart, HyperbolicChart, PerturbedSphereChart, ProductChart, ScaledChart,
    SphereChart,
};
use crate::error::{Error, Result};

/// A named chart plus the global data the verification suites need.
#[derive(Clone)]
pub struct ManifoldModel {
    pub name: String,
    pub chart: Arc<dyn Chart>,
    /// `λ` with `Ric = 2λ(n − 1)g`, when the metric is Einstein.
    pub einstein_lambda: Option<f64>,
    pub euler_characteristic: Option<i64>,
    pub exact_volume: Option<f64>,
    /// Isometry group acts transitively, so natural scalars are constant.
    pub homogeneous: bool,
    pub compact: bool,
}

impl fmt::Debug for ManifoldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldModel")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("einstein_lambda", &self.einstein_lambda)
            .field("euler_characteristic", &self.euler_characteristic)
            .field("exact_volume", &self.exact_volume)
            .finish()
    }
}

/// Volume of the round unit `S^n`: `2π^{(n+1)/2}/Γ((n+1)/2)`.
pub fn unit_sphere_volume(n: usize) -> f64 {
    // recursion Vol(S^n) = 2π/(n−1) Vol(S^{n−2})
    match n {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 1.0) * unit_sphere_volume(n - 2),
    }
}

impl ManifoldModel {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `(positive, negative)` counts; every catalog metric is Riemannian.
    pub fn signature(&self) -> (usize, usize) {
        (self.dim(), 0)
    }

    pub fn is_einstein(&self) -> bool {
        self.einstein_lambda.is_some()
    }

    /// `λ`, or an error naming the model.
    pub fn require_einstein(&self) -> Result<f64> {
        self.einstein_lambda.ok_or_else(|| Error::NotEinstein(self.name.clone()))
    }

    /// `J = nλ` on an Einstein model.
    pub fn schouten_trace(&self) -> Result<f64> {
        Ok(self.dim() as f64 * self.require_einstein()?)
    }
}

pub fn sphere(n: usize, radius: f64) -> ManifoldModel {
    let einstein = if n >= 2 { Some(1.0 / (2.0 * radius * radius)) } else { None };
    ManifoldModel {
        name: if radius == 1.0 { format!("s{n}") } else { format!("s{n}(r={radius})") },
        chart: Arc::new(SphereChart { dim: n, radius }),
        einstein_lambda: einstein,
        euler_characteristic: Some(if n.is_multiple_of(2) { 2 } else { 0 }),
        exact_volume: Some(unit_sphere_volume(n) * radius.powi(n as i32)),
        homogeneous: true,
        compact: true,
    }
}

/// Product of round spheres given as `(dimension, radius)` factors.
pub fn product_of_spheres(factors: &[(usize, f64)]) -> Result<ManifoldModel> {
    if factors.is_empty() {
        return Err(Error::Unsupported("empty product".into()));
    }
    let n: usize = factors.iter().map(|f| f.0).sum();
    // each factor has Ric = (d − 1)/r² g
    let ric: Vec<f64> = factors.iter().map(|&(d, r)| (d as f64 - 1.0) / (r * r)).collect();
    let einstein = ric.iter().all(|&c| (c - ric[0]).abs() <= 1e-14 * ric[0].abs().max(1.0));
    let lambda = if einstein && n >= 2 { Some(ric[0] / (2.0 * (n as f64 - 1.0))) } else { None };
    let spheres: Vec<ManifoldModel> = factors.iter().map(|&(d, r)| sphere(d, r)).collect();
    let name = if factors.iter().all(|f| *f == factors[0]) && factors.len() > 2 {
        format!("{}^{}", spheres[0].name, factors.len())
    } else {
        spheres.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join("x")
    };
    Ok(ManifoldModel {
        name,
        chart: Arc::new(ProductChart { factors: spheres.iter().map(|s| s.chart.clone()).collect() }),
        einstein_lambda: lambda,
        euler_characteristic: Some(spheres.iter().map(|s| s.euler_characteristic.unwrap()).product()),
        exact_volume: Some(spheres.iter().map(|s| s.exact_volume.unwrap()).product()),
        homogeneous: true,
        compact: true,
    })
}

/// `m` unit two-spheres.
pub fn s2_power(m: usize) -> ManifoldModel {
    product_of_spheres(&vec![(2, 1.0); m]).expect("nonempty product")
}

/// Fubini–Study `CP²` with `Ric = 6g`.
pub fn cp2_fubini_study() -> ManifoldModel {
    ManifoldModel {
        name: "cp2".into(),
        chart: Arc::new(FubiniStudyChart),
        einstein_lambda: Some(1.0),
        euler_characteristic: Some(3),
        exact_volume: Some(PI * PI / 2.0),
        homogeneous: true,
        compact: true,
    }
}

/// Hyperbolic space `r⁻²(dr² + (1 − r²/4)²ĥ)`; `Ric = −(n − 1)g`.
pub fn hyperbolic_normal_form(n: usize) -> ManifoldModel {
    ManifoldModel {
        name: format!("hyperbolic{n}"),
        chart: Arc::new(HyperbolicChart { dim: n }),
        einstein_lambda: Some(-0.5),
        euler_characteristic: Some(1),
        exact_volume: None,
        homogeneous: true,
        compact: false,
    }
}

/// Non-Einstein deformation of the unit sphere.
pub fn perturbed_sphere(n: usize, amplitude: f64) -> Result<ManifoldModel> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { need: 2, got: n });
    }
    Ok(ManifoldModel {
        name: format!("perturbed-s{n}"),
        chart: Arc::new(PerturbedSphereChart { dim: n, amplitude }),
        einstein_lambda: None,
        euler_characteristic: Some(if n.is_multiple_of(2) { 2 } else { 0 }),
        exact_volume: None,
        homogeneous: false,
        compact: true,
    })
}

/// Euclidean box `[-1, 1]^n`.
pub fn flat(n: usize) -> ManifoldModel {
    ManifoldModel {
        name: format!("flat{n}"),
        chart: Arc::new(FlatChart { dim: n }),
        einstein_lambda: Some(0.0),
        euler_characteristic: None,
        exact_volume: Some(2f64.powi(n as i32)),
        homogeneous: true,
        compact: false,
    }
}

/// `c²g` for a model `g`.
pub fn scaled(model: &ManifoldModel, c: f64) -> ManifoldModel {
    let n = model.dim() as i32;
    ManifoldModel {
        name: format!("{}*{c}^2", model.name),
        chart: Arc::new(ScaledChart { inner: model.chart.clone(), factor: c }),
        einstein_lambda: model.einstein_lambda.map(|l| l / (c * c)),
        euler_characteristic: model.euler_characteristic,
        exact_volume: model.exact_volume.map(|v| v * c.abs().powi(n)),
        homogeneous: model.homogeneous,
        compact: model.compact,
    }
}

/// Structured manifold description, as accepted in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ManifoldSpec {
    Sphere { dim: usize, #[serde(default = "one")] radius: f64 },
    ProductOfSpheres { factors: Vec<(usize, f64)> },
    Cp2,
    PerturbedSphere { dim: usize, #[serde(default = "default_amplitude")] amplitude: f64 },
    Hyperbolic { dim: usize },
    Flat { dim: usize },
    Named { name: String },
}

fn one() -> f64 {
    1.0
}

fn default_amplitude() -> f64 {
    DEFAULT_PERTURBATION
}

/// Amplitude used by the `perturbed-s<n>` catalog names.
pub const DEFAULT_PERTURBATION: f64 = 0.1;

impl ManifoldSpec {
    pub fn build(&self) -> Result<ManifoldModel> {
        match self {
            ManifoldSpec::Sphere { dim, radius } => Ok(sphere(*dim, *radius)),
            ManifoldSpec::ProductOfSpheres { factors } => product_of_spheres(factors),
            ManifoldSpec::Cp2 => Ok(cp2_fubini_study()),
            ManifoldSpec::PerturbedSphere { dim, amplitude } => perturbed_sphere(*dim, *amplitude),
            ManifoldSpec::Hyperbolic { dim } => Ok(hyperbolic_normal_form(*dim)),
            ManifoldSpec::Flat { dim } => Ok(flat(*dim)),
            ManifoldSpec::Named { name } => by_name(name),
        }
    }
}

fn parse_dim(s: &str, prefix: &str) -> Option<usize> {
    s.strip_prefix(prefix)?.parse().ok().filter(|&n: &usize| n >= 1)
}

/// Catalog lookup: `s<n>`, products such as `s2xs2` or `s3xs3`, powers `s2^m`,
/// `cp2`, `perturbed-s<n>`, `hyperbolic<n>`, `flat<n>`.
pub fn by_name(name: &str) -> Result<ManifoldModel> {
    let name = name.trim().to_ascii_lowercase();
    let unknown = || Error::Unsupported(format!("unknown manifold `{name}`"));
    if name == "cp2" {
        return Ok(cp2_fubini_study());
    }
    if let Some(n) = parse_dim(&name, "perturbed-s") {
        return perturbed_sphere(n, DEFAULT_PERTURBATION);
    }
    if let Some(n) = parse_dim(&name, "hyperbolic") {
        return Ok(hyperbolic_normal_form(n));
    }
    if let Some(n) = parse_dim(&name, "flat") {
        return Ok(flat(n));
    }
    if let Some((base, pow)) = name.split_once('^') {
        let d = parse_dim(base, "s").ok_or_else(unknown)?;
        let m: usize = pow.parse().map_err(|_| unknown())?;
        if m == 0 {
            return Err(unknown());
        }
        return product_of_spheres(&vec![(d, 1.0); m]);
    }
    let parts: Vec<&str> = name.split('x').collect();
    let dims: Option<Vec<usize>> = parts.iter().map(|p| parse_dim(p, "s")).collect();
    match dims {
        Some(d) if d.len() == 1 => Ok(sphere(d[0], 1.0)),
        Some(d) => product_of_spheres(&d.iter().map(|&k| (k, 1.0)).collect::<Vec<_>>()),
        None => Err(unknown()),
    }
}

/// Names accepted by [`by_name`], for listings.
pub const CATALOG_NAMES: &[&str] =
    &["s<n>", "s2xs2", "s2^<m>", "s3xs3", "s4xs4", "cp2", "perturbed-s<n>", "hyperbolic<n>", "flat<n>"];
