use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::jet::{variables, Jet, JetSpace};
use crate::tensor::{DenseTensor, Scalar, Variance};

/// One coordinate interval of a chart's domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateRange {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl CoordinateRange {
    pub fn open(lo: f64, hi: f64) -> Self {
        CoordinateRange { lo, hi, periodic: false }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        CoordinateRange { lo, hi, periodic: true }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A coordinate chart with a closed-form metric.
pub trait Chart: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// Jets of `g_{ab}` of the given order about `point`, in the chart's own
    /// jet space (`dim` variables).
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>>;

    /// Coordinate box covering the chart (up to a measure-zero set).
    fn domain(&self) -> Vec<CoordinateRange>;

    /// Axes the metric components do not depend on. Natural scalars are
    /// constant along them.
    fn cyclic_axes(&self) -> Vec<usize> {
        Vec::new()
    }

    /// Uniform interior point, kept away from the box boundary by `margin`
    /// (fraction of each width).
    fn sample_point(&self, rng: &mut dyn rand::RngCore, margin: f64) -> Vec<f64> {
        self.domain()
            .iter()
            .map(|r| {
                let pad = if r.periodic { 0.0 } else { margin * r.width() };
                rng.gen_range(r.lo + pad..r.hi - pad)
            })
            .collect()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch(point.len(), self.dim()));
        }
        for (x, r) in point.iter().zip(self.domain()) {
            if !r.periodic && !(r.lo < *x && *x < r.hi) {
                return Err(Error::OutOfDomain(format!("{x} not in ({}, {})", r.lo, r.hi)));
            }
        }
        Ok(())
    }
}

fn sym2(dim: usize, zero: &Jet) -> DenseTensor<Jet> {
    DenseTensor::filled(dim, vec![Variance::Lower; 2], zero.clone())
}

fn diagonal(entries: Vec<Jet>) -> DenseTensor<Jet> {
    let dim = entries.len();
    let mut g = sym2(dim, &entries[0].zero_like());
    for (i, e) in entries.into_iter().enumerate() {
        g.set(&[i, i], e);
    }
    g
}

/// Squared warping factors `1, sin²ψ₁, sin²ψ₁sin²ψ₂, …` of the round metric in
/// hyperspherical coordinates.
fn round_warps(psi: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(psi.len());
    let mut acc = psi[0].zero_like().add_scalar(1.0);
    out.push(acc.clone());
    for p in &psi[..psi.len() - 1] {
        let s = p.sin();
        acc = &acc * &(&s * &s);
        out.push(acc.clone());
    }
    out
}

/// Unit-sphere embedding `S^n → R^{n+1}` in hyperspherical coordinates.
fn sphere_embedding(psi: &[Jet]) -> Vec<Jet> {
    let n = psi.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prod = psi[0].zero_like().add_scalar(1.0);
    for p in psi {
        out.push(&prod * &p.cos());
        prod = &prod * &p.sin();
    }
    out.push(prod);
    out
}

fn sphere_domain(n: usize) -> Vec<CoordinateRange> {
    let mut d = vec![CoordinateRange::open(0.0, PI); n.saturating_sub(1)];
    d.push(CoordinateRange::periodic(0.0, 2.0 * PI));
    d
}

/// `g_{ij} = ∂_i y^A ∂_j y^B G_{AB}(y)` for a map `y` and target metric `G`.
fn pullback(
    point: &[f64],
    order: usize,
    map: impl Fn(&[Jet]) -> Vec<Jet>,
    target: impl Fn(&[Jet]) -> Vec<Vec<Jet>>,
) -> DenseTensor<Jet> {
    let dim = point.len();
    let x = variables(point, order + 1);
    let y_hi = map(&x);
    let dy: Vec<Vec<Jet>> = y_hi.iter().map(|ya| (0..dim).map(|i| ya.derivative(i)).collect()).collect();
    let y: Vec<Jet> = y_hi.iter().map(|ya| ya.truncate(order)).collect();
    let gt = target(&y);
    let zero = Jet::zero(x[0].space(), order);
    let m = y.len();
    let home = JetSpace::get(dim, order);
    let ident: Vec<usize> = (0..dim).collect();
    let g = DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut acc = zero.clone();
        for a in 0..m {
            let mut row = zero.clone();
            for b in 0..m {
                row.fma(1.0, &gt[a][b], &dy[b][j]);
            }
            acc.fma(1.0, &dy[a][i], &row);
        }
        acc
    });
    g.map(|j| j.lift(&home, &ident))
}

/// Euclidean `R^n` on the box `[-1, 1]^n`.
#[derive(Clone, Debug)]
pub struct FlatChart {
    pub dim: usize,
}

impl Chart for FlatChart {
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        self.check_point(point)?;
        let space = JetSpace::get(self.dim, order);
        Ok(diagonal(vec![Jet::constant(&space, order, 1.0); self.dim]))
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        vec![CoordinateRange::open(-1.0, 1.0); self.dim]
    }
}

/// Round sphere of the given radius in hyperspherical coordinates
/// `(ψ₁, …, ψ_{n−1}, φ)`.
#[derive(Clone, Debug)]
pub struct SphereChart {
    pub dim: usize,
    pub radius: f64,
}

impl Chart for SphereChart {
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        self.check_point(point)?;
        let psi = variables(point, order);
        let r2 = self.radius * self.radius;
        Ok(diagonal(round_warps(&psi).into_iter().map(|w| w.scale(r2)).collect()))
    }
    fn cyclic_axes(&self) -> Vec<usize> {
        vec![self.dim() - 1]
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        sphere_domain(self.dim)
    }
}

/// Unit `S^n` (n ≥ 2) with the metric induced from
/// `δ + ε[X₂ dX₀² + X₀X₁(dX₁dX₂ + dX₂dX₁)]` on `R^{n+1}`.
#[derive(Clone, Debug)]
pub struct PerturbedSphereChart {
    pub dim: usize,
    pub amplitude: f64,
}

impl Chart for PerturbedSphereChart {
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        self.check_point(point)?;
        let eps = self.amplitude;
        Ok(pullback(point, order, sphere_embedding, |x| {
            let m = x.len();
            let zero = x[0].zero_like();
            let mut g: Vec<Vec<Jet>> = (0..m)
                .map(|a| (0..m).map(|b| if a == b { zero.add_scalar(1.0) } else { zero.clone() }).collect())
                .collect();
            g[0][0].axpy(eps, &x[2]);
            let x01 = (&x[0] * &x[1]).scale(eps);
            g[1][2].axpy(1.0, &x01);
            g[2][1].axpy(1.0, &x01);
            g
        }))
    }
    fn cyclic_axes(&self) -> Vec<usize> {
        vec![self.dim() - 1]
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        sphere_domain(self.dim)
    }
}

/// Complex projective plane with the Fubini–Study metric normalized to
/// `Ric = 6g`, in coordinates `(ψ, χ, θ, φ)` with `z = tan ψ · ω(χ, θ, φ)`:
/// `g = dψ² + sin²ψ ĥ − sin⁴ψ σ²`, where `ĥ` is the round `S³` metric and
/// `σ` the Hopf form.
#[derive(Clone, Debug)]
pub struct FubiniStudyChart;

impl Chart for FubiniStudyChart {
    fn dim(&self) -> usize {
        4
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        self.check_point(point)?;
        let x = variables(point, order + 1);
        let y_hi = sphere_embedding(&x[1..]);
        let dy: Vec<Vec<Jet>> = y_hi.iter().map(|ya| (1..4).map(|i| ya.derivative(i)).collect()).collect();
        let y: Vec<Jet> = y_hi.iter().map(|ya| ya.truncate(order)).collect();
        // σ = −y₁dy₀ + y₀dy₁ − y₃dy₂ + y₂dy₃
        let jy = [y[1].scale(-1.0), y[0].clone(), y[3].scale(-1.0), y[2].clone()];
        let zero = Jet::zero(x[0].space(), order);
        let sigma: Vec<Jet> = (0..3)
            .map(|i| {
                let mut acc = zero.clone();
                for a in 0..4 {
                    acc.fma(1.0, &jy[a], &dy[a][i]);
                }
                acc
            })
            .collect();
        let s2 = {
            let s = x[0].truncate(order).sin();
            &s * &s
        };
        let s4 = &s2 * &s2;
        let mut g = sym2(4, &zero);
        g.set(&[0, 0], zero.add_scalar(1.0));
        for i in 0..3 {
            for j in 0..3 {
                let mut h = zero.clone();
                for d in &dy {
                    h.fma(1.0, &d[i], &d[j]);
                }
                let mut e = &s2 * &h;
                e.fma(-1.0, &s4, &(&sigma[i] * &sigma[j]));
                g.set(&[i + 1, j + 1], e);
            }
        }
        let home = JetSpace::get(4, order);
        let ident: Vec<usize> = (0..4).collect();
        Ok(g.map(|j| j.lift(&home, &ident)))
    }
    fn cyclic_axes(&self) -> Vec<usize> {
        vec![self.dim() - 1]
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        let mut d = vec![CoordinateRange::open(0.0, PI / 2.0)];
        d.extend(sphere_domain(3));
        d
    }
}

/// Hyperbolic space in geodesic normal form
/// `r⁻²(dr² + (1 − r²/4)² ĥ)` with `r ∈ (0, 2)` and `ĥ` the round `S^{n−1}`.
#[derive(Clone, Debug)]
pub struct HyperbolicChart {
    pub dim: usize,
}

impl HyperbolicChart {
    /// Boundary defining function range.
    pub const R_MAX: f64 = 2.0;
}

impl Chart for HyperbolicChart {
    fn dim(&self) -> usize {
        self.dim
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        self.check_point(point)?;
        let x = variables(point, order);
        let r = &x[0];
        let rinv2 = r.powi(-2);
        let warp = (r * r).scale(-0.25).add_scalar(1.0);
        let warp2 = &warp * &warp;
        let mut entries = vec![rinv2.clone()];
        if self.dim > 1 {
            for h in round_warps(&x[1..]) {
                entries.push(&(&rinv2 * &warp2) * &h);
            }
        }
        Ok(diagonal(entries))
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        let mut d = vec![CoordinateRange::open(0.0, Self::R_MAX)];
        if self.dim > 1 {
            d.extend(sphere_domain(self.dim - 1));
        }
        d
    }
}

/// Riemannian product; coordinates concatenated, metric block diagonal.
#[derive(Clone, Debug)]
pub struct ProductChart {
    pub factors: Vec<Arc<dyn Chart>>,
}

impl Chart for ProductChart {
    fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        let dim = self.dim();
        if point.len() != dim {
            return Err(Error::DimensionMismatch(point.len(), dim));
        }
        let space = JetSpace::get(dim, order);
        let mut g = sym2(dim, &Jet::zero(&space, order));
        let mut off = 0;
        for f in &self.factors {
            let d = f.dim();
            let block = f.metric_jets(&point[off..off + d], order)?;
            let map: Vec<usize> = (off..off + d).collect();
            for a in 0..d {
                for b in 0..d {
                    g.set(&[off + a, off + b], block.get(&[a, b]).lift(&space, &map));
                }
            }
            off += d;
        }
        Ok(g)
    }
    fn cyclic_axes(&self) -> Vec<usize> {
        let mut off = 0;
        let mut out = Vec::new();
        for f in &self.factors {
            out.extend(f.cyclic_axes().into_iter().map(|a| a + off));
            off += f.dim();
        }
        out
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        self.factors.iter().flat_map(|f| f.domain()).collect()
    }
}

/// Constant rescaling `c² g` of another chart.
#[derive(Clone, Debug)]
pub struct ScaledChart {
    pub inner: Arc<dyn Chart>,
    pub factor: f64,
}

impl Chart for ScaledChart {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn metric_jets(&self, point: &[f64], order: usize) -> Result<DenseTensor<Jet>> {
        Ok(self.inner.metric_jets(point, order)?.scaled(self.factor * self.factor))
    }
    fn cyclic_axes(&self) -> Vec<usize> {
        self.inner.cyclic_axes()
    }
    fn domain(&self) -> Vec<CoordinateRange> {
        self.inner.domain()
    }
}
