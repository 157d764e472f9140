use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Chart, CoordinateRange, LocalGeometry, ManifoldModel};

/// Default number of nodes per coordinate axis.
pub const DEFAULT_NODES_PER_AXIS: usize = 16;

/// Tensor-product rule over a chart's coordinate box: Gauss–Legendre on open
/// axes, the trapezoid rule on periodic ones.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    axes: Vec<Vec<(f64, f64)>>,
    /// Polynomial degree integrated exactly along each open axis.
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn for_domain(domain: &[CoordinateRange], nodes_per_axis: usize) -> Result<Self> {
        Self::with_collapsed_axes(domain, nodes_per_axis, &[])
    }

    /// As [`QuadratureRule::for_domain`], with a single node (weight = width)
    /// on each axis in `collapsed`.
    pub fn with_collapsed_axes(domain: &[CoordinateRange], nodes_per_axis: usize, collapsed: &[usize]) -> Result<Self> {
        let m = NonZeroUsize::new(nodes_per_axis).ok_or_else(|| Error::Unsupported("zero quadrature nodes".into()))?;
        let gl = GaussLegendre::new(m);
        let axes = domain
            .iter()
            .enumerate()
            .map(|(a, r)| {
                if collapsed.contains(&a) {
                    vec![(0.5 * (r.lo + r.hi), r.width())]
                } else if r.periodic {
                    let h = r.width() / m.get() as f64;
                    (0..m.get()).map(|i| (r.lo + (i as f64 + 0.5) * h, h)).collect()
                } else {
                    let half = 0.5 * r.width();
                    let mid = 0.5 * (r.lo + r.hi);
                    gl.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect()
                }
            })
            .collect();
        Ok(QuadratureRule { axes, exactness: 2 * m.get() - 1 })
    }

    /// Rule over a chart's box. With `use_symmetry`, cyclic axes get one node,
    /// which is exact for integrands that are natural scalars.
    pub fn for_chart(chart: &dyn Chart, nodes_per_axis: usize, use_symmetry: bool) -> Result<Self> {
        let collapsed = if use_symmetry { chart.cyclic_axes() } else { Vec::new() };
        Self::with_collapsed_axes(&chart.domain(), nodes_per_axis, &collapsed)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `i` in row-major order (last axis fastest) and its weight.
    pub fn node(&self, mut i: usize) -> (Vec<f64>, f64) {
        let mut x = vec![0.0; self.dim()];
        let mut w = 1.0;
        for (a, axis) in self.axes.iter().enumerate().rev() {
            let (xi, wi) = axis[i % axis.len()];
            i /= axis.len();
            x[a] = xi;
            w *= wi;
        }
        (x, w)
    }

    /// `Σ wᵢ f(xᵢ)` for a vector-valued integrand; nodes are evaluated in
    /// parallel and summed in a fixed pairwise order.
    pub fn integrate<F>(&self, width: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    {
        let vals: Vec<Vec<f64>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let (x, w) = self.node(i);
                let v = f(&x)?;
                if v.len() != width {
                    return Err(Error::ShapeMismatch { got: v.len(), want: width });
                }
                Ok(v.into_iter().map(|y| w * y).collect())
            })
            .collect::<Result<_>>()?;
        let out: Vec<f64> = (0..width)
            .map(|k| pairwise_sum(&vals.iter().map(|v| v[k]).collect::<Vec<_>>()))
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(out)
    }
}

/// Pairwise (cascade) summation with a fixed split, so results do not depend
/// on thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// How integrals over a model are computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    pub nodes_per_axis: usize,
    /// Use quadrature even when the model is homogeneous.
    pub force_quadrature: bool,
    /// Collapse cyclic chart axes; integrands must then be natural scalars.
    pub use_symmetry: bool,
}

impl IntegrationOptions {
    /// Quadrature with `nodes_per_axis` nodes, never short-circuited.
    pub fn quadrature(nodes_per_axis: usize) -> Self {
        IntegrationOptions { nodes_per_axis, force_quadrature: true, use_symmetry: true }
    }
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { nodes_per_axis: DEFAULT_NODES_PER_AXIS, force_quadrature: false, use_symmetry: true }
    }
}

/// Fixed interior point used when a homogeneous model's integrand is constant.
pub fn reference_point(chart: &dyn Chart) -> Vec<f64> {
    chart.domain().iter().map(|r| r.lo + 0.3819660112501051 * r.width()).collect()
}

fn require_compact(model: &ManifoldModel) -> Result<()> {
    if !model.compact {
        return Err(Error::NonCompact(model.name.clone()));
    }
    Ok(())
}

/// Volume of a compact model, exact when known.
pub fn model_volume(model: &ManifoldModel, opts: &IntegrationOptions) -> Result<f64> {
    require_compact(model)?;
    match model.exact_volume {
        Some(v) if !opts.force_quadrature => Ok(v),
        _ => Ok(integrate_pointwise(model, 1, &IntegrationOptions { force_quadrature: true, ..*opts }, |_| Ok(vec![1.0]))?[0]),
    }
}

/// `∫ f dvol` for a vector of scalar integrands given by point values.
pub fn integrate_pointwise<F>(model: &ManifoldModel, width: usize, opts: &IntegrationOptions, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    require_compact(model)?;
    let chart = model.chart.as_ref();
    if model.homogeneous && !opts.force_quadrature {
        if let Some(vol) = model.exact_volume {
            return Ok(f(&reference_point(chart))?.into_iter().map(|v| v * vol).collect());
        }
    }
    let rule = QuadratureRule::for_chart(chart, opts.nodes_per_axis, opts.use_symmetry)?;
    rule.integrate(width, |x| {
        let g = chart.metric_jets(x, 0)?;
        let det = crate::tensor::DenseTensor::to_matrix(&g.values())?.determinant().abs().sqrt();
        Ok(f(x)?.into_iter().map(|v| v * det).collect())
    })
}

/// `∫ f dvol` for integrands computed from the local geometry with metric jets of `order`.
pub fn integrate_local<F>(model: &ManifoldModel, order: usize, width: usize, opts: &IntegrationOptions, f: F) -> Result<Vec<f64>>
where
    F: Fn(&LocalGeometry) -> Result<Vec<f64>> + Sync,
{
    let chart = model.chart.as_ref();
    integrate_pointwise(model, width, opts, |x| f(&LocalGeometry::at(chart, x, order)?))
}

/// Exact volume of `S^n` as a sanity anchor for the rule on sphere charts.
pub fn sphere_volume_by_rule(n: usize, nodes_per_axis: usize) -> Result<f64> {
    let model = crate::geometry::sphere(n, 1.0);
    model_volume(&model, &IntegrationOptions::quadrature(nodes_per_axis))
}
