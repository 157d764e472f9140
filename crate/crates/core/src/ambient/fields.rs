use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::geometry::LocalGeometry;
use crate::invariants::{divergence_construction, pf_ell, weyl_contraction, weyl_square_tensor, NaturalScalar};
use crate::jet::Jet;
use crate::tensor::DenseTensor;

type Evaluator = dyn Fn(&LocalGeometry) -> Result<DenseTensor<Jet>> + Send + Sync;

/// A covariant tensor built naturally from a metric, so the same recipe can be
/// evaluated on a base manifold or on its ambient space.
///
/// `weight` is the exponent `w` with `T^{c²g} = c^w T^g` on the covariant
/// components; `order` is the number of metric derivatives the recipe needs.
#[derive(Clone)]
pub struct NaturalTensor {
    pub name: String,
    pub rank: usize,
    pub weight: i32,
    pub order: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for NaturalTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NaturalTensor")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .field("weight", &self.weight)
            .field("order", &self.order)
            .finish()
    }
}

fn scalar_tensor(geo: &LocalGeometry, v: Jet) -> DenseTensor<Jet> {
    DenseTensor::new(geo.dim(), vec![], vec![v]).expect("rank-0 tensor")
}

impl NaturalTensor {
    pub fn new(
        name: impl Into<String>,
        rank: usize,
        weight: i32,
        order: usize,
        eval: impl Fn(&LocalGeometry) -> Result<DenseTensor<Jet>> + Send + Sync + 'static,
    ) -> Self {
        NaturalTensor { name: name.into(), rank, weight, order, eval: Arc::new(eval) }
    }

    /// Scalar recipe returning a jet.
    pub fn scalar(
        name: impl Into<String>,
        weight: i32,
        order: usize,
        eval: impl Fn(&LocalGeometry) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, 0, weight, order, move |geo| Ok(scalar_tensor(geo, eval(geo)?)))
    }

    pub fn evaluate(&self, geo: &LocalGeometry) -> Result<DenseTensor<Jet>> {
        (self.eval)(geo)
    }

    pub fn evaluate_scalar(&self, geo: &LocalGeometry) -> Result<Jet> {
        Ok(self.evaluate(geo)?.data()[0].clone())
    }

    pub fn weyl() -> Self {
        Self::new("weyl", 4, 2, 2, |geo| Ok(geo.weyl()?.clone()))
    }

    pub fn riemann() -> Self {
        Self::new("riemann", 4, 2, 2, |geo| Ok(geo.riemann()?.clone()))
    }

    pub fn from_natural_scalar(s: NaturalScalar) -> Self {
        Self::scalar(s.to_string(), s.weight(), s.derivative_order(), move |geo| s.evaluate(geo))
    }

    /// `|W|²` of weight −4.
    pub fn weyl_norm() -> Self {
        Self::scalar("weyl-norm", -4, 2, |geo| weyl_contraction(geo.weyl()?, geo.metric(), geo.inverse_metric(), "abcd,abcd"))
    }

    /// `Pf_ℓ` of the Riemann tensor, weight `−2ℓ`.
    pub fn pfaffian_of_curvature(ell: usize) -> Self {
        Self::scalar(format!("pf{ell}-riemann"), -2 * ell as i32, 2, move |geo| pf_ell(geo.riemann()?, geo.inverse_metric(), ell))
    }

    /// `Δ|W|² − c J|W|²` with the coefficient `c = 8(n−5)/n` fixed from the base dimension.
    pub fn weyl_norm_laplacian_combination(base_dim: usize) -> Self {
        let c = 8.0 * (base_dim as f64 - 5.0) / base_dim as f64;
        Self::scalar("weyl-norm-laplacian-combination", -6, 4, move |geo| {
            let wn = weyl_contraction(geo.weyl()?, geo.metric(), geo.inverse_metric(), "abcd,abcd")?;
            let lap = geo.scalar_laplacian(&wn)?;
            let j = geo.schouten_trace()?;
            let mut out = lap;
            out.fma(-c, j, &wn.truncate(out.order()));
            Ok(out)
        })
    }

    /// `W_{acde}W_b{}^{cde}`, weight −2.
    pub fn weyl_square() -> Self {
        Self::new("weyl-square", 2, -2, 2, weyl_square_tensor)
    }

    /// The divergence step applied to this (symmetric) tensor.
    pub fn divergence(&self) -> Self {
        let inner = self.clone();
        let w = self.weight;
        Self::new(format!("div({})", self.name), self.rank.saturating_sub(1), w - 2, self.order + 1, move |geo| {
            divergence_construction(geo, &inner.evaluate(geo)?, w)
        })
    }
}
