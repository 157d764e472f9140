use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{jet_inverse, LocalGeometry, ManifoldModel, MetricJet};
use crate::jet::{Jet, JetSpace};
use crate::tensor::{DenseTensor, Variance};

/// Largest `|λρ|` at which the ambient metric is evaluated.
pub const MAX_LAMBDA_RHO: f64 = 0.25;

/// Straight and normal ambient space of an Einstein manifold with
/// `Ric = 2λ(n−1)g`:
/// `g̃ = 2ρ dt² + 2t dt dρ + τ² g`, `τ = t(1 + λρ)`.
///
/// Coordinates are ordered `(t, x¹, …, xⁿ, ρ)`.
#[derive(Clone, Debug)]
pub struct AmbientChart {
    base: ManifoldModel,
    lambda: f64,
}

/// A point `(t, x, ρ)` of the ambient space.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientPoint {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: f64,
}

impl AmbientPoint {
    pub fn new(t: f64, x: &[f64], rho: f64) -> Self {
        AmbientPoint { t, x: x.to_vec(), rho }
    }

    /// The embedded base point `(1, x, 0)`.
    pub fn on_base(x: &[f64]) -> Self {
        Self::new(1.0, x, 0.0)
    }

    pub fn coordinates(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.x.len() + 2);
        c.push(self.t);
        c.extend_from_slice(&self.x);
        c.push(self.rho);
        c
    }

    pub fn dilated(&self, s: f64) -> Self {
        AmbientPoint { t: s * self.t, ..self.clone() }
    }
}

pub fn build_ambient(model: &ManifoldModel) -> Result<AmbientChart> {
    let lambda = model.require_einstein()?;
    if model.dim() < 3 {
        return Err(Error::DimensionTooSmall { need: 3, got: model.dim() });
    }
    Ok(AmbientChart { base: model.clone(), lambda })
}

impl AmbientChart {
    pub fn base(&self) -> &ManifoldModel {
        &self.base
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + 2
    }

    /// Slot of the `ρ` coordinate.
    pub fn rho_slot(&self) -> usize {
        self.base.dim() + 1
    }

    pub fn tau(&self, p: &AmbientPoint) -> f64 {
        p.t * (1.0 + self.lambda * p.rho)
    }

    pub fn check(&self, p: &AmbientPoint) -> Result<()> {
        if p.x.len() != self.base_dim() {
            return Err(Error::DimensionMismatch(p.x.len(), self.base_dim()));
        }
        if !(p.t.is_finite() && p.t > 0.0) {
            return Err(Error::OutOfDomain(format!("t = {} must be positive", p.t)));
        }
        if (self.lambda * p.rho).abs() > MAX_LAMBDA_RHO || !p.rho.is_finite() {
            return Err(Error::OutOfDomain(format!("|λρ| = {} exceeds {MAX_LAMBDA_RHO}", (self.lambda * p.rho).abs())));
        }
        Ok(())
    }

    /// Random point with `t ∈ [1/2, 2]`, `|ρ| ≤ 1/(4|λ|+1)` and `x` from the base chart.
    pub fn sample_point(&self, rng: &mut dyn rand::RngCore) -> AmbientPoint {
        let t = rng.gen_range(0.5..=2.0);
        let r = 1.0 / (4.0 * self.lambda.abs() + 1.0);
        let rho = rng.gen_range(-r..=r);
        let x = self.base.chart.sample_point(rng, 0.1);
        AmbientPoint { t, x, rho }
    }

    fn base_map(&self) -> Vec<usize> {
        (1..=self.base_dim()).collect()
    }

    /// Lifts a base jet (in the base chart's jet space) to the ambient jet space.
    pub fn lift(&self, base_jet: &Jet, space: &Arc<JetSpace>) -> Jet {
        base_jet.lift(space, &self.base_map())
    }

    /// `(t, ρ, τ)` as ambient jets.
    fn warp_jets(&self, p: &AmbientPoint, space: &Arc<JetSpace>, order: usize) -> (Jet, Jet, Jet) {
        let t = Jet::variable(space, order, 0, p.t);
        let rho = Jet::variable(space, order, self.rho_slot(), p.rho);
        let sigma = rho.scale(self.lambda).add_scalar(1.0);
        let tau = &t * &sigma;
        (t, rho, tau)
    }

    /// Metric jets and the closed-form inverse about `p`.
    pub fn metric_and_inverse(&self, p: &AmbientPoint, order: usize) -> Result<(DenseTensor<Jet>, DenseTensor<Jet>)> {
        self.check(p)?;
        let n = self.base_dim();
        let dim = n + 2;
        let r = self.rho_slot();
        let space = JetSpace::get(dim, order);
        let gb = self.base.chart.metric_jets(&p.x, order)?;
        let gb_inv = jet_inverse(&gb)?;
        let (t, rho, tau) = self.warp_jets(p, &space, order);
        let tau2 = &tau * &tau;
        let tau_m2 = tau2.recip();
        let t_inv = t.recip();
        let zero = Jet::zero(&space, order);
        let mut g = DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |_| zero.clone());
        let mut gi = DenseTensor::from_fn(dim, vec![Variance::Upper; 2], |_| zero.clone());
        g.set(&[0, 0], rho.scale(2.0));
        g.set(&[0, r], t.clone());
        g.set(&[r, 0], t.clone());
        gi.set(&[0, r], t_inv.clone());
        gi.set(&[r, 0], t_inv.clone());
        gi.set(&[r, r], (&rho * &t_inv.powi(2)).scale(-2.0));
        for a in 0..n {
            for b in 0..n {
                g.set(&[a + 1, b + 1], &tau2 * &self.lift(gb.get(&[a, b]), &space));
                gi.set(&[a + 1, b + 1], &tau_m2 * &self.lift(gb_inv.get(&[a, b]), &space));
            }
        }
        Ok((g, gi))
    }

    /// Ambient curvature and differential operators at `p` from metric jets of `order`.
    pub fn geometry(&self, p: &AmbientPoint, order: usize) -> Result<LocalGeometry> {
        let (g, gi) = self.metric_and_inverse(p, order)?;
        LocalGeometry::with_inverse(MetricJet::new(p.coordinates(), g)?, gi)
    }

    /// Base geometry at the projected point.
    pub fn base_geometry(&self, p: &AmbientPoint, order: usize) -> Result<LocalGeometry> {
        LocalGeometry::at(self.base.chart.as_ref(), &p.x, order)
    }

    /// Christoffel symbols `Γ^C_{AB}` (slot order `[C, A, B]`) from the
    /// block formulas, using the base Christoffel symbols and metric at `x`.
    pub fn closed_form_christoffels(&self, p: &AmbientPoint) -> Result<DenseTensor> {
        self.check(p)?;
        let n = self.base_dim();
        let dim = n + 2;
        let r = self.rho_slot();
        let base = self.base_geometry(p, 1)?;
        let gamma = base.christoffel()?.values();
        let g = base.metric().values();
        let lam = self.lambda;
        let sigma = 1.0 + lam * p.rho;
        let tau = self.tau(p);
        let mut out = DenseTensor::zeros(dim, vec![Variance::Upper, Variance::Lower, Variance::Lower]);
        for a in 0..n {
            for b in 0..n {
                out.set(&[0, a + 1, b + 1], -lam * tau * g.get(&[a, b]));
                out.set(&[r, a + 1, b + 1], sigma * (lam * p.rho - 1.0) * g.get(&[a, b]));
                for c in 0..n {
                    out.set(&[c + 1, a + 1, b + 1], *gamma.get(&[c, a, b]));
                }
            }
            out.set(&[a + 1, 0, a + 1], 1.0 / p.t);
            out.set(&[a + 1, a + 1, 0], 1.0 / p.t);
            out.set(&[a + 1, a + 1, r], lam / sigma);
            out.set(&[a + 1, r, a + 1], lam / sigma);
        }
        out.set(&[r, 0, r], 1.0 / p.t);
        out.set(&[r, r, 0], 1.0 / p.t);
        Ok(out)
    }

    /// `τ^w π*u` as an ambient jet, with `u` given as a base jet at `p.x`.
    pub fn homogeneous_extension(&self, p: &AmbientPoint, u: &Jet, w: f64) -> Jet {
        let space = JetSpace::get(self.dim(), u.order());
        let (_, _, tau) = self.warp_jets(p, &space, u.order());
        &tau.powf(w) * &self.lift(u, &space)
    }

    /// Whether slot `s` of the ambient coordinates is a base direction.
    pub fn is_base_slot(&self, s: usize) -> bool {
        s >= 1 && s <= self.base_dim()
    }

    /// Values of `g̃` at `p`, for callers that only need numbers.
    pub fn metric_values(&self, p: &AmbientPoint) -> Result<DenseTensor> {
        Ok(self.metric_and_inverse(p, 0)?.0.values())
    }
}
