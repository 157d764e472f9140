use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use super::chart::Chart;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::tensor::{contract, ContractionSpec, DenseTensor, Scalar, Schedule, Variance};

/// Metric components and their derivatives up to `order` at a point, stored as
/// jets in the chart coordinates.
#[derive(Clone, Debug)]
pub struct MetricJet {
    point: Vec<f64>,
    g: DenseTensor<Jet>,
    order: usize,
}

impl MetricJet {
    pub fn new(point: Vec<f64>, g: DenseTensor<Jet>) -> Result<Self> {
        if g.rank() != 2 || g.dim() != point.len() {
            return Err(Error::DimensionMismatch(g.dim(), point.len()));
        }
        let order = g.data().iter().map(|j| j.order()).min().unwrap_or(0);
        let dim = g.dim();
        if !g.all_finite() {
            return Err(Error::NonFinite);
        }
        let scale = g.data().iter().map(Jet::max_abs).fold(1.0, f64::max);
        let mut g = g;
        for a in 0..dim {
            for b in 0..a {
                let d = (g.get(&[a, b]) - g.get(&[b, a])).max_abs();
                if d > 1e-10 * scale {
                    return Err(Error::Unsupported(format!("metric not symmetric at ({a},{b})")));
                }
                // drop roundoff asymmetry
                let avg = (g.get(&[a, b]) + g.get(&[b, a])).scale(0.5);
                g.set(&[a, b], avg.clone());
                g.set(&[b, a], avg);
            }
        }
        Ok(MetricJet { point, g, order })
    }

    pub fn from_chart(chart: &dyn Chart, point: &[f64], order: usize) -> Result<Self> {
        MetricJet::new(point.to_vec(), chart.metric_jets(point, order)?)
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn components(&self) -> &DenseTensor<Jet> {
        &self.g
    }

    /// `∂^α g_{ab}` at the base point.
    pub fn partial(&self, a: usize, b: usize, alpha: &[u8]) -> f64 {
        self.g.get(&[a, b]).partial(alpha)
    }
}

fn identity_like(dim: usize, zero: &Jet) -> DenseTensor<Jet> {
    DenseTensor::from_fn(dim, vec![Variance::Upper; 2], |i| if i[0] == i[1] { zero.add_scalar(1.0) } else { zero.clone() })
}

/// Inverse of a jet-valued matrix by a Neumann series around its base value.
pub fn jet_inverse(g: &DenseTensor<Jet>) -> Result<DenseTensor<Jet>> {
    let dim = g.dim();
    let g0 = g.values();
    let g0inv = g0.inverse()?;
    let order = g.data().iter().map(|j| j.order()).min().unwrap_or(0);
    let zero = g.data()[0].zero_like().truncate(order);
    // M = −(g − g₀) g₀⁻¹, which has no constant term
    let m = DenseTensor::from_fn(dim, vec![Variance::Upper; 2], |i| {
        let mut acc = zero.clone();
        for k in 0..dim {
            let e = g.get(&[i[0], k]).add_scalar(-g0.get(&[i[0], k]));
            acc.axpy(-g0inv.get(&[k, i[1]]), &e);
        }
        acc
    });
    let id = identity_like(dim, &zero);
    let mut s = id.clone();
    for _ in 0..order {
        let mut next = id.clone();
        for i in 0..dim {
            for j in 0..dim {
                let cell = next.get_mut(&[i, j]);
                for k in 0..dim {
                    cell.fma(1.0, m.get(&[i, k]), s.get(&[k, j]));
                }
            }
        }
        s = next;
    }
    // g⁻¹ = g₀⁻¹ S
    let inv = DenseTensor::from_fn(dim, vec![Variance::Upper; 2], |i| {
        let mut acc = zero.clone();
        for k in 0..dim {
            acc.axpy(*g0inv.get(&[i[0], k]), s.get(&[k, i[1]]));
        }
        acc
    });
    // symmetrize away round-off
    let inv = DenseTensor::from_fn(dim, vec![Variance::Upper; 2], |i| {
        let mut a = inv.get(&[i[0], i[1]]).clone();
        a.axpy(1.0, inv.get(&[i[1], i[0]]));
        a.scale(0.5)
    });
    if !inv.all_finite() {
        return Err(Error::SingularMetric);
    }
    Ok(inv)
}

/// Curvature and differential operators of a metric at one point, computed
/// exactly from its jets. Quantities are built lazily and cached.
///
/// Index conventions: `christoffel()[c][a][b] = Γ^c_{ab}`;
/// `riemann()` is `R_{abcd}` with `∇_a∇_bτ_c − ∇_b∇_aτ_c = R_{abc}{}^dτ_d`, so
/// the unit sphere has `R_{abcd} = g_{ac}g_{bd} − g_{ad}g_{bc}`;
/// `Ric_{ab} = g^{cd}R_{acbd}`; covariant derivatives put the new slot first.
#[derive(Debug)]
pub struct LocalGeometry {
    metric: MetricJet,
    ginv: DenseTensor<Jet>,
    gamma_first: OnceLock<DenseTensor<Jet>>,
    gamma: OnceLock<DenseTensor<Jet>>,
    riemann: OnceLock<DenseTensor<Jet>>,
    ricci: OnceLock<DenseTensor<Jet>>,
    schouten: OnceLock<(DenseTensor<Jet>, Jet)>,
    weyl: OnceLock<DenseTensor<Jet>>,
}

impl LocalGeometry {
    pub fn new(metric: MetricJet) -> Result<Self> {
        let ginv = jet_inverse(&metric.g)?;
        Ok(Self::assemble(metric, ginv))
    }

    /// Uses a known inverse metric instead of inverting the jets.
    pub fn with_inverse(metric: MetricJet, ginv: DenseTensor<Jet>) -> Result<Self> {
        if ginv.dim() != metric.dim() || ginv.rank() != 2 {
            return Err(Error::DimensionMismatch(ginv.dim(), metric.dim()));
        }
        Ok(Self::assemble(metric, ginv))
    }

    fn assemble(metric: MetricJet, ginv: DenseTensor<Jet>) -> Self {
        LocalGeometry {
            metric,
            ginv,
            gamma_first: OnceLock::new(),
            gamma: OnceLock::new(),
            riemann: OnceLock::new(),
            ricci: OnceLock::new(),
            schouten: OnceLock::new(),
            weyl: OnceLock::new(),
        }
    }

    pub fn at(chart: &dyn Chart, point: &[f64], order: usize) -> Result<Self> {
        Self::new(MetricJet::from_chart(chart, point, order)?)
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn order(&self) -> usize {
        self.metric.order()
    }

    pub fn point(&self) -> &[f64] {
        self.metric.point()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        self.metric.g.data()[0].space()
    }

    pub fn metric_jet(&self) -> &MetricJet {
        &self.metric
    }

    pub fn metric(&self) -> &DenseTensor<Jet> {
        &self.metric.g
    }

    pub fn inverse_metric(&self) -> &DenseTensor<Jet> {
        &self.ginv
    }

    /// Coordinate functions as jets about the base point.
    pub fn coordinates(&self) -> Vec<Jet> {
        let space = self.space();
        self.point().iter().enumerate().map(|(i, &v)| Jet::variable(space, self.order(), i, v)).collect()
    }

    pub fn zero(&self) -> Jet {
        Jet::zero(self.space(), self.order())
    }

    pub fn constant(&self, v: f64) -> Jet {
        Jet::constant(self.space(), self.order(), v)
    }

    fn need(&self, k: usize) -> Result<()> {
        if self.order() < k {
            Err(Error::InsufficientJetOrder { have: self.order(), need: k })
        } else {
            Ok(())
        }
    }

    /// `Γ_{d,ab} = ½(∂_a g_{db} + ∂_b g_{da} − ∂_d g_{ab})`, slot order `[d, a, b]`.
    pub fn christoffel_first(&self) -> Result<&DenseTensor<Jet>> {
        self.need(1)?;
        Ok(self.gamma_first.get_or_init(|| {
            let n = self.dim();
            let g = &self.metric.g;
            let dg: Vec<DenseTensor<Jet>> =
                (0..n).map(|e| g.map(|x| x.derivative(e))).collect();
            let zero = self.zero().truncate(self.order() - 1);
            let mut out = DenseTensor::filled(n, vec![Variance::Lower; 3], zero.clone());
            for d in 0..n {
                for a in 0..n {
                    for b in a..n {
                        let mut acc = dg[a].get(&[d, b]).clone();
                        acc.axpy(1.0, dg[b].get(&[d, a]));
                        acc.axpy(-1.0, dg[d].get(&[a, b]));
                        let v = acc.scale(0.5);
                        out.set(&[d, b, a], v.clone());
                        out.set(&[d, a, b], v);
                    }
                }
            }
            out
        }))
    }

    /// `Γ^c_{ab}`, slot order `[c, a, b]`.
    pub fn christoffel(&self) -> Result<&DenseTensor<Jet>> {
        let first = self.christoffel_first()?;
        Ok(self.gamma.get_or_init(|| {
            let n = self.dim();
            let zero = first.data()[0].zero_like();
            let mut out = DenseTensor::filled(n, vec![Variance::Upper, Variance::Lower, Variance::Lower], zero.clone());
            for c in 0..n {
                for a in 0..n {
                    for b in a..n {
                        let mut acc = zero.clone();
                        for d in 0..n {
                            acc.fma(1.0, self.ginv.get(&[c, d]), first.get(&[d, a, b]));
                        }
                        out.set(&[c, b, a], acc.clone());
                        out.set(&[c, a, b], acc);
                    }
                }
            }
            out
        }))
    }

    /// `R_{abcd}` with all indices down.
    pub fn riemann(&self) -> Result<&DenseTensor<Jet>> {
        self.need(2)?;
        let first = self.christoffel_first()?;
        let gamma = self.christoffel()?;
        Ok(self.riemann.get_or_init(|| {
            let n = self.dim();
            let zero = self.zero().truncate(self.order() - 2);
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let mut out = DenseTensor::filled(n, vec![Variance::Lower; 4], zero.clone());
            for (p, &(a, b)) in pairs.iter().enumerate() {
                for &(c, d) in &pairs[p..] {
                    // R_{abcd} = ∂_bΓ_{d,ac} − ∂_aΓ_{d,bc} − Γ^s_{ac}Γ_{s,bd} + Γ^s_{bc}Γ_{s,ad}
                    let mut r = first.get(&[d, a, c]).derivative(b);
                    r.axpy(-1.0, &first.get(&[d, b, c]).derivative(a));
                    for s in 0..n {
                        r.fma(-1.0, gamma.get(&[s, a, c]), first.get(&[s, b, d]));
                        r.fma(1.0, gamma.get(&[s, b, c]), first.get(&[s, a, d]));
                    }
                    let neg = r.scale(-1.0);
                    for (idx, v) in [
                        ([a, b, c, d], &r),
                        ([b, a, c, d], &neg),
                        ([a, b, d, c], &neg),
                        ([b, a, d, c], &r),
                        ([c, d, a, b], &r),
                        ([d, c, a, b], &neg),
                        ([c, d, b, a], &neg),
                        ([d, c, b, a], &r),
                    ] {
                        out.set(&idx, v.clone());
                    }
                }
            }
            out
        }))
    }

    /// `Ric_{ab} = g^{cd}R_{acbd}`.
    pub fn ricci(&self) -> Result<&DenseTensor<Jet>> {
        let rm = self.riemann()?;
        Ok(self.ricci.get_or_init(|| {
            let n = self.dim();
            let zero = rm.data()[0].zero_like();
            let mut out = DenseTensor::filled(n, vec![Variance::Lower; 2], zero.clone());
            for a in 0..n {
                for b in a..n {
                    let mut acc = zero.clone();
                    for c in 0..n {
                        for d in 0..n {
                            acc.fma(1.0, self.ginv.get(&[c, d]), rm.get(&[a, c, b, d]));
                        }
                    }
                    out.set(&[b, a], acc.clone());
                    out.set(&[a, b], acc);
                }
            }
            out
        }))
    }

    pub fn scalar_curvature(&self) -> Result<Jet> {
        Ok(self.trace(self.ricci()?))
    }

    /// `g^{ab}T_{ab}` for a lower rank-2 tensor.
    pub fn trace(&self, t: &DenseTensor<Jet>) -> Jet {
        let n = self.dim();
        let mut acc = t.data()[0].zero_like();
        for a in 0..n {
            for b in 0..n {
                acc.fma(1.0, self.ginv.get(&[a, b]), t.get(&[a, b]));
            }
        }
        acc
    }

    fn schouten_pair(&self) -> Result<&(DenseTensor<Jet>, Jet)> {
        let n = self.dim();
        if n < 3 {
            return Err(Error::DimensionTooSmall { need: 3, got: n });
        }
        let ric = self.ricci()?;
        Ok(self.schouten.get_or_init(|| {
            let r = self.trace(ric);
            let j = r.scale(1.0 / (2.0 * (n as f64 - 1.0)));
            let g = &self.metric.g;
            let p = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |i| {
                let mut v = ric.get(i).clone();
                v.fma(-1.0, &j, g.get(i));
                v.scale(1.0 / (n as f64 - 2.0))
            });
            (p, j)
        }))
    }

    /// Schouten tensor `P = (Ric − Jg)/(n − 2)`.
    pub fn schouten(&self) -> Result<&DenseTensor<Jet>> {
        Ok(&self.schouten_pair()?.0)
    }

    /// `J = R/(2(n − 1))`, the trace of the Schouten tensor.
    pub fn schouten_trace(&self) -> Result<&Jet> {
        Ok(&self.schouten_pair()?.1)
    }

    /// `W_{abcd} = R_{abcd} − P_{ac}g_{bd} + P_{ad}g_{bc} + P_{bc}g_{ad} − P_{bd}g_{ac}`.
    pub fn weyl(&self) -> Result<&DenseTensor<Jet>> {
        let n = self.dim();
        if n < 4 {
            return Err(Error::DimensionTooSmall { need: 4, got: n });
        }
        let rm = self.riemann()?;
        let p = self.schouten()?;
        Ok(self.weyl.get_or_init(|| {
            let g = &self.metric.g;
            DenseTensor::from_fn(n, vec![Variance::Lower; 4], |i| {
                let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
                if a == b || c == d {
                    return rm.get(i).zero_like();
                }
                let mut w = rm.get(i).clone();
                w.fma(-1.0, p.get(&[a, c]), g.get(&[b, d]));
                w.fma(1.0, p.get(&[a, d]), g.get(&[b, c]));
                w.fma(1.0, p.get(&[b, c]), g.get(&[a, d]));
                w.fma(-1.0, p.get(&[b, d]), g.get(&[a, c]));
                w
            })
        }))
    }

    /// Cotton tensor `C_{abc} = ∇_aP_{bc} − ∇_bP_{ac}`.
    pub fn cotton(&self) -> Result<DenseTensor<Jet>> {
        self.need(3)?;
        let dp = self.covariant_derivative(self.schouten()?)?;
        dp.linear_combination(1.0, &dp.permute_slots(&[1, 0, 2])?, -1.0)
    }

    /// `∇_e T_{…}`; the new slot is first. The result is one jet order lower.
    pub fn covariant_derivative(&self, t: &DenseTensor<Jet>) -> Result<DenseTensor<Jet>> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch(t.dim(), self.dim()));
        }
        let k = t.data().iter().map(|j| j.order()).min().unwrap_or(0);
        if k == 0 {
            return Err(Error::InsufficientJetOrder { have: 0, need: 1 });
        }
        let gamma = self.christoffel()?;
        let n = self.dim();
        let rank = t.rank();
        let var = t.variance().to_vec();
        let mut variance = vec![Variance::Lower];
        variance.extend_from_slice(&var);
        let mut src = vec![0usize; rank];
        Ok(DenseTensor::from_fn(n, variance, |idx| {
            let e = idx[0];
            let rest = &idx[1..];
            let mut acc = t.get(rest).derivative(e);
            for slot in 0..rank {
                src.copy_from_slice(rest);
                for s in 0..n {
                    src[slot] = s;
                    match var[slot] {
                        Variance::Lower => acc.fma(-1.0, gamma.get(&[s, e, rest[slot]]), t.get(&src)),
                        Variance::Upper => acc.fma(1.0, gamma.get(&[rest[slot], e, s]), t.get(&src)),
                    }
                }
            }
            acc
        }))
    }

    /// `g^{ab}∇_a∇_b T`, two jet orders lower than `T`.
    pub fn laplacian(&self, t: &DenseTensor<Jet>) -> Result<DenseTensor<Jet>> {
        let ddt = self.covariant_derivative(&self.covariant_derivative(t)?)?;
        let n = self.dim();
        let rank = t.rank();
        let mut src = vec![0usize; rank + 2];
        let zero = ddt.data()[0].zero_like();
        Ok(DenseTensor::from_fn(n, t.variance().to_vec(), |idx| {
            let mut acc = zero.clone();
            src[2..].copy_from_slice(idx);
            for a in 0..n {
                for b in 0..n {
                    src[0] = a;
                    src[1] = b;
                    acc.fma(1.0, self.ginv.get(&[a, b]), ddt.get(&src));
                }
            }
            acc
        }))
    }

    /// `g^{ab}(∂_a∂_b f − Γ^c_{ab}∂_c f)` for a scalar jet.
    pub fn scalar_laplacian(&self, f: &Jet) -> Result<Jet> {
        if f.order() < 2 {
            return Err(Error::InsufficientJetOrder { have: f.order(), need: 2 });
        }
        let gamma = self.christoffel()?;
        let n = self.dim();
        let df: Vec<Jet> = (0..n).map(|a| f.derivative(a)).collect();
        let mut acc = Jet::zero(f.space(), f.order() - 2);
        for a in 0..n {
            for b in a..n {
                let mut h = df[a].derivative(b);
                for (c, dfc) in df.iter().enumerate() {
                    h.fma(-1.0, gamma.get(&[c, a, b]), dfc);
                }
                let w = if a == b { 1.0 } else { 2.0 };
                acc.fma(w, self.ginv.get(&[a, b]), &h);
            }
        }
        Ok(acc)
    }

    /// `|∇f|² = g^{ab}∂_af∂_bf`.
    pub fn gradient_norm2(&self, f: &Jet) -> Jet {
        let n = self.dim();
        let df: Vec<Jet> = (0..n).map(|a| f.derivative(a)).collect();
        let mut acc = df[0].zero_like();
        for a in 0..n {
            for b in 0..n {
                let mut x = df[a].zero_like();
                x.fma(1.0, self.ginv.get(&[a, b]), &df[b]);
                acc.fma(1.0, &df[a], &x);
            }
        }
        acc
    }

    /// Full contraction via the tensor engine using this metric.
    pub fn contract(&self, pattern: &str, factors: &[&DenseTensor<Jet>]) -> Result<DenseTensor<Jet>> {
        let spec = ContractionSpec::einsum(pattern, factors)?;
        contract(&spec, &self.metric.g, &self.ginv, Schedule::Greedy)
    }

    /// Raises `slot` of a jet tensor.
    pub fn raise(&self, t: &DenseTensor<Jet>, slot: usize) -> Result<DenseTensor<Jet>> {
        if t.variance().get(slot) != Some(&Variance::Lower) {
            return Err(Error::SlotOutOfRange { slot, rank: t.rank() });
        }
        crate::tensor::raise_lower(t, slot, &self.metric.g, &self.ginv)
    }

    /// `√|det g|` at the base point.
    pub fn volume_density(&self) -> f64 {
        let g = self.metric.g.values();
        let m = DMatrix::from_row_slice(g.dim(), g.dim(), g.data());
        m.determinant().abs().sqrt()
    }
}
