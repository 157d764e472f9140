use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    Upper,
    Lower,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Upper => Variance::Lower,
            Variance::Lower => Variance::Upper,
        }
    }
}

/// Rank-r tensor in dimension d, stored row-major with per-slot variance.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<S = f64> {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<S>,
}

pub(crate) fn pow(dim: usize, rank: usize) -> usize {
    dim.pow(rank as u32)
}

/// Sign of the permutation that sorts `p` (0 if `p` has repeats).
pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl<S: Scalar> DenseTensor<S> {
    pub fn new(dim: usize, variance: Vec<Variance>, data: Vec<S>) -> Result<Self> {
        let want = pow(dim, variance.len());
        if data.len() != want {
            return Err(Error::ShapeMismatch { got: data.len(), want });
        }
        Ok(DenseTensor { dim, variance, data })
    }

    pub fn filled(dim: usize, variance: Vec<Variance>, fill: S) -> Self {
        let n = pow(dim, variance.len());
        DenseTensor { dim, variance, data: vec![fill; n] }
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let rank = variance.len();
        let n = pow(dim, rank);
        let mut idx = vec![0usize; rank];
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            decode(i, dim, &mut idx);
            data.push(f(&idx));
        }
        DenseTensor { dim, variance, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut S {
        let o = self.offset(idx);
        &mut self.data[o]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn with_variance(mut self, variance: Vec<Variance>) -> Result<Self> {
        if variance.len() != self.variance.len() {
            return Err(Error::ShapeMismatch { got: variance.len(), want: self.variance.len() });
        }
        self.variance = variance;
        Ok(self)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DenseTensor<T> {
        DenseTensor { dim: self.dim, variance: self.variance.clone(), data: self.data.iter().map(f).collect() }
    }

    /// Base-point values.
    pub fn values(&self) -> DenseTensor<f64> {
        self.map(|s| s.value())
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|s| s.finite())
    }

    pub fn scaled(&self, f: f64) -> Self {
        self.map(|s| s.scaled(f))
    }

    /// `self += factor · other`
    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            a.add_scaled(factor, b);
        }
        Ok(())
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let mut out = self.scaled(a);
        out.add_scaled(b, other)?;
        Ok(out)
    }

    /// Outer product; variance concatenated.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                let mut z = a.zero_like();
                z.fma(1.0, a, b);
                data.push(z);
            }
        }
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        Ok(DenseTensor { dim: self.dim, variance, data })
    }

    /// New tensor whose slot `k` is slot `perm[k]` of `self`.
    pub fn permute_slots(&self, perm: &[usize]) -> Result<Self> {
        let r = self.rank();
        if perm.len() != r || !perm.iter().all(|&p| p < r) || perm.iter().unique().count() != r {
            return Err(Error::Unsupported(format!("invalid slot permutation {perm:?}")));
        }
        let variance: Vec<_> = perm.iter().map(|&p| self.variance[p]).collect();
        let mut src = vec![0usize; r];
        Ok(DenseTensor::from_fn(self.dim, variance, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                src[p] = idx[k];
            }
            self.get(&src).clone()
        }))
    }

    fn check_slots(&self, slots: &[usize]) -> Result<()> {
        for (i, &s) in slots.iter().enumerate() {
            if s >= self.rank() {
                return Err(Error::SlotOutOfRange { slot: s, rank: self.rank() });
            }
            if slots[..i].contains(&s) {
                return Err(Error::RepeatedSlot(s));
            }
        }
        if let Some(&first) = slots.first() {
            if slots.iter().any(|&s| self.variance[s] != self.variance[first]) {
                return Err(Error::MixedVariance);
            }
        }
        Ok(())
    }

    fn average_over_permutations(&self, slots: &[usize], signed: bool) -> Result<Self> {
        self.check_slots(slots)?;
        let k = slots.len();
        if k < 2 {
            return Ok(self.clone());
        }
        let perms: Vec<(Vec<usize>, f64)> = (0..k)
            .permutations(k)
            .map(|p| {
                let s = if signed { permutation_sign(&p) as f64 } else { 1.0 };
                (p, s)
            })
            .collect();
        let norm = 1.0 / perms.len() as f64;
        let mut src = vec![0usize; self.rank()];
        let zero = self.data[0].zero_like();
        Ok(DenseTensor::from_fn(self.dim, self.variance.clone(), |idx| {
            let mut acc = zero.clone();
            for (p, s) in &perms {
                src.copy_from_slice(idx);
                for (j, &pj) in p.iter().enumerate() {
                    src[slots[j]] = idx[slots[pj]];
                }
                acc.add_scaled(s * norm, self.get(&src));
            }
            acc
        }))
    }

    /// `T_{(a…)}`: average over all orderings of `slots` with weight 1/k!.
    pub fn symmetrize(&self, slots: &[usize]) -> Result<Self> {
        self.average_over_permutations(slots, false)
    }

    /// `T_{[a…]}`: signed average over all orderings of `slots` with weight 1/k!.
    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Self> {
        self.average_over_permutations(slots, true)
    }
}

impl DenseTensor<f64> {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Self {
        DenseTensor::filled(dim, variance, 0.0)
    }

    pub fn scalar(v: f64) -> Self {
        DenseTensor { dim: 1, variance: Vec::new(), data: vec![v] }
    }

    /// `δ_{ab}` as a lower-index metric.
    pub fn euclidean_metric(dim: usize) -> Self {
        DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |i| if i[0] == i[1] { 1.0 } else { 0.0 })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.rank() != 2 {
            return Err(Error::Unsupported("matrix view needs rank 2".into()));
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &self.data))
    }

    /// Inverse of a rank-2 tensor via LU; variance flipped.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.to_matrix()?;
        let inv = m.lu().try_inverse().ok_or(Error::SingularMetric)?;
        if !inv.iter().all(|x| x.is_finite()) {
            return Err(Error::SingularMetric);
        }
        let variance = self.variance.iter().map(|v| v.flip()).collect();
        let data = (0..self.dim).flat_map(|i| (0..self.dim).map(move |j| (i, j))).map(|(i, j)| inv[(i, j)]).collect();
        Ok(DenseTensor { dim: self.dim, variance, data })
    }
}

pub(crate) fn decode(mut flat: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

/// Flips the variance of `slot` using `metric` (to lower) or `inverse_metric`
/// (to raise).
pub fn raise_lower<S: Scalar>(
    t: &DenseTensor<S>,
    slot: usize,
    metric: &DenseTensor<S>,
    inverse_metric: &DenseTensor<S>,
) -> Result<DenseTensor<S>> {
    if slot >= t.rank() {
        return Err(Error::SlotOutOfRange { slot, rank: t.rank() });
    }
    if t.dim() != metric.dim() {
        return Err(Error::DimensionMismatch(t.dim(), metric.dim()));
    }
    let m = match t.variance()[slot] {
        Variance::Upper => metric,
        Variance::Lower => inverse_metric,
    };
    let mut variance = t.variance().to_vec();
    variance[slot] = variance[slot].flip();
    let dim = t.dim();
    let mut src = vec![0usize; t.rank()];
    let zero = t.data()[0].zero_like();
    Ok(DenseTensor::from_fn(dim, variance, |idx| {
        let mut acc = zero.clone();
        src.copy_from_slice(idx);
        for e in 0..dim {
            src[slot] = e;
            acc.fma(1.0, m.get(&[idx[slot], e]), t.get(&src));
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(dim: usize, rank: usize, seed: u64) -> DenseTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseTensor::from_fn(dim, vec![Variance::Lower; rank], |_| rng.gen_range(-1.0..1.0))
    }

    fn random_spd(dim: usize, seed: u64) -> DenseTensor {
        let a = random(dim, 2, seed);
        DenseTensor::from_fn(dim, vec![Variance::Lower; 2], |i| {
            let mut s = if i[0] == i[1] { dim as f64 } else { 0.0 };
            for k in 0..dim {
                s += a.get(&[i[0], k]) * a.get(&[i[1], k]);
            }
            s
        })
    }

    #[test]
    fn product_with_identity_metric() {
        let g = DenseTensor::euclidean_metric(2);
        let gg = g.tensor_product(&g).unwrap();
        assert_eq!(gg.rank(), 4);
        for idx in [[0, 0, 1, 1], [0, 1, 0, 1], [1, 1, 1, 1]] {
            let want = if idx[0] == idx[1] && idx[2] == idx[3] { 1.0 } else { 0.0 };
            assert_eq!(*gg.get(&idx), want);
        }
    }

    #[test]
    fn empty_product_is_unit() {
        let t = random(3, 2, 1);
        let one = DenseTensor::scalar(1.0);
        let mut p = one.tensor_product(&DenseTensor { dim: 3, ..t.clone() });
        // scalar has dim 1; the empty product is dimension-agnostic
        if p.is_err() {
            let one = DenseTensor { dim: 3, variance: vec![], data: vec![1.0] };
            p = one.tensor_product(&t);
        }
        assert_eq!(p.unwrap(), t);
    }

    #[test]
    fn outer_product_entries() {
        let u = random(3, 1, 2);
        let v = random(3, 1, 3);
        let uv = u.tensor_product(&v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*uv.get(&[i, j]), u.get(&[i]) * v.get(&[j]));
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        assert!(random(3, 1, 0).tensor_product(&random(2, 1, 0)).is_err());
    }

    #[test]
    fn symmetrize_normalization() {
        let mut t = DenseTensor::zeros(2, vec![Variance::Lower; 3]);
        t.set(&[0, 0, 1], 6.0);
        let s = t.symmetrize(&[0, 1, 2]).unwrap();
        for idx in [[0, 0, 1], [0, 1, 0], [1, 0, 0]] {
            assert!((s.get(&idx) - 2.0).abs() < 1e-15);
        }
        assert_eq!(*s.get(&[1, 1, 0]), 0.0);
    }

    #[test]
    fn antisymmetrizing_symmetric_gives_zero() {
        let g = random_spd(4, 7);
        assert!(g.antisymmetrize(&[0, 1]).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn repeated_or_mixed_slots_rejected() {
        let t = random(3, 3, 1);
        assert_eq!(t.symmetrize(&[0, 0]), Err(Error::RepeatedSlot(0)));
        let mixed = t.clone().with_variance(vec![Variance::Lower, Variance::Upper, Variance::Lower]).unwrap();
        assert_eq!(mixed.antisymmetrize(&[0, 1]), Err(Error::MixedVariance));
    }

    #[test]
    fn raise_lower_roundtrip_spd_and_indefinite() {
        let t = random(4, 3, 11);
        let mut metrics = vec![random_spd(4, 5)];
        let mut lor = random_spd(4, 6);
        for j in 0..4 {
            let v = -*lor.get(&[0, j]);
            lor.set(&[0, j], v);
            lor.set(&[j, 0], v);
        }
        let v = -2.0 * lor.get(&[0, 0]).abs() - 10.0;
        lor.set(&[0, 0], v);
        metrics.push(lor);
        for g in metrics {
            let gi = g.inverse().unwrap();
            let up = raise_lower(&t, 1, &g, &gi).unwrap();
            assert_eq!(up.variance()[1], Variance::Upper);
            let back = raise_lower(&up, 1, &g, &gi).unwrap();
            assert!(back.max_abs_diff(&t) < 1e-12);
        }
        let g = DenseTensor::euclidean_metric(4);
        assert!(raise_lower(&t, 3, &g, &g).is_err());
        let x = random(4, 1, 3);
        assert_eq!(raise_lower(&x, 0, &g, &g).unwrap().data(), x.data());
    }

    #[test]
    fn singular_metric_is_reported() {
        let g = DenseTensor::zeros(3, vec![Variance::Lower; 2]);
        assert_eq!(g.inverse(), Err(Error::SingularMetric));
    }
}
