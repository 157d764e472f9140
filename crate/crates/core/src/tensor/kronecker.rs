use itertools::Itertools;

use super::dense::{permutation_sign, pow};
use super::{DenseTensor, Scalar, Variance};
use crate::error::{Error, Result};

/// Largest tensor `materialize` will build.
pub const MATERIALIZE_LIMIT: usize = 1 << 24;

/// `δ^{a₁…a_k}_{b₁…b_k} = (1/k!) det[δ^{a_i}_{b_j}]`, evaluated entrywise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KroneckerDelta {
    k: usize,
    dim: usize,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl KroneckerDelta {
    pub fn new(k: usize, dim: usize) -> Self {
        KroneckerDelta { k, dim }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when `k > dim`: no k distinct indices exist.
    pub fn vanishes(&self) -> bool {
        self.k > self.dim
    }

    pub fn entry(&self, upper: &[usize], lower: &[usize]) -> f64 {
        debug_assert_eq!(upper.len(), self.k);
        debug_assert_eq!(lower.len(), self.k);
        // express lower as a permutation of upper
        let mut perm = Vec::with_capacity(self.k);
        for b in lower {
            match upper.iter().position(|a| a == b) {
                Some(p) => perm.push(p),
                None => return 0.0,
            }
        }
        permutation_sign(&perm) as f64 / factorial(self.k)
    }

    /// Contraction of the last upper slot with the last lower slot, evaluated
    /// by summing entries.
    pub fn trace_last(&self, upper: &[usize], lower: &[usize]) -> f64 {
        let mut u = upper.to_vec();
        let mut l = lower.to_vec();
        u.push(0);
        l.push(0);
        let k = self.k;
        (0..self.dim)
            .map(|c| {
                u[k - 1] = c;
                l[k - 1] = c;
                self.entry(&u, &l)
            })
            .sum()
    }

    /// Largest deviation of `trace_last` from `((dim − k + 1)/k) δ^{(k−1)}`.
    /// Sorted distinct upper tuples with every lower permutation cover the
    /// nonzero entries; one repeated-upper and one foreign-lower tuple per
    /// upper set cover the zeros.
    pub fn trace_recursion_residual(&self) -> f64 {
        let (k, n) = (self.k, self.dim);
        if k < 2 {
            return 0.0;
        }
        let lower = KroneckerDelta::new(k - 1, n);
        let factor = (n as f64 - k as f64 + 1.0) / k as f64;
        let err = |u: &[usize], l: &[usize]| (self.trace_last(u, l) - factor * lower.entry(u, l)).abs();
        let mut worst = 0.0f64;
        for u in (0..n).combinations(k - 1) {
            for l in u.iter().copied().permutations(k - 1) {
                worst = worst.max(err(&u, &l));
            }
            if k >= 3 {
                let mut rep = u.clone();
                rep[1] = rep[0];
                worst = worst.max(err(&rep, &u));
            }
            if let Some(c) = (0..n).find(|c| !u.contains(c)) {
                let mut l = u.clone();
                l[0] = c;
                worst = worst.max(err(&u, &l));
            }
        }
        worst
    }

    /// Dense form with k upper slots followed by k lower slots.
    pub fn materialize(&self) -> Result<DenseTensor> {
        let n = pow(self.dim, 2 * self.k);
        if n > MATERIALIZE_LIMIT {
            return Err(Error::TooLarge(n));
        }
        let mut variance = vec![Variance::Upper; self.k];
        variance.extend(vec![Variance::Lower; self.k]);
        if self.vanishes() {
            return Ok(DenseTensor::zeros(self.dim, variance));
        }
        Ok(DenseTensor::from_fn(self.dim, variance, |idx| self.entry(&idx[..self.k], &idx[self.k..])))
    }
}

/// Dense generalized Kronecker delta; `k > dim` gives the zero tensor.
pub fn generalized_kronecker(k: usize, dim: usize) -> Result<DenseTensor> {
    KroneckerDelta::new(k, dim).materialize()
}

/// Curvature-type tensor `T_{ab}{}^{cd}` restricted to index pairs `a<b`, `c<d`.
#[derive(Clone, Debug)]
pub struct PairMatrix<S = f64> {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    index: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> PairMatrix<S> {
    /// Builds from `f(p, q)` over pair indices `p = (a<b)`, `q = (c<d)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut((usize, usize), (usize, usize)) -> S) -> Self {
        let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|a| (a + 1..dim).map(move |b| (a, b))).collect();
        let mut index = vec![usize::MAX; dim * dim];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            index[a * dim + b] = k;
        }
        let mut data = Vec::with_capacity(pairs.len() * pairs.len());
        for &p in &pairs {
            for &q in &pairs {
                data.push(f(p, q));
            }
        }
        PairMatrix { dim, pairs, index, data }
    }

    /// `t` must have rank 4; its slots are read as `(a, b, c, d)` regardless of variance.
    pub fn from_tensor(t: &DenseTensor<S>) -> Result<Self> {
        if t.rank() != 4 {
            return Err(Error::ShapeMismatch { got: t.rank(), want: 4 });
        }
        Ok(Self::from_fn(t.dim(), |(a, b), (c, d)| t.get(&[a, b, c, d]).clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn npairs(&self) -> usize {
        self.pairs.len()
    }

    /// Index of pair `(a, b)` with `a < b`.
    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        self.index[a * self.dim + b]
    }

    pub fn get(&self, p: usize, q: usize) -> &S {
        &self.data[p * self.pairs.len() + q]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PairMatrix<T> {
        PairMatrix { dim: self.dim, pairs: self.pairs.clone(), index: self.index.clone(), data: self.data.iter().map(f).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// Oracle: Leibniz determinant of the k×k matrix of Kronecker deltas.
    fn det_oracle(upper: &[usize], lower: &[usize]) -> f64 {
        let k = upper.len();
        let mut s = 0.0;
        for p in (0..k).permutations(k) {
            let prod: bool = (0..k).all(|i| upper[i] == lower[p[i]]);
            if prod {
                s += permutation_sign(&p) as f64;
            }
        }
        s / factorial(k)
    }

    #[test]
    fn entries_match_determinant() {
        for dim in 2..=4 {
            for k in 1..=3 {
                let d = KroneckerDelta::new(k, dim);
                for u in (0..k).map(|_| 0..dim).multi_cartesian_product() {
                    for l in (0..k).map(|_| 0..dim).multi_cartesian_product() {
                        assert_eq!(d.entry(&u, &l), det_oracle(&u, &l));
                    }
                }
            }
        }
    }

    #[test]
    fn full_trace_is_binomial() {
        for dim in 1..=6 {
            for k in 1..=dim.min(4) {
                let d = KroneckerDelta::new(k, dim);
                let mut tr = 0.0;
                for u in (0..k).map(|_| 0..dim).multi_cartesian_product() {
                    tr += d.entry(&u, &u);
                }
                assert!((tr - binom(dim, k)).abs() < 1e-12, "dim {dim} k {k}");
            }
        }
    }

    #[test]
    fn trace_recursion_factor() {
        for dim in 3..=6 {
            for k in 2..=4 {
                let d = KroneckerDelta::new(k, dim);
                let lo = KroneckerDelta::new(k - 1, dim);
                let factor = (dim as f64 - k as f64 + 1.0) / k as f64;
                for u in (0..k - 1).map(|_| 0..dim).multi_cartesian_product() {
                    for l in (0..k - 1).map(|_| 0..dim).multi_cartesian_product() {
                        let want = factor * lo.entry(&u, &l);
                        assert!((d.trace_last(&u, &l) - want).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_recursion_residual_is_exact() {
        for n in 2..=7 {
            for k in 2..=n {
                assert!(KroneckerDelta::new(k, n).trace_recursion_residual() < 1e-14, "k={k} n={n}");
            }
        }
    }

    #[test]
    fn too_many_indices_vanish() {
        let d = KroneckerDelta::new(4, 3);
        assert!(d.vanishes());
        let t = generalized_kronecker(4, 3).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert_eq!(t.rank(), 8);
    }

    #[test]
    fn large_delta_not_materialized() {
        assert!(matches!(generalized_kronecker(6, 8), Err(Error::TooLarge(_))));
        let d = KroneckerDelta::new(6, 8);
        assert!((d.entry(&[0, 1, 2, 3, 4, 5], &[1, 0, 2, 3, 4, 5]) + 1.0 / 720.0).abs() < 1e-18);
    }

    #[test]
    fn pair_matrix_layout() {
        let t = DenseTensor::from_fn(4, vec![Variance::Lower; 4], |i| (i[0] * 1000 + i[1] * 100 + i[2] * 10 + i[3]) as f64);
        let m = PairMatrix::from_tensor(&t).unwrap();
        assert_eq!(m.npairs(), 6);
        let p = m.pair_index(1, 3);
        let q = m.pair_index(0, 2);
        assert_eq!(*m.get(p, q), 1302.0);
    }
}
