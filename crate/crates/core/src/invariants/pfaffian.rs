use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::tensor::{raise_lower, DenseTensor, KroneckerDelta, PairMatrix, Scalar, Variance};

/// `k!! = k(k−2)(k−4)⋯`, with `0!! = (−1)!! = 1`.
pub fn double_factorial(k: i64) -> f64 {
    assert!(k >= -1, "double factorial of {k}");
    let mut acc = 1.0;
    let mut m = k;
    while m > 1 {
        acc *= m as f64;
        m -= 2;
    }
    acc
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn check_curvature_shape<S: Scalar>(rm: &DenseTensor<S>, ginv: &DenseTensor<S>) -> Result<()> {
    if rm.rank() != 4 {
        return Err(Error::ShapeMismatch { got: rm.rank(), want: 4 });
    }
    if rm.variance().iter().any(|v| *v != Variance::Lower) {
        return Err(Error::MixedVariance);
    }
    if ginv.dim() != rm.dim() {
        return Err(Error::DimensionMismatch(ginv.dim(), rm.dim()));
    }
    Ok(())
}

/// `T_{ab}{}^{cd} = g^{ce}g^{df}T_{abef}` restricted to `a<b`, `c<d`.
pub fn mixed_pair_matrix<S: Scalar>(rm: &DenseTensor<S>, ginv: &DenseTensor<S>) -> Result<PairMatrix<S>> {
    check_curvature_shape(rm, ginv)?;
    let n = rm.dim();
    let zero = rm.data()[0].zero_like();
    // half-raised: x[(a,b)][c][f] = g^{ce} T_{abef}
    let npairs = n * (n.saturating_sub(1)) / 2;
    let mut half = Vec::with_capacity(npairs * n * n);
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                for f in 0..n {
                    let mut acc = zero.clone();
                    for e in 0..n {
                        acc.fma(1.0, ginv.get(&[c, e]), rm.get(&[a, b, e, f]));
                    }
                    half.push(acc);
                }
            }
        }
    }
    Ok(PairMatrix::from_fn(n, |(a, b), (c, d)| {
        let row = a * (2 * n - a - 1) / 2 + (b - a - 1);
        let base = row * n * n;
        let mut acc = zero.clone();
        for f in 0..n {
            acc.fma(1.0, ginv.get(&[d, f]), &half[base + c * n + f]);
        }
        acc
    }))
}

/// Sign of moving `x < y` to the front of the sorted members of `set`.
fn extraction_sign(set: u32, x: u32, y: u32) -> f64 {
    let below = |i: u32| (set & ((1u32 << i) - 1)).count_ones();
    if (below(x) + below(y) - 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

struct PairExpansion<'a, S> {
    t: &'a PairMatrix<S>,
    one: S,
    memo: HashMap<(u32, u32), S>,
}

impl<S: Scalar> PairExpansion<'_, S> {
    /// Sum over matchings of `a` (canonical order) and ordered matchings of `b`
    /// of the signed products of `T` entries.
    fn eval(&mut self, a: u32, b: u32) -> S {
        if a == 0 {
            return self.one.clone();
        }
        if let Some(v) = self.memo.get(&(a, b)) {
            return v.clone();
        }
        let mut acc = self.one.zero_like();
        let x = a.trailing_zeros();
        let mut rest_a = a & !(1 << x);
        while rest_a != 0 {
            let y = rest_a.trailing_zeros();
            rest_a &= !(1 << y);
            let p = self.t.pair_index(x as usize, y as usize);
            let sa = extraction_sign(a, x, y);
            let a2 = a & !(1 << x) & !(1 << y);
            let mut bc = b;
            while bc != 0 {
                let c = bc.trailing_zeros();
                bc &= !(1 << c);
                let mut bd = bc;
                while bd != 0 {
                    let d = bd.trailing_zeros();
                    bd &= !(1 << d);
                    let entry = self.t.get(p, self.t.pair_index(c as usize, d as usize));
                    if entry.magnitude() == 0.0 {
                        continue;
                    }
                    let sub = self.eval(a2, b & !(1 << c) & !(1 << d));
                    acc.fma(sa * extraction_sign(b, c, d), entry, &sub);
                }
            }
        }
        self.memo.insert((a, b), acc.clone());
        acc
    }
}

/// Generalized Pfaffian of degree `ell` from the mixed pair matrix of `T`.
///
/// Expands the generalized Kronecker delta over index subsets and pair
/// matchings with memoized partial sums; the delta itself is never formed.
pub fn pf_ell_pairs<S: Scalar>(t: &PairMatrix<S>, ell: usize) -> Result<S> {
    let n = t.dim();
    if 2 * ell > n {
        return Err(Error::OrderOutOfRange { ell, dim: n });
    }
    if n > 30 {
        return Err(Error::TooLarge(n));
    }
    let one = t.get(0, 0).constant_like(1.0);
    if ell == 0 {
        return Ok(one);
    }
    let mut dp = PairExpansion { t, one, memo: HashMap::new() };
    let mut total = dp.one.zero_like();
    for s in 0u32..(1u32 << n) {
        if s.count_ones() as usize == 2 * ell {
            let v = dp.eval(s, s);
            total.add_scaled(1.0, &v);
        }
    }
    Ok(total)
}

/// `Pf_ℓ(T)` for an all-lower curvature-type tensor `T` and inverse metric.
pub fn pf_ell<S: Scalar>(rm: &DenseTensor<S>, ginv: &DenseTensor<S>, ell: usize) -> Result<S> {
    check_curvature_shape(rm, ginv)?;
    if 2 * ell > rm.dim() {
        return Err(Error::OrderOutOfRange { ell, dim: rm.dim() });
    }
    if ell == 0 {
        return Ok(rm.data()[0].constant_like(1.0));
    }
    pf_ell_pairs(&mixed_pair_matrix(rm, ginv)?, ell)
}

/// Pfaffian `Pf_{n/2}` of the curvature tensor.
pub fn pfaffian<S: Scalar>(rm: &DenseTensor<S>, ginv: &DenseTensor<S>) -> Result<S> {
    if !rm.dim().is_multiple_of(2) {
        return Err(Error::OddDimension(rm.dim()));
    }
    pf_ell(rm, ginv, rm.dim() / 2)
}

/// Direct evaluation of `Pf_ℓ` by summing delta entries over all index tuples.
/// Cost grows like `n!`; intended as a reference for small dimensions.
pub fn pf_ell_brute_force(rm: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor, ell: usize) -> Result<f64> {
    check_curvature_shape(rm, ginv)?;
    let n = rm.dim();
    if 2 * ell > n {
        return Err(Error::OrderOutOfRange { ell, dim: n });
    }
    let k = 2 * ell;
    let terms = (factorial(n) / factorial(n - k)) * factorial(k);
    if terms > 1e8 {
        return Err(Error::TooLarge(terms as usize));
    }
    let mixed = raise_lower(&raise_lower(rm, 2, g, ginv)?, 3, g, ginv)?;
    let delta = KroneckerDelta::new(k, n);
    let mut total = 0.0;
    for upper in (0..n).permutations(k) {
        for lower in upper.iter().copied().permutations(k) {
            let d = delta.entry(&upper, &lower);
            if d == 0.0 {
                continue;
            }
            let mut prod = d;
            for i in 0..ell {
                prod *= mixed.get(&[upper[2 * i], upper[2 * i + 1], lower[2 * i], lower[2 * i + 1]]);
            }
            total += prod;
        }
    }
    Ok(total * 2f64.powi(-(ell as i32)) * double_factorial(2 * ell as i64 - 1))
}
