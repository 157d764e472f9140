//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] of order `K` in `d` variables stores the Taylor coefficients
//! `f_α = ∂^α f / α!` for every multi-index `|α| ≤ K` at a base point. The
//! monomials are stored graded by total degree, so a jet of order `K − 1` is a
//! prefix of a jet of order `K` in the same [`JetSpace`]; truncation is a slice.
//!
//! Arithmetic between jets of different orders yields the smaller order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial bookkeeping shared by all jets with the same variable count and
/// maximal order.
pub struct JetSpace {
    nvars: usize,
    max_order: usize,
    exps: Vec<Vec<u8>>,
    degree: Vec<usize>,
    /// `degree_end[d]` is the number of monomials of total degree `≤ d`.
    degree_end: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `sum_index[i][j]` is the index of `exps[i] + exps[j]`, defined for all
    /// `j` with `degree[j] ≤ max_order − degree[i]`.
    sum_index: Vec<Vec<u32>>,
    /// Per variable: `(source, target, exponent)` for `∂_i`.
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("max_order", &self.max_order)
            .field("len", &self.exps.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    fn rec(nvars: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(remaining as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u8);
            rec(nvars, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

impl JetSpace {
    fn build(nvars: usize, max_order: usize) -> Self {
        let mut exps = Vec::new();
        let mut degree = Vec::new();
        let mut degree_end = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            for m in monomials_of_degree(nvars, d) {
                exps.push(m);
                degree.push(d);
            }
            degree_end.push(exps.len());
        }
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();

        let mut sum_index = Vec::with_capacity(exps.len());
        let mut scratch = vec![0u8; nvars];
        for (i, a) in exps.iter().enumerate() {
            let lim = degree_end[max_order - degree[i]];
            let mut row = Vec::with_capacity(lim);
            for b in &exps[..lim] {
                for v in 0..nvars {
                    scratch[v] = a[v] + b[v];
                }
                row.push(index[&scratch] as u32);
            }
            sum_index.push(row);
        }

        let mut deriv = vec![Vec::new(); nvars];
        for (src, e) in exps.iter().enumerate() {
            for v in 0..nvars {
                if e[v] > 0 {
                    scratch.copy_from_slice(e);
                    scratch[v] -= 1;
                    deriv[v].push((src as u32, index[&scratch] as u32, e[v] as f64));
                }
            }
        }

        JetSpace { nvars, max_order, exps, degree, degree_end, index, sum_index, deriv }
    }

    /// Shared space for `nvars` variables truncated at `max_order`.
    pub fn get(nvars: usize, max_order: usize) -> Arc<JetSpace> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<JetSpace>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("jet space cache poisoned");
        guard
            .entry((nvars, max_order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, max_order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.degree_end[order]
    }

    pub fn exponents(&self, idx: usize) -> &[u8] {
        &self.exps[idx]
    }

    pub fn degree_of(&self, idx: usize) -> usize {
        self.degree[idx]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

/// A truncated Taylor series. An empty coefficient vector is the zero jet.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order={}, value={:e})", self.order, self.value())
    }
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>, order: usize) -> Jet {
        assert!(order <= space.max_order, "jet order exceeds its space");
        Jet { space: space.clone(), order, c: Vec::new() }
    }

    pub fn constant(space: &Arc<JetSpace>, order: usize, value: f64) -> Jet {
        let mut j = Jet::zero(space, order);
        if value != 0.0 {
            j.c = vec![0.0; space.len(order)];
            j.c[0] = value;
        }
        j
    }

    /// The coordinate function `x_var` expanded about `value`.
    pub fn variable(space: &Arc<JetSpace>, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < space.nvars);
        let mut j = Jet::constant(space, order, 1.0);
        j.c[0] = value;
        if order >= 1 {
            // degree-1 monomials are listed with the highest exponent first,
            // so variable `var` sits at position 1 + var.
            j.c[1 + var] = 1.0;
        }
        j
    }

    /// Builds a jet from raw Taylor coefficients (length must match the order).
    pub fn from_coeffs(space: &Arc<JetSpace>, order: usize, coeffs: Vec<f64>) -> Jet {
        assert_eq!(coeffs.len(), space.len(order));
        Jet { space: space.clone(), order, c: coeffs }
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c.first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0.0)
    }

    /// Taylor coefficient at the monomial index `idx` (zero beyond the order).
    pub fn coeff(&self, idx: usize) -> f64 {
        if idx < self.space.len(self.order) {
            self.c.get(idx).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    }

    /// The partial derivative `∂^α f` at the base point.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let Some(idx) = self.space.index_of(alpha) else { return 0.0 };
        if self.space.degree_of(idx) > self.order {
            return 0.0;
        }
        let fact: f64 = alpha.iter().map(|&a| (1..=a as u64).product::<u64>() as f64).product();
        self.coeff(idx) * fact
    }

    /// Dense coefficient vector (materializing zeros).
    pub fn coeffs(&self) -> Vec<f64> {
        if self.c.is_empty() {
            vec![0.0; self.space.len(self.order)]
        } else {
            self.c.clone()
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        let c = if self.c.is_empty() { Vec::new() } else { self.c[..self.space.len(order)].to_vec() };
        Jet { space: self.space.clone(), order, c }
    }

    fn check_space(&self, other: &Jet) {
        debug_assert!(
            Arc::ptr_eq(&self.space, &other.space),
            "jets from different spaces cannot be combined"
        );
    }

    /// `∂_var f`, one order lower.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        if self.c.is_empty() {
            return Jet::zero(&self.space, order);
        }
        let n = self.space.len(order);
        let mut out = vec![0.0; n];
        let src_end = self.space.len(self.order) as u32;
        for &(src, dst, e) in &self.space.deriv[var] {
            if src >= src_end {
                break;
            }
            out[dst as usize] += e * self.c[src as usize];
        }
        Jet { space: self.space.clone(), order, c: out }
    }

    pub fn scale(&self, f: f64) -> Jet {
        let c = self.c.iter().map(|x| x * f).collect();
        Jet { space: self.space.clone(), order: self.order, c }
    }

    pub fn scale_in_place(&mut self, f: f64) {
        for x in &mut self.c {
            *x *= f;
        }
    }

    pub fn add_scalar(&self, v: f64) -> Jet {
        let mut out = self.clone();
        if out.c.is_empty() {
            out.c = vec![0.0; self.space.len(self.order)];
        }
        out.c[0] += v;
        out
    }

    /// `self += other * factor`, truncating to the smaller order.
    pub fn axpy(&mut self, factor: f64, other: &Jet) {
        self.check_space(other);
        if other.order < self.order {
            *self = self.truncate(other.order);
        }
        if other.c.is_empty() || factor == 0.0 {
            return;
        }
        let n = self.space.len(self.order);
        if self.c.is_empty() {
            self.c = vec![0.0; n];
        }
        for (x, y) in self.c.iter_mut().zip(&other.c[..n]) {
            *x += factor * y;
        }
    }

    /// `self += factor · a · b` without an intermediate allocation.
    pub fn fma(&mut self, factor: f64, a: &Jet, b: &Jet) {
        self.check_space(a);
        self.check_space(b);
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            *self = self.truncate(order);
        }
        if a.c.is_empty() || b.c.is_empty() || factor == 0.0 {
            return;
        }
        let n = self.space.len(order);
        if self.c.is_empty() {
            self.c = vec![0.0; n];
        }
        let space = &*self.space;
        let out = &mut self.c;
        for i in 0..n {
            let ai = a.c[i];
            if ai == 0.0 {
                continue;
            }
            let ai = ai * factor;
            let lim = space.degree_end[order - space.degree[i]];
            let row = &space.sum_index[i][..lim];
            for (bj, &k) in b.c[..lim].iter().zip(row) {
                out[k as usize] += ai * bj;
            }
        }
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::zero(&self.space, order);
        out.fma(1.0, self, other);
        out
    }

    /// `Σ_k taylor[k] (self − self(0))^k`, i.e. composition with a univariate
    /// function whose scaled derivatives at the base value are `taylor`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        assert!(taylor.len() > self.order, "need order+1 Taylor coefficients");
        let mut h = self.clone();
        if !h.c.is_empty() {
            h.c[0] = 0.0;
        }
        let mut r = Jet::constant(&self.space, self.order, taylor[self.order]);
        for k in (0..self.order).rev() {
            r = r.mul_jet(&h).add_scalar(taylor[k]);
        }
        r
    }

    pub fn recip(&self) -> Jet {
        let u0 = self.value();
        let t: Vec<f64> = (0..=self.order)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * u0.powi(-(k as i32) - 1))
            .collect();
        self.compose(&t)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let u0 = self.value();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for k in 0..=self.order {
            t.push(binom * u0.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&t)
    }

    pub fn powi(&self, p: i32) -> Jet {
        if p >= 0 {
            let mut r = Jet::constant(&self.space, self.order, 1.0);
            for _ in 0..p {
                r = r.mul_jet(self);
            }
            r
        } else {
            self.recip().powi(-p)
        }
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            t.push(e / f);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Jet {
        let u0 = self.value();
        let mut t = vec![u0.ln()];
        for k in 1..=self.order {
            let s = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(s / (k as f64 * u0.powi(k as i32)));
        }
        self.compose(&t)
    }

    fn trig(&self, phase: usize) -> Jet {
        let (s, c) = self.value().sin_cos();
        // d^k/dx^k sin = [sin, cos, −sin, −cos][k mod 4]
        let cyc = [s, c, -s, -c];
        let mut t = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                f *= k as f64;
            }
            t.push(cyc[(k + phase) % 4] / f);
        }
        self.compose(&t)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(1)
    }

    pub fn tan(&self) -> Jet {
        self.sin().mul_jet(&self.cos().recip())
    }

    /// Re-expresses a jet in a larger variable set: variable `i` of `self`
    /// becomes variable `var_map[i]` of `target`.
    pub fn lift(&self, target: &Arc<JetSpace>, var_map: &[usize]) -> Jet {
        assert_eq!(var_map.len(), self.space.nvars);
        let order = self.order.min(target.max_order);
        if self.c.is_empty() {
            return Jet::zero(target, order);
        }
        let mut out = vec![0.0; target.len(order)];
        let mut e = vec![0u8; target.nvars];
        for idx in 0..self.space.len(order) {
            let v = self.c[idx];
            if v == 0.0 {
                continue;
            }
            e.iter_mut().for_each(|x| *x = 0);
            for (i, &x) in self.space.exps[idx].iter().enumerate() {
                e[var_map[i]] = x;
            }
            out[target.index[&e]] = v;
        }
        Jet { space: target.clone(), order, c: out }
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Coordinate jets `x_i` about `point`.
pub fn variables(point: &[f64], order: usize) -> Vec<Jet> {
    let space = JetSpace::get(point.len(), order);
    point.iter().enumerate().map(|(i, &v)| Jet::variable(&space, order, i, v)).collect()
}
