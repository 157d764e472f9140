use super::pfaffian::{double_factorial, factorial};
use crate::error::{Error, Result};
use crate::geometry::{LocalGeometry, ManifoldModel};
use crate::jet::Jet;
use crate::tensor::{DenseTensor, Scalar, Variance};

/// Shift in the `j`-th factor `Δ − shift·J` of the iterated operator acting on
/// invariants of weight `−2k` in dimension `n`.
pub fn i_ell_shift(n: usize, k: usize, j: usize) -> f64 {
    4.0 * (k + j) as f64 * (n as f64 - 2.0 * (k + j) as f64 - 1.0) / n as f64
}

/// `Π_{j<ℓ} (Δ − shift_j J)` applied to `field`, factors applied in order of
/// increasing `j`. Each factor consumes two jet orders.
pub fn apply_i_ell(geo: &LocalGeometry, field: &Jet, k: usize, ell: usize, j_value: f64) -> Result<Jet> {
    let n = geo.dim();
    if field.order() < 2 * ell {
        return Err(Error::InsufficientJetOrder { have: field.order(), need: 2 * ell });
    }
    let mut u = field.clone();
    for j in 0..ell {
        let lap = geo.scalar_laplacian(&u)?;
        let mut next = u.truncate(lap.order());
        next.scale_in_place(-i_ell_shift(n, k, j) * j_value);
        next.axpy(1.0, &lap);
        u = next;
    }
    Ok(u)
}

/// As [`apply_i_ell`], taking `J = nλ` from an Einstein model.
pub fn i_ell_operator(field: &Jet, k: usize, ell: usize, model: &ManifoldModel, geo: &LocalGeometry) -> Result<Jet> {
    let j = model.schouten_trace()?;
    apply_i_ell(geo, field, k, ell, j)
}

/// Factor multiplying `I` in the iterated operator once all Laplacian terms
/// are dropped: `(−4J/n)^ℓ (k+ℓ−1)!(n−2k−1)!! / ((k−1)!(n−2k−2ℓ−1)!!)`.
pub fn i_ell_constant_coefficient(n: usize, k: usize, ell: usize, j_value: f64) -> Result<f64> {
    if k == 0 || n < 2 * (k + ell) {
        return Err(Error::OrderOutOfRange { ell, dim: n });
    }
    let lead = (-4.0 * j_value / n as f64).powi(ell as i32);
    let num = factorial(k + ell - 1) * double_factorial(n as i64 - 2 * k as i64 - 1);
    let den = factorial(k - 1) * double_factorial(n as i64 - 2 * (k + ell) as i64 - 1);
    Ok(lead * num / den)
}

/// Symmetric divergence step on a symmetric covariant tensor of rank `k` and
/// weight `w`: `∇^b T_{…b} + ((k−1)/(w−2k+2)) ∇_{(a₁} T_{…)b}{}^b`.
/// The result has rank `k−1`, weight `w−2`, and one jet order less.
pub fn divergence_construction(geo: &LocalGeometry, t: &DenseTensor<Jet>, w: i32) -> Result<DenseTensor<Jet>> {
    let k = t.rank();
    if k == 0 {
        return Err(Error::ShapeMismatch { got: 0, want: 1 });
    }
    if t.variance().iter().any(|v| *v != Variance::Lower) {
        return Err(Error::MixedVariance);
    }
    if w == 2 * k as i32 - 2 {
        return Err(Error::ExcludedWeight { w, rank: k });
    }
    let n = geo.dim();
    let ginv = geo.inverse_metric();
    let dt = geo.covariant_derivative(t)?;
    let zero = dt.data()[0].zero_like();
    let mut src = vec![0usize; k + 1];
    let div = DenseTensor::from_fn(n, vec![Variance::Lower; k - 1], |idx| {
        let mut acc = zero.clone();
        src[1..k].copy_from_slice(idx);
        for e in 0..n {
            for b in 0..n {
                src[0] = e;
                src[k] = b;
                acc.fma(1.0, ginv.get(&[e, b]), dt.get(&src));
            }
        }
        acc
    });
    if k == 1 {
        return Ok(div);
    }
    let coeff = (k as f64 - 1.0) / (w as f64 - 2.0 * k as f64 + 2.0);
    // ∇_a (T_{…b}{}^b), new slot first, then symmetrized over all k−1 slots
    let mut src = vec![0usize; k + 1];
    let grad_tr = DenseTensor::from_fn(n, vec![Variance::Lower; k - 1], |idx| {
        let mut acc = zero.clone();
        src[..k - 1].copy_from_slice(idx);
        for b in 0..n {
            for c in 0..n {
                src[k - 1] = b;
                src[k] = c;
                acc.fma(1.0, ginv.get(&[b, c]), dt.get(&src));
            }
        }
        acc
    });
    let slots: Vec<usize> = (0..k - 1).collect();
    let sym = if k > 2 { grad_tr.symmetrize(&slots)? } else { grad_tr };
    div.linear_combination(1.0, &sym, coeff)
}

/// Applies [`divergence_construction`] until a scalar remains.
pub fn iterated_divergence(geo: &LocalGeometry, t: &DenseTensor<Jet>, w: i32) -> Result<Jet> {
    let mut cur = t.clone();
    let mut weight = w;
    while cur.rank() > 0 {
        cur = divergence_construction(geo, &cur, weight)?;
        weight -= 2;
    }
    Ok(cur.data()[0].clone())
}
