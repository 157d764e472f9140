use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::pfaffian::pf_ell;
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::tensor::{contract, ContractionSpec, DenseTensor, Scalar, Schedule, Variance};

/// Complete contractions spanning the quadratic Weyl invariants.
pub const QUADRATIC_BASIS: [&str; 1] = ["abcd,abcd"];

/// Complete contractions spanning the cubic Weyl invariants.
pub const CUBIC_BASIS: [&str; 2] = ["abcd,cdef,efab", "acbd,cedf,eafb"];

/// Complete contractions spanning the quartic Weyl invariants.
pub const QUARTIC_BASIS: [&str; 7] = [
    "abcd,abcd,efgh,efgh",
    "abcd,cdef,efgh,ghab",
    "acde,bcde,afgh,bfgh",
    "abcd,cdef,ageh,bgfh",
    "abcd,cdef,aegh,bfgh",
    "acbd,cedf,egfh,gahb",
    "acbd,ecfd,ageh,bgfh",
];

/// Coefficients of `Pf_ℓ(W)` in the degree-ℓ basis, `ℓ ∈ {2, 3, 4}`.
pub fn pfaffian_coefficients(ell: usize) -> Result<&'static [f64]> {
    const C2: [f64; 1] = [1.0 / 8.0];
    const C3: [f64; 2] = [1.0 / 12.0, -1.0 / 6.0];
    const C4: [f64; 7] = [1.0 / 128.0, 1.0 / 64.0, -1.0 / 8.0, -1.0 / 4.0, 1.0 / 8.0, 1.0 / 8.0, -1.0 / 4.0];
    match ell {
        2 => Ok(&C2),
        3 => Ok(&C3),
        4 => Ok(&C4),
        _ => Err(Error::Unsupported(format!("no Weyl basis of degree {ell}"))),
    }
}

pub fn basis_patterns(k: usize) -> Result<&'static [&'static str]> {
    match k {
        2 => Ok(&QUADRATIC_BASIS),
        3 => Ok(&CUBIC_BASIS),
        4 => Ok(&QUARTIC_BASIS),
        _ => Err(Error::Unsupported(format!("no Weyl basis of degree {k}"))),
    }
}

/// Full contraction of `k` copies of `w` following `pattern`.
pub fn weyl_contraction<S: Scalar>(w: &DenseTensor<S>, g: &DenseTensor<S>, ginv: &DenseTensor<S>, pattern: &str) -> Result<S> {
    let k = pattern.split(',').count();
    let factors = vec![w; k];
    let spec = ContractionSpec::einsum(pattern, &factors)?;
    let out = contract(&spec, g, ginv, Schedule::Greedy)?;
    Ok(out.data()[0].clone())
}

/// The degree-`k` basis invariants of an all-lower Weyl-type tensor.
pub fn weyl_basis<S: Scalar>(w: &DenseTensor<S>, g: &DenseTensor<S>, ginv: &DenseTensor<S>, k: usize) -> Result<Vec<S>> {
    if w.rank() != 4 {
        return Err(Error::ShapeMismatch { got: w.rank(), want: 4 });
    }
    basis_patterns(k)?.iter().map(|p| weyl_contraction(w, g, ginv, p)).collect()
}

/// `Σ cᵢ 𝒲_{ℓ,i}` with the Pfaffian coefficients.
pub fn pfaffian_from_basis<S: Scalar>(basis: &[S], ell: usize) -> Result<S> {
    let coeffs = pfaffian_coefficients(ell)?;
    if basis.len() != coeffs.len() {
        return Err(Error::ShapeMismatch { got: basis.len(), want: coeffs.len() });
    }
    let mut acc = basis[0].zero_like();
    for (c, b) in coeffs.iter().zip(basis) {
        acc.add_scaled(*c, b);
    }
    Ok(acc)
}

/// Compares `Pf_ℓ(W)` from the delta expansion with its Weyl-basis form.
///
/// The relative error is measured against the largest of `|Pf_ℓ|` and the
/// absolute values of the individual basis terms, so cancellations between
/// terms do not inflate it.
pub fn low_order_pfaffian_identity(w: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor, ell: usize, tol: f64) -> CheckReport {
    let id = format!("pfaffian-basis-{ell}-dim{}", w.dim());
    let anchor = "Pfaffian of Weyl in contraction basis";
    CheckReport::timed(|| {
        let run = || -> Result<(f64, f64, f64)> {
            let coeffs = pfaffian_coefficients(ell)?;
            let lhs = if 2 * ell > w.dim() { 0.0 } else { pf_ell(w, ginv, ell)? };
            let basis = weyl_basis(w, g, ginv, ell)?;
            let rhs = pfaffian_from_basis(&basis, ell)?;
            let scale = coeffs.iter().zip(&basis).map(|(c, b)| (c * b).abs()).fold(lhs.abs(), f64::max);
            Ok((lhs, rhs, scale))
        };
        match run() {
            Ok((lhs, rhs, scale)) => CheckReport::compare_scaled(&id, anchor, lhs, rhs, scale, tol),
            Err(e) => CheckReport::failure(&id, anchor, tol, e.to_string()),
        }
    })
}

/// Both sides of the cubic Bianchi rearrangement used for `Pf₃(W)`.
pub fn cubic_rearrangement(w: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor) -> Result<(f64, f64)> {
    let lhs = weyl_contraction(w, g, ginv, "abce,cdaf,efbd")?;
    let rhs = weyl_contraction(w, g, ginv, "abce,afcd,bfed")? - 0.25 * weyl_contraction(w, g, ginv, "acbe,acfd,befd")?;
    Ok((lhs, rhs))
}

/// Both sides of the quartic Bianchi rearrangement used for `Pf₄(W)`.
pub fn quartic_rearrangement(w: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor) -> Result<(f64, f64)> {
    let lhs = weyl_contraction(w, g, ginv, "abeg,cdab,efch,ghdf")?;
    let rhs = weyl_contraction(w, g, ginv, "cdab,abeg,chef,dhgf")?
        - 0.5 * weyl_contraction(w, g, ginv, "cdab,abeg,cefh,dgfh")?;
    Ok((lhs, rhs))
}

/// Projects a rank-4 covariant tensor onto Weyl-type tensors for the metric `g`.
///
/// Steps, in this order: antisymmetrize each pair, symmetrize under pair
/// exchange, remove the totally antisymmetric part, subtract the
/// Kulkarni–Nomizu product of the Schouten-type trace.
pub fn weyl_project(t: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor) -> Result<DenseTensor> {
    let n = t.dim();
    if n < 3 {
        return Err(Error::DimensionTooSmall { need: 3, got: n });
    }
    if t.rank() != 4 || t.variance().iter().any(|v| *v != Variance::Lower) {
        return Err(Error::MixedVariance);
    }
    let a = t.antisymmetrize(&[0, 1])?.antisymmetrize(&[2, 3])?;
    let s = a.linear_combination(0.5, &a.permute_slots(&[2, 3, 0, 1])?, 0.5)?;
    let r = s.linear_combination(1.0, &s.antisymmetrize(&[0, 1, 2, 3])?, -1.0)?;
    Ok(remove_traces(&r, g, ginv))
}

/// `R − P ⊙ g` with `P` the Schouten-type tensor of the algebraic curvature tensor `r`.
pub fn remove_traces(r: &DenseTensor, g: &DenseTensor, ginv: &DenseTensor) -> DenseTensor {
    let n = r.dim();
    let nf = n as f64;
    let ric = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |i| {
        let mut s = 0.0;
        for c in 0..n {
            for d in 0..n {
                s += ginv.get(&[c, d]) * r.get(&[i[0], c, i[1], d]);
            }
        }
        s
    });
    let scal: f64 = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| ginv.get(&[a, b]) * ric.get(&[a, b])).sum();
    let j = scal / (2.0 * (nf - 1.0));
    let p = DenseTensor::from_fn(n, vec![Variance::Lower; 2], |i| (ric.get(i) - j * g.get(i)) / (nf - 2.0));
    DenseTensor::from_fn(n, vec![Variance::Lower; 4], |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        r.get(i) - p.get(&[a, c]) * g.get(&[b, d]) + p.get(&[a, d]) * g.get(&[b, c]) + p.get(&[b, c]) * g.get(&[a, d])
            - p.get(&[b, d]) * g.get(&[a, c])
    })
}

/// Random algebraic Weyl tensor for the Euclidean metric, normally distributed
/// before projection.
pub fn random_weyl(dim: usize, seed: u64) -> Result<DenseTensor> {
    if dim < 4 {
        return Err(Error::DimensionTooSmall { need: 4, got: dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = DenseTensor::from_fn(dim, vec![Variance::Lower; 4], |_| StandardNormal.sample(&mut rng));
    let g = DenseTensor::euclidean_metric(dim);
    weyl_project(&raw, &g, &g)
}

/// Largest violations of the Weyl-tensor symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryResiduals {
    pub first_pair: f64,
    pub second_pair: f64,
    pub pair_exchange: f64,
    pub bianchi: f64,
    pub trace: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [self.first_pair, self.second_pair, self.pair_exchange, self.bianchi, self.trace].into_iter().fold(0.0, f64::max)
    }
}

pub fn symmetry_residuals(w: &DenseTensor, ginv: &DenseTensor) -> Result<SymmetryResiduals> {
    let n = w.dim();
    let diff = |perm: &[usize], sign: f64| -> Result<f64> { Ok(w.max_abs_diff(&w.permute_slots(perm)?.scaled(sign))) };
    let mut bianchi: f64 = 0.0;
    let mut trace: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let cyc = w.get(&[a, b, c, d]) + w.get(&[b, c, a, d]) + w.get(&[c, a, b, d]);
                    bianchi = bianchi.max(cyc.abs());
                }
            }
        }
    }
    for b in 0..n {
        for d in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                for c in 0..n {
                    s += ginv.get(&[a, c]) * w.get(&[a, b, c, d]);
                }
            }
            trace = trace.max(s.abs());
        }
    }
    Ok(SymmetryResiduals {
        first_pair: diff(&[1, 0, 2, 3], -1.0)?,
        second_pair: diff(&[0, 1, 3, 2], -1.0)?,
        pair_exchange: diff(&[2, 3, 0, 1], 1.0)?,
        bianchi,
        trace,
    })
}
