use std::f64::consts::PI;

use super::laurent::{renormalized_volume, NormalFormVolume};
use super::quadrature::{integrate_local, integrate_pointwise, model_volume, IntegrationOptions};
use crate::ambient::{build_ambient, conformal_pfaffian_ambient, conformal_pfaffian_einstein, AmbientPoint, NaturalTensor};
use crate::error::{Error, Result};
use crate::geometry::{LocalGeometry, ManifoldModel};
use crate::invariants::{double_factorial, factorial, i_ell_constant_coefficient, pf_ell, NaturalScalar};
use crate::report::CheckReport;

/// How the conformal Pfaffian invariants entering the Einstein Gauss–Bonnet
/// formula are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfaffianRoute {
    /// Iterated shifted Laplacians of `Pf_ℓ(W)` on the base.
    Einstein,
    /// Iterated ambient Laplacians of `Pf_ℓ(R̃m)`.
    Ambient,
}

/// `∫ f dvol` for a scalar natural field.
pub fn integrate_scalar(field: &NaturalTensor, model: &ManifoldModel, opts: &IntegrationOptions) -> Result<f64> {
    if field.rank != 0 {
        return Err(Error::ShapeMismatch { got: field.rank, want: 0 });
    }
    Ok(integrate_local(model, field.order, 1, opts, |geo| Ok(vec![field.evaluate_scalar(geo)?.value()]))?[0])
}

fn even_dim(model: &ManifoldModel) -> Result<usize> {
    let n = model.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    Ok(n)
}

fn euler(model: &ManifoldModel) -> Result<f64> {
    model.euler_characteristic.map(|c| c as f64).ok_or_else(|| Error::UnknownEulerCharacteristic(model.name.clone()))
}

/// Compact Chern–Gauss–Bonnet: `∫ Pf_{n/2}(Rm) dvol = (2π)^{n/2} χ`.
pub fn verify_cgb(model: &ManifoldModel, opts: &IntegrationOptions, tol: f64) -> Result<CheckReport> {
    let n = even_dim(model)?;
    let chi = euler(model)?;
    let half = n / 2;
    Ok(CheckReport::timed(|| {
        let lhs = integrate_local(model, 2, 1, opts, |geo| Ok(vec![pf_ell(geo.riemann()?, geo.inverse_metric(), half)?.value()]));
        match lhs {
            Ok(v) => CheckReport::compare("cgb", "Gauss-Bonnet-Chern integral equals (2π)^{n/2}χ", v[0], (2.0 * PI).powi(half as i32) * chi, tol)
                .with_detail(model.name.clone()),
            Err(e) => CheckReport::failure("cgb", "Gauss-Bonnet-Chern integral equals (2π)^{n/2}χ", tol, e.to_string()),
        }
    }))
}

/// Pointwise value of the conformal Pfaffian invariant of order `ell` by the chosen route.
pub fn conformal_pfaffian(model: &ManifoldModel, ell: usize, x: &[f64], route: PfaffianRoute) -> Result<f64> {
    match route {
        PfaffianRoute::Einstein => conformal_pfaffian_einstein(model, ell, x),
        PfaffianRoute::Ambient => conformal_pfaffian_ambient(&build_ambient(model)?, ell, x),
    }
}

/// Coefficient of `∫𝒫_{ℓ,n}` in the Einstein Gauss–Bonnet formula:
/// `(−2)^{ℓ−n/2}(ℓ−1)!/(n/2−1)!`.
pub fn gbc_coefficient(n: usize, ell: usize) -> f64 {
    let half = n / 2;
    (-2.0f64).powi(ell as i32 - half as i32) * factorial(ell - 1) / factorial(half - 1)
}

/// Both sides of the Einstein Gauss–Bonnet formula
/// `(2π)^{n/2}χ = (2λ)^{n/2}(n−1)!!Vol + Σ_{ℓ≥2} c_ℓ ∫𝒫_{ℓ,n}`.
pub fn gbc_sides(model: &ManifoldModel, route: PfaffianRoute, opts: &IntegrationOptions) -> Result<(f64, f64)> {
    let n = even_dim(model)?;
    if n > 8 {
        return Err(Error::Unsupported(format!("dimension {n} exceeds 8")));
    }
    let lambda = model.require_einstein()?;
    let chi = euler(model)?;
    let half = n / 2;
    let vol = model_volume(model, opts)?;
    let mut rhs = (2.0 * lambda).powi(half as i32) * double_factorial(n as i64 - 1) * vol;
    let ells: Vec<usize> = (2..=half).collect();
    let ints = integrate_pointwise(model, ells.len(), opts, |x| {
        ells.iter().map(|&l| conformal_pfaffian(model, l, x, route)).collect()
    })?;
    for (&l, v) in ells.iter().zip(ints) {
        rhs += gbc_coefficient(n, l) * v;
    }
    Ok(((2.0 * PI).powi(half as i32) * chi, rhs))
}

/// Einstein Gauss–Bonnet closure for one route.
pub fn verify_gbc(model: &ManifoldModel, route: PfaffianRoute, opts: &IntegrationOptions, tol: f64) -> Result<CheckReport> {
    even_dim(model)?;
    model.require_einstein()?;
    euler(model)?;
    if !model.compact {
        return Err(Error::NonCompact(model.name.clone()));
    }
    let anchor = "Einstein Gauss-Bonnet formula with conformal Pfaffian invariants";
    Ok(CheckReport::timed(|| match gbc_sides(model, route, opts) {
        Ok((lhs, rhs)) => CheckReport::compare("gbc", anchor, lhs, rhs, tol).with_detail(format!("{} via {route:?} route", model.name)),
        Err(e) => CheckReport::failure("gbc", anchor, tol, e.to_string()),
    }))
}

/// Einstein Gauss–Bonnet closure by both routes.
pub fn verify_gbc_routes(model: &ManifoldModel, opts: &IntegrationOptions, tol: f64) -> Result<Vec<CheckReport>> {
    Ok(vec![
        verify_gbc(model, PfaffianRoute::Einstein, opts, tol)?,
        verify_gbc(model, PfaffianRoute::Ambient, opts, tol)?.with_id("gbc-ambient"),
    ])
}

/// Renormalized volume of a normal-form model against the Einstein
/// Gauss–Bonnet prediction with `W = 0`: `(2π)^{n/2}χ/((2λ)^{n/2}(n−1)!!)`.
pub fn verify_renormalized_volume(model: &ManifoldModel, tol: f64) -> Result<CheckReport> {
    let n = even_dim(model)?;
    let data = NormalFormVolume::from_model(model)?;
    let lambda = model.require_einstein()?;
    let chi = euler(model)?;
    let half = n as i32 / 2;
    let v = renormalized_volume(&data)?;
    let expect = (2.0 * PI).powi(half) * chi / ((2.0 * lambda).powi(half) * double_factorial(n as i64 - 1));
    Ok(CheckReport::compare("rvol", "renormalized volume as the finite part of the volume expansion", v, expect, tol)
        .with_detail(model.name.clone()))
}

/// Ambient evaluation of `Δ̃^m I` at `(1, x, 0)` for a catalog scalar `I`.
fn ambient_iterated_laplacian(model: &ManifoldModel, scalar: NaturalScalar, m: usize, x: &[f64]) -> Result<f64> {
    let chart = build_ambient(model)?;
    let geo = chart.geometry(&AmbientPoint::on_base(x), scalar.derivative_order() + 2 * m)?;
    let mut f = scalar.evaluate(&geo)?;
    for _ in 0..m {
        f = geo.scalar_laplacian(&f)?;
    }
    Ok(f.value())
}

fn straightenable_catalog(scalar: NaturalScalar) -> Result<usize> {
    match scalar {
        NaturalScalar::WeylNorm | NaturalScalar::WeylBasis { degree: 3, .. } | NaturalScalar::PfaffianWeyl { .. } => {
            Ok((-scalar.weight() / 2) as usize)
        }
        _ => Err(Error::Unsupported(format!("{scalar} is not in the straightenable catalog"))),
    }
}

/// `∫ Δ̃^{n/2−k} I` (ambient) against the constant-term multiple of `∫ I`
/// for a straightenable scalar `I` of weight `−2k` on a compact homogeneous
/// Einstein model.
pub fn verify_main_theorem_coefficient(
    model: &ManifoldModel,
    scalar: NaturalScalar,
    opts: &IntegrationOptions,
    tol: f64,
) -> Result<CheckReport> {
    let k = straightenable_catalog(scalar)?;
    let n = even_dim(model)?;
    let j = model.schouten_trace()?;
    if !model.compact || !model.homogeneous {
        return Err(Error::Unsupported(format!("{} is not compact and homogeneous", model.name)));
    }
    if 2 * k > n {
        return Err(Error::OrderOutOfRange { ell: k, dim: n });
    }
    let m = n / 2 - k;
    let anchor = "constant term of the iterated ambient Laplacian of a straightenable invariant";
    Ok(CheckReport::timed(|| {
        let res = (|| -> Result<(f64, f64)> {
            let c = i_ell_constant_coefficient(n, k, m, j)?;
            let v = integrate_pointwise(model, 2, opts, |x| {
                let geo = LocalGeometry::at(model.chart.as_ref(), x, scalar.derivative_order())?;
                Ok(vec![ambient_iterated_laplacian(model, scalar, m, x)?, scalar.evaluate(&geo)?.value()])
            })?;
            Ok((v[0], c * v[1]))
        })();
        match res {
            Ok((lhs, rhs)) => CheckReport::compare("iterated-laplacian-coefficient", anchor, lhs, rhs, tol)
                .with_detail(format!("{scalar} on {}, {m} Laplacians", model.name)),
            Err(e) => CheckReport::failure("iterated-laplacian-coefficient", anchor, tol, e.to_string()),
        }
    }))
}

/// Residual of the Einstein formula
/// `ΔW = 4λ(n−1)W − W_{ab}{}^{ef}W_{efcd} − 2W_{aecf}W_b{}^e{}_d{}^f + 2W_{aedf}W_b{}^e{}_c{}^f`
/// at `x`, with the scale of the largest term.
pub fn weyl_laplacian_residual(model: &ManifoldModel, x: &[f64]) -> Result<(f64, f64)> {
    let lambda = model.require_einstein()?;
    let n = model.dim() as f64;
    let geo = LocalGeometry::at(model.chart.as_ref(), x, 4)?;
    let w = geo.weyl()?;
    let lap = geo.laplacian(w)?.values();
    let wv = w.values();
    let a = geo.contract("abef,efcd->abcd", &[w, w])?.values();
    let b = geo.contract("aecf,bedf->abcd", &[w, w])?.values();
    let c = geo.contract("aedf,becf->abcd", &[w, w])?.values();
    let rhs = wv
        .linear_combination(4.0 * lambda * (n - 1.0), &a, -1.0)?
        .linear_combination(1.0, &b, -2.0)?
        .linear_combination(1.0, &c, 2.0)?;
    let scale = [lap.max_abs(), 4.0 * lambda.abs() * (n - 1.0) * wv.max_abs(), a.max_abs(), 2.0 * b.max_abs(), 2.0 * c.max_abs()]
        .into_iter()
        .fold(0.0, f64::max);
    Ok((lap.max_abs_diff(&rhs), scale))
}

/// Integration-by-parts identities and, on Einstein models, the pointwise
/// Weyl Laplacian formula. One report per identity.
pub fn verify_worked_examples(model: &ManifoldModel, opts: &IntegrationOptions, tol: f64) -> Result<Vec<CheckReport>> {
    if model.dim() < 4 {
        return Err(Error::DimensionTooSmall { need: 4, got: model.dim() });
    }
    if !model.compact {
        return Err(Error::NonCompact(model.name.clone()));
    }
    let mut out = Vec::new();
    let ints = integrate_local(model, 4, 5, opts, |geo| {
        let w = geo.weyl()?;
        let dw = geo.covariant_derivative(w)?;
        let lapw = geo.laplacian(w)?;
        let grad2 = geo.contract("eabcd,eabcd->", &[&dw, &dw])?.data()[0].value();
        let wlap = geo.contract("abcd,abcd->", &[w, &lapw])?.data()[0].value();
        let u = geo.contract("abcd,abcd->", &[w, w])?.data()[0].clone();
        let lapu = geo.scalar_laplacian(&u)?.value();
        let du2 = geo.gradient_norm2(&u).value();
        Ok(vec![grad2, wlap, lapu, du2, u.value() * lapu])
    });
    let name = &model.name;
    match ints {
        Ok(v) => {
            let [grad2, wlap, lapu, du2, ulapu] = [v[0], v[1], v[2], v[3], v[4]];
            out.push(
                CheckReport::compare_scaled("ibp-weyl", "integral of |∇W|² equals minus integral of ⟨W,ΔW⟩", grad2, -wlap, grad2.abs().max(wlap.abs()).max(1.0), tol)
                    .with_detail(name.clone()),
            );
            out.push(
                CheckReport::compare_scaled("ibp-weyl-norm", "integral of |∇|W|²|² equals minus integral of |W|²Δ|W|²", du2, -ulapu, du2.abs().max(ulapu.abs()).max(1.0), tol)
                    .with_detail(name.clone()),
            );
            out.push(
                CheckReport::compare_scaled("divergence-weyl-norm", "integral of Δ|W|² vanishes", lapu, 0.0, du2.abs().max(1.0), tol)
                    .with_detail(name.clone()),
            );
        }
        Err(e) => out.push(CheckReport::failure("ibp-weyl", "integration by parts identities", tol, e.to_string())),
    }
    if model.is_einstein() {
        let x = super::quadrature::reference_point(model.chart.as_ref());
        out.push(match weyl_laplacian_residual(model, &x) {
            Ok((res, scale)) => CheckReport::compare_scaled("delta-weyl", "Weyl Laplacian on Einstein manifolds", res, 0.0, scale.max(1.0), tol)
                .with_detail(name.clone()),
            Err(e) => CheckReport::failure("delta-weyl", "Weyl Laplacian on Einstein manifolds", tol, e.to_string()),
        });
    }
    Ok(out)
}
