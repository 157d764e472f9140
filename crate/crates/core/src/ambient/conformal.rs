use super::chart::{AmbientChart, AmbientPoint};
use crate::error::{Error, Result};
use crate::geometry::{LocalGeometry, ManifoldModel};
use crate::invariants::{apply_i_ell, pf_ell};
use crate::report::CheckReport;

/// Largest number of ambient Laplacians the jet route will attempt.
pub const MAX_AMBIENT_LAPLACIANS: usize = 2;

fn laplacian_count(n: usize, ell: usize) -> Result<usize> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    if ell == 0 || 2 * ell > n {
        return Err(Error::OrderOutOfRange { ell, dim: n });
    }
    Ok(n / 2 - ell)
}

/// `Δ̃^{n/2−ℓ} Pf_ℓ(R̃m)` at the base point `(1, x, 0)`, computed from ambient
/// metric jets.
pub fn conformal_pfaffian_ambient(chart: &AmbientChart, ell: usize, x: &[f64]) -> Result<f64> {
    let n = chart.base_dim();
    let k = laplacian_count(n, ell)?;
    if k > MAX_AMBIENT_LAPLACIANS {
        return Err(Error::Unsupported(format!(
            "{k} ambient Laplacians exceed the jet budget of {MAX_AMBIENT_LAPLACIANS}"
        )));
    }
    let p = AmbientPoint::on_base(x);
    let geo = chart.geometry(&p, 2 + 2 * k)?;
    let mut f = pf_ell(geo.riemann()?, geo.inverse_metric(), ell)?;
    for _ in 0..k {
        f = geo.scalar_laplacian(&f)?;
    }
    Ok(f.value())
}

/// The same invariant from base data only: the iterated shifted Laplacian of
/// weight-`2ℓ` invariants applied to `Pf_ℓ(W)`.
pub fn conformal_pfaffian_einstein(model: &ManifoldModel, ell: usize, x: &[f64]) -> Result<f64> {
    let n = model.dim();
    let k = laplacian_count(n, ell)?;
    let j = model.schouten_trace()?;
    let geo = LocalGeometry::at(model.chart.as_ref(), x, 2 + 2 * k)?;
    let f = pf_ell(geo.weyl()?, geo.inverse_metric(), ell)?;
    Ok(apply_i_ell(&geo, &f, ell, k, j)?.value())
}

/// Both routes to the conformal Pfaffian invariant at `x`.
pub fn conformal_pfaffian_routes(chart: &AmbientChart, ell: usize, x: &[f64], tol: f64) -> CheckReport {
    let anchor = "ambient and Einstein routes to the conformal Pfaffian invariant agree";
    let id = format!("conformal-pf{ell}-{}", chart.base_dim());
    CheckReport::timed(|| {
        let amb = conformal_pfaffian_ambient(chart, ell, x);
        let ein = conformal_pfaffian_einstein(chart.base(), ell, x);
        match (amb, ein) {
            (Ok(a), Ok(e)) => CheckReport::compare_scaled(&id, anchor, a, e, a.abs().max(e.abs()).max(1.0), tol)
                .with_detail(chart.base().name.clone()),
            (Err(e), _) | (_, Err(e)) => CheckReport::failure(&id, anchor, tol, e.to_string()),
        }
    })
}
