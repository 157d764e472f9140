use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chart::{AmbientChart, AmbientPoint};
use super::fields::NaturalTensor;
use crate::error::Result;
use crate::invariants::weyl_contraction;
use crate::jet::{Jet, JetSpace};
use crate::report::CheckReport;
use crate::tensor::DenseTensor;

fn failed(id: &str, anchor: &str, tol: f64, e: crate::Error) -> CheckReport {
    CheckReport::failure(id, anchor, tol, e.to_string())
}

/// Maximum of `|Ric(g̃)|` and `|R̃|` over `samples` random ambient points.
pub fn ambient_ricci_flatness(chart: &AmbientChart, samples: usize, seed: u64, tol: f64) -> CheckReport {
    let anchor = "ambient metric is Ricci-flat";
    CheckReport::timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..samples {
            let p = chart.sample_point(&mut rng);
            let res = (|| -> Result<(f64, f64, f64)> {
                let geo = chart.geometry(&p, 2)?;
                let ric = geo.ricci()?.values().max_abs();
                let r = geo.scalar_curvature()?.value().abs();
                let rm = geo.riemann()?.values().max_abs();
                Ok((ric, r, rm))
            })();
            match res {
                Ok((ric, r, rm)) => {
                    worst = worst.max(ric).max(r);
                    scale = scale.max(rm);
                }
                Err(e) => return failed("ambient-ricci", anchor, tol, e),
            }
        }
        CheckReport::compare_scaled("ambient-ricci", anchor, worst, 0.0, scale.max(1.0), tol)
            .with_detail(format!("{samples} points, model {}", chart.base().name))
    })
}

/// Ambient curvature against the lifted Weyl tensor: the base block equals
/// `τ² W`, every block touching `t` or `ρ` vanishes, and `|R̃m|²_{g̃} = τ⁻⁴|W|²`.
pub fn ambient_curvature(chart: &AmbientChart, p: &AmbientPoint, tol: f64) -> CheckReport {
    let anchor = "ambient curvature is the lifted Weyl tensor";
    CheckReport::timed(|| match ambient_curvature_residual(chart, p) {
        Ok((err, scale, norm_amb, norm_base)) => {
            let block = CheckReport::compare_scaled("ambient-curvature", anchor, err, 0.0, scale.max(1.0), tol);
            let norm = CheckReport::compare("ambient-curvature", anchor, norm_amb, norm_base, tol);
            if block.pass {
                norm.with_detail(format!("block residual {err:e}"))
            } else {
                block.with_detail(format!("norm: {norm_amb} vs {norm_base}"))
            }
        }
        Err(e) => failed("ambient-curvature", anchor, tol, e),
    })
}

fn ambient_curvature_residual(chart: &AmbientChart, p: &AmbientPoint) -> Result<(f64, f64, f64, f64)> {
    let geo = chart.geometry(p, 2)?;
    let base = chart.base_geometry(p, 2)?;
    let rm = geo.riemann()?.values();
    // conformally flat in dimension 3, so the lifted tensor vanishes
    let w = if chart.base_dim() < 4 {
        DenseTensor::zeros(chart.base_dim(), base.riemann()?.variance().to_vec())
    } else {
        base.weyl()?.values()
    };
    let tau = chart.tau(p);
    let tau2 = tau * tau;
    let dim = chart.dim();
    let mut err = 0.0f64;
    let mut idx = [0usize; 4];
    for i in 0..dim.pow(4) {
        let mut r = i;
        for s in (0..4).rev() {
            idx[s] = r % dim;
            r /= dim;
        }
        let expect = if idx.iter().all(|&s| chart.is_base_slot(s)) {
            tau2 * w.get(&[idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1])
        } else {
            0.0
        };
        err = err.max((rm.get(&idx) - expect).abs());
    }
    let gi = geo.inverse_metric().values();
    let g = geo.metric().values();
    let norm_amb = weyl_contraction(&rm, &g, &gi, "abcd,abcd")?;
    let norm_base =
        weyl_contraction(&w, &base.metric().values(), &base.inverse_metric().values(), "abcd,abcd")? / tau2.powi(2);
    Ok((err, tau2 * w.max_abs(), norm_amb, norm_base))
}

/// Christoffel symbols from metric jets against the block formulas, plus
/// dilation equivariance `Γ̃(δ_s p) = Γ̃(p)` up to the factor `s^{-1}` per
/// lower `t` slot and `s` per upper `t` slot.
pub fn ambient_christoffels(chart: &AmbientChart, p: &AmbientPoint, tol: f64) -> CheckReport {
    let anchor = "ambient Christoffel symbols";
    CheckReport::timed(|| {
        let res = (|| -> Result<(f64, f64, f64)> {
            let jet = chart.geometry(p, 1)?.christoffel()?.values();
            let closed = chart.closed_form_christoffels(p)?;
            let err = jet.max_abs_diff(&closed);
            let s = 1.7;
            let moved = chart.geometry(&p.dilated(s), 1)?.christoffel()?.values();
            let dim = chart.dim();
            let mut eq = 0.0f64;
            for c in 0..dim {
                for a in 0..dim {
                    for b in 0..dim {
                        let lows = (a == 0) as i32 + (b == 0) as i32;
                        let ups = (c == 0) as i32;
                        let f = s.powi(ups - lows);
                        eq = eq.max((moved.get(&[c, a, b]) - f * jet.get(&[c, a, b])).abs());
                    }
                }
            }
            Ok((err, eq, closed.max_abs()))
        })();
        match res {
            Ok((err, eq, scale)) => CheckReport::compare_scaled("ambient-christoffel", anchor, err.max(eq), 0.0, scale.max(1.0), tol)
                .with_detail(format!("closed form {err:e}, dilation {eq:e}")),
            Err(e) => failed("ambient-christoffel", anchor, tol, e),
        }
    })
}

/// Ambient Laplacian of a homogeneous extension:
/// `Δ̃(τ^w π*u) = τ^{w−2} π*((Δ + 2λw(n+w−1))u)`.
///
/// `u` maps base coordinate jets to a jet.
pub fn ambient_laplacian_homogeneous(
    chart: &AmbientChart,
    u: &dyn Fn(&[Jet]) -> Jet,
    w: f64,
    p: &AmbientPoint,
    tol: f64,
) -> CheckReport {
    let anchor = "ambient Laplacian of homogeneous extensions";
    CheckReport::timed(|| {
        let res = (|| -> Result<(f64, f64)> {
            let n = chart.base_dim() as f64;
            let base = chart.base_geometry(p, 2)?;
            let ub = u(&base.coordinates());
            let rhs = base.scalar_laplacian(&ub)?.value() + 2.0 * chart.lambda() * w * (n + w - 1.0) * ub.value();
            let tau = chart.tau(p);
            let amb = chart.geometry(p, 2)?;
            let ext = chart.homogeneous_extension(p, &ub, w);
            let lhs = amb.scalar_laplacian(&ext)?.value();
            Ok((lhs, tau.powf(w - 2.0) * rhs))
        })();
        match res {
            Ok((lhs, rhs)) => CheckReport::compare_scaled("ambient-laplacian", anchor, lhs, rhs, lhs.abs().max(rhs.abs()).max(1.0), tol),
            Err(e) => failed("ambient-laplacian", anchor, tol, e),
        }
    })
}

/// `f(δ_s p) = s^w f(p)` for an ambient natural scalar of weight `w`.
pub fn dilation_homogeneity(chart: &AmbientChart, field: &NaturalTensor, p: &AmbientPoint, s: f64, tol: f64) -> CheckReport {
    let anchor = "ambient natural scalars are homogeneous under dilation";
    CheckReport::timed(|| {
        let res = (|| -> Result<(f64, f64)> {
            let at = |q: &AmbientPoint| -> Result<f64> {
                let geo = chart.geometry(q, field.order)?;
                Ok(field.evaluate_scalar(&geo)?.value())
            };
            Ok((at(&p.dilated(s))?, s.powi(field.weight) * at(p)?))
        })();
        match res {
            Ok((lhs, rhs)) => CheckReport::compare_scaled("ambient-dilation", anchor, lhs, rhs, lhs.abs().max(rhs.abs()).max(1.0), tol)
                .with_detail(field.name.clone()),
            Err(e) => failed("ambient-dilation", anchor, tol, e),
        }
    })
}

/// Whether `field` evaluated on the ambient metric equals `τ^w` times the
/// pullback of `field` on the base, with all `t`/`ρ` components zero.
pub fn check_straightenable(field: &NaturalTensor, chart: &AmbientChart, p: &AmbientPoint, tol: f64) -> CheckReport {
    let anchor = "natural tensor is straightenable";
    CheckReport::timed(|| match straightenable_residual(field, chart, p) {
        Ok((err, scale)) => CheckReport::compare_scaled("straightenable", anchor, err, 0.0, scale.max(1.0), tol)
            .with_detail(format!("{} on {}", field.name, chart.base().name)),
        Err(e) => failed("straightenable", anchor, tol, e),
    })
}

fn straightenable_residual(field: &NaturalTensor, chart: &AmbientChart, p: &AmbientPoint) -> Result<(f64, f64)> {
    let amb = field.evaluate(&chart.geometry(p, field.order)?)?.values();
    let base = field.evaluate(&chart.base_geometry(p, field.order)?)?.values();
    let factor = chart.tau(p).powi(field.weight);
    let dim = chart.dim();
    let rank = amb.rank();
    let mut idx = vec![0usize; rank];
    let mut bidx = vec![0usize; rank];
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..dim.pow(rank as u32) {
        let mut r = i;
        for s in (0..rank).rev() {
            idx[s] = r % dim;
            r /= dim;
        }
        let expect = if idx.iter().all(|&s| chart.is_base_slot(s)) {
            for (b, &s) in bidx.iter_mut().zip(&idx) {
                *b = s - 1;
            }
            factor * base.get(&bidx)
        } else {
            0.0
        };
        scale = scale.max(expect.abs()).max(amb.get(&idx).abs());
        err = err.max((amb.get(&idx) - expect).abs());
    }
    Ok((err, scale))
}

/// Jet of the constant `c` in the ambient space at `order`.
pub fn ambient_constant(chart: &AmbientChart, order: usize, c: f64) -> Jet {
    Jet::constant(&JetSpace::get(chart.dim(), order), order, c)
}

/// Values of an ambient natural tensor.
pub fn ambient_values(field: &NaturalTensor, chart: &AmbientChart, p: &AmbientPoint) -> Result<DenseTensor> {
    Ok(field.evaluate(&chart.geometry(p, field.order)?)?.values())
}
