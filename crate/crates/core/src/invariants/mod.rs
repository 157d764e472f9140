//! Generalized Pfaffians, Weyl contraction bases and operators producing
//! straightenable invariants.

mod catalog;
mod operators;
mod pfaffian;
mod weyl;

pub use catalog::{
    cubic_weyl_tensors, double_divergence, weyl_cotton_divergence, weyl_square_tensor, InvariantValue, NaturalScalar,
};
pub use operators::{
    apply_i_ell, divergence_construction, i_ell_constant_coefficient, i_ell_operator, i_ell_shift, iterated_divergence,
};
pub use pfaffian::{
    double_factorial, factorial, mixed_pair_matrix, pf_ell, pf_ell_brute_force, pf_ell_pairs, pfaffian,
};
pub use weyl::{
    basis_patterns, cubic_rearrangement, low_order_pfaffian_identity, pfaffian_coefficients, pfaffian_from_basis,
    quartic_rearrangement, random_weyl, remove_traces, symmetry_residuals, weyl_basis, weyl_contraction, weyl_project,
    SymmetryResiduals, CUBIC_BASIS, QUADRATIC_BASIS, QUARTIC_BASIS,
};

use crate::error::{Error, Result};
use crate::geometry::{LocalGeometry, ManifoldModel};
use crate::report::CheckReport;

/// `Σ_ℓ (n−2ℓ−1)!!(2J/n)^{n/2−ℓ} Pf_ℓ(W)` from the Weyl tensor values.
pub fn einstein_pfaffian_series(w: &crate::DenseTensor, ginv: &crate::DenseTensor, j_value: f64) -> Result<f64> {
    let n = w.dim();
    if n % 2 != 0 {
        return Err(Error::OddDimension(n));
    }
    let half = n / 2;
    let base = 2.0 * j_value / n as f64;
    let mut total = 0.0;
    for ell in 0..=half {
        let pf = pf_ell(w, ginv, ell)?;
        total += double_factorial(n as i64 - 2 * ell as i64 - 1) * base.powi((half - ell) as i32) * pf;
    }
    Ok(total)
}

/// Pfaffian of the curvature against its expansion in Weyl Pfaffians at an
/// Einstein point. The two sides use separate curvature tensors (Riemann
/// versus Weyl) and `J` from the model constant.
pub fn einstein_pfaffian_expansion(model: &ManifoldModel, point: &[f64], tol: f64) -> CheckReport {
    let id = format!("einstein-pfaffian-{}", model.name);
    let anchor = "Pfaffian of an Einstein metric in Weyl Pfaffians";
    CheckReport::timed(|| {
        let run = || -> Result<(f64, f64)> {
            let j = model.schouten_trace()?;
            if !model.dim().is_multiple_of(2) {
                return Err(Error::OddDimension(model.dim()));
            }
            let geo = LocalGeometry::at(model.chart.as_ref(), point, 2)?;
            let gi = geo.inverse_metric().values();
            let lhs = pfaffian(&geo.riemann()?.values(), &gi)?;
            let rhs = einstein_pfaffian_series(&geo.weyl()?.values(), &gi, j)?;
            Ok((lhs, rhs))
        };
        match run() {
            Ok((l, r)) => CheckReport::compare(&id, anchor, l, r, tol),
            Err(e) => CheckReport::failure(&id, anchor, tol, e.to_string()),
        }
    })
}
