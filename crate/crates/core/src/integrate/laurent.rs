use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_volume, HyperbolicChart, ManifoldModel};

/// Finite Laurent-type expansion `Σ cₖ εᵏ + L log(1/ε) + O(ε^{truncation})`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub terms: BTreeMap<i32, f64>,
    pub log_coefficient: f64,
    /// First exponent not represented; `None` when the series is exact.
    pub truncation: Option<i32>,
}

impl LaurentSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(exp: i32, c: f64) -> Self {
        let mut s = Self::new();
        s.add_term(exp, c);
        s
    }

    pub fn add_term(&mut self, exp: i32, c: f64) {
        if self.truncation.is_some_and(|t| exp >= t) {
            return;
        }
        *self.terms.entry(exp).or_insert(0.0) += c;
    }

    pub fn coefficient(&self, exp: i32) -> f64 {
        self.terms.get(&exp).copied().unwrap_or(0.0)
    }

    /// Finite part: the `ε⁰` coefficient.
    pub fn fp(&self) -> f64 {
        self.coefficient(0)
    }

    pub fn divergent_part(&self) -> LaurentSeries {
        LaurentSeries {
            terms: self.terms.iter().filter(|(&k, _)| k < 0).map(|(&k, &v)| (k, v)).collect(),
            log_coefficient: self.log_coefficient,
            truncation: None,
        }
    }

    pub fn scale(&self, f: f64) -> Self {
        LaurentSeries {
            terms: self.terms.iter().map(|(&k, &v)| (k, f * v)).collect(),
            log_coefficient: f * self.log_coefficient,
            truncation: self.truncation,
        }
    }

    /// Evaluates the series (including the log term) at `ε`.
    pub fn eval(&self, eps: f64) -> f64 {
        self.terms.iter().map(|(&k, &v)| v * eps.powi(k)).sum::<f64>() - self.log_coefficient * eps.ln()
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        let truncation = match (self.truncation, rhs.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut out = LaurentSeries { terms: BTreeMap::new(), log_coefficient: self.log_coefficient + rhs.log_coefficient, truncation };
        for (&k, &v) in self.terms.iter().chain(&rhs.terms) {
            out.add_term(k, v);
        }
        out
    }
}

impl Mul<f64> for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, f: f64) -> LaurentSeries {
        self.scale(f)
    }
}

/// Metric `r⁻²(dr² + g_r)` on `(0, r_max) × N` with
/// `√det g_r = a(r) √det ĥ` for a polynomial `a` and a round `N = S^{n−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormVolume {
    pub dim: usize,
    /// Coefficients of `a(r)` in increasing degree.
    pub density: Vec<f64>,
    pub r_max: f64,
    /// Volume of the cross-section `(N, ĥ)`.
    pub cross_section_volume: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl NormalFormVolume {
    /// Hyperbolic space: `a(r) = (1 − r²/4)^{n−1}`, `r_max = 2`.
    pub fn hyperbolic(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall { need: 2, got: n });
        }
        let mut density = vec![0.0; 2 * (n - 1) + 1];
        for j in 0..n {
            density[2 * j] = binomial(n - 1, j) * (-0.25f64).powi(j as i32);
        }
        Ok(NormalFormVolume { dim: n, density, r_max: HyperbolicChart::R_MAX, cross_section_volume: unit_sphere_volume(n - 1) })
    }

    /// Normal-form data of a catalog model, when it has one.
    pub fn from_model(model: &ManifoldModel) -> Result<Self> {
        if model.name == format!("hyperbolic{}", model.dim()) {
            Self::hyperbolic(model.dim())
        } else {
            Err(Error::NonNormalForm(model.name.clone()))
        }
    }

    fn validate(&self) -> Result<()> {
        if self.density.first().copied().unwrap_or(0.0) <= 0.0 {
            return Err(Error::NonNormalForm("a(0) must be positive".into()));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0 && self.cross_section_volume > 0.0) {
            return Err(Error::NonNormalForm("bad range or cross-section".into()));
        }
        Ok(())
    }

    /// `Vol({r > ε})` as an exact series in `ε`.
    pub fn volume_expansion(&self) -> Result<LaurentSeries> {
        self.validate()?;
        let n = self.dim as i32;
        let mut s = LaurentSeries::new();
        for (j, &c) in self.density.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            // ∫_ε^R r^p dr with p = j − n
            let p = j as i32 - n;
            if p == -1 {
                s.add_term(0, c * self.r_max.ln());
                s.log_coefficient += c;
            } else {
                let q = p + 1;
                s.add_term(0, c * self.r_max.powi(q) / q as f64);
                s.add_term(q, -c / q as f64);
            }
        }
        Ok(s.scale(self.cross_section_volume))
    }
}

/// Renormalized volume: finite part of the volume expansion. A nonzero
/// logarithmic coefficient is an error.
pub fn renormalized_volume(data: &NormalFormVolume) -> Result<f64> {
    let s = data.volume_expansion()?;
    let scale = s.terms.values().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if s.log_coefficient.abs() > 1e-14 * scale {
        return Err(Error::UnexpectedLogTerm(s.log_coefficient));
    }
    Ok(s.fp())
}
