use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pfaffian::pf_ell;
use super::weyl::{basis_patterns, weyl_contraction};
use crate::error::{Error, Result};
use crate::geometry::LocalGeometry;
use crate::jet::Jet;
use crate::tensor::{DenseTensor, Variance};

/// Named scalar Riemannian invariants the library can evaluate as jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NaturalScalar {
    /// The constant 1.
    Unit,
    ScalarCurvature,
    /// `|W|²`.
    WeylNorm,
    /// The `index`-th (1-based) degree-`degree` Weyl contraction.
    WeylBasis { degree: usize, index: usize },
    /// `Pf_ℓ` of the Weyl tensor.
    PfaffianWeyl { ell: usize },
    /// `Pf_ℓ` of the Riemann tensor.
    PfaffianRiemann { ell: usize },
}

/// A scalar invariant evaluated at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue {
    pub name: String,
    pub weight: i32,
    pub value: f64,
}

impl NaturalScalar {
    /// Weight `w` such that the value at `c²g` is `c^w` times the value at `g`.
    pub fn weight(&self) -> i32 {
        match *self {
            NaturalScalar::Unit => 0,
            NaturalScalar::ScalarCurvature => -2,
            NaturalScalar::WeylNorm => -4,
            NaturalScalar::WeylBasis { degree, .. } => -2 * degree as i32,
            NaturalScalar::PfaffianWeyl { ell } | NaturalScalar::PfaffianRiemann { ell } => -2 * ell as i32,
        }
    }

    /// Number of metric derivatives the evaluation needs.
    pub fn derivative_order(&self) -> usize {
        match self {
            NaturalScalar::Unit => 0,
            _ => 2,
        }
    }

    pub fn evaluate(&self, geo: &LocalGeometry) -> Result<Jet> {
        let g = geo.metric();
        let gi = geo.inverse_metric();
        match *self {
            NaturalScalar::Unit => Ok(geo.constant(1.0)),
            NaturalScalar::ScalarCurvature => geo.scalar_curvature(),
            NaturalScalar::WeylNorm => weyl_contraction(geo.weyl()?, g, gi, "abcd,abcd"),
            NaturalScalar::WeylBasis { degree, index } => {
                let patterns = basis_patterns(degree)?;
                let p = index
                    .checked_sub(1)
                    .and_then(|i| patterns.get(i))
                    .ok_or_else(|| Error::Unsupported(format!("no Weyl contraction {degree},{index}")))?;
                weyl_contraction(geo.weyl()?, g, gi, p)
            }
            NaturalScalar::PfaffianWeyl { ell } => pf_ell(geo.weyl()?, gi, ell),
            NaturalScalar::PfaffianRiemann { ell } => pf_ell(geo.riemann()?, gi, ell),
        }
    }

    pub fn value_at(&self, geo: &LocalGeometry) -> Result<InvariantValue> {
        Ok(InvariantValue { name: self.to_string(), weight: self.weight(), value: self.evaluate(geo)?.value() })
    }
}

impl fmt::Display for NaturalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NaturalScalar::Unit => write!(f, "one"),
            NaturalScalar::ScalarCurvature => write!(f, "scalar-curvature"),
            NaturalScalar::WeylNorm => write!(f, "weyl-norm"),
            NaturalScalar::WeylBasis { degree, index } => write!(f, "weyl-{degree}-{index}"),
            NaturalScalar::PfaffianWeyl { ell } => write!(f, "pf{ell}-weyl"),
            NaturalScalar::PfaffianRiemann { ell } => write!(f, "pf{ell}-riemann"),
        }
    }
}

impl FromStr for NaturalScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Unsupported(format!("unknown invariant `{s}`"));
        match s {
            "one" => return Ok(NaturalScalar::Unit),
            "scalar-curvature" => return Ok(NaturalScalar::ScalarCurvature),
            "weyl-norm" => return Ok(NaturalScalar::WeylNorm),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("weyl-") {
            let (d, i) = rest.split_once('-').ok_or_else(bad)?;
            let degree: usize = d.parse().map_err(|_| bad())?;
            let index: usize = i.parse().map_err(|_| bad())?;
            let len = basis_patterns(degree)?.len();
            if index == 0 || index > len {
                return Err(bad());
            }
            return Ok(NaturalScalar::WeylBasis { degree, index });
        }
        if let Some(rest) = s.strip_prefix("pf") {
            let (l, kind) = rest.split_once('-').ok_or_else(bad)?;
            let ell: usize = l.parse().map_err(|_| bad())?;
            return match kind {
                "weyl" => Ok(NaturalScalar::PfaffianWeyl { ell }),
                "riemann" => Ok(NaturalScalar::PfaffianRiemann { ell }),
                _ => Err(bad()),
            };
        }
        Err(bad())
    }
}

/// `W_{acde}W_b{}^{cde}`, weight −2.
pub fn weyl_square_tensor(geo: &LocalGeometry) -> Result<DenseTensor<Jet>> {
    let w = geo.weyl()?;
    geo.contract("acde,bcde->ab", &[w, w])
}

/// The two symmetric rank-2 cubic Weyl tensors of weight −4:
/// `W_{acbd}W^{cefg}W^d{}_{efg}` and `W_{acde}W_b{}^c{}_{fg}W^{defg}`.
pub fn cubic_weyl_tensors(geo: &LocalGeometry) -> Result<(DenseTensor<Jet>, DenseTensor<Jet>)> {
    let w = geo.weyl()?;
    let first = geo.contract("acbd,cefg,defg->ab", &[w, w, w])?;
    let second = geo.contract("acde,bcfg,defg->ab", &[w, w, w])?;
    Ok((first, second))
}

/// `∇^a(W_{abcd}C^{cdb})` with `C` the Cotton tensor; needs metric jets of order 4.
pub fn weyl_cotton_divergence(geo: &LocalGeometry) -> Result<Jet> {
    let w = geo.weyl()?;
    let c = geo.cotton()?;
    let x = geo.contract("abcd,cdb->a", &[w, &c])?;
    let dx = geo.covariant_derivative(&x)?;
    Ok(geo.trace(&dx))
}

/// Scalar `∇^a∇^b T_{ab} + (1/(w−2))ΔT_b{}^b` of a symmetric rank-2 tensor.
pub fn double_divergence(geo: &LocalGeometry, t: &DenseTensor<Jet>, w: i32) -> Result<Jet> {
    if t.rank() != 2 || t.variance() != [Variance::Lower, Variance::Lower] {
        return Err(Error::ShapeMismatch { got: t.rank(), want: 2 });
    }
    super::operators::iterated_divergence(geo, t, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let all = [
            NaturalScalar::Unit,
            NaturalScalar::ScalarCurvature,
            NaturalScalar::WeylNorm,
            NaturalScalar::WeylBasis { degree: 4, index: 7 },
            NaturalScalar::PfaffianWeyl { ell: 3 },
            NaturalScalar::PfaffianRiemann { ell: 2 },
        ];
        for s in all {
            assert_eq!(s.to_string().parse::<NaturalScalar>().unwrap(), s);
        }
        assert!("weyl-4-8".parse::<NaturalScalar>().is_err());
        assert!("bogus".parse::<NaturalScalar>().is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(NaturalScalar::WeylNorm.weight(), -4);
        assert_eq!(NaturalScalar::PfaffianWeyl { ell: 3 }.weight(), -6);
        assert_eq!(NaturalScalar::WeylBasis { degree: 4, index: 1 }.weight(), -8);
    }
}
