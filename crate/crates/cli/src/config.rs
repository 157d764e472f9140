use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::suites::{self, Suite};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

/// Settings for a `verify` run. The JSON config file has the same fields;
/// command-line flags override it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub suites: Vec<String>,
    pub manifold: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub n: Option<usize>,
    pub dim: Option<usize>,
    pub jet_order: Option<usize>,
    pub invariant: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

/// Seed used by sampling suites when none is given.
pub const DEFAULT_SEED: u64 = 0;

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    /// Fields set in `other` replace ours; a nonempty suite list replaces ours.
    pub fn overridden_by(mut self, other: RunConfig) -> Self {
        if !other.suites.is_empty() {
            self.suites = other.suites;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(manifold, tol, seed, samples, n, dim, jet_order, invariant, format, out);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Resolves suite names, expanding `all`, and checks every other field
    /// that can be checked without computing anything.
    pub fn validate(&self) -> Result<Vec<&'static Suite>, String> {
        if self.suites.is_empty() {
            return Err("no suite given".into());
        }
        let mut out: Vec<&'static Suite> = Vec::new();
        for name in &self.suites {
            if name == "all" {
                out.extend(suites::SUITES.iter());
                continue;
            }
            out.push(suites::find(name).ok_or_else(|| format!("unknown suite `{name}`; see `pecurv list`"))?);
        }
        if let Some(m) = &self.manifold {
            pecurv_core::geometry::by_name(m).map_err(|e| e.to_string())?;
        }
        if let Some(inv) = &self.invariant {
            inv.parse::<pecurv_core::invariants::NaturalScalar>().map_err(|e| e.to_string())?;
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(format!("tolerance must be positive, got {t}"));
            }
        }
        if self.samples == Some(0) {
            return Err("--samples must be positive".into());
        }
        for s in &out {
            let need = (s.jet_order)(self)?;
            if let Some(cap) = self.jet_order {
                if need > cap {
                    return Err(format!("suite `{}` needs jet order {need}, above the cap {cap}", s.name));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig { suites: vec!["gbc".into()], tol: Some(1e-3), seed: Some(1), ..Default::default() };
        let flags = RunConfig { tol: Some(1e-9), ..Default::default() };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.suites, vec!["gbc".to_string()]);
        assert_eq!(merged.tol, Some(1e-9));
        assert_eq!(merged.seed(), 1);
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"suites": ["gbc"], "bogus": 1}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"suites": ["cgb"], "format": "csv"}"#).unwrap();
        assert_eq!(c.format(), Format::Csv);
    }

    #[test]
    fn validation_happens_before_work() {
        let bad = RunConfig { suites: vec!["nope".into()], ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { suites: vec!["gbc".into()], manifold: Some("torus".into()), ..Default::default() };
        assert!(bad.validate().is_err());
        let capped = RunConfig { suites: vec!["worked-examples".into()], jet_order: Some(2), ..Default::default() };
        assert!(capped.validate().is_err());
        let ok = RunConfig { suites: vec!["all".into()], ..Default::default() };
        assert_eq!(ok.validate().unwrap().len(), suites::SUITES.len());
    }
}
