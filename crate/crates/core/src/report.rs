use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Which comparison made a check pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Abs,
    Rel,
    None,
}

/// One verification record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub criterion: Criterion,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckReport {
    /// Compares `lhs` and `rhs`; the relative error is taken against
    /// `max(|lhs|, |rhs|)`.
    pub fn compare(id: impl Into<String>, anchor: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        Self::compare_scaled(id, anchor, lhs, rhs, scale, tol)
    }

    /// As [`compare`](Self::compare) with an explicit scale for the relative error,
    /// for identities whose sides may both vanish.
    pub fn compare_scaled(
        id: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        scale: f64,
        tol: f64,
    ) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if abs_err == 0.0 {
            0.0
        } else if scale > 0.0 {
            abs_err / scale
        } else {
            f64::INFINITY
        };
        let finite = lhs.is_finite() && rhs.is_finite();
        let criterion = if !finite {
            Criterion::None
        } else if abs_err <= tol {
            Criterion::Abs
        } else if rel_err <= tol {
            Criterion::Rel
        } else {
            Criterion::None
        };
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            pass: criterion != Criterion::None,
            criterion,
            wall_time_ms: 0.0,
            detail: None,
        }
    }

    /// A check that failed before producing numbers.
    pub fn failure(id: impl Into<String>, anchor: impl Into<String>, tol: f64, why: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol,
            pass: false,
            criterion: Criterion::None,
            wall_time_ms: 0.0,
            detail: Some(why.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Flips the verdict for checks whose expected outcome is a failure.
    pub fn expect_failure(mut self) -> Self {
        self.pass = !self.pass;
        let note = "expected to fail";
        self.detail = Some(match self.detail.take() {
            Some(d) => format!("{note}; {d}"),
            None => note.to_string(),
        });
        self
    }

    /// Runs `f` and records its wall time on the produced report.
    pub fn timed(f: impl FnOnce() -> CheckReport) -> CheckReport {
        let start = Instant::now();
        let mut r = f();
        r.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_criteria() {
        let r = CheckReport::compare("x", "a", 1.0, 1.0 + 1e-12, 1e-10);
        assert!(r.pass);
        assert_eq!(r.criterion, Criterion::Abs);
        let r = CheckReport::compare("x", "a", 1e6, 1e6 + 1e-5, 1e-10);
        assert!(r.pass);
        assert_eq!(r.criterion, Criterion::Rel);
        let r = CheckReport::compare("x", "a", 1.0, 2.0, 1e-3);
        assert!(!r.pass);
        let r = CheckReport::compare("x", "a", f64::NAN, 2.0, 1e-3);
        assert!(!r.pass);
    }

    #[test]
    fn zero_identity_passes() {
        let r = CheckReport::compare("x", "a", 0.0, 0.0, 1e-10);
        assert!(r.pass);
        assert_eq!(r.rel_err, 0.0);
    }

    #[test]
    fn expected_failure_flips() {
        let r = CheckReport::compare("x", "a", 1.0, 2.0, 1e-3).expect_failure();
        assert!(r.pass);
        assert!(r.detail.unwrap().contains("expected"));
    }
}
