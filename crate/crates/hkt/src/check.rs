//! Named verification checks with a status and an optional scalar residual.

use std::cmp::Ordering;

use serde::Serialize;

use crate::scalar::Scalar;

/// Outcome of one check. `Observed*` marks identities that are evaluated
/// and reported but not asserted (entries outside the regime in which the
/// identity is a theorem).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "observed-true")]
    ObservedTrue,
    #[serde(rename = "observed-false")]
    ObservedFalse,
    #[serde(rename = "skipped")]
    Skipped,
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ObservedTrue => "observed-true",
            Status::ObservedFalse => "observed-false",
            Status::Skipped => "skipped",
        }
    }

    /// Whether the underlying identity held (skipped counts as not failed).
    pub fn holds(&self) -> bool {
        matches!(self, Status::Pass | Status::ObservedTrue)
    }
}

#[derive(Clone, Debug)]
pub struct Check<S: Scalar> {
    pub id: String,
    pub status: Status,
    pub residual: Option<S>,
    pub note: Option<String>,
}

impl<S: Scalar> Check<S> {
    /// An asserted check: pass iff `ok`.
    pub fn asserted(id: impl Into<String>, ok: bool, residual: Option<S>) -> Self {
        Check {
            id: id.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            note: None,
        }
    }

    /// An observed (non-asserting) check.
    pub fn observed(id: impl Into<String>, ok: bool, residual: Option<S>) -> Self {
        Check {
            id: id.into(),
            status: if ok { Status::ObservedTrue } else { Status::ObservedFalse },
            residual,
            note: None,
        }
    }

    /// Asserted or observed depending on `assert`.
    pub fn with_mode(id: impl Into<String>, assert: bool, ok: bool, residual: Option<S>) -> Self {
        if assert {
            Check::asserted(id, ok, residual)
        } else {
            Check::observed(id, ok, residual)
        }
    }

    /// A residual check: the identity holds iff the residual is zero.
    pub fn zero(id: impl Into<String>, assert: bool, residual: S) -> Self {
        let ok = residual.is_zero();
        Check::with_mode(id, assert, ok, Some(residual))
    }

    pub fn skipped(id: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            id: id.into(),
            status: Status::Skipped,
            residual: None,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Absolute value in the scalar field.
pub fn abs<S: Scalar>(x: &S) -> S {
    if x.sign() == Ordering::Less {
        -x.clone()
    } else {
        x.clone()
    }
}

/// Largest absolute value among the given scalars, returned exactly (zero
/// for an empty input).
pub fn residual<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> S {
    let mut best = S::zero();
    let mut best_mag = 0.0f64;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let m = v.magnitude();
        if best.is_zero() || m > best_mag {
            best = abs(v);
            best_mag = m;
        }
    }
    best
}

/// Maximum of already non-negative residuals.
pub fn max_residual<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    let collected: Vec<S> = values.into_iter().collect();
    residual(collected.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    #[test]
    fn residual_is_exact_max_abs() {
        let v = [Exact::ratio(1, 2), Exact::int(-3), Exact::sqrt_int(3)];
        assert_eq!(residual(v.iter()), Exact::int(3));
        let none: [Exact; 0] = [];
        assert!(residual(none.iter()).is_zero());
    }

    #[test]
    fn statuses() {
        let c: Check<Exact> = Check::zero("x", true, Exact::int(0));
        assert_eq!(c.status, Status::Pass);
        let c: Check<Exact> = Check::zero("x", false, Exact::int(1));
        assert_eq!(c.status, Status::ObservedFalse);
        assert!(!c.failed());
    }
}
