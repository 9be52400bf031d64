//! Structured validation outcomes.
//!
//! Every axiom check reports rather than throws: a [`Report`] lists each
//! violated axiom together with the witness tuple and the two sides of the
//! failed comparison, so a failing property can be shrunk and replayed.

use serde::Serialize;
use std::fmt;

use crate::distributions::DistFn;

/// Identifier of the axiom or law a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    /// `D(p, q) = H_0` exactly when `p = q`.
    IdentityOfIndiscernibles,
    /// `D(p, q) = D(q, p)`.
    Symmetry,
    /// `D(p, q) * D(q, r) <= D(p, r)`.
    Triangle,
    /// Group operation associativity.
    GroupAssociativity,
    /// Two-sided group identity.
    GroupIdentity,
    /// Existence of two-sided group inverses.
    GroupInverse,
    /// `D(pr, qr) = D(rp, rq) = D(p, q)`.
    Invariance,
    /// `D(x, y) * f(y) <= f(x)`.
    Lipschitz,
    /// Classical `|L(x) - L(y)| <= d(x, y)`.
    ClassicalLipschitz,
    /// Point maps form a bijection between carriers.
    Bijection,
    /// Point map respects the group operations.
    Homomorphism,
    /// Point map preserves the probabilistic metric exactly.
    MetricEquality,
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("axiom ids serialize");
        f.write_str(s.as_str().unwrap_or("unknown"))
    }
}

/// One failed check: which axiom, at which witness tuple, and the two
/// distribution functions that were compared (when the axiom compares any).
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub axiom: AxiomId,
    pub witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<DistFn>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<DistFn>,
}

impl Violation {
    pub fn new(axiom: AxiomId, witness: Vec<String>) -> Violation {
        Violation {
            axiom,
            witness,
            lhs: None,
            rhs: None,
        }
    }

    pub fn with_sides(mut self, lhs: DistFn, rhs: DistFn) -> Violation {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }
}

/// Outcome of a validation pass; `passed` holds exactly when no violation was
/// recorded.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn from_violations(violations: Vec<Violation>) -> Report {
        Report {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn passing() -> Report {
        Report::from_violations(Vec::new())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return f.write_str("all checks passed");
        }
        write!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            write!(f, " [{} at ({})]", v.axiom, v.witness.join(", "))?;
        }
        Ok(())
    }
}
