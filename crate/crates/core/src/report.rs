//! Validation reports shared by every axiom and hypothesis check.

use serde::Serialize;

use crate::graded::GradedSpace;
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Antisymmetry,
    Jacobi,
    Leibniz,
    ChainMap,
    BracketCompatibility,
    Closure,
    Associativity,
    Commutativity,
    Nilpotency,
    Derivation,
    CartanA,
    CartanB,
    Endpoint,
    Degree,
    Filtration,
    Section,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: Check,
    /// Basis labels witnessing the failure.
    pub witness: Vec<String>,
    /// Nonzero residual coordinates, `(label, rational)`.
    pub residual: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<Failure>,
}

impl ValidationReport {
    pub fn ok() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, check: Check, witness: Vec<String>, residual: Vec<(String, String)>) {
        self.failures.push(Failure { check, witness, residual });
    }

    /// Records a failure whose residual is a vector of `space`.
    pub fn push_vector(&mut self, check: Check, witness: Vec<String>, space: &GradedSpace, residual: &[Scalar]) {
        self.push(check, witness, describe(space, residual));
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.failures.extend(other.failures);
    }

    pub fn has(&self, check: Check) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }

    pub fn count(&self, check: Check) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }
}

/// Nonzero coordinates of `v` as `(label, "p/q")`.
pub fn describe(space: &GradedSpace, v: &[Scalar]) -> Vec<(String, String)> {
    space.describe(v).into_iter().map(|(l, x)| (l, scalar::format(&x))).collect()
}
