use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimension,
    Normalization,
    Hermiticity,
    Idempotence,
    Completeness,
    RowSum,
    NegativeEntry,
    DanglingLabel,
    DuplicateLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub location: String,
    /// Size of the violation: a numeric residual, or `0` for structural problems.
    pub residual: f64,
    /// Exact residual for rational tables, as `"num/den"`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_residual: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, kind: ViolationKind, location: impl Into<String>, residual: f64) {
        self.violations.push(Violation {
            kind,
            location: location.into(),
            residual,
            exact_residual: None,
        });
    }

    pub fn push_exact(
        &mut self,
        kind: ViolationKind,
        location: impl Into<String>,
        residual: &crate::rational::Prob,
    ) {
        self.violations.push(Violation {
            kind,
            location: location.into(),
            residual: crate::rational::to_f64(residual),
            exact_residual: Some(crate::rational::format(residual)),
        });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid: no invariant violations");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            match &v.exact_residual {
                Some(exact) => writeln!(f, "  {:?} at {}: residual {}", v.kind, v.location, exact)?,
                None => writeln!(f, "  {:?} at {}: residual {:.3e}", v.kind, v.location, v.residual)?,
            }
        }
        Ok(())
    }
}
