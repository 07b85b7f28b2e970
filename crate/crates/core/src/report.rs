use std::fmt;

/// One failed instance of a law, with the identifiers that witness it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<String>,
}

impl Violation {
    pub fn new<I, S>(law: &str, witness: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Violation { law: law.to_string(), witness: witness.into_iter().map(Into::into).collect() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ({})", self.law, self.witness.join(", "))
    }
}

/// Result of an exhaustive law check. Valid exactly when no violation was found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationReport { violations }
    }

    pub fn push(&mut self, violation: Violation) {
        self.violations.push(violation);
    }

    pub fn fail<I, S>(&mut self, law: &str, witness: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.push(Violation::new(law, witness));
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// Prefixes every law name, used when a report is nested in a larger check.
    pub fn scoped(self, scope: &str) -> Self {
        ValidationReport {
            violations: self
                .violations
                .into_iter()
                .map(|v| Violation { law: format!("{scope}.{}", v.law), witness: v.witness })
                .collect(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn has_law(&self, law: &str) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    pub fn into_result(self, what: &'static str) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Invalid { what, report: self })
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        write!(f, "invalid ({} violations", self.violations.len())?;
        if let Some(first) = self.violations.first() {
            write!(f, "; first {first}")?;
        }
        write!(f, ")")
    }
}
