use std::fmt;

use serde::Serialize;

/// Category of a violated structural invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    Endpoints,
    Bijection,
    Associativity,
    SourceFree,
    SinkFree,
    ColorPreservation,
    Automorphism,
    SquareCompatibility,
    CocycleLaw,
    InverseLaw,
}

impl IssueKind {
    pub fn label(self) -> &'static str {
        match self {
            IssueKind::Endpoints => "endpoints violated",
            IssueKind::Bijection => "bijection violated",
            IssueKind::Associativity => "associativity violated",
            IssueKind::SourceFree => "source-free violated",
            IssueKind::SinkFree => "sink-free violated",
            IssueKind::ColorPreservation => "color preservation violated",
            IssueKind::Automorphism => "automorphism violated",
            IssueKind::SquareCompatibility => "square compatibility violated",
            IssueKind::CocycleLaw => "cocycle law violated",
            IssueKind::InverseLaw => "inverse law violated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.label(), self.message)
    }
}

/// Every violated invariant found by a validator. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn push(&mut self, kind: IssueKind, message: impl Into<String>) {
        self.issues.push(Issue {
            kind,
            message: message.into(),
        });
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}
