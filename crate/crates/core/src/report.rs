use serde::{Deserialize, Serialize};

/// Three-valued answer for hypotheses a finite computation can only support or refute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

/// A grid point together with the quantity tested there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub point: f64,
    pub value: f64,
}

/// Outcome of checking one hypothesis. `margin < 0` signals a violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub name: String,
    pub satisfied: Tri,
    pub evidence: Vec<Evidence>,
    pub margin: f64,
}

impl HypothesisReport {
    pub fn new(name: impl Into<String>, satisfied: Tri, margin: f64) -> Self {
        Self { name: name.into(), satisfied, evidence: Vec::new(), margin }
    }

    pub fn with_evidence(mut self, point: f64, value: f64) -> Self {
        self.evidence.push(Evidence { point, value });
        self
    }
}
