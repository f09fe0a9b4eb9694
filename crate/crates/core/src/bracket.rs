use serde::{Deserialize, Serialize};

/// Enumeration depth and digit truncation that produced a bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub level: usize,
    pub truncation: usize,
}

/// Certified interval `[lower, upper]` for a dimension value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimBracket {
    pub lower: f64,
    pub upper: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// False when a root search stopped at its iteration cap.
    #[serde(default = "yes")]
    pub converged: bool,
}

fn yes() -> bool {
    true
}

impl DimBracket {
    pub fn new(lower: f64, upper: f64) -> Self {
        DimBracket {
            lower,
            upper,
            witness: None,
            converged: true,
        }
    }

    pub fn point(v: f64) -> Self {
        Self::new(v, v)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// True if `self ⊆ other`.
    pub fn within(&self, other: &DimBracket) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    pub fn max(&self, other: &DimBracket) -> DimBracket {
        DimBracket::new(self.lower.max(other.lower), self.upper.max(other.upper))
    }
}
