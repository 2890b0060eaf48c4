//! Simple truth values: a (strength, confidence) pair in the unit square.

use std::fmt;

/// Truth value attached to a node or link, as written in `stv` forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthValue {
    pub strength: f64,
    pub confidence: f64,
}

impl TruthValue {
    /// Default for declarations that carry no `stv`: full strength, zero
    /// confidence ("declared but unevidenced").
    pub const DEFAULT: TruthValue = TruthValue {
        strength: 1.0,
        confidence: 0.0,
    };

    /// Build a truth value, rejecting components outside `[0, 1]`.
    pub fn new(strength: f64, confidence: f64) -> Option<TruthValue> {
        let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        if unit(strength) && unit(confidence) {
            Some(TruthValue {
                strength,
                confidence,
            })
        } else {
            None
        }
    }
}

impl Default for TruthValue {
    fn default() -> Self {
        TruthValue::DEFAULT
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(stv {} {})", self.strength, self.confidence)
    }
}
