//! Mixed absolute/relative tolerance used by every comparison in the crate.

use serde::{Deserialize, Serialize};

/// A mixed tolerance: two quantities of magnitude `scale` are considered
/// equal when their distance is at most `atol + rtol * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute floor, applied regardless of scale.
    pub atol: f64,
    /// Relative factor, multiplied by the problem scale.
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { atol: 1e-12, rtol: 1e-10 }
    }
}

impl Tolerance {
    /// Creates a tolerance with the given absolute and relative parts.
    pub fn new(atol: f64, rtol: f64) -> Self {
        Tolerance { atol, rtol }
    }

    /// The admissible distance at a given problem scale.
    pub fn margin(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale.abs()
    }

    /// Whether `residual` is negligible at the given scale.
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual.abs() <= self.margin(scale)
    }

    /// Whether two scalars agree, using the larger magnitude as the scale.
    pub fn close(&self, a: f64, b: f64) -> bool {
        self.accepts(a - b, a.abs().max(b.abs()))
    }
}
