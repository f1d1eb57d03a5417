use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The size scale of a graph, stored as `log n`.
///
/// Kept as a logarithm so formulas can be evaluated at sizes like
/// `n = e^10` that are not integers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    log_n: f64,
}

impl Scale {
    /// Requires `log log n > 0`, i.e. `n > e`.
    pub fn from_n(n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return domain(format!("n must be positive and finite, got {n}"));
        }
        Self::from_log(n.ln())
    }

    pub fn from_log(log_n: f64) -> Result<Self> {
        if !(log_n.is_finite() && log_n > 1.0) {
            return domain(format!("need log log n > 0, got log n = {log_n}"));
        }
        Ok(Self { log_n })
    }

    pub fn log_n(&self) -> f64 {
        self.log_n
    }

    pub fn log_log_n(&self) -> f64 {
        self.log_n.ln()
    }

    /// `t_n = log n / log log n`, the typical maximum degree scale.
    pub fn t_n(&self) -> f64 {
        self.log_n / self.log_log_n()
    }
}
