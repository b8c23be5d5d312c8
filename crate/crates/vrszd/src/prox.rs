//! Proximal operators for the nonsmooth part of a composite objective.
//!
//! `prox_{g*h}(x) = argmin_y h(y) + ||y - x||^2 / (2*g)`, evaluated in closed
//! form for each supported term.

use crate::error::{Error, Result};

/// The nonsmooth term `h` of a composite objective.
#[derive(Debug, Clone)]
pub enum ProxTerm {
    /// `h = 0`: proximal step is the identity.
    Zero,
    /// `h(x) = lambda * ||x||_1`: proximal step is soft thresholding.
    L1 { lambda: f64 },
    /// Indicator of the box `[lower, upper]`: proximal step is clamping.
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl ProxTerm {
    pub fn l1(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "l1 weight must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(ProxTerm::L1 { lambda })
    }

    pub fn box_bounds(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "box bounds must satisfy lower <= upper, got [{lo}, {hi}] at index {i}"
                )));
            }
        }
        Ok(ProxTerm::Box { lower, upper })
    }

    /// `h(x)`. Box indicators return `+inf` outside the box.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ProxTerm::Zero => 0.0,
            ProxTerm::L1 { lambda } => lambda * x.iter().map(|v| v.abs()).sum::<f64>(),
            ProxTerm::Box { lower, upper } => {
                debug_assert_eq!(x.len(), lower.len());
                let inside =
                    x.iter().zip(lower).zip(upper).all(|((v, lo), hi)| v >= lo && v <= hi);
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Proximal step with parameter `gamma > 0`.
    pub fn prox(&self, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "prox parameter must be positive and finite, got {gamma}"
            )));
        }
        if let ProxTerm::Box { lower, .. } = self {
            if x.len() != lower.len() {
                return Err(Error::DimensionMismatch { expected: lower.len(), got: x.len() });
            }
        }
        let mut y = x.to_vec();
        self.apply(&mut y, gamma);
        Ok(y)
    }

    /// In-place proximal step; inputs validated by the caller. This is the
    /// solver hot path.
    pub(crate) fn apply(&self, x: &mut [f64], gamma: f64) {
        match self {
            ProxTerm::Zero => {}
            ProxTerm::L1 { lambda } => {
                let t = gamma * lambda;
                for v in x.iter_mut() {
                    *v = v.signum() * (v.abs() - t).max(0.0);
                }
            }
            ProxTerm::Box { lower, upper } => {
                debug_assert_eq!(x.len(), lower.len());
                for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
                    *v = v.clamp(*lo, *hi);
                }
            }
        }
    }
}
