//! Stationarity diagnostics.
//!
//! The progress measure for composite problems is the gradient mapping
//! `(x - prox_{gamma h}(x - gamma grad f(x))) / gamma`: it reduces to the
//! plain gradient when `h = 0` and vanishes exactly at stationary points of
//! `f + h`. Diagnostics never draw from the evaluation ledger.

use crate::error::{Error, Result};
use crate::optimizers::RunTrace;
use crate::problems::Problem;
use crate::prox::ProxTerm;

/// Finite-difference step used when a problem exposes no analytic gradient.
pub const DIAGNOSTIC_FD_STEP: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct GradMapReport {
    pub mapping: Vec<f64>,
    pub norm_sq: f64,
    /// True when the smooth gradient came from forward differences rather
    /// than an analytic formula.
    pub used_fd: bool,
    pub fd_step: Option<f64>,
}

/// Gradient mapping of the composite objective at `x` with step `gamma`.
///
/// Uses the analytic smooth gradient when the problem provides one and
/// falls back to unmetered forward differences otherwise. With
/// [`ProxTerm::Zero`] the mapping *is* the smooth gradient, bit for bit.
pub fn gradient_mapping(p: &Problem, x: &[f64], gamma: f64) -> Result<GradMapReport> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gradient mapping needs a positive finite step, got {gamma}"
        )));
    }
    let d = p.dim();
    let mut grad = vec![0.0; d];
    let used_fd = !p.smooth_gradient(x, &mut grad);
    if used_fd {
        let beta = DIAGNOSTIC_FD_STEP;
        let fx = p.smooth_value(x);
        let mut xp = x.to_vec();
        for j in 0..d {
            xp[j] = x[j] + beta;
            grad[j] = (p.smooth_value(&xp) - fx) / beta;
            xp[j] = x[j];
        }
    }

    let mapping = if matches!(p.prox_term(), ProxTerm::Zero) {
        grad
    } else {
        let mut y: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - gamma * gi).collect();
        p.prox_term().apply(&mut y, gamma);
        x.iter().zip(&y).map(|(xi, yi)| (xi - yi) / gamma).collect()
    };
    let norm_sq = crate::linalg::dot(&mapping, &mapping);
    Ok(GradMapReport {
        mapping,
        norm_sq,
        used_fd,
        fd_step: used_fd.then_some(DIAGNOSTIC_FD_STEP),
    })
}

/// Mean recorded squared gradient-mapping norm across traces, excluding
/// each trace's final checkpoint (the returned iterate is not part of the
/// average). `None` when no checkpoint carries the statistic.
pub fn eta_metric(traces: &[RunTrace]) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for trace in traces {
        let rows = trace.checkpoints.len();
        for c in trace.checkpoints.iter().take(rows.saturating_sub(1)) {
            if let Some(g) = c.grad_map_norm_sq {
                sum += g;
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum / count as f64)
}
