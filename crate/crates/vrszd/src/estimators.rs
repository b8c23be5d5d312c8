//! Finite-difference gradient surrogates.
//!
//! Two metered estimators feed the solvers:
//!
//! * [`full_fd_gradient`] — forward differences of the averaged objective
//!   along every canonical direction; `n * (d + 1)` component evaluations.
//! * [`structured_stoch_gradient`] — forward differences of a single
//!   component along the columns of an orthonormal frame, rescaled by
//!   `d / count` so the estimator is unbiased for the ball-smoothed gradient;
//!   `count + 1` component evaluations.
//!
//! Both charge the ledger *before* touching the objective, so a budget
//! violation is detected with no work done. [`smoothed_value`] is an
//! unmetered Monte Carlo probe of the ball-smoothed objective, used by
//! diagnostics and tests.

use rand_chacha::ChaCha8Rng;

use crate::directions::{sample_unit_vector, DirectionSet};
use crate::error::{Error, Result};
use crate::problems::{EvalLedger, Problem};

/// Finite-difference steps below this are indistinguishable from roundoff
/// noise in double precision; constructors reject them outright.
pub const BETA_FLOOR: f64 = 1e-12;

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < BETA_FLOOR {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be >= {BETA_FLOOR:e}, got {beta:e}"
        )));
    }
    Ok(())
}

fn check_point(p: &Problem, x: &[f64]) -> Result<()> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    Ok(())
}

/// Deterministic full-gradient surrogate.
#[derive(Debug, Clone)]
pub struct FullSurrogate {
    pub grad: Vec<f64>,
    pub beta: f64,
    pub evals_charged: u64,
}

/// Forward-difference gradient of `(1/n) sum_i f_i` along the canonical
/// basis. Charges exactly `n * (d + 1)` component evaluations up front.
pub fn full_fd_gradient(
    p: &Problem,
    x: &[f64],
    beta: f64,
    ledger: &mut EvalLedger,
) -> Result<FullSurrogate> {
    check_point(p, x)?;
    check_beta(beta)?;
    let (n, d) = (p.n() as u64, p.dim());
    let cost = n * (d as u64 + 1);
    ledger.charge(cost)?;

    let fx = p.smooth_value(x);
    let mut grad = vec![0.0; d];
    let mut xp = x.to_vec();
    for j in 0..d {
        xp[j] = x[j] + beta;
        grad[j] = (p.smooth_value(&xp) - fx) / beta;
        xp[j] = x[j];
    }
    Ok(FullSurrogate { grad, beta, evals_charged: cost })
}

/// Single-component directional surrogate along an orthonormal frame.
#[derive(Debug, Clone)]
pub struct StochasticSurrogate {
    pub grad: Vec<f64>,
    pub component: usize,
    pub frame: DirectionSet,
    pub beta: f64,
    pub evals_charged: u64,
}

/// Forward-difference gradient of component `i` along the columns of
/// `frame`, rescaled once by `dim / count`. Charges exactly `count + 1`
/// component evaluations up front.
pub fn structured_stoch_gradient(
    p: &Problem,
    i: usize,
    x: &[f64],
    frame: &DirectionSet,
    beta: f64,
    ledger: &mut EvalLedger,
) -> Result<StochasticSurrogate> {
    check_point(p, x)?;
    check_beta(beta)?;
    if i >= p.n() {
        return Err(Error::InvalidArgument(format!(
            "component index {i} out of range (n = {})",
            p.n()
        )));
    }
    if frame.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: frame.dim() });
    }
    let count = frame.count();
    let cost = count as u64 + 1;
    ledger.charge(cost)?;

    let d = p.dim();
    let fx = p.component(i, x);
    let mut acc = vec![0.0; d];
    let mut xp = vec![0.0; d];
    for j in 0..count {
        let v = frame.direction(j);
        for t in 0..d {
            xp[t] = x[t] + beta * v[t];
        }
        let q = (p.component(i, &xp) - fx) / beta;
        for t in 0..d {
            acc[t] += q * v[t];
        }
    }
    let scale = d as f64 / count as f64;
    for a in acc.iter_mut() {
        *a *= scale;
    }
    Ok(StochasticSurrogate {
        grad: acc,
        component: i,
        frame: frame.clone(),
        beta,
        evals_charged: cost,
    })
}

/// Monte Carlo estimate of the ball-smoothed objective.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedValue {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimate `E[f(x + beta * u)]` for `u` uniform in the unit ball.
///
/// Unmetered diagnostic. `beta = 0` degenerates to `f(x)` exactly with zero
/// standard error.
pub fn smoothed_value(
    p: &Problem,
    x: &[f64],
    beta: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SmoothedValue> {
    check_point(p, x)?;
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "smoothing radius must be finite and nonnegative, got {beta}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let d = p.dim();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut y = vec![0.0; d];
    for s in 0..samples {
        let u = sample_unit_vector(d, rng);
        let r: f64 = rand::Rng::random::<f64>(rng).powf(1.0 / d as f64);
        for t in 0..d {
            y[t] = x[t] + beta * r * u[t];
        }
        let v = p.smooth_value(&y);
        // Welford update.
        let delta = v - mean;
        mean += delta / (s + 1) as f64;
        m2 += delta * (v - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(SmoothedValue { value: mean, std_error, samples })
}
