//! Finite-sum composite objectives `F(x) = (1/n) * sum_i f_i(x) + h(x)`,
//! and the evaluation ledger that meters every component call made through a
//! gradient surrogate.
//!
//! Solvers only ever see `f` through component evaluations, so the ledger's
//! count is the honest x-axis for any budgeted comparison. Reporting-side
//! evaluations (objective traces, diagnostics) are deliberately not metered.

use std::sync::Arc;

use crate::dataio::Dataset;
use crate::directions::Seed;
use crate::error::{Error, Result};
use crate::linalg::{dot, linspace, jacobi_svd, Matrix};
use crate::prox::ProxTerm;

/// Monotone counter of component evaluations with an optional hard budget.
///
/// Charging is all-or-nothing: a `charge` that would cross the budget fails
/// *without* recording anything, so callers can stop cleanly before the
/// offending evaluations run.
#[derive(Debug, Clone)]
pub struct EvalLedger {
    used: u64,
    budget: Option<u64>,
}

impl EvalLedger {
    pub fn new(budget: Option<u64>) -> Self {
        EvalLedger { used: 0, budget }
    }

    pub fn unlimited() -> Self {
        EvalLedger::new(None)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b - self.used)
    }

    pub fn can_afford(&self, cost: u64) -> bool {
        match self.budget {
            Some(b) => self.used + cost <= b,
            None => true,
        }
    }

    pub fn charge(&mut self, cost: u64) -> Result<()> {
        if !self.can_afford(cost) {
            return Err(Error::BudgetExhausted {
                needed: cost,
                remaining: self.budget.unwrap() - self.used,
            });
        }
        self.used += cost;
        Ok(())
    }
}

/// Smooth-link choice for classification losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Link {
    /// Feed the raw margin `w . x_i` to the cross-entropy, clamped into
    /// `[1e-12, 1 - 1e-12]` so the logs stay finite.
    #[default]
    ClampedLinear,
    /// Classic logistic link `1 / (1 + exp(-w . x_i))`.
    Sigmoid,
}

const PROB_CLAMP: f64 = 1e-12;

type ComponentFn = dyn Fn(usize, &[f64]) -> f64 + Send + Sync;
type GradientFn = dyn Fn(usize, &[f64], &mut [f64]) + Send + Sync;

enum Terms {
    /// `f_i(x) = (coeff / 2) * (a_i . x - y_i)^2`, rows of `a` as `a_i`.
    LeastSquares { a: Matrix, y: Vec<f64>, coeff: f64 },
    /// Binary cross entropy over dense features.
    CrossEntropy { features: Matrix, labels: Vec<f64>, link: Link },
    /// Caller-supplied closures (tests, custom experiments).
    Custom { component: Arc<ComponentFn>, gradient: Option<Arc<GradientFn>> },
}

/// A finite-sum composite objective.
pub struct Problem {
    name: String,
    n: usize,
    d: usize,
    h: ProxTerm,
    known_min: Option<f64>,
    smoothness: Option<f64>,
    component_smoothness: Option<f64>,
    strong_convexity: Option<f64>,
    terms: Terms,
}

impl Problem {
    /// Synthetic L1-regularized least squares with a prescribed spectrum.
    ///
    /// The `d x d` design is built by drawing a Gaussian matrix, SVD-ing it,
    /// and replacing the singular values with `d` evenly spaced values in
    /// `[cond_min, cond_max]`; targets are zero, so the optimum is the origin
    /// with objective value exactly zero. Components are
    /// `f_i(x) = (n/2) (a_i . x - y_i)^2` so that their average reproduces
    /// `0.5 ||A x - y||^2`.
    pub fn lasso(d: usize, lambda: f64, cond_min: f64, cond_max: f64, seed: Seed) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "least-squares construction needs d >= 2, got {d}"
            )));
        }
        if !(cond_min > 0.0) || !(cond_max >= cond_min) || !cond_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "spectrum bounds must satisfy 0 < cond_min <= cond_max, got [{cond_min}, {cond_max}]"
            )));
        }
        let mut rng = seed.rng();
        let raw = Matrix::from_fn(d, d, |_, _| {
            rand::Rng::sample(&mut rng, rand_distr::StandardNormal)
        });
        let (mut u, _, v) = jacobi_svd(&raw)?;
        for (j, s) in linspace(cond_min, cond_max, d).into_iter().enumerate() {
            u.scale_col(j, s);
        }
        let a = u.matmul(&v.transpose());

        let n = d;
        let max_row_sq = (0..n).map(|i| dot(a.row(i), a.row(i))).fold(0.0f64, f64::max);
        Ok(Problem {
            name: format!("lasso-d{d}"),
            n,
            d,
            h: ProxTerm::l1(lambda)?,
            known_min: Some(0.0),
            smoothness: Some(cond_max * cond_max),
            component_smoothness: Some(n as f64 * max_row_sq),
            strong_convexity: Some(cond_min * cond_min),
            terms: Terms::LeastSquares { a, y: vec![0.0; n], coeff: n as f64 },
        })
    }

    /// L1-regularized binary cross entropy over a dense dataset.
    ///
    /// Labels must already be 0/1 (the LIBSVM reader remaps them). The
    /// default link feeds the raw margin to the cross entropy, clamped away
    /// from {0, 1}; pass [`Link::Sigmoid`] for the classical smooth variant.
    pub fn logistic_l1(data: &Dataset, lambda: f64, link: Link) -> Result<Self> {
        let (n, d) = (data.n(), data.d());
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        for (i, &y) in data.labels().iter().enumerate() {
            if y != 0.0 && y != 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "labels must be 0/1 for cross entropy, got {y} at row {i}"
                )));
            }
        }
        Ok(Problem {
            name: format!("logistic-n{n}-d{d}"),
            n,
            d,
            h: ProxTerm::l1(lambda)?,
            known_min: None,
            smoothness: None,
            component_smoothness: None,
            strong_convexity: None,
            terms: Terms::CrossEntropy {
                features: data.features().clone(),
                labels: data.labels().to_vec(),
                link,
            },
        })
    }

    /// Objective defined by closures; the escape hatch for tests and custom
    /// experiments.
    pub fn custom(
        name: impl Into<String>,
        n: usize,
        d: usize,
        h: ProxTerm,
        component: impl Fn(usize, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Problem {
            name: name.into(),
            n,
            d,
            h,
            known_min: None,
            smoothness: None,
            component_smoothness: None,
            strong_convexity: None,
            terms: Terms::Custom { component: Arc::new(component), gradient: None },
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(usize, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        if let Terms::Custom { gradient: g, .. } = &mut self.terms {
            *g = Some(Arc::new(gradient));
        }
        self
    }

    pub fn with_known_min(mut self, v: f64) -> Self {
        self.known_min = Some(v);
        self
    }

    pub fn with_smoothness(mut self, l: f64) -> Self {
        self.smoothness = Some(l);
        self
    }

    pub fn with_component_smoothness(mut self, l: f64) -> Self {
        self.component_smoothness = Some(l);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn prox_term(&self) -> &ProxTerm {
        &self.h
    }

    pub fn known_min(&self) -> Option<f64> {
        self.known_min
    }

    /// Smoothness constant of the averaged smooth part, when known.
    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    /// Upper bound on the per-component smoothness constants, when known.
    pub fn component_smoothness(&self) -> Option<f64> {
        self.component_smoothness
    }

    pub fn strong_convexity(&self) -> Option<f64> {
        self.strong_convexity
    }

    /// The synthetic design matrix and targets, when this is a least-squares
    /// instance. Exposed so tests can audit the spectrum.
    pub fn least_squares_terms(&self) -> Option<(&Matrix, &[f64])> {
        match &self.terms {
            Terms::LeastSquares { a, y, .. } => Some((a, y)),
            _ => None,
        }
    }

    /// Evaluate component `i`. Panics on an out-of-range index or wrong
    /// dimension; the metered entry points validate before calling.
    pub fn component(&self, i: usize, x: &[f64]) -> f64 {
        assert!(i < self.n, "component index {i} out of range (n = {})", self.n);
        assert_eq!(x.len(), self.d, "point has wrong dimension");
        match &self.terms {
            Terms::LeastSquares { a, y, coeff } => {
                let r = dot(a.row(i), x) - y[i];
                0.5 * coeff * r * r
            }
            Terms::CrossEntropy { features, labels, link } => {
                let z = dot(features.row(i), x);
                let p = match link {
                    Link::ClampedLinear => z,
                    Link::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                }
                .clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
                let y = labels[i];
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            }
            Terms::Custom { component, .. } => component(i, x),
        }
    }

    /// `(1/n) * sum_i f_i(x)` — the smooth part, composed exactly as the
    /// solvers see it. Diagnostic: not metered.
    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.component(i, x);
        }
        s / self.n as f64
    }

    /// Full objective `f(x) + h(x)`. Diagnostic: not metered.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.smooth_value(x) + self.h.value(x)
    }

    /// Analytic gradient of component `i` into `out`; returns false when no
    /// closed form is available.
    pub fn component_gradient(&self, i: usize, x: &[f64], out: &mut [f64]) -> bool {
        assert!(i < self.n && x.len() == self.d && out.len() == self.d);
        match &self.terms {
            Terms::LeastSquares { a, y, coeff } => {
                let r = coeff * (dot(a.row(i), x) - y[i]);
                for (o, aij) in out.iter_mut().zip(a.row(i)) {
                    *o = r * aij;
                }
                true
            }
            Terms::CrossEntropy { features, labels, link } => {
                let z = dot(features.row(i), x);
                let y = labels[i];
                // d/dz of the loss; zero in the clamped region.
                let dz = match link {
                    Link::ClampedLinear => {
                        if z <= PROB_CLAMP || z >= 1.0 - PROB_CLAMP {
                            0.0
                        } else {
                            -(y / z) + (1.0 - y) / (1.0 - z)
                        }
                    }
                    Link::Sigmoid => {
                        let p = (1.0 / (1.0 + (-z).exp())).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
                        p - y
                    }
                };
                for (o, f) in out.iter_mut().zip(features.row(i)) {
                    *o = dz * f;
                }
                true
            }
            Terms::Custom { gradient, .. } => match gradient {
                Some(g) => {
                    g(i, x, out);
                    true
                }
                None => false,
            },
        }
    }

    /// Analytic gradient of the averaged smooth part into `out`; returns
    /// false when any component lacks a closed form.
    pub fn smooth_gradient(&self, x: &[f64], out: &mut [f64]) -> bool {
        assert_eq!(out.len(), self.d);
        let mut buf = vec![0.0; self.d];
        out.fill(0.0);
        for i in 0..self.n {
            if !self.component_gradient(i, x, &mut buf) {
                return false;
            }
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += b;
            }
        }
        let inv = 1.0 / self.n as f64;
        for o in out.iter_mut() {
            *o *= inv;
        }
        true
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("d", &self.d)
            .finish()
    }
}
