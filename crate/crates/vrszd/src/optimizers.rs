//! Proximal zeroth-order solvers.
//!
//! All solvers share the same contract: they spend *component evaluations*
//! from an [`EvalLedger`], never start a step they cannot pay for, and
//! return a [`RunTrace`] whose checkpoints carry exact cumulative costs.
//!
//! * [`vr_szd`] — variance-reduced descent with structured (orthonormal)
//!   direction frames; the main solver.
//! * [`rspgf`] — single-loop Gaussian-direction proximal descent with a
//!   `1/sqrt(t+1)` step decay.
//! * [`zo_psvrg_plus`] — variance-reduced baseline whose anchor gradient is
//!   a central-difference coordinate sweep; inner steps use either a single
//!   random direction ([`SgeVariant::Rand`]) or a full coordinate sweep
//!   ([`SgeVariant::Coord`]).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::gradient_mapping;
use crate::directions::{canonical_frame, sample_haar_frame, DirectionSet, Seed};
use crate::error::{Error, Result};
use crate::estimators::{full_fd_gradient, structured_stoch_gradient, BETA_FLOOR};
use crate::problems::{EvalLedger, Problem};

/// Finite-difference step schedule, indexed by outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaSchedule {
    /// Fixed step.
    Constant(f64),
    /// `(base / d) * (tau + 1)^(-exponent)`; summable-variance decay needs
    /// `exponent > 1/2`.
    PowerDecay { base: f64, exponent: f64 },
    /// `rate^(inner_steps * (tau + 1) / 2) * eta0 * (tau + 1)^(-exponent)`:
    /// geometric decay matched to a linearly convergent outer loop.
    GeometricPl { rate: f64, inner_steps: usize, eta0: f64, exponent: f64 },
}

impl BetaSchedule {
    /// Schedule matched to a gradient-dominated objective: the geometric
    /// factor tracks the contraction `1 - gamma * mu / 2` per inner step.
    pub fn geometric_pl(
        gamma: f64,
        mu: f64,
        inner_steps: usize,
        eta0: f64,
        exponent: f64,
    ) -> Result<Self> {
        if !(gamma > 0.0) || !(mu > 0.0) {
            return Err(Error::InvalidArgument(
                "geometric schedule needs gamma > 0 and mu > 0".into(),
            ));
        }
        let rate = 1.0 - gamma * mu / 2.0;
        let s = BetaSchedule::GeometricPl { rate, inner_steps, eta0, exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        match *self {
            BetaSchedule::Constant(b) => {
                if !b.is_finite() || b < BETA_FLOOR {
                    return bad(format!("constant step must be >= {BETA_FLOOR:e}, got {b:e}"));
                }
            }
            BetaSchedule::PowerDecay { base, exponent } => {
                if !(base > 0.0) || !base.is_finite() {
                    return bad(format!("power-decay base must be positive, got {base}"));
                }
                if !(exponent > 0.5) {
                    return bad(format!(
                        "power-decay exponent must exceed 1/2, got {exponent}"
                    ));
                }
            }
            BetaSchedule::GeometricPl { rate, inner_steps, eta0, exponent } => {
                if !(rate > 0.0 && rate < 1.0) {
                    return bad(format!("geometric rate must lie in (0, 1), got {rate}"));
                }
                if inner_steps == 0 {
                    return bad("geometric schedule needs inner_steps >= 1".into());
                }
                if !(eta0 > 0.0) || !eta0.is_finite() {
                    return bad(format!("eta0 must be positive, got {eta0}"));
                }
                if !(exponent > 0.5) {
                    return bad(format!(
                        "geometric polynomial exponent must exceed 1/2, got {exponent}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Step for outer iteration `tau` (0-based) in dimension `dim`, clamped
    /// below at [`BETA_FLOOR`].
    pub fn value(&self, tau: usize, dim: usize) -> f64 {
        let raw = match *self {
            BetaSchedule::Constant(b) => b,
            BetaSchedule::PowerDecay { base, exponent } => {
                base / dim as f64 * ((tau + 1) as f64).powf(-exponent)
            }
            BetaSchedule::GeometricPl { rate, inner_steps, eta0, exponent } => {
                let half_steps = inner_steps as f64 * (tau + 1) as f64 / 2.0;
                rate.powf(half_steps) * eta0 * ((tau + 1) as f64).powf(-exponent)
            }
        };
        raw.max(BETA_FLOOR)
    }
}

/// Which iterates produce checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordMode {
    /// Only iterates at outer-iteration boundaries.
    Outer,
    /// Every inner iterate.
    Inner,
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub step_size: f64,
    pub beta: BetaSchedule,
    /// Inner iterations per outer iteration (`m`). Ignored by [`rspgf`].
    pub inner_steps: usize,
    /// Components sampled per inner iteration (`b`). Ignored by [`rspgf`].
    pub batch_size: usize,
    /// Directions per gradient surrogate (`l`). Ignored by [`zo_psvrg_plus`],
    /// whose variants fix their own direction counts.
    pub num_directions: usize,
    /// Stop after this many outer iterations (RSPGF: single-loop iterations).
    pub outer_iters: Option<usize>,
    /// Stop before any step the remaining evaluation budget cannot cover.
    pub budget: Option<u64>,
    pub seed: Seed,
    pub record: RecordMode,
    /// Keep every k-th eligible checkpoint (the first and last survive
    /// regardless). Must be >= 1.
    pub record_every: usize,
    /// Attach the squared gradient-mapping norm to each checkpoint.
    pub record_grad_map: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step_size: 1e-3,
            beta: BetaSchedule::Constant(1e-5),
            inner_steps: 1,
            batch_size: 1,
            num_directions: 1,
            outer_iters: None,
            budget: None,
            seed: Seed(0),
            record: RecordMode::Outer,
            record_every: 1,
            record_grad_map: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, p: &Problem) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive and finite, got {}",
                self.step_size
            )));
        }
        self.beta.validate()?;
        if self.inner_steps == 0 {
            return Err(Error::InvalidArgument("inner_steps must be >= 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
        }
        if self.num_directions == 0 || self.num_directions > p.dim() {
            return Err(Error::InvalidArgument(format!(
                "num_directions must lie in 1..={}, got {}",
                p.dim(),
                self.num_directions
            )));
        }
        if self.outer_iters.is_none() && self.budget.is_none() {
            return Err(Error::InvalidArgument(
                "need a stopping rule: outer_iters, budget, or both".into(),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidArgument("record_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// One recorded iterate.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    /// Cumulative component evaluations when this iterate was reached.
    pub evals: u64,
    /// Composite objective at the iterate.
    pub objective: f64,
    /// Squared norm of the step-size-`gamma` gradient mapping, if recorded.
    pub grad_map_norm_sq: Option<f64>,
    /// Outer iteration label; the iterate closing outer iteration `t` is
    /// labeled `(t + 1, 0)`.
    pub outer: usize,
    /// Inner iteration label within the outer iteration.
    pub inner: usize,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub final_point: Vec<f64>,
    pub evals_used: u64,
    pub outer_completed: usize,
    pub stopped_by_budget: bool,
}

impl RunTrace {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("a trace always holds its initial checkpoint")
    }

    pub fn final_objective(&self) -> f64 {
        self.last().objective
    }
}

/// Source of direction frames for [`vr_szd_with`].
pub trait FrameSampler {
    fn sample(&self, dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<DirectionSet>;
}

/// Fresh Haar-distributed orthonormal frame per draw (the default).
#[derive(Debug, Clone, Copy, Default)]
pub struct HaarSampler;

impl FrameSampler for HaarSampler {
    fn sample(&self, dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<DirectionSet> {
        sample_haar_frame(dim, count, rng)
    }
}

/// Deterministic canonical frame; turns the structured surrogate into plain
/// coordinate differences. Useful for exactness tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalSampler;

impl FrameSampler for CanonicalSampler {
    fn sample(&self, dim: usize, count: usize, _rng: &mut ChaCha8Rng) -> Result<DirectionSet> {
        canonical_frame(dim, count)
    }
}

/// Checkpoint collection with stride thinning. The initial row is always
/// kept; `finish` force-records the final iterate if it is not already the
/// last kept row.
struct Recorder<'a> {
    problem: &'a Problem,
    gamma: f64,
    mode: RecordMode,
    every: usize,
    grad_map: bool,
    eligible: usize,
    rows: Vec<Checkpoint>,
}

impl<'a> Recorder<'a> {
    fn new(problem: &'a Problem, cfg: &OptimizerConfig) -> Self {
        Recorder {
            problem,
            gamma: cfg.step_size,
            mode: cfg.record,
            every: cfg.record_every,
            grad_map: cfg.record_grad_map,
            eligible: 0,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, x: &[f64], evals: u64, outer: usize, inner: usize) -> Result<()> {
        let grad_map_norm_sq = if self.grad_map {
            Some(gradient_mapping(self.problem, x, self.gamma)?.norm_sq)
        } else {
            None
        };
        self.rows.push(Checkpoint {
            evals,
            objective: self.problem.objective(x),
            grad_map_norm_sq,
            outer,
            inner,
        });
        Ok(())
    }

    /// Record an iterate produced by an inner step. `outer_boundary` marks
    /// iterates that close an outer iteration.
    fn step(
        &mut self,
        x: &[f64],
        evals: u64,
        outer: usize,
        inner: usize,
        outer_boundary: bool,
    ) -> Result<()> {
        if self.mode == RecordMode::Outer && !outer_boundary {
            return Ok(());
        }
        self.eligible += 1;
        if self.eligible % self.every == 0 {
            self.push(x, evals, outer, inner)?;
        }
        Ok(())
    }

    fn finish(
        mut self,
        x: &[f64],
        evals: u64,
        outer: usize,
        inner: usize,
    ) -> Result<Vec<Checkpoint>> {
        if self.rows.last().map(|c| c.evals) != Some(evals) {
            self.push(x, evals, outer, inner)?;
        }
        Ok(self.rows)
    }
}

/// Per-outer-iteration evaluation costs of each solver, used for budget
/// pre-checks and by the experiment driver to size its checkpoint stride.
pub fn outer_cost_vr_szd(n: usize, d: usize, m: usize, b: usize, l: usize) -> u64 {
    n as u64 * (d as u64 + 1) + 2 * m as u64 * b as u64 * (l as u64 + 1)
}

pub fn iter_cost_rspgf(l: usize) -> u64 {
    l as u64 + 1
}

pub fn outer_cost_zo_psvrg(n: usize, d: usize, m: usize, b: usize, variant: SgeVariant) -> u64 {
    let inner = match variant {
        SgeVariant::Rand => 4 * b as u64,
        SgeVariant::Coord => 4 * b as u64 * d as u64,
    };
    2 * n as u64 * d as u64 + m as u64 * inner
}

/// Variance-reduced structured zeroth-order proximal descent with Haar
/// frames. See [`vr_szd_with`] for the frame-generic version.
pub fn vr_szd(p: &Problem, cfg: &OptimizerConfig, x0: &[f64]) -> Result<RunTrace> {
    vr_szd_with(p, cfg, x0, &HaarSampler)
}

/// Variance-reduced structured zeroth-order proximal descent.
///
/// Each outer iteration anchors a full forward-difference gradient at the
/// current point, then runs `inner_steps` proximal steps driven by
/// single-component frame surrogates evaluated at both the running iterate
/// and the anchor (same component, same frame), plus the anchor gradient.
pub fn vr_szd_with<S: FrameSampler>(
    p: &Problem,
    cfg: &OptimizerConfig,
    x0: &[f64],
    sampler: &S,
) -> Result<RunTrace> {
    cfg.validate(p)?;
    if x0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x0.len() });
    }
    let (n, d) = (p.n(), p.dim());
    let (m, b, l) = (cfg.inner_steps, cfg.batch_size, cfg.num_directions);
    let gamma = cfg.step_size;
    let anchor_cost = n as u64 * (d as u64 + 1);
    let inner_cost = 2 * b as u64 * (l as u64 + 1);

    let mut ledger = EvalLedger::new(cfg.budget);
    let mut rng = cfg.seed.rng();
    let mut x = x0.to_vec();
    let mut recorder = Recorder::new(p, cfg);
    recorder.push(&x, 0, 0, 0)?;

    let mut stopped_by_budget = false;
    let mut outer_completed = 0;
    let mut label = (0usize, 0usize);
    let mut v = vec![0.0; d];

    'outer: for tau in 0.. {
        if cfg.outer_iters.is_some_and(|t| tau >= t) {
            break;
        }
        if !ledger.can_afford(anchor_cost) {
            stopped_by_budget = true;
            break;
        }
        let beta = cfg.beta.value(tau, d);
        let anchor = full_fd_gradient(p, &x, beta, &mut ledger)?;
        let snapshot = x.clone();

        for k in 0..m {
            if !ledger.can_afford(inner_cost) {
                stopped_by_budget = true;
                label = (tau, k);
                break 'outer;
            }
            v.fill(0.0);
            for _ in 0..b {
                let i = rng.random_range(0..n);
                let frame = sampler.sample(d, l, &mut rng)?;
                let at_x = structured_stoch_gradient(p, i, &x, &frame, beta, &mut ledger)?;
                let at_snap =
                    structured_stoch_gradient(p, i, &snapshot, &frame, beta, &mut ledger)?;
                for t in 0..d {
                    v[t] += at_x.grad[t] - at_snap.grad[t];
                }
            }
            let inv_b = 1.0 / b as f64;
            for t in 0..d {
                v[t] = v[t] * inv_b + anchor.grad[t];
                x[t] -= gamma * v[t];
            }
            p.prox_term().apply(&mut x, gamma);

            let boundary = k + 1 == m;
            let (lo, li) = if boundary { (tau + 1, 0) } else { (tau, k + 1) };
            label = (lo, li);
            recorder.step(&x, ledger.used(), lo, li, boundary)?;
        }
        outer_completed = tau + 1;
    }

    let checkpoints = recorder.finish(&x, ledger.used(), label.0, label.1)?;
    Ok(RunTrace {
        checkpoints,
        final_point: x,
        evals_used: ledger.used(),
        outer_completed,
        stopped_by_budget,
    })
}

/// Single-loop proximal descent along fresh Gaussian directions with step
/// `gamma / sqrt(t + 1)`. `inner_steps` and `batch_size` are ignored; each
/// iteration samples one component and `num_directions` directions.
pub fn rspgf(p: &Problem, cfg: &OptimizerConfig, x0: &[f64]) -> Result<RunTrace> {
    cfg.validate(p)?;
    if x0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x0.len() });
    }
    let (n, d) = (p.n(), p.dim());
    let l = cfg.num_directions;
    let iter_cost = iter_cost_rspgf(l);

    let mut ledger = EvalLedger::new(cfg.budget);
    let mut rng = cfg.seed.rng();
    let mut x = x0.to_vec();
    let mut recorder = Recorder::new(p, cfg);
    recorder.push(&x, 0, 0, 0)?;

    let mut stopped_by_budget = false;
    let mut completed = 0;
    let mut grad = vec![0.0; d];
    let mut xp = vec![0.0; d];
    let mut u = vec![0.0; d];

    for t in 0.. {
        if cfg.outer_iters.is_some_and(|limit| t >= limit) {
            break;
        }
        if !ledger.can_afford(iter_cost) {
            stopped_by_budget = true;
            break;
        }
        let beta = cfg.beta.value(t, d);
        let i = rng.random_range(0..n);
        ledger.charge(iter_cost)?;
        let fx = p.component(i, &x);
        grad.fill(0.0);
        for _ in 0..l {
            for j in 0..d {
                u[j] = rng.sample(StandardNormal);
                xp[j] = x[j] + beta * u[j];
            }
            let q = (p.component(i, &xp) - fx) / beta;
            for j in 0..d {
                grad[j] += q * u[j];
            }
        }
        let inv_l = 1.0 / l as f64;
        let gamma_t = cfg.step_size / ((t + 1) as f64).sqrt();
        for j in 0..d {
            x[j] -= gamma_t * inv_l * grad[j];
        }
        p.prox_term().apply(&mut x, gamma_t);

        completed = t + 1;
        recorder.step(&x, ledger.used(), t + 1, 0, true)?;
    }

    let checkpoints = recorder.finish(&x, ledger.used(), completed, 0)?;
    Ok(RunTrace {
        checkpoints,
        final_point: x,
        evals_used: ledger.used(),
        outer_completed: completed,
        stopped_by_budget,
    })
}

/// Inner-step estimator used by [`zo_psvrg_plus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgeVariant {
    /// One uniform sphere direction, central differences (4 evaluations per
    /// sampled component: the running iterate and the anchor share it).
    Rand,
    /// Central coordinate sweep (4 * d evaluations per sampled component).
    Coord,
}

/// Variance-reduced baseline with a central-difference coordinate anchor
/// (`2 n d` evaluations per outer iteration). `num_directions` is ignored;
/// the variant fixes the inner direction count.
pub fn zo_psvrg_plus(
    p: &Problem,
    cfg: &OptimizerConfig,
    variant: SgeVariant,
    x0: &[f64],
) -> Result<RunTrace> {
    cfg.validate(p)?;
    if x0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x0.len() });
    }
    let (n, d) = (p.n(), p.dim());
    let (m, b) = (cfg.inner_steps, cfg.batch_size);
    let gamma = cfg.step_size;
    let anchor_cost = 2 * n as u64 * d as u64;
    let inner_cost = match variant {
        SgeVariant::Rand => 4 * b as u64,
        SgeVariant::Coord => 4 * b as u64 * d as u64,
    };

    let mut ledger = EvalLedger::new(cfg.budget);
    let mut rng = cfg.seed.rng();
    let mut x = x0.to_vec();
    let mut recorder = Recorder::new(p, cfg);
    recorder.push(&x, 0, 0, 0)?;

    let mut stopped_by_budget = false;
    let mut outer_completed = 0;
    let mut label = (0usize, 0usize);
    let mut anchor = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut work = vec![0.0; d];

    'outer: for tau in 0.. {
        if cfg.outer_iters.is_some_and(|t| tau >= t) {
            break;
        }
        if !ledger.can_afford(anchor_cost) {
            stopped_by_budget = true;
            break;
        }
        let beta = cfg.beta.value(tau, d);
        ledger.charge(anchor_cost)?;
        work.copy_from_slice(&x);
        for j in 0..d {
            work[j] = x[j] + beta;
            let hi = p.smooth_value(&work);
            work[j] = x[j] - beta;
            let lo = p.smooth_value(&work);
            work[j] = x[j];
            anchor[j] = (hi - lo) / (2.0 * beta);
        }
        let snapshot = x.clone();

        for k in 0..m {
            if !ledger.can_afford(inner_cost) {
                stopped_by_budget = true;
                label = (tau, k);
                break 'outer;
            }
            v.fill(0.0);
            for _ in 0..b {
                let i = rng.random_range(0..n);
                ledger.charge(match variant {
                    SgeVariant::Rand => 4,
                    SgeVariant::Coord => 4 * d as u64,
                })?;
                match variant {
                    SgeVariant::Rand => {
                        let u = crate::directions::sample_unit_vector(d, &mut rng);
                        let est = |z: &[f64], work: &mut Vec<f64>| {
                            for t in 0..d {
                                work[t] = z[t] + beta * u[t];
                            }
                            let hi = p.component(i, work);
                            for t in 0..d {
                                work[t] = z[t] - beta * u[t];
                            }
                            let lo = p.component(i, work);
                            d as f64 * (hi - lo) / (2.0 * beta)
                        };
                        let qx = est(&x, &mut work);
                        let qs = est(&snapshot, &mut work);
                        for t in 0..d {
                            v[t] += (qx - qs) * u[t];
                        }
                    }
                    SgeVariant::Coord => {
                        let mut sweep = |z: &[f64], sign: f64, work: &mut Vec<f64>| {
                            work.copy_from_slice(z);
                            for j in 0..d {
                                work[j] = z[j] + beta;
                                let hi = p.component(i, work);
                                work[j] = z[j] - beta;
                                let lo = p.component(i, work);
                                work[j] = z[j];
                                v[j] += sign * (hi - lo) / (2.0 * beta);
                            }
                        };
                        sweep(&x, 1.0, &mut work);
                        sweep(&snapshot, -1.0, &mut work);
                    }
                }
            }
            let inv_b = 1.0 / b as f64;
            for t in 0..d {
                v[t] = v[t] * inv_b + anchor[t];
                x[t] -= gamma * v[t];
            }
            p.prox_term().apply(&mut x, gamma);

            let boundary = k + 1 == m;
            let (lo, li) = if boundary { (tau + 1, 0) } else { (tau, k + 1) };
            label = (lo, li);
            recorder.step(&x, ledger.used(), lo, li, boundary)?;
        }
        outer_completed = tau + 1;
    }

    let checkpoints = recorder.finish(&x, ledger.used(), label.0, label.1)?;
    Ok(RunTrace {
        checkpoints,
        final_point: x,
        evals_used: ledger.used(),
        outer_completed,
        stopped_by_budget,
    })
}

/// Safe step size for [`vr_szd`] on an `L`-smooth objective:
/// `min(1 / (4 L), sqrt(l b) / (10 L m sqrt(d)))`.
pub fn admissible_step_size(l_smooth: f64, m: usize, d: usize, l: usize, b: usize) -> f64 {
    let cap = 1.0 / (4.0 * l_smooth);
    let frame = ((l * b) as f64).sqrt() / (10.0 * l_smooth * m as f64 * (d as f64).sqrt());
    cap.min(frame)
}

/// Largest step size the convergence analysis tolerates; the constant is
/// `sqrt(32 (e - 1))` in place of the rounded `10` of
/// [`admissible_step_size`], so the safe choice is always admissible.
pub fn max_admissible_step_size(l_smooth: f64, m: usize, d: usize, l: usize, b: usize) -> f64 {
    let cap = 1.0 / (4.0 * l_smooth);
    let c = (32.0 * (std::f64::consts::E - 1.0)).sqrt();
    let frame = ((l * b) as f64).sqrt() / (c * l_smooth * m as f64 * (d as f64).sqrt());
    cap.min(frame)
}

/// Safe step size under a `mu`-gradient-dominance condition:
/// the largest `gamma <= min(1/(4L), 2/(mu (2m + 1)))` with
/// `100 m^2 L^2 d gamma^2 / (b l) <= 1 - mu gamma (m + 1/2)`,
/// i.e. the positive root of
/// `100 m^2 L^2 d g^2 + b l mu (m + 1/2) g - b l = 0`.
pub fn pl_admissible_step_size(
    l_smooth: f64,
    mu: f64,
    m: usize,
    d: usize,
    l: usize,
    b: usize,
) -> f64 {
    let cap = (1.0 / (4.0 * l_smooth)).min(2.0 / (mu * (2.0 * m as f64 + 1.0)));
    let a = 100.0 * (m as f64 * l_smooth).powi(2) * d as f64;
    let bl = (b * l) as f64;
    let lin = bl * mu * (m as f64 + 0.5);
    // Numerically stable positive root of a g^2 + lin g - bl = 0.
    let root = 2.0 * bl / (lin + (lin * lin + 4.0 * a * bl).sqrt());
    cap.min(root)
}

/// Solver selector used by the experiment driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    VrSzd,
    Rspgf,
    ZoPsvrgRand,
    ZoPsvrgCoord,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::VrSzd => "vr-szd",
            Algorithm::Rspgf => "rspgf",
            Algorithm::ZoPsvrgRand => "zo-psvrg-rand",
            Algorithm::ZoPsvrgCoord => "zo-psvrg-coord",
        }
    }

    /// Evaluations per outer iteration (per single-loop iteration for
    /// [`Algorithm::Rspgf`]) under the given configuration.
    pub fn outer_cost(self, p: &Problem, cfg: &OptimizerConfig) -> u64 {
        match self {
            Algorithm::VrSzd => outer_cost_vr_szd(
                p.n(),
                p.dim(),
                cfg.inner_steps,
                cfg.batch_size,
                cfg.num_directions,
            ),
            Algorithm::Rspgf => iter_cost_rspgf(cfg.num_directions),
            Algorithm::ZoPsvrgRand => outer_cost_zo_psvrg(
                p.n(),
                p.dim(),
                cfg.inner_steps,
                cfg.batch_size,
                SgeVariant::Rand,
            ),
            Algorithm::ZoPsvrgCoord => outer_cost_zo_psvrg(
                p.n(),
                p.dim(),
                cfg.inner_steps,
                cfg.batch_size,
                SgeVariant::Coord,
            ),
        }
    }

    pub fn run(self, p: &Problem, cfg: &OptimizerConfig, x0: &[f64]) -> Result<RunTrace> {
        match self {
            Algorithm::VrSzd => vr_szd(p, cfg, x0),
            Algorithm::Rspgf => rspgf(p, cfg, x0),
            Algorithm::ZoPsvrgRand => zo_psvrg_plus(p, cfg, SgeVariant::Rand, x0),
            Algorithm::ZoPsvrgCoord => zo_psvrg_plus(p, cfg, SgeVariant::Coord, x0),
        }
    }
}
