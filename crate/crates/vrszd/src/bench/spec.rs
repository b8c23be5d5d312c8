//! Declarative experiment configuration.
//!
//! An experiment is a TOML document:
//!
//! ```toml
//! budget = 1_000_000
//! repeats = 3
//! seed = 7
//!
//! [problem]
//! kind = "lasso"
//! d = 50
//! lambda = 1e-5
//!
//! [x0]
//! kind = "ones"
//! scale = 10.0
//!
//! [[algorithm]]
//! kind = "vr-szd"
//! gamma = [1e-3, 1e-2]
//! l = [1, 10, 25]
//! m = 100
//! b = 1
//! beta = 1e-5
//! ```
//!
//! Scalar grid axes (`gamma`, `l`, `m`, `b`) accept either a single value
//! or a list; the runner takes the cartesian product per `[[algorithm]]`
//! entry.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dataio::{read_libsvm, standardize};
use crate::directions::Seed;
use crate::error::{Error, Result};
use crate::estimators::BETA_FLOOR;
use crate::optimizers::Algorithm;
use crate::problems::{Link, Problem};

/// One scalar or a list of them; grid axes are swept over every value.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ParamGrid<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> ParamGrid<T> {
    pub fn values(&self) -> &[T] {
        match self {
            ParamGrid::One(v) => std::slice::from_ref(v),
            ParamGrid::Many(v) => v,
        }
    }
}

impl<T> From<T> for ParamGrid<T> {
    fn from(v: T) -> Self {
        ParamGrid::One(v)
    }
}

fn one_usize() -> ParamGrid<usize> {
    ParamGrid::One(1)
}

fn default_beta() -> f64 {
    1e-5
}

fn default_repeats() -> usize {
    10
}

fn default_lambda() -> f64 {
    1e-5
}

fn default_cond_min() -> f64 {
    1.0
}

fn default_cond_max() -> f64 {
    (10.0f64).sqrt()
}

fn default_true() -> bool {
    true
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    VrSzd,
    Rspgf,
    ZoPsvrgRand,
    ZoPsvrgCoord,
}

impl AlgorithmKind {
    pub fn algorithm(self) -> Algorithm {
        match self {
            AlgorithmKind::VrSzd => Algorithm::VrSzd,
            AlgorithmKind::Rspgf => Algorithm::Rspgf,
            AlgorithmKind::ZoPsvrgRand => Algorithm::ZoPsvrgRand,
            AlgorithmKind::ZoPsvrgCoord => Algorithm::ZoPsvrgCoord,
        }
    }
}

/// One `[[algorithm]]` entry: a solver plus the grid swept for it.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    /// Display name; defaults to the solver name. Distinct entries must not
    /// collide (each gets its own curve file).
    #[serde(default)]
    pub name: Option<String>,
    pub gamma: ParamGrid<f64>,
    #[serde(default = "one_usize", alias = "l")]
    pub directions: ParamGrid<usize>,
    #[serde(default = "one_usize", alias = "m")]
    pub inner_steps: ParamGrid<usize>,
    #[serde(default = "one_usize", alias = "b")]
    pub batch_size: ParamGrid<usize>,
    /// Constant finite-difference step for every cell of this entry.
    #[serde(default = "default_beta")]
    pub beta: f64,
}

impl AlgorithmSpec {
    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.algorithm().name().to_string())
    }

    fn validate(&self) -> Result<()> {
        let name = self.display_name();
        if self.gamma.values().is_empty()
            || self.directions.values().is_empty()
            || self.inner_steps.values().is_empty()
            || self.batch_size.values().is_empty()
        {
            return Err(Error::Config(format!("algorithm '{name}': empty grid axis")));
        }
        for &g in self.gamma.values() {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::Config(format!(
                    "algorithm '{name}': gamma values must be positive, got {g}"
                )));
            }
        }
        for axis in [&self.directions, &self.inner_steps, &self.batch_size] {
            if axis.values().iter().any(|&v| v == 0) {
                return Err(Error::Config(format!(
                    "algorithm '{name}': l, m, b values must be >= 1"
                )));
            }
        }
        if !self.beta.is_finite() || self.beta < BETA_FLOOR {
            return Err(Error::Config(format!(
                "algorithm '{name}': beta must be >= {BETA_FLOOR:e}"
            )));
        }
        Ok(())
    }
}

/// Benchmark objective.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Synthetic least squares with an L1 term and a controlled spectrum;
    /// the design matrix is seeded from the experiment seed.
    Lasso {
        d: usize,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default = "default_cond_min")]
        cond_min: f64,
        #[serde(default = "default_cond_max")]
        cond_max: f64,
    },
    /// L1-regularized binary classification on a libsvm-format file.
    LogisticL1 {
        path: PathBuf,
        #[serde(default = "default_lambda")]
        lambda: f64,
        /// Use the smooth sigmoid link instead of the clamped linear one.
        #[serde(default)]
        sigmoid: bool,
        #[serde(default = "default_true")]
        standardize: bool,
    },
}

impl ProblemSpec {
    pub fn build(&self, seed: Seed) -> Result<Problem> {
        match self {
            ProblemSpec::Lasso { d, lambda, cond_min, cond_max } => {
                Problem::lasso(*d, *lambda, *cond_min, *cond_max, seed)
            }
            ProblemSpec::LogisticL1 { path, lambda, sigmoid, standardize: std_cols } => {
                let mut ds = read_libsvm(path)?;
                if *std_cols {
                    standardize(&mut ds);
                }
                let link = if *sigmoid { Link::Sigmoid } else { Link::ClampedLinear };
                Problem::logistic_l1(&ds, *lambda, link)
            }
        }
    }
}

/// Starting point.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StartSpec {
    Ones {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Zeros,
    Point {
        values: Vec<f64>,
    },
}

impl Default for StartSpec {
    fn default() -> Self {
        StartSpec::Ones { scale: 1.0 }
    }
}

impl StartSpec {
    pub fn build(&self, d: usize) -> Result<Vec<f64>> {
        match self {
            StartSpec::Ones { scale } => {
                if !scale.is_finite() {
                    return Err(Error::Config("x0 scale must be finite".into()));
                }
                Ok(vec![*scale; d])
            }
            StartSpec::Zeros => Ok(vec![0.0; d]),
            StartSpec::Point { values } => {
                if values.len() != d {
                    return Err(Error::Config(format!(
                        "x0 has {} entries but the problem has dimension {d}",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    /// Component-evaluation budget per run.
    pub budget: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub x0: StartSpec,
    #[serde(rename = "algorithm")]
    pub algorithms: Vec<AlgorithmSpec>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::Config("budget must be >= 1".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("declare at least one [[algorithm]] entry".into()));
        }
        let mut names: Vec<String> = Vec::new();
        for alg in &self.algorithms {
            alg.validate()?;
            let name = alg.display_name();
            if names.contains(&name) {
                return Err(Error::Config(format!(
                    "duplicate algorithm name '{name}': set distinct `name` values"
                )));
            }
            names.push(name);
        }
        Ok(())
    }
}

/// Parse an experiment file.
pub fn load_spec(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let spec: ExperimentSpec = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}
