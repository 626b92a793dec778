//! Coupled Monte Carlo experiments.
//!
//! Every trial draws one increment path on its own RNG stream
//! (`master seed`, `trial index`) and evaluates all partial sums, θ-sums and
//! the high-truncation reference integral from that one path. Trials run on a
//! worker pool; results are collected in trial order and reduced sequentially,
//! so reports are byte-identical for any worker count.

pub mod bounds;
pub mod experiments;
pub mod report;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::catalog::FunctionId;
use crate::error::{Error, Result};
use crate::integral::{ito_stieltjes, BasisTable};
use crate::jacobi::{JacobiParams, WeightedSpaceParams};
use crate::series::{catalog_coefficients, CoefficientSet};
use crate::stable::{fill_increments, trial_rng, GridSpec, SeedInfo, StableIncrements, StableIndex};

pub use bounds::{lemma1_rhs, lemma2_rhs, lemma_bounds, lp_integral, LemmaBounds};
pub use experiments::{
    cesaro_summability_experiment, mean_convergence_experiment, tail_scaling_experiment,
    theta_probability_experiment, weak_continuity_experiment, weak_continuity_sweep, ContinuityEstimate,
};
pub use report::{ConvergenceReport, ReportRow, Statistic, Verdict};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Everything an experiment needs; the same struct backs every CLI subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub tau: f64,
    pub function: FunctionId,
    /// Evaluation points `y`.
    pub y: Vec<f64>,
    /// Strictly increasing truncation orders.
    pub n_schedule: Vec<usize>,
    /// Reference truncation is `n_ref_mult × max(n_schedule)`.
    pub n_ref_mult: usize,
    /// Number of grid cells `m`.
    pub grid: usize,
    pub trials: usize,
    pub eps: Vec<f64>,
    pub seed: u64,
    /// Worker threads; `0` means available parallelism. Not part of the output.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            gamma: 1.0,
            delta: 1.0,
            eta: 0.5,
            tau: 0.5,
            function: FunctionId::Exp,
            y: vec![0.0, 0.5],
            n_schedule: vec![2, 4, 8, 16],
            n_ref_mult: 4,
            grid: 4096,
            trials: 2000,
            eps: vec![0.1],
            seed: DEFAULT_SEED,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.n_schedule.is_empty() || self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("n schedule must be non-empty and strictly increasing, got {:?}", self.n_schedule));
        }
        if self.eps.is_empty() || self.eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad(format!("epsilons must be positive, got {:?}", self.eps));
        }
        if self.y.is_empty() || self.y.iter().any(|y| !(y.abs() <= 1.0)) {
            return bad(format!("evaluation points must lie in [-1, 1], got {:?}", self.y));
        }
        if self.n_ref_mult == 0 {
            return bad("n-ref multiplier must be >= 1".into());
        }
        GridSpec::new(self.grid)?;
        self.params()?;
        self.weighted()?;
        self.index()?;
        Ok(())
    }

    pub fn params(&self) -> Result<JacobiParams<f64>> {
        JacobiParams::new(self.gamma, self.delta)
    }

    pub fn weighted(&self) -> Result<WeightedSpaceParams<f64>> {
        WeightedSpaceParams::new(self.eta, self.tau)
    }

    pub fn index(&self) -> Result<StableIndex<f64>> {
        StableIndex::new(self.alpha)
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec { m: self.grid }
    }

    pub fn max_n(&self) -> usize {
        *self.n_schedule.last().expect("validated schedule")
    }

    /// Truncation of the reference integral.
    pub fn n_ref(&self) -> usize {
        self.n_ref_mult * self.max_n()
    }

    /// The increment path of trial `trial`, exactly as the experiments draw it.
    pub fn trial_increments(&self, trial: u64) -> Result<StableIncrements<f64>> {
        let mut rng = trial_rng(self.seed, trial);
        let mut dx = Vec::with_capacity(self.grid);
        fill_increments(self.index()?, self.grid_spec(), &mut rng, &mut dx);
        Ok(StableIncrements {
            alpha: self.index()?,
            grid: self.grid_spec(),
            dx,
            seed_info: Some(SeedInfo { master_seed: self.seed, stream: trial }),
        })
    }
}

/// Runs `trial(i)` for `i in 0..trials` and returns the results in trial order.
pub fn run_trials<R, F>(workers: usize, trials: usize, trial: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 1 {
        return Ok((0..trials as u64).map(trial).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..trials as u64).into_par_iter().map(trial).collect()))
}

/// Surrogate for `∫ f(y, t) ρ dX(t, ω)`: the Stieltjes sum of the kernel
/// truncated at `N_ref`, against the same increments as the sums it is compared with.
pub fn reference_integral(y: f64, a: &CoefficientSet<f64>, inc: &StableIncrements<f64>, n_ref: usize) -> Result<f64> {
    if a.len() < n_ref + 1 {
        return Err(Error::LengthMismatch(format!(
            "reference truncation {n_ref} needs {} coefficients, have {}",
            n_ref + 1,
            a.len()
        )));
    }
    if !(y.abs() <= 1.0) {
        return Err(Error::Domain { value: y });
    }
    let p = a.params;
    let basis_y = p.orthonormal_values(y, n_ref);
    let weights: Vec<f64> = a.values[..=n_ref].iter().zip(&basis_y).map(|(a, b)| a * b).collect();
    ito_stieltjes(
        |t| {
            let basis_t = p.orthonormal_values(t, n_ref);
            weights.iter().zip(&basis_t).fold(0.0, |acc, (w, b)| acc + w * b) * p.rho(t)
        },
        inc,
    )
}

/// Shared set-up of the coupled experiments: coefficients up to `N_ref`, the
/// basis table on the grid, and `c_k(y) = a_k p_k(y)` per evaluation point.
pub(crate) struct CoupledSetup {
    pub coeffs: CoefficientSet<f64>,
    pub table: BasisTable<f64>,
    pub n_ref: usize,
}

impl CoupledSetup {
    pub fn new(cfg: &ExperimentConfig, n_ref: usize) -> Result<Self> {
        let p = cfg.params()?;
        let coeffs = catalog_coefficients(cfg.function, n_ref, &p)?;
        let table = BasisTable::new(&p, cfg.grid_spec(), n_ref)?;
        Ok(Self { coeffs, table, n_ref })
    }

    /// `a_k p_k(y)` for `k ≤ N_ref`.
    pub fn terms_at(&self, y: f64) -> Vec<f64> {
        let basis = self.coeffs.params.orthonormal_values(y, self.n_ref);
        self.coeffs.values.iter().zip(&basis).map(|(a, p)| a * p).collect()
    }

    /// True when every coefficient past `a_0` is negligible.
    pub fn is_degenerate(&self) -> bool {
        self.coeffs.values.iter().skip(1).all(|a| a.abs() < 1e-12)
    }

    /// Random coefficients `A_0..=A_{N_ref}` of trial `trial`.
    pub fn draw(&self, cfg: &ExperimentConfig, trial: u64) -> Result<Vec<f64>> {
        let mut rng = trial_rng(cfg.seed, trial);
        let mut dx = Vec::with_capacity(cfg.grid);
        fill_increments(cfg.index()?, cfg.grid_spec(), &mut rng, &mut dx);
        let mut out = Vec::with_capacity(self.n_ref + 1);
        self.table.project_into(&dx, &mut out);
        Ok(out)
    }
}
