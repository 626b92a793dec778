//! Symmetric α-stable variates and independent-increment realisations of
//! `X(t, ω)` on a uniform grid over `[-1, 1]`.
//!
//! Convention: `S(α, 0, c, 0)` has characteristic function `exp(-c^α |u|^α)`,
//! so `α = 2` is `N(0, 2c²)` and `α = 1` is Cauchy with scale `c`.

use std::io::{BufRead, Read, Write};

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Generator used for every Monte Carlo stream.
pub type TrialRng = ChaCha8Rng;

/// Stream `trial` of the generator keyed by `master_seed`. Streams never
/// overlap, so trials can run on any number of workers in any order.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Stability index `α ∈ (0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StableIndex<T>(T);

impl<T: Scalar> StableIndex<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_finite() && alpha > T::zero() && alpha <= T::two() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!("stable index must lie in (0, 2], got {alpha}")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_cauchy(self) -> bool {
        self.0 == T::one()
    }

    pub fn is_gaussian(self) -> bool {
        self.0 == T::two()
    }

    /// `α ∈ (1, 2]`: the regime with a finite first absolute moment.
    pub fn require_mean_regime(self) -> Result<()> {
        if self.0 > T::one() {
            Ok(())
        } else {
            Err(Error::Gate(format!(
                "mean convergence requires alpha in (1, 2], got alpha = {}",
                self.0
            )))
        }
    }

    pub fn require_cauchy(self) -> Result<()> {
        if self.is_cauchy() {
            Ok(())
        } else {
            Err(Error::Gate(format!("(C,1) summability requires alpha = 1, got alpha = {}", self.0)))
        }
    }
}

/// Uniform partition of `[-1, 1]` into `m` cells of width `2/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m: usize,
}

impl GridSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("grid needs at least one cell".into()));
        }
        Ok(Self { m })
    }

    pub fn dt<T: Scalar>(&self) -> T {
        T::two() / T::from_usize_lossy(self.m)
    }

    /// `t_i = -1 + i·dt`, `i = 0..=m`.
    pub fn node<T: Scalar>(&self, i: usize) -> T {
        if i == self.m {
            return T::one();
        }
        -T::one() + self.dt::<T>() * T::from_usize_lossy(i)
    }

    /// Left endpoints `t_0, …, t_{m-1}`.
    pub fn left_nodes<T: Scalar>(&self) -> Vec<T> {
        (0..self.m).map(|i| self.node(i)).collect()
    }
}

/// Where a realisation's randomness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedInfo {
    pub master_seed: u64,
    pub stream: u64,
}

/// One realisation of the increments `X(t_{i+1}) - X(t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableIncrements<T> {
    pub alpha: StableIndex<T>,
    pub grid: GridSpec,
    pub dx: Vec<T>,
    pub seed_info: Option<SeedInfo>,
}

/// One draw from `S(α, 0, scale, 0)`.
///
/// Chambers-Mallows-Stuck for general `α`; the Cauchy (`α = 1`) and Gaussian
/// (`α = 2`) cases use their exact closed forms.
pub fn sample_sas<T: Scalar, R: Rng + ?Sized>(alpha: StableIndex<T>, scale: T, rng: &mut R) -> T {
    if alpha.is_gaussian() {
        let z: f64 = rng.sample(StandardNormal);
        return scale * T::SQRT_2() * T::lit(z);
    }
    let u: f64 = rng.sample(Open01);
    let v = T::PI() * (T::lit(u) - T::half());
    if alpha.is_cauchy() {
        return scale * v.tan();
    }
    let w: f64 = rng.sample(Exp1);
    let w = T::lit(w);
    let a = alpha.value();
    let x = (a * v).sin() / v.cos().powf(T::one() / a)
        * ((v - a * v).cos() / w).powf((T::one() - a) / a);
    scale * x
}

/// `m` independent increments, each `S(α, 0, (2/m)^{1/α}, 0)`.
pub fn sample_increments<T: Scalar, R: Rng + ?Sized>(
    alpha: StableIndex<T>,
    grid: GridSpec,
    rng: &mut R,
) -> StableIncrements<T> {
    let mut dx = Vec::with_capacity(grid.m);
    fill_increments(alpha, grid, rng, &mut dx);
    StableIncrements { alpha, grid, dx, seed_info: None }
}

/// Like [`sample_increments`] on stream `seed.stream` of `seed.master_seed`.
pub fn sample_increments_seeded<T: Scalar>(
    alpha: StableIndex<T>,
    grid: GridSpec,
    seed: SeedInfo,
) -> StableIncrements<T> {
    let mut rng = trial_rng(seed.master_seed, seed.stream);
    let mut inc = sample_increments(alpha, grid, &mut rng);
    inc.seed_info = Some(seed);
    inc
}

/// Reuses `out` to avoid an allocation per trial.
pub fn fill_increments<T: Scalar, R: Rng + ?Sized>(
    alpha: StableIndex<T>,
    grid: GridSpec,
    rng: &mut R,
    out: &mut Vec<T>,
) {
    let scale = grid.dt::<T>().powf(T::one() / alpha.value());
    out.clear();
    out.extend((0..grid.m).map(|_| sample_sas(alpha, scale, rng)));
}

const BINARY_MAGIC: &[u8; 4] = b"RFJI";
const BINARY_VERSION: u32 = 1;
const NO_SEED: u64 = u64::MAX;

impl<T: Scalar> StableIncrements<T> {
    /// Wraps explicit increments, e.g. hand-built test paths.
    pub fn from_dx(alpha: StableIndex<T>, dx: Vec<T>) -> Result<Self> {
        let grid = GridSpec::new(dx.len())?;
        Ok(Self { alpha, grid, dx, seed_info: None })
    }

    pub fn total(&self) -> T {
        self.dx.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// CSV with header `t,dx`; row `i` holds the left node `t_i` and `dx_i`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "dx"])?;
        for (i, d) in self.dx.iter().enumerate() {
            w.write_record([self.grid.node::<T>(i).as_f64().to_string(), d.as_f64().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(alpha: StableIndex<T>, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut dx = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let v: f64 = rec
                .get(1)
                .ok_or_else(|| Error::Format("missing dx column".into()))?
                .parse()
                .map_err(|e| Error::Format(format!("bad dx value: {e}")))?;
            dx.push(T::lit(v));
        }
        Self::from_dx(alpha, dx)
    }

    /// Little-endian binary dump: magic `RFJI`, `u32` version, `f64` alpha,
    /// `u64` m, `u64` master seed, `u64` stream (both `u64::MAX` when unknown),
    /// then `m` `f64` increments.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&BINARY_VERSION.to_le_bytes())?;
        out.write_all(&self.alpha.value().as_f64().to_le_bytes())?;
        out.write_all(&(self.grid.m as u64).to_le_bytes())?;
        let (seed, stream) = self.seed_info.map_or((NO_SEED, NO_SEED), |s| (s.master_seed, s.stream));
        out.write_all(&seed.to_le_bytes())?;
        out.write_all(&stream.to_le_bytes())?;
        for d in &self.dx {
            out.write_all(&d.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: BufRead>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Format("not an increments dump (bad magic)".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        if u32::from_le_bytes(b4) != BINARY_VERSION {
            return Err(Error::Format("unsupported increments dump version".into()));
        }
        input.read_exact(&mut b8)?;
        let alpha = StableIndex::new(T::lit(f64::from_le_bytes(b8)))?;
        input.read_exact(&mut b8)?;
        let m = u64::from_le_bytes(b8) as usize;
        input.read_exact(&mut b8)?;
        let seed = u64::from_le_bytes(b8);
        input.read_exact(&mut b8)?;
        let stream = u64::from_le_bytes(b8);
        let mut dx = Vec::with_capacity(m);
        for _ in 0..m {
            input.read_exact(&mut b8)?;
            dx.push(T::lit(f64::from_le_bytes(b8)));
        }
        let mut inc = Self::from_dx(alpha, dx)?;
        if seed != NO_SEED || stream != NO_SEED {
            inc.seed_info = Some(SeedInfo { master_seed: seed, stream });
        }
        Ok(inc)
    }
}
