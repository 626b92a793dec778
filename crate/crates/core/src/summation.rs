//! Lower-triangular summation matrices `θ_{k,n}` and a finite-`n` checker for
//! the regularity conditions T1-T5.
//!
//! Row `n` (`n ≥ 1`) holds `θ_{0,n}, …, θ_{n-1,n}`; `θ_{k,n} = 0` for `k ≥ n`.
//! Differences are `Δθ_{k,n} = θ_{k+1,n} - θ_{k,n}` and
//! `Δ²θ_{k,n} = Δθ_{k+1,n} - Δθ_{k,n}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which construction produced a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SummationFamily {
    /// `θ_{k,n} = 1` for `k < n`: the θ-sum is the partial sum `S_{n-1}`.
    PartialSum,
    /// Cesàro means of order `μ` of `S_0, …, S_{n-1}`.
    Cesaro { mu: u32 },
    Custom { label: String },
}

impl fmt::Display for SummationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SummationFamily::PartialSum => f.write_str("identity"),
            SummationFamily::Cesaro { mu } => write!(f, "cesaro{mu}"),
            SummationFamily::Custom { label } => f.write_str(label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummationMatrix<T> {
    pub family: SummationFamily,
    /// `rows[n - 1][k] = θ_{k,n}`.
    pub rows: Vec<Vec<T>>,
}

impl<T: Scalar> SummationMatrix<T> {
    /// Builds rows `1..=n_max` from `θ(k, n)`.
    pub fn from_fn<F: Fn(usize, usize) -> T>(family: SummationFamily, n_max: usize, theta: F) -> Self {
        let rows = (1..=n_max).map(|n| (0..n).map(|k| theta(k, n)).collect()).collect();
        Self { family, rows }
    }

    pub fn from_rows(family: SummationFamily, rows: Vec<Vec<T>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::LengthMismatch(format!(
                    "row for n = {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite { at: (i + 1) as f64, value: v.as_f64() });
            }
        }
        Ok(Self { family, rows })
    }

    pub fn identity(n_max: usize) -> Self {
        Self::from_fn(SummationFamily::PartialSum, n_max, |_, _| T::one())
    }

    pub fn zero(n_max: usize) -> Self {
        Self::from_fn(SummationFamily::Custom { label: "zero".into() }, n_max, |_, _| T::zero())
    }

    pub fn n_max(&self) -> usize {
        self.rows.len()
    }

    /// `θ_{k,n}`, zero on and above the diagonal.
    pub fn theta(&self, k: usize, n: usize) -> T {
        if n == 0 || k >= n {
            return T::zero();
        }
        self.rows[n - 1][k]
    }

    /// `Δ²θ_{k-1,n} = θ_{k+1,n} - 2θ_{k,n} + θ_{k-1,n}` for `1 ≤ k ≤ n-1`.
    pub fn second_difference(&self, k: usize, n: usize) -> T {
        self.theta(k + 1, n) - T::two() * self.theta(k, n) + self.theta(k - 1, n)
    }
}

/// `(C, μ)` matrix through row `n_max`:
/// `θ_{k,n} = C(n - k + μ - 1, μ) / C(n + μ - 1, μ)`, so `μ = 1` gives `(n - k)/n`.
pub fn make_cesaro<T: Scalar>(mu: u32, n_max: usize) -> Result<SummationMatrix<T>> {
    if mu == 0 {
        return Err(Error::InvalidParameter("Cesaro order must be >= 1".into()));
    }
    Ok(SummationMatrix::from_fn(SummationFamily::Cesaro { mu }, n_max, |k, n| {
        (1..=mu as usize).fold(T::one(), |acc, j| {
            acc * T::from_usize_lossy(n - k - 1 + j) / T::from_usize_lossy(n - 1 + j)
        })
    }))
}

/// Family tags accepted on the command line: `identity` / `partial-sum`,
/// `zero`, `cesaro<μ>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    Identity,
    Zero,
    Cesaro(u32),
}

impl FamilyTag {
    pub fn build<T: Scalar>(self, n_max: usize) -> Result<SummationMatrix<T>> {
        match self {
            FamilyTag::Identity => Ok(SummationMatrix::identity(n_max)),
            FamilyTag::Zero => Ok(SummationMatrix::zero(n_max)),
            FamilyTag::Cesaro(mu) => make_cesaro(mu, n_max),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "partial-sum" => Ok(FamilyTag::Identity),
            "zero" => Ok(FamilyTag::Zero),
            _ => s
                .strip_prefix("cesaro")
                .and_then(|mu| mu.parse().ok())
                .filter(|&mu| mu >= 1)
                .map(FamilyTag::Cesaro)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown summation family `{s}`"))),
        }
    }
}

/// Verdict on one condition, with the finite-`n` evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub passed: bool,
    /// Bound constant estimated over `n ≤ n_max` (for T2/T3), or the probed residual (T1).
    pub estimate: f64,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: SummationFamily,
    pub n_max: usize,
    pub t1: ConditionVerdict,
    pub t2: ConditionVerdict,
    pub t3: ConditionVerdict,
    pub t4: ConditionVerdict,
    pub t5: ConditionVerdict,
    /// T1, T2, T3.
    pub xi1: bool,
    /// T1, T2, T3 (the same list as Ξ1, read literally).
    pub xi2: bool,
    /// T1, T5.
    pub xi3: bool,
}

impl ConditionReport {
    pub fn verdicts(&self) -> [(&'static str, &ConditionVerdict); 5] {
        [("T1", &self.t1), ("T2", &self.t2), ("T3", &self.t3), ("T4", &self.t4), ("T5", &self.t5)]
    }

    /// Names of the failing conditions.
    pub fn failed(&self) -> Vec<&'static str> {
        self.verdicts().iter().filter(|(_, v)| !v.passed).map(|(n, _)| *n).collect()
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("summation family: {}\nchecked through n = {}\n", self.family, self.n_max);
        for (name, v) in self.verdicts() {
            out.push_str(&format!("{name}: {} ({})\n", if v.passed { "pass" } else { "FAIL" }, v.witness));
        }
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        out.push_str(&format!("Xi1 (T1,T2,T3): {}\n", flag(self.xi1)));
        out.push_str(&format!("Xi2 (T1,T2,T3): {}\n", flag(self.xi2)));
        out.push_str(&format!("Xi3 (T1,T5): {}\n", flag(self.xi3)));
        out.push_str("note: T1-T3 are asymptotic; a pass is finite-n evidence, not proof\n");
        out
    }
}

/// Number of fixed column indices probed for T1.
const T1_PROBE: usize = 4;
/// Tail-over-head growth ratio above which a `sup` is judged unbounded.
const GROWTH_RATIO: f64 = 1.1;
/// T1 residual must at least shrink by this factor between `n_max/2` and `n_max`.
const T1_SHRINK: f64 = 0.75;
const ZERO_TOL: f64 = 1e-13;

fn sgn(v: f64) -> i8 {
    if v > ZERO_TOL {
        1
    } else if v < -ZERO_TOL {
        -1
    } else {
        0
    }
}

/// Evaluates T1-T5 on rows `1..=n_max`.
///
/// The asymptotic conditions are judged from finite evidence: T1 asks that
/// `max_{k ≤ 4} |1 - θ_{k,n}|` be non-increasing over `n ∈ [n_max/2, n_max]` and
/// shrink by at least 25% across that window (or already vanish); T2 and T3
/// ask that the maximum of `n|θ_{n-1,n}|` resp. `n² max_k |Δ²θ_{k-1,n}|` over the
/// upper half of `n` exceed the maximum over the lower half by at most 10%.
pub fn check_conditions<T: Scalar>(theta: &SummationMatrix<T>, n_max: usize) -> Result<ConditionReport> {
    let n_max = n_max.min(theta.n_max());
    if n_max < 2 * (T1_PROBE + 1) {
        return Err(Error::InvalidParameter(format!(
            "condition checking needs at least {} rows, got {n_max}",
            2 * (T1_PROBE + 1)
        )));
    }
    let th = |k: usize, n: usize| theta.theta(k, n).as_f64();
    let d2 = |k: usize, n: usize| theta.second_difference(k, n).as_f64();
    let half = n_max / 2;

    // T1
    let resid = |n: usize| (0..=T1_PROBE.min(n - 1)).map(|k| (1.0 - th(k, n)).abs()).fold(0.0, f64::max);
    let mut t1_monotone = true;
    let mut t1_break = None;
    for n in half..n_max {
        if resid(n + 1) > resid(n) + 1e-12 {
            t1_monotone = false;
            t1_break = Some(n + 1);
            break;
        }
    }
    let (r_half, r_end) = (resid(half), resid(n_max));
    let t1_pass = t1_monotone && (r_end <= 1e-12 || r_end <= T1_SHRINK * r_half);
    let t1 = ConditionVerdict {
        passed: t1_pass,
        estimate: r_end,
        witness: match t1_break {
            Some(n) => format!("max_(k<={T1_PROBE}) |1 - theta(k,n)| increases at n = {n}"),
            None => format!(
                "max_(k<={T1_PROBE}) |1 - theta(k,n)| = {r_end:.6e} at n = {n_max}, {r_half:.6e} at n = {half}"
            ),
        },
    };

    let growth = |name: &str, f: &dyn Fn(usize) -> f64, from: usize| {
        let (mut head, mut tail, mut arg, mut best) = (0.0f64, 0.0f64, from, f64::NEG_INFINITY);
        for n in from..=n_max {
            let v = f(n);
            if n <= half {
                head = head.max(v);
            } else {
                tail = tail.max(v);
            }
            if v > best {
                best = v;
                arg = n;
            }
        }
        let passed = tail <= GROWTH_RATIO * head + 1e-12;
        let last = f(n_max);
        ConditionVerdict {
            passed,
            estimate: best,
            witness: format!(
                "{name} = {last:.6e} at n = {n_max}; sup = {best:.6e} at n = {arg}; upper/lower-half sup ratio {:.4}",
                if head > 0.0 { tail / head } else if tail > 0.0 { f64::INFINITY } else { 1.0 }
            ),
        }
    };

    let t2 = growth("n*|theta(n-1,n)|", &|n| n as f64 * th(n - 1, n).abs(), 1);
    let t3 = growth(
        "n^2*max_k |D2 theta(k-1,n)|",
        &|n| {
            // rounding noise below the sign tolerance counts as zero
            let m = (1..n).map(|k| d2(k, n).abs()).filter(|v| *v > ZERO_TOL).fold(0.0, f64::max);
            (n * n) as f64 * m
        },
        2,
    );

    // T4 / T5
    let mut t4 = ConditionVerdict { passed: true, estimate: 0.0, witness: "D2 theta(k-1,n) has one sign in every row".into() };
    let mut t5 = ConditionVerdict {
        passed: true,
        estimate: 0.0,
        witness: "sgn D2 theta(k-1,n) = sgn theta(n-1,n) everywhere".into(),
    };
    'rows: for n in 2..=n_max {
        let first = sgn(d2(1, n));
        let last_sign = sgn(th(n - 1, n));
        for k in 1..n {
            let s = sgn(d2(k, n));
            if t4.passed && s != first {
                t4 = ConditionVerdict {
                    passed: false,
                    estimate: d2(k, n),
                    witness: format!(
                        "row n = {n}: D2 theta(0,n) = {:.3e} but D2 theta({},n) = {:.3e}",
                        d2(1, n),
                        k - 1,
                        d2(k, n)
                    ),
                };
            }
            if t5.passed && s != last_sign {
                t5 = ConditionVerdict {
                    passed: false,
                    estimate: d2(k, n),
                    witness: format!(
                        "row n = {n}: sgn D2 theta({},n) = {s} but sgn theta(n-1,n) = {last_sign}",
                        k - 1
                    ),
                };
            }
            if !t4.passed && !t5.passed {
                break 'rows;
            }
        }
    }

    let xi1 = t1.passed && t2.passed && t3.passed;
    Ok(ConditionReport {
        family: theta.family.clone(),
        n_max,
        xi1,
        xi2: xi1,
        xi3: t1.passed && t5.passed,
        t1,
        t2,
        t3,
        t4,
        t5,
    })
}
