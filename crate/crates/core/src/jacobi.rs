//! Jacobi weights, classical and orthonormal Jacobi polynomials, and the
//! weighted spaces `C^{(η,τ)}` with their sup-norm.
//!
//! Throughout, `ρ^{(γ,δ)}(t) = (1 - t)^γ (1 + t)^δ`. The working basis is the
//! orthonormal family `p_n = P_n / sqrt(h_n)`, so that `a_n = ∫ f p_n ρ dt`
//! and `f = Σ a_n p_n` hold simultaneously.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default number of sample points for [`weighted_sup_norm`].
pub const DEFAULT_SUP_SAMPLING: usize = 4097;

fn check_domain<T: Scalar>(t: T) -> Result<()> {
    if t.abs() <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain { value: t.as_f64() })
    }
}

/// Exponent pair `(γ, δ)` of the Jacobi weight `(1 - t)^γ (1 + t)^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams<T> {
    pub gamma: T,
    pub delta: T,
}

impl<T: Scalar> JacobiParams<T> {
    /// Accepts any `γ, δ > -1`; stricter regimes are checked by
    /// [`require_theorem_regime`](Self::require_theorem_regime) and
    /// [`require_lemma_regime`](Self::require_lemma_regime).
    pub fn new(gamma: T, delta: T) -> Result<Self> {
        if !gamma.is_finite() || !delta.is_finite() || gamma <= -T::one() || delta <= -T::one() {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents must be finite and > -1, got gamma = {gamma}, delta = {delta}"
            )));
        }
        Ok(Self { gamma, delta })
    }

    /// `γ, δ > 0`, where mean convergence and (C,1) summability are guaranteed.
    pub fn require_theorem_regime(&self) -> Result<()> {
        if self.gamma > T::zero() && self.delta > T::zero() {
            Ok(())
        } else {
            Err(Error::Gate(format!(
                "theorem regime needs gamma > 0 and delta > 0, got ({}, {})",
                self.gamma, self.delta
            )))
        }
    }

    /// `γ, δ ≥ -1/2`, the regime where θ-summation is analysed.
    pub fn require_lemma_regime(&self) -> Result<()> {
        let bound = -T::half();
        if self.gamma >= bound && self.delta >= bound {
            Ok(())
        } else {
            Err(Error::Gate(format!(
                "lemma regime needs gamma, delta >= -1/2, got ({}, {})",
                self.gamma, self.delta
            )))
        }
    }

    /// `ρ(t)` with a domain check.
    pub fn weight(&self, t: T) -> Result<T> {
        check_domain(t)?;
        Ok(self.rho(t))
    }

    /// `ρ(t)` without the domain check.
    #[inline]
    pub fn rho(&self, t: T) -> T {
        (T::one() - t).powf(self.gamma) * (T::one() + t).powf(self.delta)
    }

    /// `∫_{-1}^{1} ρ(t) dt = 2^{γ+δ+1} Γ(γ+1) Γ(δ+1) / Γ(γ+δ+2)`.
    pub fn total_mass(&self) -> T {
        let (g, d) = (self.gamma.as_f64(), self.delta.as_f64());
        let ln = (g + d + 1.0) * std::f64::consts::LN_2 + ln_gamma(g + 1.0) + ln_gamma(d + 1.0)
            - ln_gamma(g + d + 2.0);
        T::lit(ln.exp())
    }

    /// Diagonal entry `a_k` of the Jacobi (recurrence) matrix of the orthonormal family.
    pub fn recurrence_diag(&self, k: usize) -> T {
        let (g, d) = (self.gamma, self.delta);
        let s = g + d;
        let two = T::two();
        if k == 0 {
            (d - g) / (s + two)
        } else {
            let kk = T::from_usize_lossy(2 * k) + s;
            (d * d - g * g) / (kk * (kk + two))
        }
    }

    /// Off-diagonal entry `b_k` (`k ≥ 1`), coupling `p_{k-1}` and `p_k`.
    pub fn recurrence_offdiag(&self, k: usize) -> T {
        debug_assert!(k >= 1);
        let (g, d) = (self.gamma, self.delta);
        let s = g + d;
        let one = T::one();
        let two = T::two();
        let four = two * two;
        let sq = if k == 1 {
            four * (g + one) * (d + one) / ((s + two) * (s + two) * (s + two + one))
        } else {
            let kf = T::from_usize_lossy(k);
            let kk = two * kf + s;
            four * kf * (kf + g) * (kf + d) * (kf + s) / (kk * kk * (kk + one) * (kk - one))
        };
        sq.sqrt()
    }

    /// Squared norm `h_n = ∫ P_n² ρ dt` of the classical Jacobi polynomial.
    pub fn norm_constant(&self, n: usize) -> T {
        if n == 0 {
            return self.total_mass();
        }
        let (g, d) = (self.gamma.as_f64(), self.delta.as_f64());
        let s = g + d;
        let nf = n as f64;
        let ln = (s + 1.0) * std::f64::consts::LN_2 - (2.0 * nf + s + 1.0).ln()
            + ln_gamma(nf + g + 1.0)
            + ln_gamma(nf + d + 1.0)
            - ln_gamma(nf + s + 1.0)
            - ln_gamma(nf + 1.0);
        T::lit(ln.exp())
    }

    /// Classical `P_n^{(γ,δ)}(t)` by the three-term recurrence.
    pub fn jacobi_eval(&self, n: usize, t: T) -> Result<T> {
        check_domain(t)?;
        Ok(self.classical_at(n, t))
    }

    fn classical_at(&self, n: usize, t: T) -> T {
        let (g, d) = (self.gamma, self.delta);
        let one = T::one();
        let two = T::two();
        let s = g + d;
        let mut prev = one;
        if n == 0 {
            return prev;
        }
        let mut cur = (g + one) + (s + two) * (t - one) / two;
        for k in 2..=n {
            let kf = T::from_usize_lossy(k);
            let c = two * kf + s;
            let lead = two * kf * (kf + s) * (c - two);
            let mid = (c - one) * (c * (c - two) * t + g * g - d * d);
            let back = two * (kf + g - one) * (kf + d - one) * c;
            let next = (mid * cur - back * prev) / lead;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Orthonormal `p_n(t) = P_n(t) / sqrt(h_n)`, with a domain check.
    pub fn orthonormal_eval(&self, n: usize, t: T) -> Result<T> {
        check_domain(t)?;
        Ok(self.orthonormal_at(n, t))
    }

    /// Orthonormal `p_n(t)` via the symmetric recurrence (no gamma functions,
    /// no overflow for large `n`).
    pub fn orthonormal_at(&self, n: usize, t: T) -> T {
        let mut prev = T::zero();
        let mut cur = T::one() / self.total_mass().sqrt();
        for k in 0..n {
            let next = ((t - self.recurrence_diag(k)) * cur
                - if k == 0 { T::zero() } else { self.recurrence_offdiag(k) * prev })
                / self.recurrence_offdiag(k + 1);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `p_0(t), …, p_{n_max}(t)` in one pass.
    pub fn orthonormal_values(&self, t: T, n_max: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(n_max + 1);
        self.recurrence().fill(t, n_max, &mut out);
        out
    }

    /// Precomputed recurrence coefficients up to some degree.
    pub fn recurrence(&self) -> Recurrence<T> {
        Recurrence { params: *self, p0: T::one() / self.total_mass().sqrt(), diag: Vec::new(), off: Vec::new() }
    }
}

/// Cached recurrence coefficients for repeated basis evaluation.
#[derive(Debug, Clone)]
pub struct Recurrence<T> {
    params: JacobiParams<T>,
    p0: T,
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Scalar> Recurrence<T> {
    fn ensure(&mut self, n_max: usize) {
        while self.diag.len() < n_max {
            let k = self.diag.len();
            self.diag.push(self.params.recurrence_diag(k));
            self.off.push(self.params.recurrence_offdiag(k + 1));
        }
    }

    /// Overwrites `out` with `p_0(t), …, p_{n_max}(t)`.
    pub fn fill(&mut self, t: T, n_max: usize, out: &mut Vec<T>) {
        self.ensure(n_max);
        out.clear();
        out.push(self.p0);
        let mut prev = T::zero();
        let mut cur = self.p0;
        for k in 0..n_max {
            let back = if k == 0 { T::zero() } else { self.off[k - 1] * prev };
            let next = ((t - self.diag[k]) * cur - back) / self.off[k];
            out.push(next);
            prev = cur;
            cur = next;
        }
    }
}

/// Exponents `(η, τ)` of the weighted space `C^{(η,τ)}(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpaceParams<T> {
    pub eta: T,
    pub tau: T,
}

impl<T: Scalar> WeightedSpaceParams<T> {
    pub fn new(eta: T, tau: T) -> Result<Self> {
        if !eta.is_finite() || !tau.is_finite() || eta < T::zero() || tau < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "weighted-space exponents must be finite and >= 0, got eta = {eta}, tau = {tau}"
            )));
        }
        Ok(Self { eta, tau })
    }

    /// `ρ^{(η,τ)}(t)`.
    #[inline]
    pub fn rho(&self, t: T) -> T {
        (T::one() - t).powf(self.eta) * (T::one() + t).powf(self.tau)
    }
}

/// Chebyshev points of the first kind: `n` interior points of `(-1, 1)`, ascending.
pub fn chebyshev_grid<T: Scalar>(n: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(n);
    (0..n)
        .rev()
        .map(|j| {
            let theta = T::PI() * (T::from_usize_lossy(2 * j + 1)) / (T::two() * nf);
            theta.cos()
        })
        .collect()
}

/// Surrogate for `sup_{|t|≤1} |f(t) ρ^{(η,τ)}(t)|`: the maximum over `sampling`
/// Chebyshev points, which cluster at the endpoints where `f ρ^{(η,τ)}` varies fastest.
pub fn weighted_sup_norm<T, F>(f: F, w: &WeightedSpaceParams<T>, sampling: usize) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if sampling < 2 {
        return Err(Error::InvalidParameter(format!("sampling must be >= 2, got {sampling}")));
    }
    let mut sup = T::zero();
    for t in chebyshev_grid::<T>(sampling) {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: t.as_f64(), value: v.as_f64() });
        }
        sup = sup.max((v * w.rho(t)).abs());
    }
    Ok(sup)
}

/// Numerical membership test for `C^{(η,τ)}`: at every endpoint whose exponent is
/// positive, `|f ρ^{(η,τ)}|` must shrink towards zero along `1 - |t| = 10^{-2}, …, 10^{-12}`.
/// `f` is assumed continuous on the open interval; discontinuous catalog members
/// are rejected upstream.
pub fn vanishes_at_weighted_endpoints<F>(f: F, w: &WeightedSpaceParams<f64>) -> bool
where
    F: Fn(f64) -> f64,
{
    let check = |sign: f64| {
        let vals: Vec<f64> =
            (2..=12).map(|j| (f(sign * (1.0 - 10f64.powi(-j))) * w.rho(sign * (1.0 - 10f64.powi(-j)))).abs()).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let last = *vals.last().unwrap();
        let monotone = vals.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-9) + 1e-300);
        monotone && (last < 1e-12 || last <= 0.01 * vals[0])
    };
    (w.eta <= 0.0 || check(1.0)) && (w.tau <= 0.0 || check(-1.0))
}

/// Outcome of the `(γ, δ, η, τ)` admissibility check for θ-summation in `C^{(η,τ)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub satisfied: bool,
    pub violations: Vec<String>,
}

/// `γ/2 - 1/4 < η < γ/2 + 3/4`, `δ/2 - 1/4 < τ < δ/2 + 3/4`, with `γ, δ ≥ -1/2`.
pub fn check_parameter_gate<T: Scalar>(p: &JacobiParams<T>, w: &WeightedSpaceParams<T>) -> GateReport {
    let quarter = T::lit(0.25);
    let three_q = T::lit(0.75);
    let mut violations = Vec::new();
    if p.gamma < -T::half() {
        violations.push(format!("gamma = {} < -1/2", p.gamma));
    }
    if p.delta < -T::half() {
        violations.push(format!("delta = {} < -1/2", p.delta));
    }
    let mut band = |name: &str, x: T, exp_name: &str, e: T| {
        let lo = e / T::two() - quarter;
        let hi = e / T::two() + three_q;
        if !(lo < x) {
            violations.push(format!("{name} = {x} is not > {exp_name}/2 - 1/4 = {lo}"));
        }
        if !(x < hi) {
            violations.push(format!("{name} = {x} is not < {exp_name}/2 + 3/4 = {hi}"));
        }
    };
    band("eta", w.eta, "gamma", p.gamma);
    band("tau", w.tau, "delta", p.delta);
    GateReport { satisfied: violations.is_empty(), violations }
}
