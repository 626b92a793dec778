//! Fourier-Jacobi analysis in the orthonormal basis: coefficients, the kernel
//! `f_n(y, t) = Σ a_k p_k(y) p_k(t)`, partial sums, θ-sums and their random
//! counterparts `S_n(y, ω)`, `S_n^θ(y, ω)` and `σ'_n(y, ω)`.

use serde::{Deserialize, Serialize};

use crate::catalog::FunctionId;
use crate::error::{Error, Result};
use crate::integral::RandomCoefficientSet;
use crate::jacobi::JacobiParams;
use crate::quadrature::{default_order, gauss_jacobi, QuadratureRule};
use crate::scalar::Scalar;
use crate::summation::SummationMatrix;

fn check_point<T: Scalar>(x: T) -> Result<()> {
    if x.abs() <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain { value: x.as_f64() })
    }
}

/// Deterministic coefficients `a_0, …, a_N` of some `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet<T> {
    pub values: Vec<T>,
    pub params: JacobiParams<T>,
    pub source: String,
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// First `n + 1` coefficients.
    pub fn truncated(&self, n: usize) -> Self {
        Self { values: self.values[..=n.min(self.values.len() - 1)].to_vec(), params: self.params, source: self.source.clone() }
    }

    /// `Σ_k a_k p_k(y)`.
    pub fn evaluate(&self, y: T) -> T {
        let basis = self.params.orthonormal_values(y, self.values.len().saturating_sub(1));
        self.values.iter().zip(&basis).fold(T::zero(), |acc, (&a, &p)| acc + a * p)
    }
}

/// `a_n = ∫ f p_n ρ dt ≈ Σ_i w_i f(x_i) p_n(x_i)` for `n ≤ N`, where `rule` is a
/// Gauss-Jacobi rule for the same weight.
pub fn fj_coefficients<T, F>(f: F, n_max: usize, p: &JacobiParams<T>, rule: &QuadratureRule<T>) -> Result<CoefficientSet<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if rule.order() < n_max + 1 {
        return Err(Error::InvalidParameter(format!(
            "a {}-node rule cannot resolve coefficients up to degree {n_max}",
            rule.order()
        )));
    }
    let mut values = vec![T::zero(); n_max + 1];
    let mut rec = p.recurrence();
    let mut basis = Vec::with_capacity(n_max + 1);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFinite { at: x.as_f64(), value: fx.as_f64() });
        }
        rec.fill(x, n_max, &mut basis);
        for (a, &pk) in values.iter_mut().zip(&basis) {
            *a += w * fx * pk;
        }
    }
    Ok(CoefficientSet { values, params: *p, source: "custom".into() })
}

/// Coefficients of a catalog function with the default rule size.
pub fn catalog_coefficients<T: Scalar>(id: FunctionId, n_max: usize, p: &JacobiParams<T>) -> Result<CoefficientSet<T>> {
    let rule = gauss_jacobi(default_order(n_max), p)?;
    Ok(fj_coefficients(|t| id.eval(t, p), n_max, p, &rule)?.with_source(id.to_string()))
}

/// `f_N(y, t) = Σ_k a_k p_k(y) p_k(t)` over all stored coefficients.
pub fn kernel_partial<T: Scalar>(y: T, t: T, coeffs: &CoefficientSet<T>) -> Result<T> {
    check_point(y)?;
    check_point(t)?;
    let n = coeffs.values.len().saturating_sub(1);
    let py = coeffs.params.orthonormal_values(y, n);
    let pt = coeffs.params.orthonormal_values(t, n);
    Ok(coeffs.values.iter().zip(py.iter().zip(&pt)).fold(T::zero(), |acc, (&a, (&u, &v))| acc + a * u * v))
}

fn check_pair<T: Scalar>(a: &CoefficientSet<T>, big_a: &RandomCoefficientSet<T>) -> Result<()> {
    if a.params != big_a.params {
        return Err(Error::ParamsMismatch);
    }
    Ok(())
}

/// `S_n(y, ω) = Σ_{k ≤ n} a_k A_k(ω) p_k(y)`.
pub fn partial_sum<T: Scalar>(y: T, a: &CoefficientSet<T>, big_a: &RandomCoefficientSet<T>, n: usize) -> Result<T> {
    check_point(y)?;
    check_pair(a, big_a)?;
    if n >= a.len() || n >= big_a.len() {
        return Err(Error::LengthMismatch(format!(
            "partial sum of order {n} needs {} coefficients, have {} deterministic and {} random",
            n + 1,
            a.len(),
            big_a.len()
        )));
    }
    let basis = a.params.orthonormal_values(y, n);
    Ok((0..=n).fold(T::zero(), |acc, k| acc + a.values[k] * big_a.values[k] * basis[k]))
}

fn check_theta<T: Scalar>(theta: &SummationMatrix<T>, n: usize, available: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("theta-sums are indexed from n = 1".into()));
    }
    if n > theta.n_max() {
        return Err(Error::LengthMismatch(format!("summation matrix has {} rows, need row {n}", theta.n_max())));
    }
    if available < n {
        return Err(Error::LengthMismatch(format!("theta-sum of order {n} needs {n} coefficients, have {available}")));
    }
    Ok(())
}

/// `f_n^θ(y) = Σ_{k<n} θ_{k,n} a_k p_k(y)` (`θ_{n,n} = 0`).
pub fn theta_sum<T: Scalar>(y: T, a: &CoefficientSet<T>, theta: &SummationMatrix<T>, n: usize) -> Result<T> {
    check_point(y)?;
    check_theta(theta, n, a.len())?;
    let basis = a.params.orthonormal_values(y, n - 1);
    Ok((0..n).fold(T::zero(), |acc, k| acc + theta.theta(k, n) * a.values[k] * basis[k]))
}

/// `S_n^θ(y, ω) = Σ_{k<n} θ_{k,n} a_k A_k(ω) p_k(y)`.
pub fn random_theta_sum<T: Scalar>(
    y: T,
    a: &CoefficientSet<T>,
    big_a: &RandomCoefficientSet<T>,
    theta: &SummationMatrix<T>,
    n: usize,
) -> Result<T> {
    check_point(y)?;
    check_pair(a, big_a)?;
    check_theta(theta, n, a.len().min(big_a.len()))?;
    let basis = a.params.orthonormal_values(y, n - 1);
    Ok((0..n).fold(T::zero(), |acc, k| acc + theta.theta(k, n) * a.values[k] * big_a.values[k] * basis[k]))
}

/// `σ'_n(y, ω) = (S_0 + … + S_{n-1}) / n`, accumulated from the partial sums themselves.
pub fn cesaro_mean<T: Scalar>(y: T, a: &CoefficientSet<T>, big_a: &RandomCoefficientSet<T>, n: usize) -> Result<T> {
    check_point(y)?;
    check_pair(a, big_a)?;
    if n == 0 {
        return Err(Error::InvalidParameter("Cesaro mean needs n >= 1".into()));
    }
    if a.len() < n || big_a.len() < n {
        return Err(Error::LengthMismatch(format!("Cesaro mean of order {n} needs {n} coefficients")));
    }
    let basis = a.params.orthonormal_values(y, n - 1);
    let mut running = T::zero();
    let mut total = T::zero();
    for k in 0..n {
        running += a.values[k] * big_a.values[k] * basis[k];
        total += running;
    }
    Ok(total / T::from_usize_lossy(n))
}
