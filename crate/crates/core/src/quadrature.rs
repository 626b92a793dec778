//! Gauss-Jacobi rules by the Golub-Welsch method.
//!
//! The nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
//! the orthonormal family; the weights are `μ_0 v_0²`, where `v_0` is the first
//! component of each normalised eigenvector. Only the first row of the
//! eigenvector matrix is carried through the QL sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;
use crate::scalar::Scalar;

const MAX_QL_ITERATIONS: usize = 60;

/// Nodes and weights of an interpolatory rule on `(-1, 1)`.
///
/// Serialises as `{"nodes": [...], "weights": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&x, &w)| acc + w * f(x))
    }

    /// Integrates `f` over `[-1, 1]` by applying this rule (assumed to be an
    /// unweighted Gauss-Legendre rule) on `panels` equal sub-intervals.
    pub fn integrate_composite<F: FnMut(T) -> T>(&self, panels: usize, mut f: F) -> T {
        let h = T::two() / T::from_usize_lossy(panels);
        let mut total = T::zero();
        for j in 0..panels {
            let mid = -T::one() + h * (T::from_usize_lossy(j) + T::half());
            let half = h / T::two();
            total += half * self.integrate(|x| f(mid + half * x));
        }
        total
    }
}

/// Default rule size for coefficient work up to degree `n`.
pub fn default_order(n: usize) -> usize {
    (2 * n + 16).max(64)
}

/// `m`-node Gauss-Jacobi rule for the weight `ρ^{(γ,δ)}`, exact for polynomials
/// of degree `≤ 2m - 1`.
pub fn gauss_jacobi<T: Scalar>(m: usize, p: &JacobiParams<T>) -> Result<QuadratureRule<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
    }
    let mut diag: Vec<T> = (0..m).map(|k| p.recurrence_diag(k)).collect();
    let mut off: Vec<T> = (1..=m).map(|k| if k < m { p.recurrence_offdiag(k) } else { T::zero() }).collect();
    let mut first = vec![T::zero(); m];
    first[0] = T::one();
    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mass = p.total_mass();
    let mut pairs: Vec<(T, T)> = diag.into_iter().zip(first.into_iter().map(|v| mass * v * v)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss-Legendre rule (`γ = δ = 0`).
pub fn gauss_legendre<T: Scalar>(m: usize) -> Result<QuadratureRule<T>> {
    gauss_jacobi(m, &JacobiParams { gamma: T::zero(), delta: T::zero() })
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `diag` is replaced by the eigenvalues, `off[i]` couples rows `i` and `i + 1`
/// (the last entry is scratch), and `first` accumulates the first row of the
/// eigenvector matrix.
fn tridiagonal_ql<T: Scalar>(diag: &mut [T], off: &mut [T], first: &mut [T]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iterations == MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence { index: l, iterations });
            }
            iterations += 1;

            let mut g = (diag[l + 1] - diag[l]) / (T::two() * off[l]);
            let mut r = g.hypot(T::one());
            g = diag[m] - diag[l] + off[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + T::two() * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}
