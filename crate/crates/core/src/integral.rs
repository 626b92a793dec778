//! Stieltjes sums against a stable-increment realisation and the random
//! Fourier-Jacobi coefficients `A_n(ω) = ∫ p_n ρ dX(t, ω)`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::jacobi::JacobiParams;
use crate::scalar::Scalar;
use crate::stable::{GridSpec, SeedInfo, StableIncrements, StableIndex};

/// Left-endpoint sum `Σ_{i<m} g(t_i) dx_i`.
///
/// The integrand is deterministic, so the evaluation point inside each cell does
/// not matter in the limit; left endpoints keep the sum non-anticipating.
pub fn ito_stieltjes<T, G>(g: G, inc: &StableIncrements<T>) -> Result<T>
where
    T: Scalar,
    G: Fn(T) -> T,
{
    let mut acc = T::zero();
    for (i, &d) in inc.dx.iter().enumerate() {
        let t = inc.grid.node::<T>(i);
        let v = g(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: t.as_f64(), value: v.as_f64() });
        }
        acc = acc + v * d;
    }
    Ok(acc)
}

fn require_bounded_weight<T: Scalar>(p: &JacobiParams<T>) -> Result<()> {
    // p_n ρ must be bounded on the closed interval for the left-endpoint sum
    if p.gamma >= T::zero() && p.delta >= T::zero() {
        Ok(())
    } else {
        Err(Error::Gate(format!(
            "random coefficients need a bounded weight (gamma, delta >= 0), got ({}, {})",
            p.gamma, p.delta
        )))
    }
}

/// `A_n(ω) = Σ_i p_n(t_i) ρ(t_i) dx_i`.
pub fn random_fj_coefficient<T: Scalar>(n: usize, p: &JacobiParams<T>, inc: &StableIncrements<T>) -> Result<T> {
    require_bounded_weight(p)?;
    ito_stieltjes(|t| p.orthonormal_at(n, t) * p.rho(t), inc)
}

/// `A_0, …, A_N` from one realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCoefficientSet<T> {
    pub values: Vec<T>,
    pub params: JacobiParams<T>,
    pub alpha: StableIndex<T>,
    pub grid: GridSpec,
    pub seed_info: Option<SeedInfo>,
}

impl<T: Scalar> RandomCoefficientSet<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Serialises as `{"alpha": …, "gamma": …, "delta": …, "A": [...]}`.
impl<T: Scalar + Serialize> Serialize for RandomCoefficientSet<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a, T> {
            alpha: T,
            gamma: T,
            delta: T,
            #[serde(rename = "A")]
            a: &'a [T],
        }
        Wire { alpha: self.alpha.value(), gamma: self.params.gamma, delta: self.params.delta, a: &self.values }
            .serialize(s)
    }
}

/// `A_0..=A_N` sharing the single realisation `inc`.
pub fn coefficient_set<T: Scalar>(
    n_max: usize,
    p: &JacobiParams<T>,
    inc: &StableIncrements<T>,
) -> Result<RandomCoefficientSet<T>> {
    let table = BasisTable::new(p, inc.grid, n_max)?;
    Ok(table.coefficient_set(inc))
}

/// `p_k(t_i) ρ(t_i)` for `k ≤ N` on the left nodes of a grid, row-major by `k`.
///
/// Building the table once lets every Monte Carlo trial reduce to `N + 1` dot
/// products with its increments; the sums are accumulated in the same order as
/// [`random_fj_coefficient`], so both routes agree bit for bit.
#[derive(Debug, Clone)]
pub struct BasisTable<T> {
    params: JacobiParams<T>,
    grid: GridSpec,
    n_max: usize,
    rows: Vec<T>,
}

impl<T: Scalar> BasisTable<T> {
    pub fn new(p: &JacobiParams<T>, grid: GridSpec, n_max: usize) -> Result<Self> {
        require_bounded_weight(p)?;
        let m = grid.m;
        let mut rows = vec![T::zero(); (n_max + 1) * m];
        let mut rec = p.recurrence();
        let mut vals = Vec::with_capacity(n_max + 1);
        for i in 0..m {
            let t = grid.node::<T>(i);
            rec.fill(t, n_max, &mut vals);
            let w = p.rho(t);
            for (k, v) in vals.iter().enumerate() {
                let g = *v * w;
                if !g.is_finite() {
                    return Err(Error::NonFinite { at: t.as_f64(), value: g.as_f64() });
                }
                rows[k * m + i] = g;
            }
        }
        Ok(Self { params: *p, grid, n_max, rows })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn row(&self, k: usize) -> &[T] {
        &self.rows[k * self.grid.m..(k + 1) * self.grid.m]
    }

    /// Writes `A_0..=A_N` for increments `dx` into `out`.
    pub fn project_into(&self, dx: &[T], out: &mut Vec<T>) {
        debug_assert_eq!(dx.len(), self.grid.m);
        out.clear();
        out.extend((0..=self.n_max).map(|k| {
            self.row(k).iter().zip(dx).fold(T::zero(), |acc, (&g, &d)| acc + g * d)
        }));
    }

    pub fn coefficient_set(&self, inc: &StableIncrements<T>) -> RandomCoefficientSet<T> {
        assert_eq!(inc.grid, self.grid, "increments live on a different grid than the basis table");
        let mut values = Vec::with_capacity(self.n_max + 1);
        self.project_into(&inc.dx, &mut values);
        RandomCoefficientSet { values, params: self.params, alpha: inc.alpha, grid: inc.grid, seed_info: inc.seed_info }
    }
}
