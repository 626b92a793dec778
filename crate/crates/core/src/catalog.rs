//! Test-function catalog spanning smooth, non-smooth, discontinuous and
//! endpoint-singular regimes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::jacobi::JacobiParams;
use crate::scalar::Scalar;

/// Identifier of a catalog function. Textual forms: `p<k>` (orthonormal basis
/// element), `t<d>` (monomial), `exp`, `abs`, `jump`, `runge`, `endsing`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionId {
    /// `p_k` for the Jacobi parameters in use.
    Basis(usize),
    /// `t^d`.
    Power(u32),
    Exp,
    Abs,
    /// `sign(t - 0.3)`.
    Jump,
    /// `1 / (1 + 25 t²)`.
    Runge,
    /// `(1 - t)^{-1/4}`.
    EndpointSingular,
}

impl FunctionId {
    pub fn eval<T: Scalar>(&self, t: T, p: &JacobiParams<T>) -> T {
        match *self {
            FunctionId::Basis(k) => p.orthonormal_at(k, t),
            FunctionId::Power(d) => t.powi(d as i32),
            FunctionId::Exp => t.exp(),
            FunctionId::Abs => t.abs(),
            FunctionId::Jump => {
                let s = t - T::lit(0.3);
                if s > T::zero() {
                    T::one()
                } else if s < T::zero() {
                    -T::one()
                } else {
                    T::zero()
                }
            }
            FunctionId::Runge => T::one() / (T::one() + T::lit(25.0) * t * t),
            FunctionId::EndpointSingular => (T::one() - t).powf(T::lit(-0.25)),
        }
    }

    /// Continuous on the open interval `(-1, 1)`.
    pub fn is_continuous(&self) -> bool {
        !matches!(self, FunctionId::Jump)
    }

    /// Polynomial degree, when the function is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match *self {
            FunctionId::Basis(k) => Some(k),
            FunctionId::Power(d) => Some(d as usize),
            _ => None,
        }
    }

    pub fn all_named() -> [FunctionId; 5] {
        [FunctionId::Exp, FunctionId::Abs, FunctionId::Jump, FunctionId::Runge, FunctionId::EndpointSingular]
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Basis(k) => write!(f, "p{k}"),
            FunctionId::Power(d) => write!(f, "t{d}"),
            FunctionId::Exp => f.write_str("exp"),
            FunctionId::Abs => f.write_str("abs"),
            FunctionId::Jump => f.write_str("jump"),
            FunctionId::Runge => f.write_str("runge"),
            FunctionId::EndpointSingular => f.write_str("endsing"),
        }
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unknown function id `{s}` (expected p<k>, t<d>, exp, abs, jump, runge, endsing)"));
        match s {
            "exp" => Ok(FunctionId::Exp),
            "abs" => Ok(FunctionId::Abs),
            "jump" => Ok(FunctionId::Jump),
            "runge" => Ok(FunctionId::Runge),
            "endsing" => Ok(FunctionId::EndpointSingular),
            _ if s.starts_with('p') => s[1..].parse().map(FunctionId::Basis).map_err(|_| bad()),
            _ if s.starts_with('t') => s[1..].parse().map(FunctionId::Power).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Serialize for FunctionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
