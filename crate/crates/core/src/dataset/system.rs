use std::fmt;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::domain::Domain;

/// Linear example dynamics `x⁺ = A x`.
pub const LINEAR2D_MATRIX: [[f64; 2]; 2] = [[0.2200, 0.4013], [-0.5364, 0.2109]];
/// Max-norm Lipschitz bound used with [`LINEAR2D_MATRIX`].
pub const LINEAR2D_LIPSCHITZ: f64 = 0.8225;
/// Max-norm Lipschitz bound of the polynomial example on `[-1, 1]²`.
pub const NONLINEAR2D_LIPSCHITZ: f64 = 5.728;

/// The map `T` in `x⁺ = T(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemMap {
    Linear2d,
    /// `x₁⁺ = 0.5 x₁ − 0.7 x₂²`, `x₂⁺ = 0.9 x₂³ + x₁ x₂`.
    Nonlinear2d,
    /// User-supplied square matrix.
    Linear {
        matrix: Vec<Vec<f64>>,
    },
    /// `x⁺ = factor · x`; `factor`-contractive for every symmetric C-set.
    Scaling {
        factor: f64,
        dim: usize,
    },
}

impl SystemMap {
    pub fn dim(&self) -> usize {
        match self {
            SystemMap::Linear2d | SystemMap::Nonlinear2d => 2,
            SystemMap::Linear { matrix } => matrix.len(),
            SystemMap::Scaling { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SystemMap::Linear2d => LINEAR2D_MATRIX
                .iter()
                .map(|row| row[0] * x[0] + row[1] * x[1])
                .collect(),
            SystemMap::Nonlinear2d => vec![
                0.5 * x[0] - 0.7 * x[1] * x[1],
                0.9 * x[1] * x[1] * x[1] + x[0] * x[1],
            ],
            SystemMap::Linear { matrix } => matrix
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, v)| a * v).sum())
                .collect(),
            SystemMap::Scaling { factor, .. } => x.iter().map(|v| factor * v).collect(),
        }
    }
}

/// A known map together with its Lipschitz bound and default state constraint set.
///
/// Only used to generate data and to run Monte Carlo falsification; synthesis sees
/// nothing but the sampled pairs and `lipschitz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemOracle {
    pub name: String,
    pub map: SystemMap,
    pub lipschitz: f64,
    pub domain: Domain,
}

impl SystemOracle {
    pub fn linear2d() -> Self {
        Self {
            name: "linear2d".into(),
            map: SystemMap::Linear2d,
            lipschitz: LINEAR2D_LIPSCHITZ,
            domain: Domain::from_bounds(&[-0.25, -1.0], &[1.0, 0.25]).expect("valid domain"),
        }
    }

    pub fn nonlinear2d() -> Self {
        Self {
            name: "nonlinear2d".into(),
            map: SystemMap::Nonlinear2d,
            lipschitz: NONLINEAR2D_LIPSCHITZ,
            domain: Domain::from_bounds(&[-1.0, -1.0], &[1.0, 1.0]).expect("valid domain"),
        }
    }

    /// `x⁺ = factor · x` on `[-1, 1]^dim`.
    pub fn scaling(factor: f64, dim: usize) -> Self {
        Self {
            name: format!("scaling{dim}d"),
            map: SystemMap::Scaling { factor, dim },
            lipschitz: factor.abs(),
            domain: Domain::from_bounds(&vec![-1.0; dim], &vec![1.0; dim]).expect("valid domain"),
        }
    }

    /// Linear map from a row-major square matrix. The Lipschitz bound defaults to the
    /// induced max norm (largest absolute row sum).
    pub fn linear(matrix: Vec<Vec<f64>>, domain: Domain) -> Result<Self, DatasetError> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) || domain.dim() != n {
            return Err(DatasetError::UnknownSystem(
                "linear map must be a square matrix matching the domain".into(),
            ));
        }
        let lipschitz = matrix
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max);
        Ok(Self {
            name: "linear".into(),
            map: SystemMap::Linear { matrix },
            lipschitz,
            domain,
        })
    }

    pub fn by_name(name: &str) -> Result<Self, DatasetError> {
        match name {
            "linear2d" => Ok(Self::linear2d()),
            "nonlinear2d" => Ok(Self::nonlinear2d()),
            "contraction2d" => Ok(Self {
                name: name.into(),
                ..Self::scaling(0.5, 2)
            }),
            other => Err(DatasetError::UnknownSystem(other.to_string())),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.map.eval(x)
    }
}

impl fmt::Display for SystemOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (L = {}, X = {})",
            self.name, self.lipschitz, self.domain
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonlinear_corner_leaves_domain() {
        let t = SystemOracle::nonlinear2d();
        let y = t.eval(&[1.0, 1.0]);
        assert!((y[0] + 0.2).abs() < 1e-15);
        assert!((y[1] - 1.9).abs() < 1e-15);
        assert!(!t.domain.contains_point(&y));
    }

    #[test]
    fn linear_eval() {
        let y = SystemOracle::linear2d().eval(&[0.9, 0.9]);
        assert!((y[0] - 0.55917).abs() < 1e-12);
        assert!((y[1] + 0.29295).abs() < 1e-12);
    }

    #[test]
    fn custom_linear_bound_is_row_sum() {
        let d = Domain::from_bounds(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let s = SystemOracle::linear(vec![vec![0.5, -0.25], vec![0.1, 0.2]], d).unwrap();
        assert_eq!(s.lipschitz, 0.75);
        assert_eq!(s.eval(&[1.0, 2.0]), vec![0.0, 0.5]);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            SystemOracle::by_name("bogus"),
            Err(DatasetError::UnknownSystem(_))
        ));
    }
}
