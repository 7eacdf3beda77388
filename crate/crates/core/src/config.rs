use serde::{Deserialize, Serialize};

use crate::error::{HbError, Result};
use crate::par::Exec;

/// Quadrature rule on the circle. Only the uniform trapezoid rule is offered;
/// it is spectrally accurate for the smooth integrands met here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum QuadratureRule {
    #[default]
    Trapezoid,
}

/// Sampling grid on the circle plus the radial sequence `r_k = 1 - 2^-k`
/// used for boundary extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    pub k0: u32,
    pub k1: u32,
    pub rule: QuadratureRule,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 4096, k0: 6, k1: 16, rule: QuadratureRule::Trapezoid }
    }
}

impl GridConfig {
    pub fn new(n: usize, k0: u32, k1: u32) -> Result<Self> {
        let g = GridConfig { n, k0, k1, rule: QuadratureRule::Trapezoid };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 256 {
            return Err(HbError::InvalidConfig {
                reason: format!("grid size {} must be a power of two >= 256", self.n),
            });
        }
        if self.k0 < 3 || self.k1 <= self.k0 || self.k1 > 40 {
            return Err(HbError::InvalidConfig {
                reason: format!("radial range {}..{} must satisfy 3 <= k0 < k1 <= 40", self.k0, self.k1),
            });
        }
        Ok(())
    }

    /// Radii `1 - 2^-k` for `k = k0..=k1`.
    pub fn radii(&self) -> Vec<f64> {
        (self.k0..=self.k1).map(|k| 1.0 - (0.5f64).powi(k as i32)).collect()
    }
}

/// Tolerances and backend switches shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub grid: GridConfig,
    /// Relative radius for merging computed roots into one multiple root.
    pub root_cluster_tol: f64,
    /// Relative tolerance for matching `r` with `1/conj(r)`.
    pub pairing_tol: f64,
    /// Distance from the circle below which a root counts as unimodular.
    pub circle_tol: f64,
    /// Modulus below which a point value counts as zero.
    pub zero_tol: f64,
    /// Use exact Gaussian-rational arithmetic where available.
    pub exact: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            grid: GridConfig::default(),
            root_cluster_tol: 1e-7,
            pairing_tol: 1e-6,
            circle_tol: 1e-8,
            zero_tol: 1e-9,
            exact: false,
            exec: Exec::default(),
        }
    }
}

impl Config {
    pub fn with_grid(mut self, n: usize) -> Result<Self> {
        self.grid.n = n;
        self.grid.validate()?;
        Ok(self)
    }

    pub fn with_exact(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}
