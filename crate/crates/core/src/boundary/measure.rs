//! Finite positive measures on the circle (a density plus atoms) and their
//! Herglotz and Cauchy transforms by trapezoid quadrature.

use serde::Serialize;

use super::{node, UnitCircleFunction};
use crate::config::GridConfig;
use crate::error::{HbError, Result};
use crate::par::{self, Exec};
use crate::scalar::C64;

/// Largest quadrature grid used when `z` approaches the circle.
const MAX_GRID: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub zeta: C64,
    pub mass: f64,
}

/// `|phi|^2 dm + sum mass_i delta_{zeta_i}`; `phi = None` means no
/// absolutely continuous part.
#[derive(Debug, Clone)]
pub struct Measure {
    pub density: Option<UnitCircleFunction>,
    pub atoms: Vec<Atom>,
}

impl Measure {
    /// Normalized Lebesgue measure.
    pub fn lebesgue() -> Self {
        Measure { density: Some(UnitCircleFunction::constant(C64::new(1.0, 0.0))), atoms: Vec::new() }
    }

    pub fn point_masses(atoms: Vec<Atom>) -> Self {
        Measure { density: None, atoms }
    }

    pub fn with_density(phi: UnitCircleFunction, atoms: Vec<Atom>) -> Self {
        Measure { density: Some(phi), atoms }
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `int g dmu` with the absolutely continuous part on an `n`-point grid.
    pub fn integrate<G>(&self, g: G, n: usize, exec: Exec) -> C64
    where
        G: Fn(C64) -> C64 + Sync + Send,
    {
        let ac = match &self.density {
            None => C64::new(0.0, 0.0),
            Some(phi) => {
                par::sum_range(exec, n, |k| {
                    let z = node(n, k);
                    g(z) * phi.value(z).norm_sqr()
                }) / n as f64
            }
        };
        self.atoms.iter().fold(ac, |acc, a| acc + g(a.zeta) * a.mass)
    }

    pub fn ac_mass(&self, n: usize, exec: Exec) -> f64 {
        self.integrate(|_| C64::new(1.0, 0.0), n, exec).re - self.atom_mass()
    }

    pub fn total_mass(&self, n: usize, exec: Exec) -> f64 {
        self.integrate(|_| C64::new(1.0, 0.0), n, exec).re
    }
}

/// Grid size resolving kernels with a pole at distance `1 - |z|` from the circle.
pub fn grid_for(z: C64, base: usize) -> usize {
    let gap = (1.0 - z.norm()).max(1e-12);
    let want = (30.0 / gap).ceil() as usize;
    want.next_power_of_two().clamp(base, MAX_GRID.max(base))
}

/// `int (zeta + z)/(zeta - z) dmu(zeta)`.
pub fn herglotz(mu: &Measure, z: C64, grid: &GridConfig, exec: Exec) -> Result<C64> {
    if z.norm() >= 1.0 {
        return Err(HbError::OutsideDisk { modulus: z.norm() });
    }
    let n = grid_for(z, grid.n);
    Ok(mu.integrate(|zeta| (zeta + z) / (zeta - z), n, exec))
}

/// `int h(zeta) / (1 - z conj(zeta)) dmu(zeta)`.
pub fn cauchy<H>(mu: &Measure, h: H, z: C64, grid: &GridConfig, exec: Exec) -> Result<C64>
where
    H: Fn(C64) -> C64 + Sync + Send,
{
    if z.norm() >= 1.0 {
        return Err(HbError::OutsideDisk { modulus: z.norm() });
    }
    let n = grid_for(z, grid.n);
    Ok(mu.integrate(|zeta| h(zeta) / (C64::new(1.0, 0.0) - z * zeta.conj()), n, exec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::CPoly;
    use proptest::prelude::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn herglotz_examples() {
        let g = GridConfig::default();
        let m = Measure::lebesgue();
        assert!((herglotz(&m, c(0.3), &g, Exec::Parallel).unwrap() - c(1.0)).norm() < 1e-12);
        let d = Measure::point_masses(vec![Atom { zeta: c(1.0), mass: 1.0 }]);
        let r = 0.4;
        assert!((herglotz(&d, c(r), &g, Exec::Parallel).unwrap() - c((1.0 + r) / (1.0 - r))).norm() < 1e-12);
        // Clark density of z/2 at alpha = 1.
        let phi = UnitCircleFunction::rational(
            CPoly::from_real(&[3f64.sqrt() / 2.0]),
            CPoly::from_real(&[1.0, -0.5]),
        )
        .unwrap();
        let mu = Measure::with_density(phi, vec![]);
        assert!((herglotz(&mu, c(0.0), &g, Exec::Sequential).unwrap() - c(1.0)).norm() < 1e-8);
        assert!(herglotz(&mu, c(1.0), &g, Exec::Sequential).is_err());
    }

    #[test]
    fn cauchy_examples() {
        let g = GridConfig::default();
        let m = Measure::lebesgue();
        let z = C64::new(0.2, -0.5);
        assert!((cauchy(&m, |_| c(1.0), z, &g, Exec::Parallel).unwrap() - c(1.0)).norm() < 1e-12);
        assert!((cauchy(&m, |w| w, z, &g, Exec::Parallel).unwrap() - z).norm() < 1e-12);
        let d = Measure::point_masses(vec![Atom { zeta: c(1.0), mass: 2.0 }]);
        assert!((cauchy(&d, |_| c(1.0), c(0.5), &g, Exec::Parallel).unwrap() - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn cauchy_is_analytic_projection() {
        // h = 2 conj(zeta)^2 + 3 zeta - i zeta^3 projects to 3 z - i z^3.
        let g = GridConfig::default();
        let m = Measure::lebesgue();
        let h = |w: C64| w.conj().powi(2) * 2.0 + w * 3.0 - C64::new(0.0, 1.0) * w.powi(3);
        let z = C64::new(-0.3, 0.6);
        let want = z * 3.0 - C64::new(0.0, 1.0) * z.powi(3);
        assert!((cauchy(&m, h, z, &g, Exec::Parallel).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn near_boundary_grid_grows() {
        assert_eq!(grid_for(c(0.0), 4096), 4096);
        assert!(grid_for(c(1.0 - 1e-4), 4096) >= 300_000);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn herglotz_positive(r in 0.0f64..0.99, t in 0.0f64..6.28, w in 0.01f64..3.0, s in 0.0f64..6.28) {
            let phi = UnitCircleFunction::rational(CPoly::from_real(&[1.0, 0.3]), CPoly::from_real(&[2.0, -1.0])).unwrap();
            let mu = Measure::with_density(phi, vec![Atom { zeta: C64::from_polar(1.0, s), mass: w }]);
            let g = GridConfig { n: 256, ..GridConfig::default() };
            let v = herglotz(&mu, C64::from_polar(r, t), &g, Exec::Sequential).unwrap();
            prop_assert!(v.re >= 0.0);
        }
    }
}
