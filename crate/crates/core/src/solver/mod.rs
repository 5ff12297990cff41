//! Local-in-time solver for `u_tt - Lap u = N(u, du)` on the periodic plane.
//!
//! The Picard iteration applies the Duhamel map
//! `u = cos(tD) f + D^{-1} sin(tD) g + int_0^t D^{-1} sin((t - t') D) N(u) dt'`
//! on stored time slices; an RK4 method of lines serves as an independent reference.

mod nonlinear;
mod picard;
mod probe;
mod rk4;
mod spectral;

pub use nonlinear::{nonlinearity_eval, DerivDirection, NonlinearityKind};
pub use picard::{duhamel_apply, free_trajectory, picard_solve};
pub use probe::{
    existence_probe, random_data, strichartz_probe, wave_admissible, ExistenceRow, ExistenceTable,
    strichartz_ratio, LebesgueIndex, StrichartzRow, StrichartzTable, STRICHARTZ_SAMPLES, STRICHARTZ_T,
};
pub use rk4::rk4_solve;
pub use spectral::{energy, free_solution, halfwave_multipliers, halfwave_symbol};

use crate::error::{invalid, Error, Result};
use crate::grid::{Rep, SpatialField, SpatialGrid};

/// Initial data `(u, u_t)` at `t = 0`, real and on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    f: SpatialField,
    g: SpatialField,
}

impl CauchyData {
    pub fn new(f: SpatialField, g: SpatialField) -> Result<Self> {
        f.expect_rep(Rep::Physical)?;
        f.expect_same_grid(&g)?;
        if f.max_imag() > 1e-12 || g.max_imag() > 1e-12 {
            return Err(invalid("data", "Cauchy data must be real"));
        }
        Ok(Self { f, g })
    }

    pub fn from_real(grid: SpatialGrid, f: &[f64], g: &[f64]) -> Result<Self> {
        Self::new(SpatialField::from_real(grid, f)?, SpatialField::from_real(grid, g)?)
    }

    pub fn f(&self) -> &SpatialField {
        &self.f
    }

    pub fn g(&self) -> &SpatialField {
        &self.g
    }

    pub fn grid(&self) -> SpatialGrid {
        *self.f.grid()
    }

    /// `(a f, a g)`.
    pub fn scaled(&self, a: f64) -> Self {
        let c = num_complex::Complex64::new(a, 0.0);
        Self {
            f: self.f.scaled(c),
            g: self.g.scaled(c),
        }
    }

    /// `(f(lambda x), lambda g(lambda x))` on the torus shrunk by `lambda`: the same samples on
    /// a nested lattice, the scaling that maps solutions to solutions.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        let grid = self.grid();
        let small = SpatialGrid::new(grid.n(), grid.period() / lambda)?;
        let g: Vec<f64> = self.g.real_values().iter().map(|v| lambda * v).collect();
        Self::from_real(small, &self.f.real_values(), &g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub t_final: f64,
    /// Number of slice intervals; slices sit at `t_k = k T / n_steps`.
    pub n_steps: usize,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub dealias: bool,
    /// RK4 substeps per slice interval.
    pub rk4_substeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_final: 0.1,
            n_steps: 64,
            picard_tol: 1e-10,
            picard_max: 50,
            dealias: true,
            rk4_substeps: 4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", "must be positive"));
        }
        if self.n_steps < 2 {
            return Err(invalid("n_steps", "need at least two steps"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(invalid("picard_tol", "must be positive"));
        }
        if self.picard_max == 0 || self.rk4_substeps == 0 {
            return Err(invalid("picard_max/rk4_substeps", "must be positive"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Picard,
    Rk4,
    Free,
}

/// Time slices of `(u, u_t)` on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: SpatialGrid,
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub ut: Vec<Vec<f64>>,
    pub provenance: Provenance,
    /// First slice at which the stepping blew up; later slices are missing.
    pub diverged_at: Option<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn slice(&self, k: usize) -> Result<(SpatialField, SpatialField)> {
        Ok((
            SpatialField::from_real(self.grid, &self.u[k])?,
            SpatialField::from_real(self.grid, &self.ut[k])?,
        ))
    }

    /// Relative `l^2` distance of `u` over all common slices, `||self - other|| / ||other||`.
    pub fn relative_l2_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.len() != other.len() {
            return Err(Error::GridMismatch("trajectories differ in shape".into()));
        }
        let (mut num, mut den) = (0.0, 0.0);
        for (a, b) in self.u.iter().zip(&other.u) {
            for (x, y) in a.iter().zip(b) {
                num += (x - y) * (x - y);
                den += y * y;
            }
        }
        Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
    }
}

/// Per-iteration relative residuals of the Picard iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    /// `sup_k ||w^{m+1}(t_k) - w^m(t_k)|| / sup_k ||w^{m+1}(t_k)||` in the `H^1 x L^2`
    /// energy norm, scale invariant under the equation's scaling.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

impl PicardReport {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }
}

#[cfg(test)]
mod tests;
