use num_complex::Complex64;
use rayon::prelude::*;

use super::nonlinear::{eval_spectral, NonlinearityKind};
use super::spectral::{free_spectra, halfwave_symbol, Spectral};
use super::{CauchyData, PicardReport, Provenance, SolverConfig, Trajectory};
use crate::error::{invalid, Result};
use crate::grid::{Rep, SpatialField};

/// Residuals above this mean the iterates left any contraction ball.
const DIVERGED: f64 = 1e3;

/// `cos(m dt |xi|)` and `sin(m dt |xi|)/|xi|` for every lag `m`.
struct LagTable {
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl LagTable {
    fn new(sp: &Spectral, dt: f64, lags: usize) -> Self {
        let (cos, sin) = (0..=lags)
            .map(|m| {
                sp.kabs
                    .iter()
                    .map(|&k| halfwave_symbol(m as f64 * dt, k))
                    .unzip::<f64, f64, Vec<f64>, Vec<f64>>()
            })
            .unzip();
        Self { cos, sin }
    }
}

/// Trapezoid rule for `int_0^{t_k} (D^{-1} sin, cos)((t_k - t') D) F(t') dt'` over slices.
fn duhamel_spectral(
    lag: &LagTable,
    forcing: &[Vec<Complex64>],
    dt: f64,
    k: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let len = forcing[0].len();
    let mut u = vec![Complex64::new(0.0, 0.0); len];
    let mut v = u.clone();
    if k == 0 {
        return (u, v);
    }
    for (j, fj) in forcing.iter().enumerate().take(k + 1) {
        let w = if j == 0 || j == k { 0.5 * dt } else { dt };
        let (c, s) = (&lag.cos[k - j], &lag.sin[k - j]);
        for i in 0..len {
            u[i] += fj[i] * (w * s[i]);
            v[i] += fj[i] * (w * c[i]);
        }
    }
    (u, v)
}

/// Duhamel term at slice `k` for forcing slices `F(t_j)`, `t_j = j dt`; returns `(u, u_t)`.
pub fn duhamel_apply(forcing: &[SpatialField], dt: f64, k: usize) -> Result<(SpatialField, SpatialField)> {
    if forcing.len() <= k {
        return Err(invalid("k", "forcing is not stored up to slice k"));
    }
    for f in forcing {
        f.expect_rep(Rep::Physical)?;
        forcing[0].expect_same_grid(f)?;
    }
    let sp = Spectral::new(*forcing[0].grid());
    let spectra: Vec<Vec<Complex64>> = forcing.iter().map(|f| sp.fwd(&f.real_values())).collect();
    let lag = LagTable::new(&sp, dt, k);
    let (u, v) = duhamel_spectral(&lag, &spectra, dt, k);
    Ok((
        SpatialField::from_real(sp.grid, &sp.inv(&u))?,
        SpatialField::from_real(sp.grid, &sp.inv(&v))?,
    ))
}

struct Slices {
    u: Vec<Vec<Complex64>>,
    v: Vec<Vec<Complex64>>,
}

fn free_slices(sp: &Spectral, data: &CauchyData, config: &SolverConfig) -> Slices {
    let f = sp.fwd(&data.f().real_values());
    let g = sp.fwd(&data.g().real_values());
    let (u, v) = (0..=config.n_steps)
        .map(|k| free_spectra(sp, &f, &g, k as f64 * config.dt()))
        .unzip();
    Slices { u, v }
}

fn to_trajectory(sp: &Spectral, s: &Slices, config: &SolverConfig, provenance: Provenance) -> Trajectory {
    Trajectory {
        grid: sp.grid,
        times: (0..=config.n_steps).map(|k| k as f64 * config.dt()).collect(),
        u: s.u.iter().map(|x| sp.inv(x)).collect(),
        ut: s.v.iter().map(|x| sp.inv(x)).collect(),
        provenance,
        diverged_at: None,
    }
}

/// Free evolution sampled at the solver slices.
pub fn free_trajectory(data: &CauchyData, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let sp = Spectral::new(data.grid());
    let mut t = to_trajectory(&sp, &free_slices(&sp, data, config), config, Provenance::Free);
    // the t = 0 slice is the data itself, not its round trip
    t.u[0] = data.f().real_values();
    t.ut[0] = data.g().real_values();
    Ok(t)
}

/// Picard iteration `w^{m+1} = free + Duhamel(N(w^m))` started from the free solution.
///
/// Stops when the relative residual drops below `picard_tol`, after `picard_max` iterations,
/// or once the residual exceeds `1e3`; a non-finite iterate is discarded. The last iterate
/// is returned in every case and `converged` tells which.
pub fn picard_solve(
    data: &CauchyData,
    kind: Option<NonlinearityKind>,
    config: &SolverConfig,
) -> Result<(Trajectory, PicardReport)> {
    config.validate()?;
    let sp = Spectral::new(data.grid());
    let free = free_slices(&sp, data, config);
    let dt = config.dt();
    let lag = LagTable::new(&sp, dt, config.n_steps);
    let mut current = Slices {
        u: free.u.clone(),
        v: free.v.clone(),
    };
    let mut residuals = vec![];
    let mut converged = false;
    for _ in 0..config.picard_max {
        let forcing: Vec<Vec<Complex64>> = match kind {
            None => vec![vec![Complex64::new(0.0, 0.0); sp.len()]; config.n_steps + 1],
            Some(kind) => current
                .u
                .par_iter()
                .zip(&current.v)
                .map(|(u, v)| eval_spectral(&sp, u, v, kind, config.dealias))
                .collect(),
        };
        let (u, v): (Vec<_>, Vec<_>) = (0..=config.n_steps)
            .into_par_iter()
            .map(|k| {
                let (du, dv) = duhamel_spectral(&lag, &forcing, dt, k);
                let u: Vec<Complex64> = free.u[k].iter().zip(&du).map(|(a, b)| a + b).collect();
                let v: Vec<Complex64> = free.v[k].iter().zip(&dv).map(|(a, b)| a + b).collect();
                (u, v)
            })
            .unzip();
        let next = Slices { u, v };
        let mut diff_max: f64 = 0.0;
        let mut norm_max: f64 = 0.0;
        for k in 0..=config.n_steps {
            let du: Vec<Complex64> = next.u[k].iter().zip(&current.u[k]).map(|(a, b)| a - b).collect();
            let dv: Vec<Complex64> = next.v[k].iter().zip(&current.v[k]).map(|(a, b)| a - b).collect();
            diff_max = diff_max.max(sp.energy_sq(&du, &dv));
            norm_max = norm_max.max(sp.energy_sq(&next.u[k], &next.v[k]));
        }
        let residual = if diff_max == 0.0 {
            0.0
        } else {
            (diff_max / norm_max).sqrt()
        };
        if !residual.is_finite() {
            break;
        }
        residuals.push(residual);
        current = next;
        if residual < config.picard_tol {
            converged = true;
            break;
        }
        if residual > DIVERGED {
            break;
        }
    }
    let mut traj = to_trajectory(&sp, &current, config, Provenance::Picard);
    traj.u[0] = data.f().real_values();
    traj.ut[0] = data.g().real_values();
    Ok((
        traj,
        PicardReport {
            residuals,
            converged,
        },
    ))
}
