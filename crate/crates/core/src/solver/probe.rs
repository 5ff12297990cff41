//! Rough random data, the local-existence amplitude probe and the Strichartz ratio probe.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::nonlinear::NonlinearityKind;
use super::picard::picard_solve;
use super::spectral::{free_spectra, Spectral};
use super::{CauchyData, SolverConfig};
use crate::error::{invalid, Result};
use crate::fit::power_law_fit_1d;
use crate::grid::{bracket, signed_index, wrap_index, Lattice, Rep, SpatialField, SpatialGrid};
use crate::norms::{fl_norm, mixed_norm_slices};
use crate::rational::{rat, Rational};

/// Margin in the decay exponent keeping the data norm finite.
const DELTA: f64 = 0.01;

/// Independent phases for `f` and `g` at lattice mode `(k1, k2)`, keyed by mode so that
/// data on a coarser lattice are the truncation of data on a finer one.
fn mode_phases(seed: u64, k1: i64, k2: i64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k1 as i32 as u32 as u64) << 32) | k2 as i32 as u32 as u64);
    let tau = std::f64::consts::TAU;
    (rng.random_range(0.0..tau), rng.random_range(0.0..tau))
}

/// Real data with `f^(xi) = <xi>^{-s - 2/r' - delta} e^{i theta}` and the same profile one
/// derivative rougher for `g`, supported in `|xi| <= band_limit`.
///
/// The decay sits just inside `H^r_s x H^r_{s-1}`. Nyquist modes are left empty so the
/// Hermitian pairing is exact.
pub fn random_data(grid: SpatialGrid, s: f64, r: f64, seed: u64, band_limit: f64) -> Result<CauchyData> {
    if !(r > 1.0 && r <= 2.0) {
        return Err(invalid("r", format!("{r} is outside (1, 2]")));
    }
    let n = grid.n();
    let nyquist = (n / 2) as f64 * grid.dxi();
    if !(band_limit >= 0.0 && band_limit < nyquist) {
        return Err(invalid("band_limit", format!("{band_limit} not below the grid cutoff {nyquist}")));
    }
    let p = r / (r - 1.0);
    let decay = s + 2.0 / p + DELTA;
    let zero = Complex64::new(0.0, 0.0);
    let mut fh = vec![zero; grid.len()];
    let mut gh = vec![zero; grid.len()];
    for i1 in 0..n {
        for i2 in 0..n {
            if i1 == n / 2 || i2 == n / 2 {
                continue;
            }
            let (k1, k2) = (signed_index(i1, n), signed_index(i2, n));
            let idx = i1 * n + i2;
            let mirror = wrap_index(-k1, n) * n + wrap_index(-k2, n);
            if mirror < idx {
                continue;
            }
            let xi = grid.frequency(i1, i2);
            if xi[0].hypot(xi[1]) > band_limit {
                continue;
            }
            let w = bracket(&xi).powf(-decay);
            let wg = bracket(&xi).powf(-(decay - 1.0));
            if mirror == idx {
                fh[idx] = Complex64::new(w, 0.0);
                gh[idx] = Complex64::new(wg, 0.0);
                continue;
            }
            let (tf, tg) = mode_phases(seed, k1, k2);
            fh[idx] = Complex64::from_polar(w, tf);
            fh[mirror] = Complex64::from_polar(w, -tf);
            gh[idx] = Complex64::from_polar(wg, tg);
            gh[mirror] = Complex64::from_polar(wg, -tg);
        }
    }
    let to_real = |v: Vec<Complex64>| -> Result<SpatialField> {
        let f = SpatialField::from_values(grid, Rep::Frequency, v)?.inverse()?;
        SpatialField::from_real(grid, &f.real_values())
    };
    CauchyData::new(to_real(fh)?, to_real(gh)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceRow {
    pub amplitude: f64,
    pub converged: bool,
    pub iterations: usize,
    pub last_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceTable {
    pub rows: Vec<ExistenceRow>,
    /// Bisected convergence threshold `a*`; `None` when every listed amplitude converged.
    pub threshold: Option<f64>,
}

fn probe_amplitude(family: &CauchyData, kind: NonlinearityKind, config: &SolverConfig, a: f64) -> Result<ExistenceRow> {
    let (_, report) = picard_solve(&family.scaled(a), Some(kind), config)?;
    Ok(ExistenceRow {
        amplitude: a,
        converged: report.converged,
        iterations: report.iterations(),
        last_residual: report.residuals.last().copied().unwrap_or(0.0),
    })
}

/// Picard convergence for the data family `a (f, g)` at each amplitude, plus `a*`.
///
/// The threshold is bisected (geometrically once the bracket is positive) between the last
/// converging amplitude before the first failure and that failure.
pub fn existence_probe(
    family: &CauchyData,
    kind: NonlinearityKind,
    config: &SolverConfig,
    amplitudes: &[f64],
    bisection_steps: usize,
) -> Result<ExistenceTable> {
    if amplitudes.is_empty() || amplitudes.iter().any(|a| !(*a > 0.0)) {
        return Err(invalid("amplitudes", "need positive amplitudes"));
    }
    if amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("amplitudes", "must be strictly increasing"));
    }
    let rows = amplitudes
        .par_iter()
        .map(|&a| probe_amplitude(family, kind, config, a))
        .collect::<Result<Vec<_>>>()?;
    let threshold = match rows.iter().position(|r| !r.converged) {
        None => None,
        Some(j) => {
            let mut lo = if j == 0 { 0.0 } else { rows[j - 1].amplitude };
            let mut hi = rows[j].amplitude;
            for _ in 0..bisection_steps {
                let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
                if probe_amplitude(family, kind, config, mid)?.converged {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi })
        }
    };
    Ok(ExistenceTable { rows, threshold })
}

/// Lebesgue exponent that may be infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LebesgueIndex {
    Finite(Rational),
    Infinity,
}

impl LebesgueIndex {
    fn reciprocal(&self) -> Rational {
        match self {
            Self::Finite(x) => x.recip(),
            Self::Infinity => Rational::zero(),
        }
    }
}

/// Time exponent `p`, space exponent `q`: `p, q >= 2` and `2/p + (n-1)/q <= (n-1)/2`,
/// except the endpoint with `q = inf` on the boundary in dimensions 2 and 3.
pub fn wave_admissible(p: &LebesgueIndex, q: &LebesgueIndex, n: i64) -> bool {
    if n < 2 {
        return false;
    }
    let half = rat(1, 2);
    let (ip, iq) = (p.reciprocal(), q.reciprocal());
    if let LebesgueIndex::Finite(x) = p {
        if *x <= Rational::zero() || ip > half {
            return false;
        }
    }
    if let LebesgueIndex::Finite(x) = q {
        if *x <= Rational::zero() || iq > half {
            return false;
        }
    }
    let m = Rational::from_integer((n - 1).into());
    let lhs = ip * Rational::from_integer(2.into()) + &m * iq;
    let rhs = m * half;
    if lhs > rhs {
        return false;
    }
    !(lhs == rhs && *q == LebesgueIndex::Infinity && n <= 3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzRow {
    pub n: usize,
    pub ratios: Vec<f64>,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrichartzTable {
    pub q_t: f64,
    pub rows: Vec<StrichartzRow>,
    /// Least-squares slope of `log median R` against `log n`.
    pub slope: f64,
}

/// Time horizon and sample count of the probe.
pub const STRICHARTZ_T: f64 = 1.0;
pub const STRICHARTZ_SAMPLES: usize = 32;

/// `|| |grad u| ||_{L^q_t L^inf_x} / (||f||_{H^{7/4}} + ||g||_{H^{3/4}})` for the free wave,
/// sampled at `t_k = k T / samples`, `k < samples`.
pub fn strichartz_ratio(data: &CauchyData, q_t: f64, t_final: f64, samples: usize) -> Result<f64> {
    if !(q_t >= 4.0 && q_t.is_finite()) {
        return Err(invalid("q_t", "must be finite and at least 4"));
    }
    if samples == 0 {
        return Err(invalid("samples", "must be positive"));
    }
    let sp = Spectral::new(data.grid());
    let f = sp.fwd(&data.f().real_values());
    let g = sp.fwd(&data.g().real_values());
    let dt = t_final / samples as f64;
    let slices: Vec<Vec<f64>> = (0..samples)
        .map(|k| {
            let (u, _) = free_spectra(&sp, &f, &g, k as f64 * dt);
            let gx = sp.inv(&sp.deriv(&u, 0));
            let gy = sp.inv(&sp.deriv(&u, 1));
            gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).collect()
        })
        .collect();
    let num = mixed_norm_slices(&slices, dt, sp.grid.cell(Rep::Physical), q_t, f64::INFINITY);
    let den = fl_norm(&data.f().forward()?, 2.0, 1.75, false)?.value
        + fl_norm(&data.g().forward()?, 2.0, 0.75, false)?.value;
    if den == 0.0 {
        return Err(invalid("data", "zero data has no Strichartz ratio"));
    }
    Ok(num / den)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Strichartz ratios of free waves from `H^{7/4} x H^{3/4}` random data over a resolution
/// ladder on the `2 pi` torus, using every mode inside the disk `|xi| < n/2`.
///
/// Ensemble member `m` uses seed `seed + m` at every resolution, and the mode-keyed phases
/// make its coarse data the truncation of its fine data.
pub fn strichartz_probe(ensemble_size: usize, q_t: f64, ladder: &[usize], seed: u64) -> Result<StrichartzTable> {
    if ensemble_size == 0 {
        return Err(invalid("ensemble_size", "must be positive"));
    }
    if ladder.len() < 2 {
        return Err(invalid("resolution_ladder", "need at least two resolutions"));
    }
    let rows = ladder
        .iter()
        .map(|&n| {
            let grid = SpatialGrid::new(n, std::f64::consts::TAU)?;
            let band = (n / 2) as f64 - 1.0;
            let ratios = (0..ensemble_size as u64)
                .into_par_iter()
                .map(|m| {
                    let data = random_data(grid, 1.75, 2.0, seed.wrapping_add(m), band)?;
                    strichartz_ratio(&data, q_t, STRICHARTZ_T, STRICHARTZ_SAMPLES)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(StrichartzRow {
                n,
                median: median(&ratios),
                ratios,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.median).collect();
    let fit = power_law_fit_1d(&x, &y)?;
    let slope = fit.exponents[0].unwrap_or(0.0);
    Ok(StrichartzTable { q_t, rows, slope })
}
