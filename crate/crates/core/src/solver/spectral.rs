//! Periodic spectral calculus on the spatial torus and the free wave propagator.

use num_complex::Complex64;

use crate::error::Result;
use crate::fft::{fft_nd, FftDirection};
use crate::grid::{signed_index, Lattice, Rep, SpatialField, SpatialGrid};

/// Wavenumbers, dealiasing mask and FFT helpers for one spatial grid.
///
/// Spectra here are raw DFT coefficients (no quadrature weights); they never leave the
/// solver.
#[derive(Debug, Clone)]
pub(crate) struct Spectral {
    pub grid: SpatialGrid,
    pub k: [Vec<f64>; 2],
    pub kabs: Vec<f64>,
    keep: Vec<bool>,
    nyquist: [Vec<bool>; 2],
}

impl Spectral {
    pub fn new(grid: SpatialGrid) -> Self {
        let n = grid.n();
        let h = grid.dxi();
        let len = n * n;
        let mut k = [vec![0.0; len], vec![0.0; len]];
        let mut kabs = vec![0.0; len];
        let mut keep = vec![false; len];
        let mut nyquist = [vec![false; len], vec![false; len]];
        for i1 in 0..n {
            for i2 in 0..n {
                let idx = i1 * n + i2;
                let (s1, s2) = (signed_index(i1, n), signed_index(i2, n));
                k[0][idx] = s1 as f64 * h;
                k[1][idx] = s2 as f64 * h;
                kabs[idx] = k[0][idx].hypot(k[1][idx]);
                // two-thirds rule: |k_j| < n/3 on both axes
                keep[idx] = 3 * s1.unsigned_abs() < n as u64 && 3 * s2.unsigned_abs() < n as u64;
                nyquist[0][idx] = i1 == n / 2;
                nyquist[1][idx] = i2 == n / 2;
            }
        }
        Self {
            grid,
            k,
            kabs,
            keep,
            nyquist,
        }
    }

    pub fn len(&self) -> usize {
        self.kabs.len()
    }

    fn dims(&self) -> [usize; 2] {
        [self.grid.n(), self.grid.n()]
    }

    pub fn fwd(&self, v: &[f64]) -> Vec<Complex64> {
        let mut s: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fft_nd(&mut s, &self.dims(), FftDirection::Forward);
        s
    }

    /// Real part of the normalized inverse DFT.
    pub fn inv(&self, s: &[Complex64]) -> Vec<f64> {
        let mut v = s.to_vec();
        fft_nd(&mut v, &self.dims(), FftDirection::Backward);
        let scale = 1.0 / v.len() as f64;
        v.iter().map(|z| z.re * scale).collect()
    }

    /// `d/dx_axis`, with the unpaired Nyquist mode dropped so real data stay real.
    pub fn deriv(&self, s: &[Complex64], axis: usize) -> Vec<Complex64> {
        s.iter()
            .enumerate()
            .map(|(i, z)| {
                if self.nyquist[axis][i] {
                    Complex64::new(0.0, 0.0)
                } else {
                    z * Complex64::new(0.0, self.k[axis][i])
                }
            })
            .collect()
    }

    pub fn dealias(&self, s: &mut [Complex64]) {
        for (z, &k) in s.iter_mut().zip(&self.keep) {
            if !k {
                *z = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `sum |k|^2 |u^|^2 + |v^|^2`, proportional to the energy.
    pub fn energy_sq(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        u.iter()
            .zip(v)
            .zip(&self.kabs)
            .map(|((a, b), k)| k * k * a.norm_sqr() + b.norm_sqr())
            .sum()
    }
}

/// `(cos(t |xi|), sin(t |xi|) / |xi|)` with the removable value `t` at `xi = 0`.
pub fn halfwave_symbol(t: f64, xi_abs: f64) -> (f64, f64) {
    if xi_abs == 0.0 {
        (1.0, t)
    } else {
        ((t * xi_abs).cos(), (t * xi_abs).sin() / xi_abs)
    }
}

/// Multipliers `cos(tD)` and `D^{-1} sin(tD)` over the lattice, in storage order.
pub fn halfwave_multipliers(grid: &SpatialGrid, t: f64) -> (Vec<f64>, Vec<f64>) {
    (0..grid.len())
        .map(|i| {
            let xi = grid.point(i, Rep::Frequency);
            halfwave_symbol(t, xi[0].hypot(xi[1]))
        })
        .unzip()
}

/// Spectral free evolution of raw spectra to time `t`.
pub(crate) fn free_spectra(sp: &Spectral, f: &[Complex64], g: &[Complex64], t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut u = vec![Complex64::new(0.0, 0.0); sp.len()];
    let mut v = u.clone();
    for i in 0..sp.len() {
        let k = sp.kabs[i];
        let (c, s) = halfwave_symbol(t, k);
        u[i] = f[i] * c + g[i] * s;
        v[i] = -f[i] * (k * k * s) + g[i] * c;
    }
    (u, v)
}

/// Free wave at time `t`: `cos(tD) f + D^{-1} sin(tD) g` and its time derivative.
pub fn free_solution(f: &SpatialField, g: &SpatialField, t: f64) -> Result<(SpatialField, SpatialField)> {
    f.expect_rep(Rep::Physical)?;
    f.expect_same_grid(g)?;
    let sp = Spectral::new(*f.grid());
    let (u, v) = free_spectra(&sp, &sp.fwd(&f.real_values()), &sp.fwd(&g.real_values()), t);
    Ok((
        SpatialField::from_real(sp.grid, &sp.inv(&u))?,
        SpatialField::from_real(sp.grid, &sp.inv(&v))?,
    ))
}

/// `1/2 sum (u_t^2 + |grad u|^2) dx^2` with the gradient taken spectrally.
pub fn energy(u: &SpatialField, u_t: &SpatialField) -> Result<f64> {
    u.expect_rep(Rep::Physical)?;
    u.expect_same_grid(u_t)?;
    let sp = Spectral::new(*u.grid());
    Ok(energy_raw(&sp, &u.real_values(), &u_t.real_values()))
}

pub(crate) fn energy_raw(sp: &Spectral, u: &[f64], ut: &[f64]) -> f64 {
    let s = sp.fwd(u);
    let gx = sp.inv(&sp.deriv(&s, 0));
    let gy = sp.inv(&sp.deriv(&s, 1));
    let dx = sp.grid.dx();
    let sum: f64 = (0..u.len())
        .map(|i| ut[i] * ut[i] + gx[i] * gx[i] + gy[i] * gy[i])
        .sum();
    0.5 * sum * dx * dx
}
