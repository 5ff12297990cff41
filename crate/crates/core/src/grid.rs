//! Discrete fields on periodic lattices.
//!
//! A space-time field lives on an `nt x nx x nx` torus with axis order `(t, x1, x2)` in the
//! physical representation and `(tau, xi1, xi2)` in the frequency representation. The
//! transform is the quadrature-weighted DFT
//!
//! ```text
//! u~(X) = (2 pi)^(-d/2) * dV_phys * sum_x u(x) exp(-i X.x)
//! u(x)  = (2 pi)^(-d/2) * dV_freq * sum_X u~(X) exp(+i X.x)
//! ```
//!
//! which is a Riemann sum of the continuum transform and an isometry between the
//! cell-weighted `l^2` spaces on both sides.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fft::{fft_nd, FftDirection};
use crate::geometry::FrequencyRegion;

/// Which side of the Fourier transform the stored values belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rep {
    Physical,
    Frequency,
}

impl Rep {
    fn name(self) -> &'static str {
        match self {
            Rep::Physical => "physical",
            Rep::Frequency => "frequency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// physical -> frequency
    Forward,
    /// frequency -> physical
    Inverse,
}

impl Direction {
    fn source(self) -> Rep {
        match self {
            Direction::Forward => Rep::Physical,
            Direction::Inverse => Rep::Frequency,
        }
    }
}

/// Upper (`tau >= 0`) or lower (`tau < 0`) half of frequency space.
///
/// The `tau = 0` plane belongs to `Plus`, so the two classes partition the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn contains_tau(self, tau: f64) -> bool {
        match self {
            Sign::Plus => tau >= 0.0,
            Sign::Minus => tau < 0.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `<v> = sqrt(1 + |v|^2)`.
pub fn bracket(v: &[f64]) -> f64 {
    bracket_sq(v).sqrt()
}

fn bracket_sq(v: &[f64]) -> f64 {
    1.0 + v.iter().map(|x| x * x).sum::<f64>()
}

/// Accepts `2^j` for `j >= 0` exactly.
pub fn check_dyadic(name: &'static str, value: f64) -> Result<()> {
    let ok = value >= 1.0 && value.is_finite() && 2f64.powi(value.log2().round() as i32) == value;
    if ok {
        Ok(())
    } else {
        Err(Error::NotDyadic { name, value })
    }
}

/// Membership in the sharp band `<v> in [n, 2n)`; bands for consecutive dyadic `n` share
/// thresholds and therefore partition the lattice exactly.
pub fn in_band(v: &[f64], n: f64) -> bool {
    let b = bracket_sq(v);
    b >= n * n && b < 4.0 * n * n
}

/// Membership in the modulation band `<|tau| - |xi|> in [l, 2l)`.
pub fn in_modulation_band(tau: f64, xi: [f64; 2], l: f64) -> bool {
    let m = tau.abs() - xi[0].hypot(xi[1]);
    in_band(&[m], l)
}

fn check_size(name: &'static str, n: usize) -> Result<()> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(invalid(name, format!("{n} is not a power of two >= 8")))
    }
}

fn check_period(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("{p} must be positive and finite")))
    }
}

/// Signed lattice index: `0..n/2` then `-n/2..0`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Storage index of a signed lattice index, with periodic wrap.
pub fn wrap_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// A periodic lattice with per-axis sizes and periods.
pub trait Lattice: Clone + PartialEq + std::fmt::Debug {
    fn shape(&self) -> Vec<usize>;
    fn periods(&self) -> Vec<f64>;

    fn len(&self) -> usize {
        self.shape().iter().product()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis spacing in the given representation.
    fn spacings(&self, rep: Rep) -> Vec<f64> {
        self.shape()
            .iter()
            .zip(self.periods())
            .map(|(&n, p)| match rep {
                Rep::Physical => p / n as f64,
                Rep::Frequency => 2.0 * PI / p,
            })
            .collect()
    }

    /// Quadrature cell volume in the given representation.
    fn cell(&self, rep: Rep) -> f64 {
        self.spacings(rep).iter().product()
    }

    /// Coordinates of the flat index `idx` in the given representation.
    fn point(&self, idx: usize, rep: Rep) -> Vec<f64> {
        let shape = self.shape();
        let h = self.spacings(rep);
        let mut rest = idx;
        let mut out = vec![0.0; shape.len()];
        for d in (0..shape.len()).rev() {
            let i = rest % shape[d];
            rest /= shape[d];
            out[d] = match rep {
                Rep::Physical => i as f64 * h[d],
                Rep::Frequency => signed_index(i, shape[d]) as f64 * h[d],
            };
        }
        out
    }
}

/// Spatial torus `[0, period)^2` sampled with `n x n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    n: usize,
    period: f64,
}

impl SpatialGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        check_size("nx", n)?;
        check_period("spatial_period", period)?;
        Ok(Self { n, period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dx(&self) -> f64 {
        self.period / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Frequency vector at storage indices `(i1, i2)`.
    pub fn frequency(&self, i1: usize, i2: usize) -> [f64; 2] {
        let h = self.dxi();
        [
            signed_index(i1, self.n) as f64 * h,
            signed_index(i2, self.n) as f64 * h,
        ]
    }
}

impl Lattice for SpatialGrid {
    fn shape(&self) -> Vec<usize> {
        vec![self.n, self.n]
    }

    fn periods(&self) -> Vec<f64> {
        vec![self.period, self.period]
    }
}

/// Space-time torus `[0, time_period) x [0, spatial_period)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    space: SpatialGrid,
    nt: usize,
    time_period: f64,
}

impl GridSpec {
    pub fn new(nx: usize, nt: usize, spatial_period: f64, time_period: f64) -> Result<Self> {
        check_size("nt", nt)?;
        check_period("time_period", time_period)?;
        Ok(Self {
            space: SpatialGrid::new(nx, spatial_period)?,
            nt,
            time_period,
        })
    }

    /// Grid with unit frequency spacing on every axis.
    pub fn unit_frequency(nx: usize, nt: usize) -> Result<Self> {
        Self::new(nx, nt, 2.0 * PI, 2.0 * PI)
    }

    pub fn space(&self) -> SpatialGrid {
        self.space
    }

    pub fn nx(&self) -> usize {
        self.space.n
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn spatial_period(&self) -> f64 {
        self.space.period
    }

    pub fn time_period(&self) -> f64 {
        self.time_period
    }

    pub fn dt(&self) -> f64 {
        self.time_period / self.nt as f64
    }

    pub fn dtau(&self) -> f64 {
        2.0 * PI / self.time_period
    }

    pub fn dxi(&self) -> f64 {
        self.space.dxi()
    }

    /// Storage index of lattice coordinates `(k_t, k_1, k_2)` given as signed integers.
    pub fn index_of(&self, k: [i64; 3]) -> usize {
        let nx = self.nx();
        (wrap_index(k[0], self.nt) * nx + wrap_index(k[1], nx)) * nx + wrap_index(k[2], nx)
    }

    /// Signed lattice coordinates of a storage index.
    pub fn lattice_coords(&self, idx: usize) -> [i64; 3] {
        let nx = self.nx();
        let i2 = idx % nx;
        let i1 = (idx / nx) % nx;
        let it = idx / (nx * nx);
        [
            signed_index(it, self.nt),
            signed_index(i1, nx),
            signed_index(i2, nx),
        ]
    }
}

impl Lattice for GridSpec {
    fn shape(&self) -> Vec<usize> {
        vec![self.nt, self.space.n, self.space.n]
    }

    fn periods(&self) -> Vec<f64> {
        vec![self.time_period, self.space.period, self.space.period]
    }
}

/// Complex values on a lattice together with their representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<G: Lattice> {
    grid: G,
    values: Vec<Complex64>,
    rep: Rep,
}

pub type SpaceTimeField = Field<GridSpec>;
pub type SpatialField = Field<SpatialGrid>;

impl<G: Lattice> Field<G> {
    pub fn zeros(grid: G, rep: Rep) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            rep,
        }
    }

    pub fn from_values(grid: G, rep: Rep, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a lattice of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, rep })
    }

    /// Samples `f` at every lattice point; the closure receives the coordinates in `rep`.
    pub fn from_fn(grid: G, rep: Rep, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i, rep))).collect();
        Self { grid, values, rep }
    }

    pub fn grid(&self) -> &G {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.grid.point(idx, self.rep)
    }

    pub(crate) fn expect_rep(&self, expected: Rep) -> Result<()> {
        if self.rep == expected {
            Ok(())
        } else {
            Err(Error::RepMismatch {
                expected: expected.name(),
                found: self.rep.name(),
            })
        }
    }

    pub(crate) fn expect_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid && self.rep == other.rep {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?}/{} vs {:?}/{}",
                self.grid,
                self.rep.name(),
                other.grid,
                other.rep.name()
            )))
        }
    }

    /// Quadrature-weighted DFT in the requested direction.
    pub fn transform(&self, direction: Direction) -> Result<Self> {
        self.expect_rep(direction.source())?;
        let mut values = self.values.clone();
        let shape = self.grid.shape();
        let (fft_dir, target, cell) = match direction {
            Direction::Forward => (
                FftDirection::Forward,
                Rep::Frequency,
                self.grid.cell(Rep::Physical),
            ),
            Direction::Inverse => (
                FftDirection::Backward,
                Rep::Physical,
                self.grid.cell(Rep::Frequency),
            ),
        };
        fft_nd(&mut values, &shape, fft_dir);
        let scale = cell * (2.0 * PI).powf(-(shape.len() as f64) / 2.0);
        for v in values.iter_mut() {
            *v *= scale;
        }
        Ok(Self {
            grid: self.grid.clone(),
            values,
            rep: target,
        })
    }

    pub fn forward(&self) -> Result<Self> {
        self.transform(Direction::Forward)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.transform(Direction::Inverse)
    }

    /// Cell-weighted `l^p` norm; `p = inf` gives the lattice maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let cell = self.grid.cell(self.rep);
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let cell = self.grid.cell(self.rep);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell).sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.expect_same_grid(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += *b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.expect_same_grid(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a -= *b;
        }
        Ok(out)
    }

    /// Keeps the values where `keep` holds at the frequency-space point, zeroing the rest.
    pub fn mask_frequency(&self, mut keep: impl FnMut(&[f64]) -> bool) -> Result<Self> {
        self.expect_rep(Rep::Frequency)?;
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !keep(&self.grid.point(i, Rep::Frequency)) {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }

    /// Largest absolute imaginary part; the realness diagnostic for physical data.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

impl SpaceTimeField {
    /// Multiplies by the sharp characteristic function of `region` on the lattice.
    pub fn project(&self, region: &FrequencyRegion) -> Result<Self> {
        self.mask_frequency(|p| region.contains([p[0], p[1], p[2]]))
    }

    /// `F^N`, `F^{N,L}` or `F^{N,L,sign}` with sharp bands `<xi> in [N, 2N)`,
    /// `<|tau| - |xi|> in [L, 2L)`.
    pub fn dyadic_restrict(&self, n: f64, l: Option<f64>, sign: Option<Sign>) -> Result<Self> {
        check_dyadic("N", n)?;
        if let Some(l) = l {
            check_dyadic("L", l)?;
        }
        self.mask_frequency(|p| {
            let xi = [p[1], p[2]];
            in_band(&xi, n)
                && l.is_none_or(|l| in_modulation_band(p[0], xi, l))
                && sign.is_none_or(|s| s.contains_tau(p[0]))
        })
    }
}

impl SpatialField {
    /// `f^N` with the sharp band `<xi> in [N, 2N)`.
    pub fn dyadic_restrict(&self, n: f64) -> Result<Self> {
        check_dyadic("N", n)?;
        self.mask_frequency(|p| in_band(p, n))
    }

    /// Real part of a physical field as a plain vector.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Physical field from real samples.
    pub fn from_real(grid: SpatialGrid, values: &[f64]) -> Result<Self> {
        Self::from_values(
            grid,
            Rep::Physical,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }
}

/// Dyadic values `1, 2, 4, ...` whose bands meet the lattice of `grid`.
pub fn dyadic_range(max_bracket: f64) -> Vec<f64> {
    let mut out = vec![];
    let mut n = 1.0;
    while n <= max_bracket {
        out.push(n);
        n *= 2.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: GridSpec, rep: Rep, seed: u64) -> SpaceTimeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn(grid, rep, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(12, 8, 1.0, 1.0).is_err());
        assert!(GridSpec::new(8, 4, 1.0, 1.0).is_err());
        assert!(GridSpec::new(8, 8, 0.0, 1.0).is_err());
        assert!(GridSpec::new(8, 8, 1.0, 1.0).is_ok());
    }

    #[test]
    fn dyadic_check() {
        for v in [1.0, 2.0, 64.0] {
            assert!(check_dyadic("N", v).is_ok());
        }
        for v in [0.5, 3.0, 0.0, -2.0, f64::NAN] {
            assert!(check_dyadic("N", v).is_err());
        }
    }

    #[test]
    fn constant_maps_to_dc_mode() {
        let g = GridSpec::new(8, 8, 3.0, 5.0).unwrap();
        let u = Field::from_fn(g, Rep::Physical, |_| Complex64::new(1.0, 0.0));
        let f = u.forward().unwrap();
        let dc = (2.0 * PI).powf(-1.5) * 5.0 * 9.0;
        assert!((f.values()[0].re - dc).abs() < 1e-12);
        for v in &f.values()[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn rep_mismatch_is_rejected() {
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let u = SpaceTimeField::zeros(g, Rep::Frequency);
        assert!(matches!(u.forward(), Err(Error::RepMismatch { .. })));
        assert!(u.inverse().is_ok());
    }

    #[test]
    fn shifted_delta_matches_direct_sum() {
        let g = GridSpec::new(8, 8, 2.0, 3.0).unwrap();
        let (a, b, c) = (3usize, 5usize, 1usize);
        let mut u = SpaceTimeField::zeros(g, Rep::Physical);
        u.values_mut()[(a * 8 + b) * 8 + c] = Complex64::new(1.0, 0.0);
        let f = u.forward().unwrap();
        let x = g.point((a * 8 + b) * 8 + c, Rep::Physical);
        let cell = g.cell(Rep::Physical) * (2.0 * PI).powf(-1.5);
        for i in 0..g.len() {
            let k = g.point(i, Rep::Frequency);
            // direct sum over the single nonzero sample
            let phase = -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            let expected = Complex64::from_polar(cell, phase);
            assert!((f.values()[i] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_isometry() {
        let g = GridSpec::new(8, 16, 7.0, 2.5).unwrap();
        let u = random_field(g, Rep::Physical, 3);
        let f = u.forward().unwrap();
        let back = f.inverse().unwrap();
        let err = back.sub(&u).unwrap().l2_norm() / u.l2_norm();
        assert!(err < 1e-12);
        assert!((f.l2_norm() - u.l2_norm()).abs() / u.l2_norm() < 1e-12);
    }

    #[test]
    fn spatial_round_trip() {
        let g = SpatialGrid::new(16, 3.0).unwrap();
        let u = SpatialField::from_fn(g, Rep::Physical, |x| {
            Complex64::new((x[0] * 2.0).sin() + x[1], 0.0)
        });
        let back = u.forward().unwrap().inverse().unwrap();
        assert!(back.sub(&u).unwrap().l2_norm() < 1e-12 * u.l2_norm());
    }

    #[test]
    fn project_full_space_is_identity_and_idempotent() {
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let f = random_field(g, Rep::Frequency, 9);
        assert_eq!(f.project(&FrequencyRegion::Full).unwrap(), f);
        let cone = FrequencyRegion::ball_cone(Sign::Plus, 1.0, 1.0).unwrap();
        let once = f.project(&cone).unwrap();
        let twice = once.project(&cone).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn project_requires_frequency_rep() {
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let u = SpaceTimeField::zeros(g, Rep::Physical);
        assert!(u.project(&FrequencyRegion::Full).is_err());
    }

    #[test]
    fn thick_cone_projection_is_half_space_ball() {
        // tau range on an 8-point unit lattice is [-4, 3]; L = 16 >= 2 * 8.
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let f = random_field(g, Rep::Frequency, 1);
        let n = 1.0;
        for sign in [Sign::Plus, Sign::Minus] {
            let cone = FrequencyRegion::ball_cone(sign, n, 16.0).unwrap();
            let p = f.project(&cone).unwrap();
            for i in 0..g.len() {
                let x = g.point(i, Rep::Frequency);
                let inside = sign.contains_tau(x[0]) && x[1].hypot(x[2]) <= 2.0 * n;
                let expected = if inside { f.values()[i] } else { Complex64::new(0.0, 0.0) };
                assert_eq!(p.values()[i], expected);
            }
        }
    }

    #[test]
    fn band_at_one_point_five() {
        let g = SpatialGrid::new(8, 2.0 * PI).unwrap();
        // <(1, 0)> = sqrt(2) ~ 1.41 lies in the N = 1 band
        let mut f = SpatialField::zeros(g, Rep::Frequency);
        f.values_mut()[8] = Complex64::new(1.0, 0.0);
        assert_eq!(f.dyadic_restrict(1.0).unwrap(), f);
        for n in [2.0, 4.0, 8.0] {
            assert_eq!(f.dyadic_restrict(n).unwrap().l2_norm(), 0.0);
        }
    }

    #[test]
    fn non_dyadic_restrict_is_rejected() {
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let f = SpaceTimeField::zeros(g, Rep::Frequency);
        assert!(f.dyadic_restrict(3.0, None, None).is_err());
        assert!(f.dyadic_restrict(2.0, Some(0.5), None).is_err());
    }

    #[test]
    fn signed_modulation_bands_partition_each_frequency_band() {
        let g = GridSpec::unit_frequency(8, 8).unwrap();
        let f = random_field(g, Rep::Frequency, 5);
        let p = 3.0;
        // brute-force enumeration of every lattice point's (N, L, sign) label
        let mut per_point = vec![0usize; g.len()];
        for n in dyadic_range(8.0) {
            let fn_ = f.dyadic_restrict(n, None, None).unwrap();
            let mut acc = 0.0;
            for l in dyadic_range(16.0) {
                for s in [Sign::Plus, Sign::Minus] {
                    let part = f.dyadic_restrict(n, Some(l), Some(s)).unwrap();
                    acc += part.lp_norm(p).powf(p);
                    for (i, v) in part.values().iter().enumerate() {
                        if *v != Complex64::new(0.0, 0.0) {
                            per_point[i] += 1;
                        }
                    }
                }
            }
            let whole = fn_.lp_norm(p).powf(p);
            assert!((acc - whole).abs() <= 1e-12 * whole.max(1.0));
        }
        assert!(per_point.iter().all(|&c| c == 1));
    }

    proptest! {
        #[test]
        fn projection_algebra(seed in 0u64..1000, l in 0u32..3, n in 0u32..3) {
            let g = GridSpec::unit_frequency(8, 8).unwrap();
            let f = random_field(g, Rep::Frequency, seed);
            let a = FrequencyRegion::ball_cone(Sign::Plus, 2f64.powi(n as i32), 2f64.powi(l as i32)).unwrap();
            let b = FrequencyRegion::Band { n: 2f64.powi(n as i32) };
            let both = FrequencyRegion::Intersect(vec![a.clone(), b.clone()]);
            prop_assert_eq!(f.project(&a).unwrap().project(&b).unwrap(), f.project(&both).unwrap());
        }

        #[test]
        fn frequency_bands_partition_lp_mass(seed in 0u64..1000, p in 1.1f64..4.0) {
            let g = GridSpec::unit_frequency(8, 8).unwrap();
            let f = random_field(g, Rep::Frequency, seed);
            let total = f.lp_norm(p).powf(p);
            let sum: f64 = dyadic_range(8.0)
                .into_iter()
                .map(|n| f.dyadic_restrict(n, None, None).unwrap().lp_norm(p).powf(p))
                .sum();
            prop_assert!((sum - total).abs() <= 1e-12 * total);
        }
    }
}
