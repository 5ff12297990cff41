//! The trilinear convolution form `J` and empirical best constants of the bilinear
//! cone-restriction estimates.
//!
//! ```text
//! J(F0, F1, F2) = sum_{X0, X1} F0(X0) F1(X1) F2(-X0 - X1) * dV^2
//! C(A0, A1, A2) = sup J / (||F0||_r ||F1||_p ||F2||_p),   F_j >= 0 supported in A_j
//! ```
//!
//! Lattice norms carry the frequency cell `dV` as quadrature weight.

use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::fft::{fft_nd, FftDirection};
use crate::fit::{power_law_fit, ExponentFit};
use crate::geometry::FrequencyRegion;
use crate::grid::{GridSpec, Lattice, Rep, Sign, SpaceTimeField};
use crate::rational::{int, rat, to_f64, Rational};
use crate::volume::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JMode {
    /// Double sum over the lattice, `O(n^2)`.
    Direct,
    /// Product of the three inverse transforms, `O(n log n)`.
    Fast,
}

fn neg_index(grid: &GridSpec, idx: usize) -> usize {
    let k = grid.lattice_coords(idx);
    grid.index_of([-k[0], -k[1], -k[2]])
}

fn add_index(grid: &GridSpec, a: usize, b: usize) -> usize {
    let (x, y) = (grid.lattice_coords(a), grid.lattice_coords(b));
    grid.index_of([x[0] + y[0], x[1] + y[1], x[2] + y[2]])
}

/// Evaluates `J` with periodic index wrap.
pub fn eval_j(
    f0: &SpaceTimeField,
    f1: &SpaceTimeField,
    f2: &SpaceTimeField,
    mode: JMode,
) -> Result<Complex64> {
    f0.expect_rep(Rep::Frequency)?;
    f0.expect_same_grid(f1)?;
    f0.expect_same_grid(f2)?;
    let grid = *f0.grid();
    let cell = grid.cell(Rep::Frequency);
    match mode {
        JMode::Direct => {
            let n = grid.len();
            let neg: Vec<usize> = (0..n).map(|i| neg_index(&grid, i)).collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &x0) in f0.values().iter().enumerate() {
                if x0 == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (b, &x1) in f1.values().iter().enumerate() {
                    // -X0 - X1
                    let c = neg[add_index(&grid, a, b)];
                    acc += x0 * x1 * f2.values()[c];
                }
            }
            Ok(acc * cell * cell)
        }
        JMode::Fast => {
            let u0 = f0.inverse()?;
            let u1 = f1.inverse()?;
            let u2 = f2.inverse()?;
            let sum: Complex64 = u0
                .values()
                .iter()
                .zip(u1.values())
                .zip(u2.values())
                .map(|((a, b), c)| a * b * c)
                .sum();
            let phys = grid.cell(Rep::Physical);
            Ok(sum * (2.0 * std::f64::consts::PI).powf(1.5) * phys)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

/// Result of the alternating maximization for one region triple.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    /// Best ratio over restarts.
    pub value: f64,
    /// Iterations used by the best restart.
    pub iterations: usize,
    pub converged: bool,
    /// Some slot had an identically zero kernel, so the value is 0.
    pub degenerate: bool,
    /// Objective after every slot update of the best restart.
    pub history: Vec<f64>,
    /// Normalized maximizers of the best restart.
    pub maximizers: [Vec<f64>; 3],
}

struct Ascent<'a> {
    grid: GridSpec,
    cell: f64,
    masks: [Vec<bool>; 3],
    exps: [f64; 3],
    neg: &'a [usize],
}

impl Ascent<'_> {
    fn norm(&self, f: &[f64], q: f64) -> f64 {
        (f.iter().map(|v| v.powf(q)).sum::<f64>() * self.cell).powf(1.0 / q)
    }

    fn spectrum(&self, f: &[f64]) -> Vec<Complex64> {
        let mut s: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_nd(&mut s, &self.grid.shape(), FftDirection::Forward);
        s
    }

    /// `g_j(X) = dV * (F_a * F_b)(-X)` on the mask of slot `j`.
    fn kernel(&self, j: usize, spec: &[Vec<Complex64>; 3]) -> Vec<f64> {
        let (a, b) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let mut prod: Vec<Complex64> = spec[a].iter().zip(&spec[b]).map(|(x, y)| x * y).collect();
        fft_nd(&mut prod, &self.grid.shape(), FftDirection::Backward);
        let scale = self.cell / prod.len() as f64;
        (0..prod.len())
            .map(|i| {
                if self.masks[j][i] {
                    (prod[self.neg[i]].re * scale).max(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn run(&self, init: [Vec<f64>; 3], cfg: &AscentConfig) -> AscentOutcome {
        let mut f = init;
        for j in 0..3 {
            let n = self.norm(&f[j], self.exps[j]);
            f[j].iter_mut().for_each(|v| *v /= n);
        }
        let mut spec = [self.spectrum(&f[0]), self.spectrum(&f[1]), self.spectrum(&f[2])];
        let mut history = vec![];
        let mut value = 0.0;
        let mut converged = false;
        let mut iterations = 0;
        for it in 0..cfg.max_iters {
            iterations = it + 1;
            let prev = value;
            for j in 0..3 {
                let g = self.kernel(j, &spec);
                let q = self.exps[j];
                let qc = q / (q - 1.0);
                let val = self.norm(&g, qc);
                if val == 0.0 {
                    return AscentOutcome {
                        value: 0.0,
                        iterations,
                        converged: true,
                        degenerate: true,
                        history,
                        maximizers: f,
                    };
                }
                // Hoelder extremizer F = g^{q'-1} / ||g^{q'-1}||_q
                let mut next: Vec<f64> = g.iter().map(|v| v.powf(qc - 1.0)).collect();
                let n = self.norm(&next, q);
                next.iter_mut().for_each(|v| *v /= n);
                spec[j] = self.spectrum(&next);
                f[j] = next;
                value = val;
                history.push(val);
            }
            if it > 0 && (value - prev).abs() <= cfg.tol * value {
                converged = true;
                break;
            }
        }
        AscentOutcome {
            value,
            iterations,
            converged,
            degenerate: false,
            history,
            maximizers: f,
        }
    }
}

fn region_mask(grid: &GridSpec, region: &FrequencyRegion) -> Vec<bool> {
    (0..grid.len())
        .map(|i| {
            let x = grid.point(i, Rep::Frequency);
            region.contains([x[0], x[1], x[2]])
        })
        .collect()
}

/// Slot exponents `(r, p, p)`.
fn slot_exponents(r: &Rational) -> Result<[f64; 3]> {
    if *r <= Rational::one() || *r > int(2) {
        return Err(invalid("r", "must lie in (1, 2]"));
    }
    let p = r / (r - Rational::one());
    Ok([to_f64(r), to_f64(&p), to_f64(&p)])
}

/// Alternating maximization of `J / (||F0||_r ||F1||_p ||F2||_p)` over nonnegative `F_j`
/// supported in `A_j`.
///
/// With two slots fixed the optimal third slot is the Hoelder extremizer of its kernel, so
/// each step is closed form and the objective never decreases.
pub fn best_constant(
    grid: &GridSpec,
    regions: [&FrequencyRegion; 3],
    r: &Rational,
    cfg: &AscentConfig,
) -> Result<AscentOutcome> {
    let exps = slot_exponents(r)?;
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(invalid("restarts/max_iters", "must be positive"));
    }
    let masks = [
        region_mask(grid, regions[0]),
        region_mask(grid, regions[1]),
        region_mask(grid, regions[2]),
    ];
    let neg: Vec<usize> = (0..grid.len()).map(|i| neg_index(grid, i)).collect();
    let ascent = Ascent {
        grid: *grid,
        cell: grid.cell(Rep::Frequency),
        masks,
        exps,
        neg: &neg,
    };
    if ascent.masks.iter().any(|m| !m.contains(&true)) {
        return Ok(AscentOutcome {
            value: 0.0,
            iterations: 0,
            converged: true,
            degenerate: true,
            history: vec![],
            maximizers: [vec![], vec![], vec![]],
        });
    }
    let mut best: Option<AscentOutcome> = None;
    for k in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let init = [0, 1, 2].map(|j| {
            ascent.masks[j]
                .iter()
                .map(|&m| if m { rng.random_range(0.01..1.0) } else { 0.0 })
                .collect::<Vec<f64>>()
        });
        let out = ascent.run(init, cfg);
        if best.as_ref().is_none_or(|b| out.value > b.value) {
            best = Some(out);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Dyadic configuration of a restriction-constant measurement.
///
/// Regions: `A1 = K^{s1}_{N1,L1}`, `A2 = K^{s2}_{N2,L2}` and
/// `A0 = -({|xi| <= 2 N0} ∩ {s0 tau >= 0})`, so that `-X0 = X1 + X2` is the output frequency
/// of the bilinear product.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSetup {
    pub n: [f64; 3],
    pub l: [f64; 2],
    pub signs: [Sign; 3],
    pub r: Rational,
}

impl ConstantSetup {
    pub fn regions(&self) -> Result<[FrequencyRegion; 3]> {
        let a0 = FrequencyRegion::ball(self.n[0])?
            .and(FrequencyRegion::HalfSpace { sign: self.signs[0] })
            .reflect();
        let a1 = FrequencyRegion::ball_cone(self.signs[1], self.n[1], self.l[0])?;
        let a2 = FrequencyRegion::ball_cone(self.signs[2], self.n[2], self.l[1])?;
        Ok([a0, a1, a2])
    }

    pub fn get(&self, axis: Axis) -> Result<f64> {
        match axis {
            Axis::N0 => Ok(self.n[0]),
            Axis::N1 => Ok(self.n[1]),
            Axis::N2 => Ok(self.n[2]),
            Axis::L1 => Ok(self.l[0]),
            Axis::L2 => Ok(self.l[1]),
            Axis::Gamma => Err(invalid("axis", "gamma is not a constant-measurement axis")),
        }
    }
}

/// One measured best constant with optimizer diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantMeasurement {
    pub setup: ConstantSetup,
    pub measured_c: f64,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
    pub restarts: usize,
    pub seed: u64,
}

pub fn measure_constant(grid: &GridSpec, setup: &ConstantSetup, cfg: &AscentConfig) -> Result<ConstantMeasurement> {
    let [a0, a1, a2] = setup.regions()?;
    let out = best_constant(grid, [&a0, &a1, &a2], &setup.r, cfg)?;
    Ok(ConstantMeasurement {
        setup: setup.clone(),
        measured_c: out.value,
        iterations: out.iterations,
        converged: out.converged,
        degenerate: out.degenerate,
        restarts: cfg.restarts,
        seed: cfg.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateForm {
    /// `(N012_min)^{2/p} (N12_min)^{2/r - 2/p} (L12_min)^{1/r}`
    Easy,
    /// `(N012_min)^{1/p} (N12_min)^{3/(2r) - 1/p} (L12_min)^{1/r} (L12_max)^{1/(2r)}`
    Hard,
}

/// Exact exponents on `(N012_min, N12_min, L_min, L_max)`.
pub fn form_exponents(form: EstimateForm, r: &Rational) -> Result<[Rational; 4]> {
    slot_exponents(r)?;
    let one = Rational::one();
    let ir = &one / r;
    let ip = &one - &ir;
    Ok(match form {
        EstimateForm::Easy => [
            int(2) * &ip,
            int(2) * &ir - int(2) * &ip,
            ir.clone(),
            int(0),
        ],
        EstimateForm::Hard => [
            ip.clone(),
            rat(3, 2) * &ir - &ip,
            ir.clone(),
            rat(1, 2) * &ir,
        ],
    })
}

/// Evaluates the bound shape at `(N0, N1, N2)`, `(L1, L2)`.
pub fn predicted_constant(form: EstimateForm, n: [f64; 3], l: [f64; 2], r: &Rational) -> Result<f64> {
    let e = form_exponents(form, r)?;
    let n012 = n[0].min(n[1]).min(n[2]);
    let n12 = n[1].min(n[2]);
    let bases = [n012, n12, l[0].min(l[1]), l[0].max(l[1])];
    // dyadic bases make every factor 2^{j e} with rational e
    Ok(bases
        .iter()
        .zip(&e)
        .map(|(b, e)| 2f64.powf(b.log2() * to_f64(e)))
        .product())
}

/// `log2 C` regressed on `log2` of the chosen axes.
pub fn exponent_regression(measurements: &[ConstantMeasurement], axes: &[Axis]) -> Result<ExponentFit> {
    if measurements.iter().any(|m| m.measured_c <= 0.0) {
        return Err(Error::DegenerateDesign("nonpositive measured constant".into()));
    }
    let x: Vec<Vec<f64>> = measurements
        .iter()
        .map(|m| axes.iter().map(|&a| m.setup.get(a)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let y: Vec<f64> = measurements.iter().map(|m| m.measured_c).collect();
    let fit = power_law_fit(&x, &y)?;
    if fit.exponents.iter().any(|e| e.is_none()) {
        return Err(Error::DegenerateDesign(
            "a requested axis does not vary".into(),
        ));
    }
    Ok(fit)
}

/// The lattice used for the restriction-constant series: unit spacing, `32 x 32 x 64`.
///
/// All regions of [`default_constant_series`] keep `|xi|` sums within 24 and `tau` sums
/// within 56, so no wrapped triple satisfies the convolution constraint.
pub fn constants_grid() -> GridSpec {
    GridSpec::unit_frequency(32, 64).expect("valid sizes")
}

/// Named sweep of dyadic configurations sharing a sign pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSeries {
    pub name: &'static str,
    pub axis: Axis,
    pub setups: Vec<ConstantSetup>,
}

/// `L1` sweep at `N = 4`, `L2 = 4`, and `N1` sweep at `N0 = N2 = 4`, `L = 1`, both at `r = 2`.
pub fn default_constant_series(signs: [Sign; 3]) -> Vec<ConstantSeries> {
    let r = int(2);
    let mk = |n, l| ConstantSetup {
        n,
        l,
        signs,
        r: r.clone(),
    };
    vec![
        ConstantSeries {
            name: "l1",
            axis: Axis::L1,
            setups: [1.0, 2.0, 4.0].map(|l1| mk([4.0, 4.0, 4.0], [l1, 4.0])).to_vec(),
        },
        ConstantSeries {
            name: "n1",
            axis: Axis::N1,
            setups: [1.0, 2.0, 4.0].map(|n1| mk([4.0, n1, 4.0], [1.0, 1.0])).to_vec(),
        },
    ]
}
