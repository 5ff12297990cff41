//! Discrete Fourier-Lebesgue, wave-Sobolev and mixed Lebesgue norms.
//!
//! Every frequency-side norm is a Riemann sum of its continuum counterpart: the weighted
//! coefficients are summed in `l^p` with the frequency cell volume as quadrature weight.

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::grid::{bracket, check_dyadic, GridSpec, Lattice, Rep, SpaceTimeField, SpatialField, SpatialGrid};
use crate::rational::{int, rat, to_f64, Rational};

/// `<xi> = sqrt(1 + |xi|^2)`.
pub fn japanese_bracket(xi: [f64; 2]) -> f64 {
    bracket(&xi)
}

/// The pair `(r, p)` with `1/r + 1/p = 1`, held exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LebesgueExponents {
    r: Rational,
    p: Rational,
}

impl LebesgueExponents {
    /// Requires `1 < r <= 2`.
    pub fn new(r: Rational) -> Result<Self> {
        if r <= Rational::one() || r > int(2) {
            return Err(invalid("r", "must lie in (1, 2]"));
        }
        let p = &r / (&r - Rational::one());
        Ok(Self { r, p })
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn r_f64(&self) -> f64 {
        to_f64(&self.r)
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(&self.p)
    }
}

/// `(s, b, eps)` with `sigma = s - 1` derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityParams {
    pub s: Rational,
    pub b: Rational,
    pub eps: Rational,
}

impl RegularityParams {
    pub fn sigma(&self) -> Rational {
        &self.s - Rational::one()
    }

    /// `1/r < b < 1` and `0 < eps < 1 - b`.
    pub fn satisfies_hypotheses(&self, exps: &LebesgueExponents) -> bool {
        let one = Rational::one();
        self.b > one.clone() / exps.r()
            && self.b < one
            && self.eps > Rational::zero()
            && self.eps < Rational::one() - &self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    FourierLebesgue,
    HomogeneousFourierLebesgue,
    Xsb,
    Z,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub kind: NormKind,
    /// Homogeneous norms skip `xi = 0`; set when that mode carried mass.
    pub excluded_dc: bool,
}

impl NormValue {
    fn new(value: f64, kind: NormKind) -> Self {
        Self {
            value,
            kind,
            excluded_dc: false,
        }
    }
}

fn conjugate(r: f64) -> Result<f64> {
    if !(r >= 1.0 && r <= 2.0) {
        return Err(invalid("r", format!("{r} is outside [1, 2]")));
    }
    Ok(if r == 1.0 { f64::INFINITY } else { r / (r - 1.0) })
}

/// `(sum w_k^p cell)^{1/p}`, or `max w_k` for `p = inf`.
fn weighted_lp(weighted: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return weighted.fold(0.0, f64::max);
    }
    (weighted.map(|w| w.powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// `|| <xi>^s f^ ||_{L^{r'}}`, or with `|xi|^s` and `xi = 0` dropped when `homogeneous`.
pub fn fl_norm(f: &SpatialField, r: f64, s: f64, homogeneous: bool) -> Result<NormValue> {
    f.expect_rep(Rep::Frequency)?;
    let p = conjugate(r)?;
    let grid = f.grid();
    let mut excluded_dc = false;
    let weighted = f.values().iter().enumerate().filter_map(|(i, v)| {
        let xi = grid.point(i, Rep::Frequency);
        if homogeneous {
            let m = xi[0].hypot(xi[1]);
            if m == 0.0 {
                excluded_dc |= v.norm() != 0.0;
                return None;
            }
            Some(m.powf(s) * v.norm())
        } else {
            Some(bracket(&xi).powf(s) * v.norm())
        }
    });
    let value = weighted_lp(weighted, p, grid.cell(Rep::Frequency));
    let kind = if homogeneous {
        NormKind::HomogeneousFourierLebesgue
    } else {
        NormKind::FourierLebesgue
    };
    Ok(NormValue {
        value,
        kind,
        excluded_dc,
    })
}

/// `|| <xi>^s <|tau| - |xi|>^b u~ ||_{L^{r'}}`.
pub fn xsb_norm(u: &SpaceTimeField, r: f64, s: f64, b: f64) -> Result<NormValue> {
    u.expect_rep(Rep::Frequency)?;
    let p = conjugate(r)?;
    let grid = u.grid();
    let weighted = u.values().iter().enumerate().map(|(i, v)| {
        let x = grid.point(i, Rep::Frequency);
        let m = x[1].hypot(x[2]);
        bracket(&x[1..]).powf(s) * bracket(&[x[0].abs() - m]).powf(b) * v.norm()
    });
    Ok(NormValue::new(
        weighted_lp(weighted, p, grid.cell(Rep::Frequency)),
        NormKind::Xsb,
    ))
}

/// `||u||_{X_{s,b}} + ||u_t||_{X_{s-1,b}}`.
pub fn z_norm(u: &SpaceTimeField, u_t: &SpaceTimeField, r: f64, s: f64, b: f64) -> Result<NormValue> {
    u.expect_same_grid(u_t)?;
    let a = xsb_norm(u, r, s, b)?.value;
    let c = xsb_norm(u_t, r, s - 1.0, b)?.value;
    Ok(NormValue::new(a + c, NormKind::Z))
}

/// `L^q_t L^rho_x` of time slices; `rho = inf` is the lattice maximum.
pub fn mixed_norm_slices(slices: &[Vec<f64>], dt: f64, dx_cell: f64, q: f64, rho: f64) -> f64 {
    let inner: Vec<f64> = slices
        .iter()
        .map(|s| weighted_lp(s.iter().map(|v| v.abs()), rho, dx_cell))
        .collect();
    weighted_lp(inner.into_iter(), q, dt)
}

/// `L^q_t L^rho_x` of a physical space-time field.
pub fn mixed_norm(u: &SpaceTimeField, q: f64, rho: f64) -> Result<NormValue> {
    u.expect_rep(Rep::Physical)?;
    if !(q >= 1.0 && rho >= 1.0) {
        return Err(invalid("q, rho", "exponents must be >= 1"));
    }
    let grid: &GridSpec = u.grid();
    let plane = grid.nx() * grid.nx();
    let slices: Vec<Vec<f64>> = u
        .values()
        .chunks(plane)
        .map(|c| c.iter().map(|v| v.norm()).collect())
        .collect();
    let dx = grid.space().dx();
    Ok(NormValue::new(
        mixed_norm_slices(&slices, grid.dt(), dx * dx, q, rho),
        NormKind::Mixed,
    ))
}

/// `s + n (1/2 - 1/r)`: the `L^2`-Sobolev index with the same scaling as `H^r_s`.
pub fn sobolev_correspondence(s: &Rational, r: &Rational, n: i64) -> Result<Rational> {
    if *r < Rational::one() || *r > int(2) {
        return Err(invalid("r", "must lie in [1, 2]"));
    }
    Ok(s + int(n) * (rat(1, 2) - Rational::one() / r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationKind {
    /// `u_tt - Lap u = (du)^2`.
    GradSquare,
    /// `u_tt - Lap u = d(u^2)`.
    DerivOfSquare,
}

/// `n/r` for the gradient-square equation, `n/r - 1` for the derivative of a square.
pub fn critical_exponent(r: &Rational, n: i64, eq: EquationKind) -> Result<Rational> {
    if *r <= Rational::one() || *r > int(2) {
        return Err(invalid("r", "must lie in (1, 2]"));
    }
    let base = int(n) / r;
    Ok(match eq {
        EquationKind::GradSquare => base,
        EquationKind::DerivOfSquare => base - Rational::one(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub lambda: f64,
    pub ratio: f64,
    pub expected: f64,
    pub rel_error: f64,
    /// Set when the data reach the Nyquist modes; the check is then skipped.
    pub aliased: bool,
}

/// Compares `||f(lambda .)|| / ||f||` in the homogeneous norm with `lambda^{s - 2/r}`.
///
/// `f(lambda x)` on the torus of period `P / lambda` has exactly the samples of `f` on the
/// torus of period `P`, so the two lattices nest through the frequency dilation
/// `xi -> lambda xi` and the ratio is exact up to rounding.
pub fn scaling_law_check(f: &SpatialField, s: f64, r: f64, lambda: f64) -> Result<ScalingReport> {
    check_dyadic("lambda", lambda)?;
    let spectrum = match f.rep() {
        Rep::Frequency => f.clone(),
        Rep::Physical => f.forward()?,
    };
    let physical = match f.rep() {
        Rep::Physical => f.clone(),
        Rep::Frequency => f.inverse()?,
    };
    let grid = *f.grid();
    let n = grid.n();
    let peak = spectrum.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let aliased = spectrum.values().iter().enumerate().any(|(i, v)| {
        (i / n == n / 2 || i % n == n / 2) && v.norm() > 1e-12 * peak
    });
    let expected = lambda.powf(s - 2.0 / r);
    if aliased {
        return Ok(ScalingReport {
            lambda,
            ratio: f64::NAN,
            expected,
            rel_error: f64::NAN,
            aliased,
        });
    }
    let scaled_grid = SpatialGrid::new(n, grid.period() / lambda)?;
    let scaled = SpatialField::from_values(scaled_grid, Rep::Physical, physical.into_values())?.forward()?;
    let base = fl_norm(&spectrum, r, s, true)?.value;
    if base == 0.0 {
        return Err(Error::InvalidParameter {
            name: "f",
            reason: "zero homogeneous norm".into(),
        });
    }
    let ratio = fl_norm(&scaled, r, s, true)?.value / base;
    Ok(ScalingReport {
        lambda,
        ratio,
        expected,
        rel_error: (ratio - expected).abs() / expected,
        aliased,
    })
}
