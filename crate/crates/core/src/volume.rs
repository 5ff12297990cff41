//! Monte Carlo measurement of region volumes and their dyadic power laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fit::{power_law_fit_1d, ExponentFit};
use crate::geometry::{FrequencyRegion, Point3};
use crate::grid::Sign;

const CHUNK: usize = 1 << 16;

/// Where uniform samples are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingDomain {
    /// Axis-aligned box in `(tau, xi1, xi2)`.
    Box { lo: Point3, hi: Point3 },
    /// Thin shell `|tau - tau_a -+ |xi - xi_a|| <= half_width` over a planar `xi` box.
    ///
    /// Shearing `tau` by a function of `xi` preserves measure, so the shell has volume
    /// `area * 2 * half_width`; sampling it wastes far fewer points on thin cones.
    Shell {
        apex: Point3,
        sign: Sign,
        xi_lo: [f64; 2],
        xi_hi: [f64; 2],
        half_width: f64,
    },
}

impl SamplingDomain {
    pub fn from_box((lo, hi): (Point3, Point3)) -> Self {
        Self::Box { lo, hi }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::Box { lo, hi } => (0..3).map(|k| (hi[k] - lo[k]).max(0.0)).product(),
            Self::Shell {
                xi_lo,
                xi_hi,
                half_width,
                ..
            } => {
                (xi_hi[0] - xi_lo[0]).max(0.0) * (xi_hi[1] - xi_lo[1]).max(0.0) * 2.0 * half_width
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point3 {
        let mut u = || rng.random::<f64>();
        match self {
            Self::Box { lo, hi } => [
                lo[0] + (hi[0] - lo[0]) * u(),
                lo[1] + (hi[1] - lo[1]) * u(),
                lo[2] + (hi[2] - lo[2]) * u(),
            ],
            Self::Shell {
                apex,
                sign,
                xi_lo,
                xi_hi,
                half_width,
            } => {
                let x1 = xi_lo[0] + (xi_hi[0] - xi_lo[0]) * u();
                let x2 = xi_lo[1] + (xi_hi[1] - xi_lo[1]) * u();
                let r = (x1 - apex[1]).hypot(x2 - apex[2]);
                let tau = apex[0] + sign.factor() * r + half_width * (2.0 * u() - 1.0);
                [tau, x1, x2]
            }
        }
    }
}

/// Unbiased estimate of a Lebesgue measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Hit-or-miss estimate of `|region ∩ domain|`.
///
/// The caller guarantees that `domain` encloses the part of `region` being measured. Each
/// chunk of samples draws from its own ChaCha stream, so the result is independent of the
/// thread count.
pub fn region_volume_mc(
    region: &FrequencyRegion,
    domain: &SamplingDomain,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    if samples < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    let chunks = samples.div_ceil(CHUNK as u64);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = (samples - c * CHUNK as u64).min(CHUNK as u64);
            (0..count)
                .filter(|_| region.contains(domain.sample(&mut rng)))
                .count() as u64
        })
        .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    let vol = domain.volume();
    let sample_std = vol * (p * (1.0 - p) * n / (n - 1.0)).sqrt();
    Ok(VolumeEstimate {
        mean: vol * p,
        std_error: sample_std / n.sqrt(),
        samples,
        seed,
    })
}

/// Intersection geometries whose volume scalings are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeCase {
    /// Ball cones at a witness point far out on the cone; the high-modulation slot is inactive.
    HlhEasy,
    /// Annular cones at a witness point on the cone axis.
    HlhHard,
    /// Low-frequency sector against a high-frequency cone with aligned directions.
    Sigma1,
    /// Thickened low-frequency sector at angle `6 gamma` from the high-frequency direction.
    Sigma2,
}

impl VolumeCase {
    pub const ALL: [VolumeCase; 4] = [Self::HlhEasy, Self::HlhHard, Self::Sigma1, Self::Sigma2];

    pub fn name(self) -> &'static str {
        match self {
            Self::HlhEasy => "hlh_easy",
            Self::HlhHard => "hlh_hard",
            Self::Sigma1 => "sigma1",
            Self::Sigma2 => "sigma2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Parameter axes of a volume configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    N0,
    N1,
    N2,
    L1,
    L2,
    Gamma,
}

impl Axis {
    pub const ALL: [Axis; 6] = [
        Self::N0,
        Self::N1,
        Self::N2,
        Self::L1,
        Self::L2,
        Self::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::N0 => "n0",
            Self::N1 => "n1",
            Self::N2 => "n2",
            Self::L1 => "l1",
            Self::L2 => "l2",
            Self::Gamma => "gamma",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// One dyadic configuration. Unused fields are ignored by a case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeParams {
    pub n0: f64,
    pub n1: f64,
    pub n2: f64,
    pub l1: f64,
    pub l2: f64,
    pub gamma: f64,
}

impl VolumeParams {
    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::N0 => self.n0,
            Axis::N1 => self.n1,
            Axis::N2 => self.n2,
            Axis::L1 => self.l1,
            Axis::L2 => self.l2,
            Axis::Gamma => self.gamma,
        }
    }

    pub fn with(mut self, axis: Axis, v: f64) -> Self {
        match axis {
            Axis::N0 => self.n0 = v,
            Axis::N1 => self.n1 = v,
            Axis::N2 => self.n2 = v,
            Axis::L1 => self.l1 = v,
            Axis::L2 => self.l2 = v,
            Axis::Gamma => self.gamma = v,
        }
        self
    }
}

const E1: [f64; 2] = [1.0, 0.0];

/// The region `E` of a case together with a sampling domain that encloses it.
pub fn case_geometry(case: VolumeCase, p: &VolumeParams) -> Result<(FrequencyRegion, SamplingDomain)> {
    match case {
        VolumeCase::HlhEasy => {
            // E = K+_{N1,L1} ∩ (X0 - K+_{N2,L2}) with X0 = (N2, N2, 0) on the cone
            let x0 = [p.n2, p.n2, 0.0];
            let a1 = FrequencyRegion::ball_cone(Sign::Plus, p.n1, p.l1)?;
            let a2 = FrequencyRegion::ball_cone(Sign::Plus, p.n2, p.l2)?;
            let r = 2.0 * p.n1;
            let domain = SamplingDomain::Shell {
                apex: [0.0; 3],
                sign: Sign::Plus,
                xi_lo: [-r, -r],
                xi_hi: [r, r],
                half_width: p.l1,
            };
            Ok((a1.and(a2.reflect().translate(x0)), domain))
        }
        VolumeCase::HlhHard => {
            // X0 = (2 N2, 2 N2, 0); the intersection hugs the positive xi1 axis
            let x0 = [2.0 * p.n2, 2.0 * p.n2, 0.0];
            let a1 = FrequencyRegion::annular_cone(Sign::Plus, p.n1, p.l1)?;
            let a2 = FrequencyRegion::annular_cone(Sign::Plus, p.n2, p.l2)?;
            let s = p.l1 + p.l2;
            let w = (4.0 * p.n1 * s).sqrt();
            let domain = SamplingDomain::Shell {
                apex: [0.0; 3],
                sign: Sign::Plus,
                xi_lo: [p.n1 - s, -w],
                xi_hi: [2.0 * p.n1, w],
                half_width: p.l1,
            };
            Ok((a1.and(a2.reflect().translate(x0)), domain))
        }
        VolumeCase::Sigma1 | VolumeCase::Sigma2 => {
            // X2 = (-|xi2|, xi2) with xi2 = -1.25 N1 omega1; E = A0 ∩ (-X2 - A1)
            let xi2 = [-1.25 * p.n1, 0.0];
            let apex = [1.25 * p.n1, -xi2[0], -xi2[1]];
            let a0 = if case == VolumeCase::Sigma1 {
                FrequencyRegion::sector(Sign::Plus, p.n0, p.gamma, E1)?
            } else {
                let phi = 6.0 * p.gamma;
                FrequencyRegion::sector_cone(Sign::Plus, p.n0, p.l1, p.gamma, [phi.cos(), phi.sin()])?
            };
            let a1 = FrequencyRegion::annular_cone(Sign::Plus, p.n1, p.l1)?;
            let r = 2.0 * p.n0;
            let domain = SamplingDomain::Shell {
                apex,
                sign: Sign::Minus,
                xi_lo: [-r, -r],
                xi_hi: [r, r],
                half_width: p.l1,
            };
            Ok((a0.and(a1.reflect().translate(apex)), domain))
        }
    }
}

/// Bound shape `N1^{3/2} L_min L_max^{1/2}`, `N1^2 L_min`, `N0^2 gamma L1` or `(L2/gamma) L1 N0`.
pub fn bound_shape(case: VolumeCase, p: &VolumeParams) -> f64 {
    let (lmin, lmax) = (p.l1.min(p.l2), p.l1.max(p.l2));
    match case {
        VolumeCase::HlhEasy => p.n1 * p.n1 * lmin,
        VolumeCase::HlhHard => p.n1.powf(1.5) * lmin * lmax.sqrt(),
        VolumeCase::Sigma1 => p.n0 * p.n0 * p.gamma * p.l1,
        VolumeCase::Sigma2 => p.l2 / p.gamma * p.l1 * p.n0,
    }
}

/// Expected exponent along an axis when the series sits in the regime of the bound.
pub fn expected_exponent(case: VolumeCase, axis: Axis) -> Option<f64> {
    use Axis::*;
    use VolumeCase::*;
    match (case, axis) {
        (HlhEasy, N1) => Some(2.0),
        (HlhEasy, L1) => Some(1.0),
        (HlhEasy, L2) => Some(0.0),
        (HlhHard, N1) => Some(1.5),
        (HlhHard, L1) => Some(1.0),
        (HlhHard, L2) => Some(0.5),
        (Sigma1, N0) => Some(2.0),
        (Sigma1, L1) => Some(1.0),
        (Sigma1, Gamma) => Some(1.0),
        _ => None,
    }
}

/// A one-axis sweep around a base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: VolumeParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumePoint {
    pub params: VolumeParams,
    pub estimate: VolumeEstimate,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSeries {
    pub axis: Axis,
    pub points: Vec<VolumePoint>,
    /// `None` when the series has a single value or a zero volume.
    pub fit: Option<ExponentFit>,
}

impl VolumeSeries {
    pub fn exponent(&self) -> Option<f64> {
        self.fit.as_ref().and_then(|f| f.exponents[0])
    }
}

/// Default sweeps: three or more octaves per axis in the `L_max <= N_min / 8` regime.
pub fn default_series(case: VolumeCase) -> Vec<SeriesSpec> {
    let dy = |k: std::ops::Range<i32>| k.map(|j| 2f64.powi(j)).collect::<Vec<_>>();
    let base = VolumeParams {
        n0: 1.0,
        n1: 64.0,
        n2: 1024.0,
        l1: 1.0,
        l2: 1.0,
        gamma: 0.125,
    };
    let spec = |axis, values, base| SeriesSpec { axis, values, base };
    match case {
        VolumeCase::HlhEasy => vec![
            spec(Axis::N1, dy(3..7), base.with(Axis::L2, 1024.0)),
            spec(Axis::L1, dy(0..4), base.with(Axis::L2, 1024.0)),
            spec(Axis::L2, dy(10..14), base.with(Axis::N1, 16.0)),
        ],
        VolumeCase::HlhHard => {
            let base = base.with(Axis::N2, 8192.0);
            vec![
                spec(Axis::N1, dy(3..7), base),
                spec(Axis::L1, dy(0..4), base.with(Axis::L2, 8.0)),
                spec(Axis::L2, dy(0..4), base),
            ]
        }
        VolumeCase::Sigma1 => {
            let base = base.with(Axis::N1, 128.0).with(Axis::N0, 16.0);
            vec![
                spec(Axis::N0, dy(1..5), base),
                spec(Axis::L1, dy(0..4), base),
                spec(Axis::Gamma, vec![0.0625, 0.125, 0.25, 0.5], base.with(Axis::N0, 8.0)),
            ]
        }
        VolumeCase::Sigma2 => {
            let base = base.with(Axis::N1, 128.0).with(Axis::N0, 8.0).with(Axis::L2, 8.0);
            vec![
                spec(Axis::N0, dy(1..5), base),
                spec(Axis::L1, dy(0..4), base),
                spec(Axis::Gamma, vec![0.03125, 0.0625, 0.125, 0.25], base),
            ]
        }
    }
}

/// Measures each series and fits `log2 |E|` against `log2` of the varied parameter.
///
/// Each point gets its own seed derived from `seed` and its position, so the points are
/// independent and the result does not depend on evaluation order.
pub fn volume_exponent_fit(
    case: VolumeCase,
    series: &[SeriesSpec],
    samples: u64,
    seed: u64,
) -> Result<Vec<VolumeSeries>> {
    let mut out = vec![];
    for (si, spec) in series.iter().enumerate() {
        let mut points = vec![];
        for (pi, &v) in spec.values.iter().enumerate() {
            let params = spec.base.with(spec.axis, v);
            let (region, domain) = case_geometry(case, &params)?;
            let point_seed = seed ^ ((si as u64) << 48) ^ ((pi as u64) << 32);
            let estimate = region_volume_mc(&region, &domain, samples, point_seed)?;
            points.push(VolumePoint {
                params,
                estimate,
                bound: bound_shape(case, &params),
            });
        }
        let xs: Vec<f64> = points.iter().map(|p| p.params.get(spec.axis)).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.estimate.mean).collect();
        let fit = power_law_fit_1d(&xs, &ys).ok().filter(|f| f.exponents[0].is_some());
        out.push(VolumeSeries {
            axis: spec.axis,
            points,
            fit,
        });
    }
    Ok(out)
}
