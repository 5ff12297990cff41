//! Thickened null-cone regions, angular nets and the angle function on the circle.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_dyadic, in_band, in_modulation_band, Sign};

/// A point `(tau, xi1, xi2)` of frequency space.
pub type Point3 = [f64; 3];

/// Angle between two nonzero plane vectors, in `[0, pi]`.
pub fn angle(a: [f64; 2], b: [f64; 2]) -> Result<f64> {
    let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    // atan2 of cross and dot keeps full precision near 0 and pi, where acos does not
    let cross = a[0] * b[1] - a[1] * b[0];
    let dot = a[0] * b[0] + a[1] * b[1];
    Ok(cross.abs().atan2(dot))
}

fn angle_or_pi(a: [f64; 2], b: [f64; 2]) -> f64 {
    angle(a, b).unwrap_or(PI)
}

/// `gamma_0 = (L2 / N1)^(1/2)`.
pub fn gamma0(n1: f64, l2: f64) -> f64 {
    (l2 / n1).sqrt()
}

/// Equally spaced directions forming a maximal separated subset of the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularNet {
    pub gamma: f64,
    pub points: Vec<[f64; 2]>,
}

impl AngularNet {
    /// Number of net directions within angle `radius` of `omega`.
    pub fn count_within(&self, omega: [f64; 2], radius: f64) -> usize {
        self.points
            .iter()
            .filter(|&&w| angle_or_pi(w, omega) <= radius * (1.0 + 1e-12))
            .count()
    }

    /// Smallest pairwise angle.
    pub fn min_separation(&self) -> f64 {
        let mut best = PI;
        for (i, &a) in self.points.iter().enumerate() {
            for &b in &self.points[i + 1..] {
                best = best.min(angle_or_pi(a, b));
            }
        }
        best
    }

    /// Largest angle from `omega` to its nearest net direction.
    pub fn covering_gap(&self, omega: [f64; 2]) -> f64 {
        self.points
            .iter()
            .map(|&w| angle_or_pi(w, omega))
            .fold(PI, f64::min)
    }
}

/// Builds `M = floor(2 pi / gamma)` equally spaced directions.
///
/// With spacing `2 pi / M >= gamma` the set is `gamma`-separated, and since the spacing is
/// below `2 gamma` every direction lies within `gamma` of the set, so it is maximal.
pub fn build_net(gamma: f64) -> Result<AngularNet> {
    if !(gamma > 0.0 && gamma <= PI) {
        return Err(invalid("gamma", format!("{gamma} is outside (0, pi]")));
    }
    // the small slack absorbs rounding when 2 pi / gamma is an integer
    let m = ((2.0 * PI / gamma + 1e-9).floor() as usize).max(2);
    let step = 2.0 * PI / m as f64;
    let points = (0..m)
        .map(|k| {
            let a = k as f64 * step;
            [a.cos(), a.sin()]
        })
        .collect();
    Ok(AngularNet { gamma, points })
}

/// Symbolic frequency-space region with a total membership predicate.
///
/// Cone thickenings use `|tau -+ |xi|| <= L`; signs select `tau >= 0` (plus) or `tau < 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyRegion {
    Full,
    /// `|xi| <= 2N`, thickened cone around `tau = +-|xi|`.
    BallCone { sign: Sign, n: f64, l: f64 },
    /// `|xi| in [N, 2N)`, thickened cone around `tau = +-|xi|`.
    AnnularCone { sign: Sign, n: f64, l: f64 },
    /// Annular cone further cut to the angular sector `angle(+-xi, omega) <= gamma`.
    SectorCone {
        sign: Sign,
        n: f64,
        l: f64,
        gamma: f64,
        omega: [f64; 2],
    },
    /// Half-space `+-tau >= 0` over the planar sector `|xi| in [N, 2N)`, `angle(+-xi, omega) <= gamma`.
    Sector {
        sign: Sign,
        n: f64,
        gamma: f64,
        omega: [f64; 2],
    },
    /// `|xi| <= 2N`, any `tau`.
    Ball { n: f64 },
    /// `<xi> in [N, 2N)`.
    Band { n: f64 },
    /// `<|tau| - |xi|> in [L, 2L)`.
    Modulation { l: f64 },
    HalfSpace { sign: Sign },
    /// Closed axis-aligned box.
    Box { lo: Point3, hi: Point3 },
    Translate {
        region: Box<FrequencyRegion>,
        shift: Point3,
    },
    Reflect(Box<FrequencyRegion>),
    Intersect(Vec<FrequencyRegion>),
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma <= PI {
        Ok(())
    } else {
        Err(invalid("gamma", format!("{gamma} is outside (0, pi]")))
    }
}

fn unit(omega: [f64; 2]) -> Result<[f64; 2]> {
    let n = omega[0].hypot(omega[1]);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok([omega[0] / n, omega[1] / n])
}

fn cone_shell(sign: Sign, l: f64, tau: f64, r: f64) -> bool {
    sign.contains_tau(tau) && (tau - sign.factor() * r).abs() <= l
}

impl FrequencyRegion {
    pub fn ball_cone(sign: Sign, n: f64, l: f64) -> Result<Self> {
        check_dyadic("N", n)?;
        check_dyadic("L", l)?;
        Ok(Self::BallCone { sign, n, l })
    }

    pub fn annular_cone(sign: Sign, n: f64, l: f64) -> Result<Self> {
        check_dyadic("N", n)?;
        check_dyadic("L", l)?;
        Ok(Self::AnnularCone { sign, n, l })
    }

    pub fn sector_cone(sign: Sign, n: f64, l: f64, gamma: f64, omega: [f64; 2]) -> Result<Self> {
        check_dyadic("N", n)?;
        check_dyadic("L", l)?;
        check_gamma(gamma)?;
        Ok(Self::SectorCone {
            sign,
            n,
            l,
            gamma,
            omega: unit(omega)?,
        })
    }

    pub fn sector(sign: Sign, n: f64, gamma: f64, omega: [f64; 2]) -> Result<Self> {
        check_dyadic("N", n)?;
        check_gamma(gamma)?;
        Ok(Self::Sector {
            sign,
            n,
            gamma,
            omega: unit(omega)?,
        })
    }

    pub fn ball(n: f64) -> Result<Self> {
        check_dyadic("N", n)?;
        Ok(Self::Ball { n })
    }

    pub fn band(n: f64) -> Result<Self> {
        check_dyadic("N", n)?;
        Ok(Self::Band { n })
    }

    pub fn modulation(l: f64) -> Result<Self> {
        check_dyadic("L", l)?;
        Ok(Self::Modulation { l })
    }

    pub fn translate(self, shift: Point3) -> Self {
        Self::Translate {
            region: Box::new(self),
            shift,
        }
    }

    pub fn reflect(self) -> Self {
        Self::Reflect(Box::new(self))
    }

    pub fn and(self, other: Self) -> Self {
        match self {
            Self::Intersect(mut parts) => {
                parts.push(other);
                Self::Intersect(parts)
            }
            first => Self::Intersect(vec![first, other]),
        }
    }

    pub fn contains(&self, x: Point3) -> bool {
        let [tau, x1, x2] = x;
        let r = x1.hypot(x2);
        match self {
            Self::Full => true,
            Self::BallCone { sign, n, l } => r <= 2.0 * n && cone_shell(*sign, *l, tau, r),
            Self::AnnularCone { sign, n, l } => {
                r >= *n && r < 2.0 * n && cone_shell(*sign, *l, tau, r)
            }
            Self::SectorCone {
                sign,
                n,
                l,
                gamma,
                omega,
            } => {
                r >= *n
                    && r < 2.0 * n
                    && cone_shell(*sign, *l, tau, r)
                    && in_sector(*sign, [x1, x2], *gamma, *omega)
            }
            Self::Sector {
                sign,
                n,
                gamma,
                omega,
            } => {
                sign.contains_tau(tau)
                    && r >= *n
                    && r < 2.0 * n
                    && in_sector(*sign, [x1, x2], *gamma, *omega)
            }
            Self::Ball { n } => r <= 2.0 * n,
            Self::Band { n } => in_band(&[x1, x2], *n),
            Self::Modulation { l } => in_modulation_band(tau, [x1, x2], *l),
            Self::HalfSpace { sign } => sign.contains_tau(tau),
            Self::Box { lo, hi } => (0..3).all(|k| x[k] >= lo[k] && x[k] <= hi[k]),
            Self::Translate { region, shift } => {
                region.contains([tau - shift[0], x1 - shift[1], x2 - shift[2]])
            }
            Self::Reflect(region) => region.contains([-tau, -x1, -x2]),
            Self::Intersect(parts) => parts.iter().all(|p| p.contains(x)),
        }
    }

    /// An axis-aligned box containing the region, when one follows from the parameters.
    pub fn bounding_box(&self) -> Option<(Point3, Point3)> {
        let cone_box = |sign: Sign, n: f64, l: f64| {
            let r = 2.0 * n;
            let (t_lo, t_hi) = match sign {
                Sign::Plus => (0.0, r + l),
                Sign::Minus => (-(r + l), 0.0),
            };
            Some(([t_lo, -r, -r], [t_hi, r, r]))
        };
        match self {
            Self::BallCone { sign, n, l }
            | Self::AnnularCone { sign, n, l }
            | Self::SectorCone { sign, n, l, .. } => cone_box(*sign, *n, *l),
            Self::Box { lo, hi } => Some((*lo, *hi)),
            Self::Translate { region, shift } => region.bounding_box().map(|(lo, hi)| {
                (
                    [lo[0] + shift[0], lo[1] + shift[1], lo[2] + shift[2]],
                    [hi[0] + shift[0], hi[1] + shift[1], hi[2] + shift[2]],
                )
            }),
            Self::Reflect(region) => region
                .bounding_box()
                .map(|(lo, hi)| ([-hi[0], -hi[1], -hi[2]], [-lo[0], -lo[1], -lo[2]])),
            Self::Intersect(parts) => {
                let mut acc: Option<(Point3, Point3)> = None;
                for (lo, hi) in parts.iter().filter_map(|p| p.bounding_box()) {
                    acc = Some(match acc {
                        None => (lo, hi),
                        Some((a, b)) => (
                            [a[0].max(lo[0]), a[1].max(lo[1]), a[2].max(lo[2])],
                            [b[0].min(hi[0]), b[1].min(hi[1]), b[2].min(hi[2])],
                        ),
                    });
                }
                acc
            }
            _ => None,
        }
    }
}

fn in_sector(sign: Sign, xi: [f64; 2], gamma: f64, omega: [f64; 2]) -> bool {
    let s = sign.factor();
    angle([s * xi[0], s * xi[1]], omega).is_ok_and(|a| a <= gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn angle_examples() {
        assert_eq!(angle([1.0, 0.0], [1.0, 0.0]).unwrap(), 0.0);
        assert!((angle([1.0, 0.0], [0.0, 1.0]).unwrap() - PI / 2.0).abs() < 1e-15);
        // exact: pi - atan(1e-3) = pi - 1e-3 + 1e-9/3 + ...
        let expected = PI - (1e-3f64).atan();
        let got = angle([1.0, 0.0], [-1.0, 1e-3]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - (PI - 1e-3)).abs() < 1e-9);
        assert!(matches!(angle([0.0, 0.0], [1.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn gamma0_examples() {
        assert_eq!(gamma0(8.0, 8.0), 1.0);
        assert_eq!(gamma0(16.0, 4.0), 0.5);
        assert_eq!(gamma0(64.0, 1.0), 0.125);
    }

    #[test]
    fn net_sizes() {
        assert_eq!(build_net(PI / 2.0).unwrap().points.len(), 4);
        let net = build_net(2.0 * PI / 7.0).unwrap();
        assert_eq!(net.points.len(), 7);
        for (i, &a) in net.points.iter().enumerate() {
            for &b in &net.points[i + 1..] {
                assert!(angle(a, b).unwrap() >= 2.0 * PI / 7.0 * (1.0 - 1e-9));
            }
        }
        assert!(build_net(0.0).is_err());
        assert!(build_net(4.0).is_err());
    }

    #[test]
    fn region_constructors_validate() {
        assert!(FrequencyRegion::ball_cone(Sign::Plus, 3.0, 1.0).is_err());
        assert!(FrequencyRegion::annular_cone(Sign::Plus, 2.0, 0.5).is_err());
        assert!(FrequencyRegion::sector_cone(Sign::Plus, 2.0, 1.0, 0.0, [1.0, 0.0]).is_err());
        assert!(FrequencyRegion::sector(Sign::Plus, 2.0, 0.1, [0.0, 0.0]).is_err());
    }

    #[test]
    fn sector_applies_sign_to_xi() {
        let plus = FrequencyRegion::sector_cone(Sign::Plus, 1.0, 1.0, 0.1, [1.0, 0.0]).unwrap();
        let minus = FrequencyRegion::sector_cone(Sign::Minus, 1.0, 1.0, 0.1, [1.0, 0.0]).unwrap();
        assert!(plus.contains([1.5, 1.5, 0.0]));
        assert!(!plus.contains([1.5, -1.5, 0.0]));
        assert!(minus.contains([-1.5, -1.5, 0.0]));
        assert!(!minus.contains([-1.5, 1.5, 0.0]));
    }

    #[test]
    fn opposite_cones_are_disjoint() {
        let a = FrequencyRegion::ball_cone(Sign::Plus, 4.0, 1.0).unwrap();
        let b = FrequencyRegion::ball_cone(Sign::Minus, 4.0, 1.0).unwrap();
        let both = a.and(b);
        for i in -20..=20 {
            for j in -10..=10 {
                assert!(!both.contains([i as f64 * 0.5, j as f64 * 0.7, 0.3]));
            }
        }
    }

    fn arb_point() -> impl Strategy<Value = Point3> {
        prop::array::uniform3(-20.0f64..20.0)
    }

    proptest! {
        #[test]
        fn net_is_separated_maximal_and_almost_orthogonal(gamma in 0.01f64..PI, probe in 0.0f64..(2.0 * PI)) {
            let net = build_net(gamma).unwrap();
            prop_assert!(net.min_separation() >= gamma * (1.0 - 1e-9));
            let omega = [probe.cos(), probe.sin()];
            prop_assert!(net.covering_gap(omega) <= gamma * (1.0 + 1e-9));
            for k in 1..4usize {
                prop_assert!(net.count_within(omega, k as f64 * gamma) <= 2 * k + 1);
            }
        }

        #[test]
        fn angle_is_symmetric_and_bounded(a in prop::array::uniform2(-5.0f64..5.0), b in prop::array::uniform2(-5.0f64..5.0)) {
            prop_assume!(a != [0.0, 0.0] && b != [0.0, 0.0]);
            let ab = angle(a, b).unwrap();
            prop_assert_eq!(ab, angle(b, a).unwrap());
            prop_assert!((0.0..=PI).contains(&ab));
        }

        #[test]
        fn translate_and_reflect_laws(x in arb_point(), shift in arb_point()) {
            let a = FrequencyRegion::annular_cone(Sign::Plus, 4.0, 2.0).unwrap();
            let t = a.clone().translate(shift);
            prop_assert_eq!(t.contains(x), a.contains([x[0] - shift[0], x[1] - shift[1], x[2] - shift[2]]));
            let r = a.clone().reflect();
            prop_assert_eq!(r.contains(x), a.contains([-x[0], -x[1], -x[2]]));
        }

        #[test]
        fn bounding_boxes_enclose(x in arb_point(), shift in arb_point()) {
            let regions = [
                FrequencyRegion::ball_cone(Sign::Minus, 4.0, 2.0).unwrap(),
                FrequencyRegion::sector_cone(Sign::Plus, 2.0, 1.0, 0.7, [0.3, 1.0]).unwrap(),
                FrequencyRegion::annular_cone(Sign::Plus, 4.0, 1.0).unwrap().reflect().translate(shift),
            ];
            for reg in &regions {
                let (lo, hi) = reg.bounding_box().unwrap();
                if reg.contains(x) {
                    prop_assert!((0..3).all(|k| x[k] >= lo[k] && x[k] <= hi[k]));
                }
            }
        }
    }
}
