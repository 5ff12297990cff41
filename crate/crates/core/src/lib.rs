//! Numerical laboratory for the quadratic-derivative wave equation in two space dimensions.
//!
//! The crate covers discrete Fourier-Lebesgue and wave-Sobolev norms on periodic lattices,
//! Monte Carlo volumes of thickened null-cone intersections, empirical best constants of
//! bilinear cone-restriction estimates, an exact-rational ledger of the dyadic exponent
//! inequalities, and a pseudospectral Picard/Duhamel solver with an RK4 reference.

pub mod error;
mod fft;
pub mod fit;
pub mod geometry;
pub mod grid;
pub mod ledger;
pub mod norms;
pub mod rational;
pub mod solver;
pub mod trilinear;
pub mod volume;

pub use error::{Error, Result};
pub use fit::{power_law_fit, power_law_fit_1d, ExponentFit};
pub use geometry::{angle, build_net, gamma0, AngularNet, FrequencyRegion, Point3};
pub use grid::{
    bracket, Direction, Field, GridSpec, Lattice, Rep, Sign, SpaceTimeField, SpatialField,
    SpatialGrid,
};
pub use rational::{parse_rational, Rational};
pub use volume::{region_volume_mc, SamplingDomain, VolumeCase, VolumeEstimate};
