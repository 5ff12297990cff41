//! Quadratic derivative nonlinearities evaluated pseudospectrally.

use num_complex::Complex64;

use super::spectral::Spectral;
use crate::error::Result;
use crate::grid::{Rep, SpatialField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivDirection {
    T,
    X1,
    X2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityKind {
    /// `(du)^2 := u_t^2 + |grad u|^2`, a sum of squares with no null structure.
    FullGradSquare,
    /// `|grad u|^2`.
    SpatialGradSquare,
    /// `d_j (u^2)`.
    DerivOfSquare(DerivDirection),
}

impl NonlinearityKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::FullGradSquare => "full_grad_square",
            Self::SpatialGradSquare => "spatial_grad_square",
            Self::DerivOfSquare(DerivDirection::T) => "deriv_of_square_t",
            Self::DerivOfSquare(DerivDirection::X1) => "deriv_of_square_x1",
            Self::DerivOfSquare(DerivDirection::X2) => "deriv_of_square_x2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        use DerivDirection::*;
        [
            Self::FullGradSquare,
            Self::SpatialGradSquare,
            Self::DerivOfSquare(T),
            Self::DerivOfSquare(X1),
            Self::DerivOfSquare(X2),
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Raw spectrum of `N(u, u_t)` from raw spectra of `u` and `u_t`.
pub(crate) fn eval_spectral(
    sp: &Spectral,
    u: &[Complex64],
    ut: &[Complex64],
    kind: NonlinearityKind,
    dealias: bool,
) -> Vec<Complex64> {
    let filtered = |s: &[Complex64]| {
        let mut s = s.to_vec();
        if dealias {
            sp.dealias(&mut s);
        }
        s
    };
    let u = filtered(u);
    let grad_sq = || {
        let gx = sp.inv(&sp.deriv(&u, 0));
        let gy = sp.inv(&sp.deriv(&u, 1));
        gx.iter().zip(&gy).map(|(a, b)| a * a + b * b).collect::<Vec<f64>>()
    };
    let mut out = match kind {
        NonlinearityKind::SpatialGradSquare => sp.fwd(&grad_sq()),
        NonlinearityKind::FullGradSquare => {
            let v = sp.inv(&filtered(ut));
            let g = grad_sq();
            sp.fwd(&v.iter().zip(&g).map(|(a, b)| a * a + b).collect::<Vec<f64>>())
        }
        NonlinearityKind::DerivOfSquare(DerivDirection::T) => {
            let v = sp.inv(&filtered(ut));
            let w = sp.inv(&u);
            sp.fwd(&w.iter().zip(&v).map(|(a, b)| 2.0 * a * b).collect::<Vec<f64>>())
        }
        NonlinearityKind::DerivOfSquare(dir) => {
            let w = sp.inv(&u);
            let sq = sp.fwd(&w.iter().map(|a| a * a).collect::<Vec<f64>>());
            sp.deriv(&sq, if dir == DerivDirection::X1 { 0 } else { 1 })
        }
    };
    if dealias {
        sp.dealias(&mut out);
    }
    out
}

/// `N(u, u_t)` on the physical lattice.
pub fn nonlinearity_eval(
    u: &SpatialField,
    u_t: &SpatialField,
    kind: NonlinearityKind,
    dealias: bool,
) -> Result<SpatialField> {
    u.expect_rep(Rep::Physical)?;
    u.expect_same_grid(u_t)?;
    let sp = Spectral::new(*u.grid());
    let n = eval_spectral(&sp, &sp.fwd(&u.real_values()), &sp.fwd(&u_t.real_values()), kind, dealias);
    SpatialField::from_real(sp.grid, &sp.inv(&n))
}
