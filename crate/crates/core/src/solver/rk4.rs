use num_complex::Complex64;

use super::nonlinear::{eval_spectral, NonlinearityKind};
use super::spectral::Spectral;
use super::{CauchyData, Provenance, SolverConfig, Trajectory};
use crate::error::Result;

/// Energy (raw spectral units) beyond which the stepping counts as blown up.
const BLOWUP: f64 = 1e60;

type State = (Vec<Complex64>, Vec<Complex64>);

fn rhs(sp: &Spectral, s: &State, kind: Option<NonlinearityKind>, dealias: bool) -> State {
    let du = s.1.clone();
    let mut dv: Vec<Complex64> = s.0.iter().zip(&sp.kabs).map(|(u, k)| -u * (k * k)).collect();
    if let Some(kind) = kind {
        let n = eval_spectral(sp, &s.0, &s.1, kind, dealias);
        for (a, b) in dv.iter_mut().zip(&n) {
            *a += b;
        }
    }
    (du, dv)
}

fn axpy(s: &State, h: f64, d: &State) -> State {
    (
        s.0.iter().zip(&d.0).map(|(a, b)| a + b * h).collect(),
        s.1.iter().zip(&d.1).map(|(a, b)| a + b * h).collect(),
    )
}

/// Classical RK4 on the first-order system `(u, u_t)` with spectral derivatives.
///
/// Takes `rk4_substeps` steps per slice interval. If the energy turns non-finite or explodes,
/// the trajectory stops there and `diverged_at` names the first missing slice.
pub fn rk4_solve(data: &CauchyData, kind: Option<NonlinearityKind>, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let sp = Spectral::new(data.grid());
    let h = config.dt() / config.rk4_substeps as f64;
    let mut s: State = (sp.fwd(&data.f().real_values()), sp.fwd(&data.g().real_values()));
    let mut traj = Trajectory {
        grid: sp.grid,
        times: vec![0.0],
        u: vec![data.f().real_values()],
        ut: vec![data.g().real_values()],
        provenance: Provenance::Rk4,
        diverged_at: None,
    };
    for k in 1..=config.n_steps {
        for _ in 0..config.rk4_substeps {
            let k1 = rhs(&sp, &s, kind, config.dealias);
            let k2 = rhs(&sp, &axpy(&s, 0.5 * h, &k1), kind, config.dealias);
            let k3 = rhs(&sp, &axpy(&s, 0.5 * h, &k2), kind, config.dealias);
            let k4 = rhs(&sp, &axpy(&s, h, &k3), kind, config.dealias);
            for i in 0..sp.len() {
                s.0[i] += (k1.0[i] + k2.0[i] * 2.0 + k3.0[i] * 2.0 + k4.0[i]) * (h / 6.0);
                s.1[i] += (k1.1[i] + k2.1[i] * 2.0 + k3.1[i] * 2.0 + k4.1[i]) * (h / 6.0);
            }
        }
        let e = sp.energy_sq(&s.0, &s.1) + s.0[0].norm_sqr();
        if !e.is_finite() || e > BLOWUP {
            traj.diverged_at = Some(k);
            break;
        }
        traj.times.push(k as f64 * config.dt());
        traj.u.push(sp.inv(&s.0));
        traj.ut.push(sp.inv(&s.1));
    }
    Ok(traj)
}
