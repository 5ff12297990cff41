//! One driver per experiment kind. Every task derives its seed from the run seed and its
//! position in the parameter grid, never from the thread that runs it.

use conewave_core::ledger::feasible_b;
use conewave_core::norms::scaling_law_check;
use conewave_core::rational::{format_ratio, int, parse_rational, rat, to_f64};
use conewave_core::solver::{
    energy, existence_probe, free_trajectory, picard_solve, random_data, rk4_solve, strichartz_probe,
    wave_admissible, CauchyData, LebesgueIndex, Trajectory,
};
use conewave_core::trilinear::{
    constants_grid, exponent_regression, measure_constant, predicted_constant, AscentConfig, ConstantSetup,
    EstimateForm,
};
use conewave_core::volume::{default_series, volume_exponent_fit, Axis};
use conewave_core::{Rational, Sign, SpatialGrid};
use rayon::prelude::*;

use crate::config::{sign_pattern, DataKind, ExperimentConfig};
use crate::error::Result;
use crate::output::{Table, Value};

/// splitmix64 of `seed + tag`, so neighbouring tasks get unrelated streams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed.wrapping_add(tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn opt(x: Option<f64>) -> Value {
    Value::Float(x.unwrap_or(f64::NAN))
}

/// Receives finished tables; the runner persists each one as it arrives.
pub trait Sink {
    fn emit(&mut self, table: Table) -> Result<()>;
}

pub fn volumes(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let mut fits = Table::new(
        "volume_fits",
        &["case", "axis", "exponent", "expected", "r_squared", "points"],
    );
    for (ci, &case) in cfg.volumes.cases.iter().enumerate() {
        let series = volume_exponent_fit(case, &default_series(case), cfg.volumes.samples, derive_seed(cfg.seed, ci as u64))?;
        let mut points = Table::new(
            &format!("volume_points_{}", case.name()),
            &[
                "case", "axis", "value", "n0", "n1", "n2", "l1", "l2", "gamma", "mean", "std_error", "samples", "seed",
                "bound",
            ],
        );
        for s in &series {
            for p in &s.points {
                let q = &p.params;
                points.push(vec![
                    case.name().into(),
                    s.axis.name().into(),
                    q.get(s.axis).into(),
                    q.n0.into(),
                    q.n1.into(),
                    q.n2.into(),
                    q.l1.into(),
                    q.l2.into(),
                    q.gamma.into(),
                    p.estimate.mean.into(),
                    p.estimate.std_error.into(),
                    p.estimate.samples.into(),
                    p.estimate.seed.into(),
                    p.bound.into(),
                ])?;
            }
            fits.push(vec![
                case.name().into(),
                s.axis.name().into(),
                opt(s.exponent()),
                opt(conewave_core::volume::expected_exponent(case, s.axis)),
                opt(s.fit.as_ref().map(|f| f.r_squared)),
                s.points.len().into(),
            ])?;
        }
        sink.emit(points)?;
    }
    sink.emit(fits)
}

fn file_tag(signs: &[Sign; 3]) -> String {
    signs.iter().map(|s| if *s == Sign::Plus { 'p' } else { 'm' }).collect()
}

/// Setups of the `l1` and `n1` sweeps for one sign pattern.
pub fn constant_setups(cfg: &ExperimentConfig, signs: [Sign; 3]) -> Vec<(&'static str, Axis, ConstantSetup)> {
    let c = &cfg.constants;
    let mk = |n, l| ConstantSetup {
        n,
        l,
        signs,
        r: c.r.clone(),
    };
    let mut out = vec![];
    for &l1 in &c.l1 {
        out.push(("l1", Axis::L1, mk([4.0, 4.0, 4.0], [l1, 4.0])));
    }
    for &n1 in &c.n {
        out.push(("n1", Axis::N1, mk([4.0, n1, 4.0], [1.0, 1.0])));
    }
    out
}

pub fn constants(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let c = &cfg.constants;
    let grid = constants_grid();
    let mut fits = Table::new("constant_fits", &["signs", "series", "axis", "exponent", "r_squared"]);
    for &signs in &c.signs {
        let setups = constant_setups(cfg, signs);
        // the seed depends on the grid point only, so sign patterns share optimizer starts
        let measured = setups
            .par_iter()
            .enumerate()
            .map(|(i, (_, _, setup))| {
                let ascent = AscentConfig {
                    restarts: c.restarts,
                    max_iters: c.max_iters,
                    tol: c.tol,
                    seed: derive_seed(cfg.seed, i as u64),
                };
                measure_constant(&grid, setup, &ascent)
            })
            .collect::<conewave_core::Result<Vec<_>>>()?;
        let mut table = Table::new(
            &format!("constants_{}", file_tag(&signs)),
            &[
                "signs", "series", "axis", "n0", "n1", "n2", "l1", "l2", "r", "measured_c", "predicted_easy",
                "predicted_hard", "iterations", "converged", "degenerate", "restarts", "seed",
            ],
        );
        for ((name, axis, s), m) in setups.iter().zip(&measured) {
            table.push(vec![
                sign_pattern(&signs).into(),
                (*name).into(),
                axis.name().into(),
                s.n[0].into(),
                s.n[1].into(),
                s.n[2].into(),
                s.l[0].into(),
                s.l[1].into(),
                s.r.clone().into(),
                m.measured_c.into(),
                predicted_constant(EstimateForm::Easy, s.n, s.l, &s.r)?.into(),
                predicted_constant(EstimateForm::Hard, s.n, s.l, &s.r)?.into(),
                m.iterations.into(),
                m.converged.into(),
                m.degenerate.into(),
                m.restarts.into(),
                m.seed.into(),
            ])?;
        }
        for (name, axis) in [("l1", Axis::L1), ("n1", Axis::N1)] {
            let series: Vec<_> = setups
                .iter()
                .zip(&measured)
                .filter(|((n, _, _), _)| *n == name)
                .map(|(_, m)| m.clone())
                .collect();
            let fit = exponent_regression(&series, &[axis]).ok();
            fits.push(vec![
                sign_pattern(&signs).into(),
                name.into(),
                axis.name().into(),
                opt(fit.as_ref().and_then(|f| f.exponents[0])),
                opt(fit.as_ref().map(|f| f.r_squared)),
            ])?;
        }
        sink.emit(table)?;
    }
    sink.emit(fits)
}

/// `s` values for one `r`: the configured grid, or a grid around the boundary `3/(2r) + 1`.
pub fn ledger_s_grid(cfg: &ExperimentConfig, r: &Rational) -> Vec<Rational> {
    if !cfg.ledger.s.is_empty() {
        return cfg.ledger.s.clone();
    }
    let boundary = rat(3, 2) / r + int(1);
    let step = rat(1, 100);
    let mut s: Vec<Rational> = (0..=20).map(|k| rat(3, 2) + rat(k, 20)).collect();
    s.extend([&boundary - &step, boundary.clone(), &boundary + &step]);
    s.sort();
    s.dedup();
    s
}

pub fn ledger(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let mut t = Table::new("ledger", &["r", "s", "feasible", "b_lo", "b_hi"]);
    for r in &cfg.ledger.r {
        for s in ledger_s_grid(cfg, r) {
            let f = feasible_b(r, &(&s - int(1)))?;
            t.push(vec![r.clone().into(), s.into(), f.nonempty.into(), f.lo.into(), f.hi.into()])?;
        }
    }
    sink.emit(t)
}

fn solve_data(cfg: &ExperimentConfig) -> Result<CauchyData> {
    let c = &cfg.solve;
    let grid = SpatialGrid::new(c.n, c.period)?;
    let data = match c.data {
        DataKind::SingleMode => {
            let h = grid.dx();
            let xi = grid.dxi();
            let f: Vec<f64> = (0..c.n * c.n).map(|i| (xi * (i / c.n) as f64 * h).cos()).collect();
            CauchyData::from_real(grid, &f, &vec![0.0; c.n * c.n])?
        }
        DataKind::Random => random_data(grid, c.s, c.r, derive_seed(cfg.seed, 0), c.band_limit)?,
    };
    Ok(data.scaled(c.amplitude))
}

fn slice_energy(t: &Trajectory, k: usize) -> Result<f64> {
    let (u, ut) = t.slice(k)?;
    Ok(energy(&u, &ut)?)
}

fn slice_l2(t: &Trajectory, k: usize) -> f64 {
    t.u[k].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn solve(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let c = &cfg.solve;
    let data = solve_data(cfg)?;
    let (picard, report) = picard_solve(&data, Some(c.kind), &c.solver)?;
    let rk4 = rk4_solve(&data, Some(c.kind), &c.solver)?;
    let free = free_trajectory(&data, &c.solver)?;

    let mut traj = Table::new(
        "solve_trajectory",
        &["k", "t", "picard_energy", "rk4_energy", "free_energy", "picard_l2", "rk4_l2", "picard_rk4_diff_l2"],
    );
    for k in 0..picard.len() {
        let (rk_e, rk_l2, diff) = if k < rk4.len() {
            let d = picard.u[k].iter().zip(&rk4.u[k]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (slice_energy(&rk4, k)?, slice_l2(&rk4, k), d)
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        traj.push(vec![
            k.into(),
            picard.times[k].into(),
            slice_energy(&picard, k)?.into(),
            rk_e.into(),
            slice_energy(&free, k)?.into(),
            slice_l2(&picard, k).into(),
            rk_l2.into(),
            diff.into(),
        ])?;
    }
    sink.emit(traj)?;

    let mut res = Table::new("solve_picard", &["iteration", "residual"]);
    for (i, r) in report.residuals.iter().enumerate() {
        res.push(vec![(i + 1).into(), (*r).into()])?;
    }
    sink.emit(res)?;

    let agreement = if rk4.diverged_at.is_none() {
        picard.relative_l2_distance(&rk4)?
    } else {
        f64::NAN
    };
    let mut summary = Table::new(
        "solve_summary",
        &["kind", "amplitude", "t_final", "n_steps", "converged", "iterations", "picard_rk4_rel_l2", "rk4_diverged_at"],
    );
    summary.push(vec![
        c.kind.name().into(),
        c.amplitude.into(),
        c.solver.t_final.into(),
        c.solver.n_steps.into(),
        report.converged.into(),
        report.iterations().into(),
        agreement.into(),
        rk4.diverged_at.map_or(-1, |k| k as i64).into(),
    ])?;
    sink.emit(summary)?;

    if !c.amplitudes.is_empty() {
        let unit = data.scaled(1.0 / c.amplitude);
        let table = existence_probe(&unit, c.kind, &c.solver, &c.amplitudes, c.bisection_steps)?;
        let mut rows = Table::new("existence", &["amplitude", "converged", "iterations", "last_residual"]);
        for r in &table.rows {
            rows.push(vec![r.amplitude.into(), r.converged.into(), r.iterations.into(), r.last_residual.into()])?;
        }
        sink.emit(rows)?;
        let mut th = Table::new("existence_threshold", &["t_final", "threshold"]);
        th.push(vec![c.solver.t_final.into(), opt(table.threshold)])?;
        sink.emit(th)?;
    }
    Ok(())
}

pub fn scaling(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let c = &cfg.scaling;
    let grid = SpatialGrid::new(c.n, std::f64::consts::TAU)?;
    let mut t = Table::new("scaling", &["s", "r", "lambda", "ratio", "expected", "rel_error", "aliased"]);
    for (i, (s, r)) in c.pairs.iter().enumerate() {
        let (sf, rf) = (to_f64(s), to_f64(r));
        let data = random_data(grid, sf, rf, derive_seed(cfg.seed, i as u64), c.band_limit)?;
        for &lambda in &c.lambdas {
            let rep = scaling_law_check(data.f(), sf, rf, lambda)?;
            t.push(vec![
                s.clone().into(),
                r.clone().into(),
                lambda.into(),
                rep.ratio.into(),
                rep.expected.into(),
                rep.rel_error.into(),
                rep.aliased.into(),
            ])?;
        }
    }
    sink.emit(t)
}

fn index_text(i: &LebesgueIndex) -> String {
    match i {
        LebesgueIndex::Finite(q) => format_ratio(q),
        LebesgueIndex::Infinity => "inf".into(),
    }
}

pub fn strichartz(cfg: &ExperimentConfig, sink: &mut dyn Sink) -> Result<()> {
    let c = &cfg.strichartz;
    let table = strichartz_probe(c.ensemble, c.q_t, &c.ladder, cfg.seed)?;
    let mut ratios = Table::new("strichartz_ratios", &["n", "member", "ratio"]);
    let mut medians = Table::new("strichartz_medians", &["n", "median"]);
    for row in &table.rows {
        for (m, r) in row.ratios.iter().enumerate() {
            ratios.push(vec![row.n.into(), m.into(), (*r).into()])?;
        }
        medians.push(vec![row.n.into(), row.median.into()])?;
    }
    sink.emit(ratios)?;
    sink.emit(medians)?;
    let mut fit = Table::new("strichartz_fit", &["q_t", "slope"]);
    fit.push(vec![table.q_t.into(), table.slope.into()])?;
    sink.emit(fit)?;

    let q_t = parse_rational(&c.q_t.to_string())?;
    let finite = |q: Rational| LebesgueIndex::Finite(q);
    let pairs = [
        (finite(int(6)), finite(int(6))),
        (finite(int(4)), LebesgueIndex::Infinity),
        (finite(q_t), LebesgueIndex::Infinity),
    ];
    let mut adm = Table::new("strichartz_admissibility", &["p", "q", "dimension", "admissible"]);
    for (p, q) in &pairs {
        adm.push(vec![index_text(p).into(), index_text(q).into(), 2i64.into(), wave_admissible(p, q, 2).into()])?;
    }
    sink.emit(adm)
}
