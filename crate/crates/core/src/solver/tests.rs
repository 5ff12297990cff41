use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use super::*;
use crate::norms::fl_norm;
use crate::rational::rat;

fn grid(n: usize) -> SpatialGrid {
    SpatialGrid::new(n, TAU).unwrap()
}

fn sample(g: SpatialGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let dx = g.dx();
    let n = g.n();
    (0..n * n)
        .map(|i| f((i / n) as f64 * dx, (i % n) as f64 * dx))
        .collect()
}

fn single_mode(n: usize, a: f64) -> CauchyData {
    let g = grid(n);
    CauchyData::from_real(g, &sample(g, |x, _| a * x.cos()), &vec![0.0; n * n]).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn halfwave_symbol_values() {
    assert_eq!(halfwave_symbol(0.0, 2.0), (1.0, 0.0));
    assert_eq!(halfwave_symbol(3.0, 0.0), (1.0, 3.0));
    let (c, s) = halfwave_symbol(1.0, PI);
    assert!((c + 1.0).abs() < 1e-15 && s.abs() < 1e-15);
    let (c, s) = halfwave_multipliers(&grid(8), 0.0);
    assert!(c.iter().all(|&v| v == 1.0) && s.iter().all(|&v| v == 0.0));
}

#[test]
fn free_solution_on_eigenfunction() {
    let g = grid(16);
    let f = SpatialField::from_real(g, &sample(g, |x, y| (2.0 * x + y).cos())).unwrap();
    let zero = SpatialField::from_real(g, &vec![0.0; 256]).unwrap();
    let t = 0.7;
    let (u, ut) = free_solution(&f, &zero, t).unwrap();
    let w = 5f64.sqrt();
    let exact = sample(g, |x, y| (t * w).cos() * (2.0 * x + y).cos());
    let exact_t = sample(g, |x, y| -w * (t * w).sin() * (2.0 * x + y).cos());
    assert!(max_abs_diff(&u.real_values(), &exact) < 1e-13);
    assert!(max_abs_diff(&ut.real_values(), &exact_t) < 1e-12);
    let (u0, _) = free_solution(&zero, &zero, t).unwrap();
    assert_eq!(u0.real_values(), vec![0.0; 256]);
}

#[test]
fn free_energy_is_conserved() {
    let data = random_data(grid(32), 1.0, 2.0, 4, 10.0).unwrap();
    let cfg = SolverConfig {
        t_final: 1.0,
        n_steps: 50,
        ..Default::default()
    };
    let traj = free_trajectory(&data, &cfg).unwrap();
    let e0 = energy(data.f(), data.g()).unwrap();
    assert!(e0 > 0.0);
    for k in 0..traj.len() {
        let (u, ut) = traj.slice(k).unwrap();
        assert!((energy(&u, &ut).unwrap() - e0).abs() <= 1e-10 * e0);
    }
}

#[test]
fn free_evolution_time_reversal() {
    let data = random_data(grid(32), 1.0, 2.0, 9, 10.0).unwrap();
    let (u, ut) = free_solution(data.f(), data.g(), 0.8).unwrap();
    let back = ut.scaled(num_complex::Complex64::new(-1.0, 0.0));
    let (f, g) = free_solution(&u, &back, 0.8).unwrap();
    assert!(max_abs_diff(&f.real_values(), &data.f().real_values()) < 1e-10);
    let g_back: Vec<f64> = g.real_values().iter().map(|v| -v).collect();
    assert!(max_abs_diff(&g_back, &data.g().real_values()) < 1e-10);
}

#[test]
fn energy_zero_and_scaling() {
    let g = grid(8);
    let z = SpatialField::from_real(g, &vec![0.0; 64]).unwrap();
    assert_eq!(energy(&z, &z).unwrap(), 0.0);
}

#[test]
fn nonlinearity_analytic_cases() {
    let g = grid(32);
    let c = SpatialField::from_real(g, &vec![2.5; 1024]).unwrap();
    let z = SpatialField::from_real(g, &vec![0.0; 1024]).unwrap();
    for kind in [NonlinearityKind::SpatialGradSquare, NonlinearityKind::FullGradSquare] {
        let f = nonlinearity_eval(&c, &z, kind, true).unwrap();
        assert!(f.real_values().iter().all(|v| v.abs() < 1e-12));
    }
    let u = SpatialField::from_real(g, &sample(g, |x, _| x.sin())).unwrap();
    let f = nonlinearity_eval(&u, &z, NonlinearityKind::SpatialGradSquare, false).unwrap();
    assert!(max_abs_diff(&f.real_values(), &sample(g, |x, _| x.cos().powi(2))) < 1e-12);
    let ut = SpatialField::from_real(g, &sample(g, |_, y| y.cos())).unwrap();
    let f = nonlinearity_eval(&u, &ut, NonlinearityKind::FullGradSquare, false).unwrap();
    let exact = sample(g, |x, y| y.cos().powi(2) + x.cos().powi(2));
    assert!(max_abs_diff(&f.real_values(), &exact) < 1e-12);
    let f = nonlinearity_eval(&u, &ut, NonlinearityKind::DerivOfSquare(DerivDirection::T), false).unwrap();
    assert!(max_abs_diff(&f.real_values(), &sample(g, |x, y| 2.0 * x.sin() * y.cos())) < 1e-12);
}

#[test]
fn deriv_of_square_matches_finite_differences_at_second_order() {
    let profile = |x: f64, y: f64| x.sin() + 0.5 * (x + 2.0 * y).cos();
    let err = |n: usize| {
        let g = grid(n);
        let u = SpatialField::from_real(g, &sample(g, profile)).unwrap();
        let z = SpatialField::from_real(g, &vec![0.0; n * n]).unwrap();
        let kind = NonlinearityKind::DerivOfSquare(DerivDirection::X1);
        let spectral = nonlinearity_eval(&u, &z, kind, false).unwrap().real_values();
        let h = g.dx();
        let fd = sample(g, |x, y| (profile(x + h, y).powi(2) - profile(x - h, y).powi(2)) / (2.0 * h));
        max_abs_diff(&spectral, &fd)
    };
    let ratio = err(32) / err(64);
    assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
}

#[test]
fn nonlinearity_names_round_trip() {
    for kind in [
        NonlinearityKind::FullGradSquare,
        NonlinearityKind::SpatialGradSquare,
        NonlinearityKind::DerivOfSquare(DerivDirection::T),
        NonlinearityKind::DerivOfSquare(DerivDirection::X1),
        NonlinearityKind::DerivOfSquare(DerivDirection::X2),
    ] {
        assert_eq!(NonlinearityKind::parse(kind.name()), Some(kind));
    }
    assert_eq!(NonlinearityKind::parse("cubic"), None);
}

fn constant_forcing(g: SpatialGrid, slices: usize) -> Vec<SpatialField> {
    let f = SpatialField::from_real(g, &sample(g, |x, y| (x + y).cos())).unwrap();
    vec![f; slices]
}

#[test]
fn duhamel_trivial_cases() {
    let g = grid(8);
    let z = vec![SpatialField::from_real(g, &vec![0.0; 64]).unwrap(); 5];
    let (u, v) = duhamel_apply(&z, 0.1, 4).unwrap();
    assert!(u.real_values().iter().chain(&v.real_values()).all(|x| *x == 0.0));
    let (u, _) = duhamel_apply(&constant_forcing(g, 5), 0.1, 0).unwrap();
    assert!(u.real_values().iter().all(|x| *x == 0.0));
    assert!(duhamel_apply(&constant_forcing(g, 3), 0.1, 3).is_err());
}

fn duhamel_error(slices: usize) -> f64 {
    let g = grid(8);
    let t = 1.0;
    let dt = t / slices as f64;
    // forcing cos(x + y) cos(3 t') integrates against sin((t - t') |xi|)/|xi| in closed form
    let w = 2f64.sqrt();
    let forcing: Vec<SpatialField> = (0..=slices)
        .map(|j| {
            let s = (3.0 * j as f64 * dt).cos();
            SpatialField::from_real(g, &sample(g, |x, y| s * (x + y).cos())).unwrap()
        })
        .collect();
    let (u, _) = duhamel_apply(&forcing, dt, slices).unwrap();
    let coeff = ((3.0 * t).cos() - (w * t).cos()) / (w * w - 9.0);
    let exact = sample(g, |x, y| coeff * (x + y).cos());
    max_abs_diff(&u.real_values(), &exact)
}

#[test]
fn duhamel_constant_mode_closed_form() {
    let g = grid(8);
    let slices = 64;
    let t = 1.0;
    let (u, _) = duhamel_apply(&constant_forcing(g, slices + 1), t / slices as f64, slices).unwrap();
    let coeff = (1.0 - (2f64.sqrt() * t).cos()) / 2.0;
    let exact = sample(g, |x, y| coeff * (x + y).cos());
    assert!(max_abs_diff(&u.real_values(), &exact) < 1e-4);
}

#[test]
fn duhamel_is_second_order() {
    let (e1, e2, e3) = (duhamel_error(16), duhamel_error(32), duhamel_error(64));
    for r in [e1 / e2, e2 / e3] {
        assert!((r - 4.0).abs() <= 0.8, "ratio {r}");
    }
}

#[test]
fn picard_zero_data_converges_at_once() {
    let data = single_mode(8, 0.0);
    let (traj, report) =
        picard_solve(&data, Some(NonlinearityKind::FullGradSquare), &SolverConfig::default()).unwrap();
    assert!(report.converged);
    assert_eq!(report.iterations(), 1);
    assert!(traj.u.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn picard_matches_rk4_for_small_data() {
    let data = single_mode(32, 1e-3);
    let cfg = SolverConfig {
        t_final: 0.1,
        n_steps: 64,
        ..Default::default()
    };
    for kind in [
        NonlinearityKind::FullGradSquare,
        NonlinearityKind::SpatialGradSquare,
        NonlinearityKind::DerivOfSquare(DerivDirection::T),
        NonlinearityKind::DerivOfSquare(DerivDirection::X1),
    ] {
        let (p, report) = picard_solve(&data, Some(kind), &cfg).unwrap();
        assert!(report.converged);
        assert!(report.residuals.windows(2).all(|w| w[1] < w[0]));
        assert!(report.residuals.iter().all(|r| r.is_finite()));
        let r = rk4_solve(&data, Some(kind), &cfg).unwrap();
        assert_eq!(r.diverged_at, None);
        assert!(p.relative_l2_distance(&r).unwrap() <= 1e-4);
        assert_eq!(max_abs_diff(&p.u[0], &data.f().real_values()), 0.0);
    }
}

#[test]
fn rk4_free_problem_matches_free_solution() {
    let data = random_data(grid(16), 1.0, 2.0, 2, 4.0).unwrap();
    let cfg = SolverConfig {
        t_final: 1.0,
        n_steps: 64,
        rk4_substeps: 4,
        ..Default::default()
    };
    let r = rk4_solve(&data, None, &cfg).unwrap();
    let free = free_trajectory(&data, &cfg).unwrap();
    assert!(r.relative_l2_distance(&free).unwrap() < 1e-8);
    let z = rk4_solve(&single_mode(8, 0.0), Some(NonlinearityKind::FullGradSquare), &cfg).unwrap();
    assert!(z.u.iter().flatten().all(|v| *v == 0.0));
}

#[test]
fn rk4_is_fourth_order() {
    let data = single_mode(16, 0.3);
    let last = |sub: usize| {
        let cfg = SolverConfig {
            t_final: 1.0,
            n_steps: 4,
            rk4_substeps: sub,
            ..Default::default()
        };
        let t = rk4_solve(&data, Some(NonlinearityKind::FullGradSquare), &cfg).unwrap();
        t.u.last().unwrap().clone()
    };
    let (a, b, c) = (last(4), last(8), last(16));
    let ratio = max_abs_diff(&a, &b) / max_abs_diff(&b, &c);
    assert!((ratio - 16.0).abs() <= 3.2, "ratio {ratio}");
}

#[test]
fn rk4_flags_blow_up() {
    let data = single_mode(8, 50.0);
    let cfg = SolverConfig {
        t_final: 2.0,
        n_steps: 16,
        ..Default::default()
    };
    let t = rk4_solve(&data, Some(NonlinearityKind::FullGradSquare), &cfg).unwrap();
    let k = t.diverged_at.expect("large data must blow up");
    assert_eq!(t.len(), k);
}

#[test]
fn random_data_is_reproducible_and_real() {
    let a = random_data(grid(32), 1.5, 1.5, 11, 10.0).unwrap();
    let b = random_data(grid(32), 1.5, 1.5, 11, 10.0).unwrap();
    let c = random_data(grid(32), 1.5, 1.5, 12, 10.0).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(random_data(grid(32), 1.5, 1.5, 1, 16.0).is_err());
}

#[test]
fn random_data_regularity() {
    let norm = |n: usize, s_eval: f64| {
        let d = random_data(grid(n), 1.0, 1.5, 3, n as f64 / 3.0).unwrap();
        fl_norm(&d.f().forward().unwrap(), 1.5, s_eval, false).unwrap().value
    };
    let (a, b) = (norm(64, 1.0), norm(128, 1.0));
    assert!((b / a - 1.0).abs() < 0.2, "{a} {b}");
    let (a, b) = (norm(64, 1.5), norm(128, 1.5));
    assert!(b / a > 1.2, "{a} {b}");
}

#[test]
fn coarse_random_data_truncates_fine_data() {
    let coarse = random_data(grid(16), 1.0, 2.0, 5, 5.0).unwrap();
    let fine = random_data(grid(32), 1.0, 2.0, 5, 5.0).unwrap();
    let fc = coarse.f().forward().unwrap();
    let ff = fine.f().forward().unwrap();
    assert!((fl_norm(&fc, 2.0, 0.0, false).unwrap().value - fl_norm(&ff, 2.0, 0.0, false).unwrap().value).abs() < 1e-10);
}

fn probe_config(t_final: f64) -> SolverConfig {
    SolverConfig {
        t_final,
        n_steps: 16,
        picard_max: 60,
        picard_tol: 1e-8,
        ..Default::default()
    }
}

#[test]
fn existence_threshold_shrinks_with_time_and_respects_scaling() {
    let family = single_mode(16, 1.0);
    let kind = NonlinearityKind::FullGradSquare;
    let amps = [1e-3, 0.1, 1.0, 3.0, 10.0, 30.0];
    let short = existence_probe(&family, kind, &probe_config(0.5), &amps, 10).unwrap();
    assert!(short.rows[0].converged);
    let a1 = short.threshold.expect("large amplitudes must fail");
    let long = existence_probe(&family, kind, &probe_config(1.0), &amps, 10).unwrap();
    let a2 = long.threshold.unwrap();
    assert!(a2 < a1, "{a2} !< {a1}");
    let rescaled = family.rescaled(2.0).unwrap();
    let small = existence_probe(&rescaled, kind, &probe_config(0.25), &amps, 10).unwrap();
    let a3 = small.threshold.unwrap();
    assert!((a3 / a1 - 1.0).abs() < 1e-2, "{a3} vs {a1}");
    assert!(existence_probe(&family, kind, &probe_config(0.5), &[1.0, 0.5], 2).is_err());
}

#[test]
fn admissibility_endpoint() {
    let f = |a, b| LebesgueIndex::Finite(rat(a, b));
    assert!(wave_admissible(&f(6, 1), &f(6, 1), 2));
    assert!(!wave_admissible(&f(4, 1), &LebesgueIndex::Infinity, 2));
    assert!(wave_admissible(&f(5, 1), &LebesgueIndex::Infinity, 2));
    assert!(wave_admissible(&LebesgueIndex::Infinity, &f(2, 1), 2));
    assert!(!wave_admissible(&f(3, 1), &f(6, 1), 2));
    assert!(!wave_admissible(&f(2, 1), &LebesgueIndex::Infinity, 3));
    assert!(wave_admissible(&f(2, 1), &f(6, 1), 4));
}

#[test]
fn strichartz_ratio_plane_wave_closed_form() {
    let q = 6.0;
    let samples = 32;
    let dt = 1.0 / samples as f64;
    let num = (0..samples)
        .map(|k| (k as f64 * dt).cos().abs().powf(q) * dt)
        .sum::<f64>()
        .powf(1.0 / q);
    let den = PI * 2f64.sqrt() * 2f64.powf(7.0 / 8.0);
    for n in [16, 32, 64] {
        let r = strichartz_ratio(&single_mode(n, 1.0), q, 1.0, samples).unwrap();
        assert!((r / (num / den) - 1.0).abs() < 1e-12, "n = {n}: {r}");
    }
    assert!(strichartz_ratio(&single_mode(8, 1.0), 3.0, 1.0, 4).is_err());
}

#[test]
fn strichartz_probe_small_ladder() {
    let t = strichartz_probe(3, 6.0, &[16, 32, 64], 1).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows.iter().all(|r| r.ratios.len() == 3 && r.median > 0.0));
    assert!(t.slope.is_finite());
}

#[test]
fn config_validation() {
    let bad = [
        SolverConfig { t_final: 0.0, ..Default::default() },
        SolverConfig { n_steps: 1, ..Default::default() },
        SolverConfig { picard_tol: 0.0, ..Default::default() },
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
    assert!(SolverConfig::default().validate().is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_scales_quadratically(seed in 0u64..500, c in -5.0f64..5.0) {
        let d = random_data(grid(16), 1.0, 2.0, seed, 5.0).unwrap();
        let e = energy(d.f(), d.g()).unwrap();
        let s = d.scaled(c);
        let es = energy(s.f(), s.g()).unwrap();
        prop_assert!((es - c * c * e).abs() <= 1e-12 * (1.0 + es.abs()));
    }

    #[test]
    fn picard_converged_residuals_decrease(seed in 0u64..500, a in 1e-4f64..1e-1) {
        let d = random_data(grid(16), 1.0, 2.0, seed, 4.0).unwrap().scaled(a);
        let cfg = SolverConfig { t_final: 0.1, n_steps: 8, ..Default::default() };
        let (traj, report) = picard_solve(&d, Some(NonlinearityKind::FullGradSquare), &cfg).unwrap();
        prop_assert!(report.residuals.iter().all(|r| r.is_finite()));
        prop_assert_eq!(report.converged, *report.residuals.last().unwrap() < cfg.picard_tol);
        if report.converged {
            prop_assert!(report.residuals.windows(2).all(|w| w[1] < w[0]));
        }
        prop_assert_eq!(traj.len(), cfg.n_steps + 1);
    }
}
