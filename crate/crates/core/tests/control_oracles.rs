use std::f64::consts::PI;

use coupled_obs::control::{
    solve_time_optimal, synthesize_null_control, verify_bang_bang, InputMap, NullControlOptions, NullControlProblem,
    TimeOptimalOptions, TimeOptimalProblem,
};
use coupled_obs::semigroup::evolve_adjoint;
use coupled_obs::{PhysicalParams, SpaceTimeSet, SpectralDomain, SpectralState};
use nalgebra::{DMatrix, DVector};

fn interval(n_modes: usize, cells: usize) -> SpectralDomain {
    SpectralDomain::interval(PI, n_modes, cells).unwrap()
}

fn dense(map: &InputMap<'_>, rows: usize) -> DMatrix<f64> {
    let n = map.n_vars();
    let mut m = DMatrix::zeros(rows, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = map.apply(&e);
        for i in 0..rows {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

#[test]
fn null_control_is_no_larger_than_least_squares_control() {
    let d = interval(4, 64);
    let p = PhysicalParams::new(1.0, 1.0).unwrap();
    let v0 = SpectralState::new(vec![[1.0, 0.0], [0.0, 0.5], [0.2, 0.0], [0.0, 0.0]]);
    let set = SpaceTimeSet::full(&d, 32, 1.0).unwrap();
    let problem = NullControlProblem { domain: &d, params: p, v0: v0.clone(), d: set.clone() };
    let opts = NullControlOptions { l_restarts: 16, ..Default::default() };
    let (u, cert) = synthesize_null_control(&problem, 1e-2, opts).unwrap();
    assert!(cert.holds(1e-2), "{cert:?}");

    // Minimum-energy control −Mᵀ(MMᵀ)⁻¹c reaches zero exactly, so its sup norm
    // bounds the optimal sup norm from above.
    let map = InputMap::new(&d, &p, 4, 32, 1.0, set.mask().to_vec()).unwrap();
    let m = dense(&map, 8);
    let c = DVector::from_vec(evolve_adjoint(&v0, &d, &p, 1.0).unwrap().to_flat());
    let gram = &m * m.transpose();
    let y = gram.cholesky().expect("gram matrix is positive definite").solve(&c);
    let u_ls = -(m.transpose() * y);
    let residual = &c + &m * &u_ls;
    assert!(residual.norm() < 1e-9 * c.norm());
    let ls_sup = u_ls.amax();
    assert!(u.sup_norm() <= ls_sup * (1.0 + 1e-9), "{} vs {ls_sup}", u.sup_norm());
}

/// Distance from the origin to the reachable set of a single mode with
/// `|u| ≤ ν` on the whole domain, by support functions over a fine angle grid.
fn single_mode_distance(d: &SpectralDomain, p: &PhysicalParams, v0: &SpectralState, nu: f64, t: f64, n_time: usize) -> f64 {
    let c = evolve_adjoint(v0, d, p, t).unwrap().coeffs()[0];
    let dt = t / n_time as f64;
    let e1 = SpectralState::single_mode(1, 0, [1.0, 0.0]);
    let kernels: Vec<[f64; 2]> = (0..n_time)
        .map(|k| evolve_adjoint(&e1, d, p, t - (k as f64 + 0.5) * dt).unwrap().coeffs()[0])
        .collect();
    let mass = nu * d.l1_norm(d.mode_on_grid(0), None);
    (0..3600)
        .map(|i| {
            let (s, co) = (2.0 * PI * i as f64 / 3600.0).sin_cos();
            let reach: f64 = kernels.iter().map(|k| (co * k[0] + s * k[1]).abs()).sum::<f64>() * dt * mass;
            co * c[0] + s * c[1] - reach
        })
        .fold(0.0, f64::max)
}

#[test]
fn time_optimal_single_mode_matches_support_function_scan() {
    let d = interval(1, 64);
    let p = PhysicalParams::new(1.0, 1.0).unwrap();
    let v0 = SpectralState::single_mode(1, 0, [1.0, 0.0]);
    let (nu, radius, n_time) = (0.3, 0.3, 16);
    let problem = TimeOptimalProblem {
        domain: &d,
        params: p,
        v0: v0.clone(),
        omega: vec![true; 64],
        nu1: -nu,
        nu2: nu,
        radius,
        n_time,
    };
    let sol = solve_time_optimal(&problem, 2.0, 1e-4, TimeOptimalOptions::default()).unwrap();
    let oracle = (1..=2000)
        .map(|i| i as f64 * 1e-3)
        .find(|&t| single_mode_distance(&d, &p, &v0, nu, t, n_time) <= radius)
        .unwrap();
    assert!((sol.t_star - oracle).abs() <= 2e-3, "{} vs {oracle}", sol.t_star);
    assert!(sol.t_star < (1.0f64 / radius).ln());
    let (_, bang) = verify_bang_bang(&sol.control, -nu, nu, 0.05);
    assert!(bang);
}
