//! Controllability side: the observability constant `L`, `L∞` null controls
//! by duality and the time-optimal problem with a bang-bang check.
//!
//! The controlled system runs the transposed generator,
//! `v' = 𝒜* v + Bᵀ χ_D u`, discretized with piecewise-constant controls on
//! the space-time grid and midpoint propagators per time cell. The input map
//! `M` and the dual observation `G` are exact transposes of each other.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::SpaceTimeSet;
use crate::optim::{minimize_on_sphere, operator_norm, SphereOptions};
use crate::semigroup::{evolve, evolve_adjoint, mode_propagator, SpectralState};
use crate::spectral::{PhysicalParams, SpectralDomain};

/// Controls on a space-time grid (time-major), zero off the support.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    pub n_space: usize,
    pub n_time: usize,
    pub horizon: f64,
    pub values: Vec<f64>,
    pub support: Vec<bool>,
}

impl ControlField {
    pub fn zeros(n_space: usize, n_time: usize, horizon: f64, support: Vec<bool>) -> Self {
        Self { n_space, n_time, horizon, values: vec![0.0; n_space * n_time], support }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_time as f64
    }

    /// No value outside the support.
    pub fn respects_support(&self) -> bool {
        self.values.iter().zip(&self.support).all(|(&v, &s)| s || v == 0.0)
    }

    /// `ν₁ ≤ u ≤ ν₂` on the support.
    pub fn within_box(&self, nu1: f64, nu2: f64) -> bool {
        self.values
            .iter()
            .zip(&self.support)
            .all(|(&v, &s)| !s || (nu1 <= v && v <= nu2))
    }

    /// `x,t,value` rows (first coordinate of the cell center for rectangles,
    /// followed by the second as `y`).
    pub fn to_csv(&self, domain: &SpectralDomain) -> String {
        let centers = domain.cell_centers();
        let two_d = domain.dim() == 2;
        let mut out = String::from(if two_d { "x,y,t,value\n" } else { "x,t,value\n" });
        let dt = self.dt();
        for k in 0..self.n_time {
            let t = (k as f64 + 0.5) * dt;
            for (i, c) in centers.iter().enumerate() {
                let idx = k * self.n_space + i;
                if !self.support[idx] {
                    continue;
                }
                if two_d {
                    let _ = writeln!(out, "{},{},{},{}", c[0], c[1], t, self.values[idx]);
                } else {
                    let _ = writeln!(out, "{},{},{}", c[0], t, self.values[idx]);
                }
            }
        }
        out
    }
}

/// Piecewise-constant input map on a region of the space-time grid.
pub struct InputMap<'a> {
    domain: &'a SpectralDomain,
    n_time: usize,
    horizon: f64,
    weight: f64,
    region: Vec<bool>,
    /// `e^{𝒜*(T − s_k)}(1, 0)` per time cell and mode.
    kernels: Vec<[f64; 2]>,
    n_modes: usize,
}

impl<'a> InputMap<'a> {
    pub fn new(
        domain: &'a SpectralDomain,
        params: &PhysicalParams,
        n_modes: usize,
        n_time: usize,
        horizon: f64,
        region: Vec<bool>,
    ) -> Result<Self> {
        if region.len() != n_time * domain.n_cells() {
            return Err(Error::invalid("control region does not match the space-time grid"));
        }
        if n_modes > domain.n_modes() {
            return Err(Error::invalid("state has more modes than the domain"));
        }
        let dt = horizon / n_time as f64;
        let mut kernels = Vec::with_capacity(n_time * n_modes);
        for k in 0..n_time {
            let tau = horizon - (k as f64 + 0.5) * dt;
            for &lam in &domain.eigenvalues()[..n_modes] {
                let (d, c, s) = mode_propagator(params, lam, tau);
                kernels.push([d * c, d * s]);
            }
        }
        Ok(Self { domain, n_time, horizon, weight: domain.cell_volume() * dt, region, kernels, n_modes })
    }

    pub fn region(&self) -> &[bool] {
        &self.region
    }

    pub fn n_vars(&self) -> usize {
        self.region.len()
    }

    fn row(&self, k: usize) -> &[bool] {
        let n = self.domain.n_cells();
        &self.region[k * n..(k + 1) * n]
    }

    /// `M u = Σ_k e^{𝒜*(T−s_k)} (⟨w u_k χ_{D_k}, e_j⟩, 0)` as a flat state.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n_cells = self.domain.n_cells();
        let parts: Vec<Vec<f64>> = (0..self.n_time)
            .into_par_iter()
            .map(|k| {
                let mut out = vec![0.0; 2 * self.n_modes];
                let row = self.row(k);
                let uk = &u[k * n_cells..(k + 1) * n_cells];
                if !row.iter().any(|&m| m) {
                    return out;
                }
                for j in 0..self.n_modes {
                    let e = self.domain.mode_on_grid(j);
                    let f: f64 = (0..n_cells).filter(|&i| row[i]).map(|i| uk[i] * e[i]).sum::<f64>() * self.weight;
                    let kern = self.kernels[k * self.n_modes + j];
                    out[2 * j] = f * kern[0];
                    out[2 * j + 1] = f * kern[1];
                }
                out
            })
            .collect();
        let mut v = vec![0.0; 2 * self.n_modes];
        for p in parts {
            for (a, b) in v.iter_mut().zip(p) {
                *a += b;
            }
        }
        v
    }

    /// `(G z)_{ik} = (B e^{𝒜(T−s_k)} z)(x_i)` on the region, 0 elsewhere.
    pub fn observe(&self, z: &[f64]) -> Vec<f64> {
        let n_cells = self.domain.n_cells();
        let rows: Vec<Vec<f64>> = (0..self.n_time)
            .into_par_iter()
            .map(|k| {
                let row = self.row(k);
                if !row.iter().any(|&m| m) {
                    return vec![0.0; n_cells];
                }
                let coeffs: Vec<f64> = (0..self.n_modes)
                    .map(|j| {
                        let kern = self.kernels[k * self.n_modes + j];
                        kern[0] * z[2 * j] + kern[1] * z[2 * j + 1]
                    })
                    .collect();
                let mut field = self.domain.synthesize(&coeffs);
                field.iter_mut().zip(row).for_each(|(v, &m)| {
                    if !m {
                        *v = 0.0
                    }
                });
                field
            })
            .collect();
        rows.concat()
    }

    /// `Mᵀ v = w G v`.
    pub fn apply_t(&self, v: &[f64]) -> Vec<f64> {
        let mut g = self.observe(v);
        g.iter_mut().for_each(|x| *x *= self.weight);
        g
    }

    /// `Φ(z) = Σ w |G z|` and the sign pattern (sign(0) = +1) on the region.
    pub fn bulk(&self, z: &[f64]) -> (f64, Vec<f64>) {
        let g = self.observe(z);
        let mut phi = 0.0;
        let signs = g
            .iter()
            .zip(&self.region)
            .map(|(&v, &m)| {
                if !m {
                    return 0.0;
                }
                phi += v.abs();
                if v >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        (phi * self.weight, signs)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

// ---------------------------------------------------------------------------
// Observability constant

#[derive(Debug, Clone, PartialEq)]
pub struct LEstimate {
    /// `min ∫∫_D |y₁| / ‖y(T)‖` over the sampled unit initial data.
    pub l_hat: f64,
    pub argmin: SpectralState,
}

/// `∫∫_D |B e^{𝒜t} y| / ‖e^{𝒜T} y‖` and its gradient in `y` (flat).
fn l_ratio(map_obs: &InputMap<'_>, decay2: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let (phi, signs) = map_obs.bulk(y);
    let grad_phi = map_obs.apply(&signs);
    let n2: f64 = y.chunks(2).zip(decay2).map(|(p, d)| d * (p[0] * p[0] + p[1] * p[1])).sum();
    let n = n2.sqrt();
    if !(n > 0.0) {
        return (f64::NAN, vec![0.0; y.len()]);
    }
    let r = phi / n;
    let grad = grad_phi
        .iter()
        .enumerate()
        .map(|(idx, g)| (g - r * decay2[idx / 2] * y[idx] / n) / n)
        .collect();
    (r, grad)
}

/// Observation of `y₀ ↦ y(t)` over `D`: the map whose transposed-time twin is the
/// control input map. `(G y)_{ik} = (B e^{𝒜 t_k} y)(x_i)` is realized by an
/// input map over the time-reflected set with the same horizon.
pub fn estimate_l(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    n_modes: usize,
    d: &SpaceTimeSet,
    opts: SphereOptions,
) -> Result<LEstimate> {
    if d.count() == 0 {
        return Err(Error::invalid("the observation set is empty"));
    }
    let reflected = d.time_reflected();
    let map = InputMap::new(domain, params, n_modes, d.n_time(), d.horizon(), reflected.mask().to_vec())?;
    let decay2: Vec<f64> = domain.eigenvalues()[..n_modes]
        .iter()
        .map(|&l| (-2.0 * params.a() * l * d.horizon()).exp())
        .collect();
    let res = minimize_on_sphere(2 * n_modes, opts, &[], |y| l_ratio(&map, &decay2, y))?;
    if !(res.value > 0.0) {
        return Err(Error::Violation(format!("estimated L = {} is not positive", res.value)));
    }
    Ok(LEstimate { l_hat: res.value, argmin: SpectralState::from_flat(&res.point) })
}

/// `∫∫_D |B e^{𝒜t} y| / ‖e^{𝒜T} y‖` for one `y`.
pub fn l_ratio_at(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    y: &SpectralState,
) -> Result<f64> {
    let reflected = d.time_reflected();
    let map = InputMap::new(domain, params, y.n_modes(), d.n_time(), d.horizon(), reflected.mask().to_vec())?;
    let (phi, _) = map.bulk(&y.to_flat());
    Ok(phi / evolve(y, domain, params, d.horizon())?.norm())
}

// ---------------------------------------------------------------------------
// Null control by duality

#[derive(Debug, Clone, PartialEq)]
pub struct DualityCertificate {
    /// Minimizer of `J` (after the optimal rescaling along its ray).
    pub z_star: SpectralState,
    pub dual_value: f64,
    /// `‖v(T)‖` of the forward simulation with the synthesized control.
    pub terminal_norm: f64,
    pub initial_norm: f64,
    /// `L̂` used in the bound: the smallest ratio seen by the estimator and
    /// at the dual minimizer.
    pub l_hat: f64,
    /// `L̂⁻¹ ‖v₀‖`.
    pub control_bound: f64,
    pub sup_norm: f64,
    /// Dual subgradient iterations.
    pub iterations: usize,
    /// Projected-gradient steps spent polishing the recovered control.
    pub polish_iterations: usize,
}

impl DualityCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.terminal_norm <= tol * self.initial_norm && self.sup_norm <= self.control_bound * (1.0 + 1e-6)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullControlOptions {
    pub max_iter: usize,
    pub polish_iter: usize,
    pub l_restarts: usize,
    pub seed: u64,
}

impl Default for NullControlOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, polish_iter: 20_000, l_restarts: 64, seed: 0 }
    }
}

pub struct NullControlProblem<'a> {
    pub domain: &'a SpectralDomain,
    pub params: PhysicalParams,
    pub v0: SpectralState,
    pub d: SpaceTimeSet,
}

/// `J(z) = ½ Φ(z)² + ⟨c, z⟩` with `c = e^{𝒜*T} v₀`.
struct Dual<'a> {
    map: InputMap<'a>,
    c: Vec<f64>,
}

struct DualEval {
    value: f64,
    phi: f64,
    signs: Vec<f64>,
    /// `c + Φ M s`: a subgradient of `J`, and `v(T)` for `u = Φ s`.
    subgradient: Vec<f64>,
}

impl Dual<'_> {
    fn eval(&self, z: &[f64]) -> DualEval {
        let (phi, signs) = self.map.bulk(z);
        let ms = self.map.apply(&signs);
        let subgradient = self.c.iter().zip(&ms).map(|(c, m)| c + phi * m).collect();
        DualEval { value: 0.5 * phi * phi + dot(&self.c, z), phi, signs, subgradient }
    }

    /// Optimal point on the ray through `z`: `t = −⟨c, z⟩ / Φ(z)²` (0 if negative).
    fn rescale(&self, z: &[f64]) -> Vec<f64> {
        let (phi, _) = self.map.bulk(z);
        let cz = dot(&self.c, z);
        if !(phi > 0.0) || cz >= 0.0 {
            return vec![0.0; z.len()];
        }
        let t = -cz / (phi * phi);
        z.iter().map(|v| t * v).collect()
    }
}

/// Synthesizes `u = Φ(z*) sign(G z*) χ_D` from an approximate minimizer of
/// the dual functional and certifies `‖v(T)‖ ≤ tol ‖v₀‖`, `‖u‖∞ ≤ L̂⁻¹‖v₀‖`.
pub fn synthesize_null_control(
    problem: &NullControlProblem<'_>,
    tol: f64,
    opts: NullControlOptions,
) -> Result<(ControlField, DualityCertificate)> {
    if !(tol > 1e-6 && tol < 1e-1) {
        return Err(Error::invalid(format!("tol must lie in (1e-6, 1e-1), got {tol}")));
    }
    let (domain, params, d) = (problem.domain, &problem.params, &problem.d);
    if d.count() == 0 {
        return Err(Error::invalid("the control region is empty"));
    }
    let n_modes = problem.v0.n_modes();
    let v0_norm = problem.v0.norm();
    let horizon = d.horizon();
    let map = InputMap::new(domain, params, n_modes, d.n_time(), horizon, d.mask().to_vec())?;
    if v0_norm == 0.0 {
        let u = ControlField::zeros(domain.n_cells(), d.n_time(), horizon, d.mask().to_vec());
        let cert = DualityCertificate {
            z_star: SpectralState::zeros(n_modes),
            dual_value: 0.0,
            terminal_norm: 0.0,
            initial_norm: 0.0,
            l_hat: f64::INFINITY,
            control_bound: 0.0,
            sup_norm: 0.0,
            iterations: 0,
            polish_iterations: 0,
        };
        return Ok((u, cert));
    }
    let c = evolve_adjoint(&problem.v0, domain, params, horizon)?.to_flat();
    let dual = Dual { map, c };

    // Diagonal preconditioner from the mode decay rates.
    let precond: Vec<f64> = domain.eigenvalues()[..n_modes]
        .iter()
        .flat_map(|&l| {
            let s = (params.a() * l).max(1.0);
            [s * s, s * s]
        })
        .collect();

    let mut z: Vec<f64> = dual.c.iter().zip(&precond).map(|(c, p)| -c * p).collect();
    z = dual.rescale(&z);
    let mut ev = dual.eval(&z);
    let step0 = line_probe(&dual, &z, &ev, &precond);

    let mut best_z = z.clone();
    let mut best_res = norm(&ev.subgradient);
    let mut avg = z.clone();
    let mut iterations = 0;
    let target = tol * v0_norm;
    for k in 0..opts.max_iter {
        iterations = k + 1;
        if best_res <= target {
            break;
        }
        let step = step0 / ((k + 1) as f64).sqrt();
        for ((zi, gi), pi) in z.iter_mut().zip(&ev.subgradient).zip(&precond) {
            *zi -= step * pi * gi;
        }
        ev = dual.eval(&z);
        let res = norm(&ev.subgradient);
        if res < best_res {
            best_res = res;
            best_z.clone_from(&z);
        }
        let w = 1.0 / (k + 2) as f64;
        avg.iter_mut().zip(&z).for_each(|(a, v)| *a += w * (v - *a));
        if (k + 1) % 50 == 0 {
            let ra = dual.rescale(&avg);
            let eva = dual.eval(&ra);
            let r = norm(&eva.subgradient);
            if r < best_res {
                best_res = r;
                best_z = ra;
            }
        }
        let zr = dual.rescale(&z);
        let evr = dual.eval(&zr);
        let r = norm(&evr.subgradient);
        if r < best_res {
            best_res = r;
            best_z = zr;
        }
    }
    let best_z = {
        let r = dual.rescale(&best_z);
        if r.iter().any(|v| *v != 0.0) { r } else { best_z }
    };
    let best = dual.eval(&best_z);
    let bound = best.phi;
    let mut control = ControlField::zeros(domain.n_cells(), d.n_time(), horizon, d.mask().to_vec());
    for (v, s) in control.values.iter_mut().zip(&best.signs) {
        *v = bound * s;
    }
    let mut terminal_norm = simulate_controlled(domain, params, &problem.v0, &control)?.norm();
    let mut polish_iterations = 0;
    if terminal_norm > target && bound > 0.0 {
        let run = box_least_squares(&dual.map, &dual.c, -bound, bound, control.values.clone(), opts.polish_iter, |f, _| {
            f <= 0.5 * target * target
        });
        polish_iterations = run.iterations;
        control.values = run.u;
        terminal_norm = simulate_controlled(domain, params, &problem.v0, &control)?.norm();
    }
    if terminal_norm > target {
        return Err(Error::Convergence {
            context: "null control (dual subgradient and primal polishing)".into(),
            iterations: iterations + polish_iterations,
            best_residual: terminal_norm / v0_norm,
        });
    }
    let l_est = estimate_l(
        domain,
        params,
        n_modes,
        &d.time_reflected(),
        SphereOptions { restarts: opts.l_restarts, seed: opts.seed, ..Default::default() },
    )?;
    let z_state = SpectralState::from_flat(&best_z);
    let at_z = {
        let n = evolve(&z_state, domain, params, horizon)?.norm();
        if n > 0.0 {
            best.phi / n
        } else {
            f64::INFINITY
        }
    };
    let l_hat = l_est.l_hat.min(at_z);
    let cert = DualityCertificate {
        z_star: z_state,
        dual_value: best.value,
        terminal_norm,
        initial_norm: v0_norm,
        l_hat,
        control_bound: v0_norm / l_hat,
        sup_norm: control.sup_norm(),
        iterations,
        polish_iterations,
    };
    if !(cert.sup_norm <= cert.control_bound * (1.0 + 1e-6)) {
        return Err(Error::Violation(format!(
            "‖u‖∞ = {} exceeds L̂⁻¹‖v₀‖ = {}",
            cert.sup_norm, cert.control_bound
        )));
    }
    Ok((control, cert))
}

/// Golden-section minimization of `J` along `−P g` from `z`.
fn line_probe(dual: &Dual<'_>, z: &[f64], ev: &DualEval, precond: &[f64]) -> f64 {
    let dir: Vec<f64> = ev.subgradient.iter().zip(precond).map(|(g, p)| -g * p).collect();
    let j = |a: f64| {
        let y: Vec<f64> = z.iter().zip(&dir).map(|(zi, di)| zi + a * di).collect();
        dual.eval(&y).value
    };
    let mut hi = 1e-6;
    let base = j(0.0);
    while j(hi) < base && hi < 1e12 {
        hi *= 4.0;
    }
    let (mut lo, mut hi) = (0.0, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if j(x1) < j(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

/// `v(T) = e^{𝒜*T} v₀ + M u` for a control on the full space-time grid.
pub fn simulate_controlled(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    v0: &SpectralState,
    u: &ControlField,
) -> Result<SpectralState> {
    let map = InputMap::new(domain, params, v0.n_modes(), u.n_time, u.horizon, u.support.clone())?;
    let free = evolve_adjoint(v0, domain, params, u.horizon)?.to_flat();
    let forced = map.apply(&u.values);
    Ok(SpectralState::from_flat(&free.iter().zip(&forced).map(|(a, b)| a + b).collect::<Vec<_>>()))
}

/// Relative defect of `⟨v(T), z⟩ = ⟨v₀, e^{𝒜T}z⟩ + Σ w u G z` for one dual probe.
pub fn duality_defect(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    v0: &SpectralState,
    u: &ControlField,
    z: &SpectralState,
) -> Result<f64> {
    let map = InputMap::new(domain, params, v0.n_modes(), u.n_time, u.horizon, u.support.clone())?;
    let vt = simulate_controlled(domain, params, v0, u)?;
    let lhs = vt.dot(z);
    let free = v0.dot(&evolve(z, domain, params, u.horizon)?);
    let g = map.apply_t(&z.to_flat());
    let forced: f64 = u.values.iter().zip(&g).map(|(a, b)| a * b).sum();
    let rhs = free + forced;
    let scale = lhs.abs().max(free.abs()).max(forced.abs()).max(1e-300);
    Ok((lhs - rhs).abs() / scale)
}

// ---------------------------------------------------------------------------
// Time-optimal control

pub struct TimeOptimalProblem<'a> {
    pub domain: &'a SpectralDomain,
    pub params: PhysicalParams,
    pub v0: SpectralState,
    /// Spatial control region `ω`.
    pub omega: Vec<bool>,
    pub nu1: f64,
    pub nu2: f64,
    /// Radius of the target ball around the origin.
    pub radius: f64,
    /// Time cells used at every candidate horizon.
    pub n_time: usize,
}

impl TimeOptimalProblem<'_> {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu1 < self.nu2) {
            return Err(Error::invalid(format!("need ν₁ < ν₂, got ν₁ = {}, ν₂ = {}", self.nu1, self.nu2)));
        }
        if !(self.radius > 0.0) {
            return Err(Error::invalid(format!("target radius must be positive, got {}", self.radius)));
        }
        if self.v0.norm() <= self.radius {
            return Err(Error::invalid("the initial state already lies in the target ball"));
        }
        if self.omega.len() != self.domain.n_cells() || !self.omega.iter().any(|&m| m) {
            return Err(Error::invalid("ω must be a nonempty mask on the grid"));
        }
        if self.n_time == 0 {
            return Err(Error::invalid("need at least one time cell"));
        }
        Ok(())
    }

    fn region(&self) -> Vec<bool> {
        (0..self.n_time).flat_map(|_| self.omega.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub horizon: f64,
    pub feasible: bool,
    /// `‖v(T)‖` reached by the returned control.
    pub reached: f64,
    /// Certified lower bound on the minimal `‖v(T)‖` (Frank-Wolfe gap).
    pub lower_bound: f64,
    pub iterations: usize,
    pub control: ControlField,
}

/// Minimizes `½‖c_T + M u‖²` over `ν₁ ≤ u ≤ ν₂` by projected gradient with
/// step `1/‖M‖²`. With `decide`, stops as soon as the target is reached or
/// the Frank-Wolfe bound proves it unreachable.
pub fn feasibility(problem: &TimeOptimalProblem<'_>, horizon: f64, max_iter: usize, decide: bool) -> Result<Feasibility> {
    problem.validate()?;
    let domain = problem.domain;
    let n_modes = problem.v0.n_modes();
    let map = InputMap::new(domain, &problem.params, n_modes, problem.n_time, horizon, problem.region())?;
    let c = evolve_adjoint(&problem.v0, domain, &problem.params, horizon)?.to_flat();
    let u0: Vec<f64> = map.region().iter().map(|&m| if m { 0.0f64.clamp(problem.nu1, problem.nu2) } else { 0.0 }).collect();
    let half_r2 = 0.5 * problem.radius * problem.radius;
    let run = box_least_squares(&map, &c, problem.nu1, problem.nu2, u0, max_iter, |f, lower| {
        decide && (f <= half_r2 || lower > half_r2)
    });
    let reached = norm(&run.residual);
    let control = ControlField {
        n_space: domain.n_cells(),
        n_time: problem.n_time,
        horizon,
        values: run.u,
        support: map.region().to_vec(),
    };
    Ok(Feasibility {
        horizon,
        feasible: reached <= problem.radius,
        reached,
        lower_bound: (2.0 * run.lower.max(0.0)).sqrt(),
        iterations: run.iterations,
        control,
    })
}

struct BoxRun {
    u: Vec<f64>,
    residual: Vec<f64>,
    iterations: usize,
    /// Frank-Wolfe lower bound on `min ½‖c + Mu‖²`.
    lower: f64,
}

/// Projected gradient for `min ½‖c + M u‖²` over `lo ≤ u ≤ hi` on the region,
/// step `1/‖M‖²`. `stop(f, lower)` is consulted before every step.
fn box_least_squares(
    map: &InputMap<'_>,
    c: &[f64],
    lo: f64,
    hi: f64,
    mut u: Vec<f64>,
    max_iter: usize,
    stop: impl Fn(f64, f64) -> bool,
) -> BoxRun {
    let region = map.region();
    let n = map.n_vars();
    let lip = operator_norm(n, |x| map.apply(x), |v| map.apply_t(v), 200, 7).powi(2);
    let step = if lip > 0.0 { 1.0 / lip } else { 0.0 };
    let mut iterations = 0;
    let mut lower = 0.0f64;
    loop {
        let mu = map.apply(&u);
        let v: Vec<f64> = c.iter().zip(&mu).map(|(a, b)| a + b).collect();
        let f = 0.5 * dot(&v, &v);
        let grad = map.apply_t(&v);
        // Frank-Wolfe vertex and gap.
        let mut gap = 0.0;
        for i in 0..n {
            if region[i] {
                let s = if grad[i] > 0.0 { lo } else { hi };
                gap += grad[i] * (u[i] - s);
            }
        }
        lower = lower.max(f - gap);
        if stop(f, lower) || iterations >= max_iter || gap <= 1e-14 * f.max(1e-300) {
            return BoxRun { u, residual: v, iterations, lower };
        }
        for i in 0..n {
            if region[i] {
                u[i] = (u[i] - step * grad[i]).clamp(lo, hi);
            }
        }
        iterations += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeOptimalSolution {
    pub t_star: f64,
    pub control: ControlField,
    pub terminal_norm: f64,
    /// `(T, feasible)` in evaluation order.
    pub trace: Vec<(f64, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOptimalOptions {
    pub feasibility_iter: usize,
    pub polish_iter: usize,
}

impl Default for TimeOptimalOptions {
    fn default() -> Self {
        Self { feasibility_iter: 5_000, polish_iter: 50_000 }
    }
}

/// Bisection on `T ∈ (0, T_max]` for the smallest feasible horizon.
pub fn solve_time_optimal(
    problem: &TimeOptimalProblem<'_>,
    t_max: f64,
    tol_t: f64,
    opts: TimeOptimalOptions,
) -> Result<TimeOptimalSolution> {
    problem.validate()?;
    if !(t_max > 0.0 && tol_t > 0.0) {
        return Err(Error::invalid("T_max and tol_T must be positive"));
    }
    let mut trace = Vec::new();
    let top = feasibility(problem, t_max, opts.feasibility_iter, true)?;
    trace.push((t_max, top.feasible));
    if !top.feasible {
        return Err(Error::Infeasible(format!(
            "target radius {} not reached at T_max = {t_max}: best ‖v(T)‖ = {:.6}, certified lower bound {:.6}",
            problem.radius, top.reached, top.lower_bound
        )));
    }
    let (mut lo, mut hi) = (0.0, t_max);
    while hi - lo > tol_t {
        let mid = 0.5 * (lo + hi);
        let f = feasibility(problem, mid, opts.feasibility_iter, true)?;
        trace.push((mid, f.feasible));
        if f.feasible {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for &(t, feas) in &trace {
        if feas && trace.iter().any(|&(s, g)| !g && s >= t) {
            return Err(Error::Violation(format!("feasibility is not monotone in T around {t}")));
        }
    }
    let polished = feasibility(problem, hi, opts.polish_iter, false)?;
    if !polished.feasible {
        return Err(Error::Numerical(format!("polished control at T = {hi} misses the target")));
    }
    Ok(TimeOptimalSolution { t_star: hi, terminal_norm: polished.reached, control: polished.control, trace })
}

/// Fraction of region cells with `u ∈ (ν₁ + ε, ν₂ − ε)`; holds if ≤ 5%.
pub fn verify_bang_bang(u: &ControlField, nu1: f64, nu2: f64, eps: f64) -> (f64, bool) {
    let cells = u.support.iter().filter(|&&s| s).count();
    if cells == 0 {
        return (0.0, true);
    }
    let interior = u
        .values
        .iter()
        .zip(&u.support)
        .filter(|(&v, &s)| s && v > nu1 + eps && v < nu2 - eps)
        .count();
    let fraction = interior as f64 / cells as f64;
    (fraction, fraction <= 0.05)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task_rng;
    use rand::Rng;
    use std::f64::consts::PI;

    fn setup(n_modes: usize, cells: usize) -> (SpectralDomain, PhysicalParams) {
        (SpectralDomain::interval(PI, n_modes, cells).unwrap(), PhysicalParams::new(1.0, 1.0).unwrap())
    }

    #[test]
    fn input_map_transpose() {
        let (d, p) = setup(4, 64);
        let region: Vec<bool> = (0..16 * 64).map(|i| i % 3 != 0).collect();
        let map = InputMap::new(&d, &p, 4, 16, 1.0, region).unwrap();
        let mut rng = task_rng(1, 0);
        let u: Vec<f64> = (0..16 * 64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = dot(&map.apply(&u), &z);
        let rhs = dot(&u, &map.apply_t(&z));
        assert!((lhs - rhs).abs() < 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn zero_control_contracts() {
        let (d, p) = setup(8, 128);
        let v0 = SpectralState::new((0..8).map(|j| [1.0 / (j + 1) as f64, -0.5]).collect());
        let u = ControlField::zeros(128, 10, 0.7, vec![true; 1280]);
        let vt = simulate_controlled(&d, &p, &v0, &u).unwrap();
        assert!(vt.norm() <= (-0.7f64).exp() * v0.norm() + 1e-12);
    }

    #[test]
    fn single_mode_l_matches_phase_scan() {
        let (d, p) = setup(1, 256);
        let set = SpaceTimeSet::full(&d, 128, 1.0).unwrap();
        let est = estimate_l(&d, &p, 1, &set, SphereOptions { restarts: 16, ..Default::default() }).unwrap();
        // Midpoint time quadrature of e^{−t}|cos(t + φ)| on the same cells, fine phase scan.
        let e1 = d.l1_norm(d.mode_on_grid(0), None);
        let oracle = (0..3600)
            .map(|i| {
                let phi = PI * i as f64 / 3600.0;
                let dt = 1.0 / 128.0;
                let integral: f64 = (0..128)
                    .map(|k| {
                        let t = (k as f64 + 0.5) * dt;
                        (-t).exp() * (t + phi).cos().abs() * dt
                    })
                    .sum();
                integral * e1 / (-1.0f64).exp()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((est.l_hat - oracle).abs() <= 1e-3 * oracle, "{} vs {oracle}", est.l_hat);
        let half = SpaceTimeSet::from_fn(&d, 128, 1.0, |_, k| k < 64).unwrap();
        let est_half = estimate_l(&d, &p, 1, &half, SphereOptions { restarts: 16, ..Default::default() }).unwrap();
        assert!(est_half.l_hat <= est.l_hat);
    }

    #[test]
    fn zero_initial_state_gives_zero_control() {
        let (d, p) = setup(4, 64);
        let problem = NullControlProblem {
            domain: &d,
            params: p,
            v0: SpectralState::zeros(4),
            d: SpaceTimeSet::full(&d, 16, 1.0).unwrap(),
        };
        let (u, cert) = synthesize_null_control(&problem, 1e-2, NullControlOptions::default()).unwrap();
        assert_eq!(u.sup_norm(), 0.0);
        assert!(cert.holds(1e-2));
    }

    #[test]
    fn null_control_first_mode() {
        let (d, p) = setup(8, 128);
        let problem = NullControlProblem {
            domain: &d,
            params: p,
            v0: SpectralState::single_mode(8, 0, [1.0, 0.0]),
            d: SpaceTimeSet::full(&d, 64, 1.0).unwrap(),
        };
        let opts = NullControlOptions { l_restarts: 16, ..Default::default() };
        let (u, cert) = synthesize_null_control(&problem, 1e-2, opts).unwrap();
        assert!(cert.holds(1e-2), "{cert:?}");
        assert!(u.respects_support());
        let mut rng = task_rng(3, 0);
        for _ in 0..20 {
            let z = SpectralState::new((0..8).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect());
            assert!(duality_defect(&d, &p, &problem.v0, &u, &z).unwrap() < 1e-8);
        }
    }

    #[test]
    fn bang_bang_measurement() {
        let mut u = ControlField::zeros(10, 10, 1.0, vec![true; 100]);
        u.values.iter_mut().for_each(|v| *v = 2.0);
        assert_eq!(verify_bang_bang(&u, -2.0, 2.0, 0.2), (0.0, true));
        for v in u.values.iter_mut().take(20) {
            *v = 0.3;
        }
        let (f, ok) = verify_bang_bang(&u, -2.0, 2.0, 0.2);
        assert!((f - 0.2).abs() < 1e-15 && !ok);
    }

    #[test]
    fn time_optimal_validation() {
        let (d, p) = setup(1, 32);
        let base = |nu1: f64, nu2: f64, r: f64| TimeOptimalProblem {
            domain: &d,
            params: p,
            v0: SpectralState::single_mode(1, 0, [1.0, 0.0]),
            omega: vec![true; 32],
            nu1,
            nu2,
            radius: r,
            n_time: 16,
        };
        assert!(base(1.0, 1.0, 0.1).validate().is_err());
        assert!(base(-1.0, 1.0, 0.0).validate().is_err());
        assert!(base(-1.0, 1.0, 2.0).validate().is_err());
        assert!(base(-1.0, 1.0, 0.1).validate().is_ok());
    }

    #[test]
    fn free_decay_reaches_target() {
        let (d, p) = setup(1, 32);
        let problem = TimeOptimalProblem {
            domain: &d,
            params: p,
            v0: SpectralState::single_mode(1, 0, [1.0, 0.0]),
            omega: vec![true; 32],
            nu1: -0.1,
            nu2: 0.1,
            radius: (-0.05f64).exp(),
            n_time: 16,
        };
        let sol = solve_time_optimal(&problem, 1.0, 1e-3, TimeOptimalOptions::default()).unwrap();
        assert!(sol.t_star <= 0.05 + 1e-3);
    }
}
