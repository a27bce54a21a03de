//! Empirical checks of the observability inequalities: the spectral `L¹`
//! constant, the ε-form / product-form equivalence, the integral-type
//! interpolation inequality with fitted constants, the pointwise-in-time
//! counterexamples, the full-observation pointwise inequality and the
//! telescoping chain.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{find_density_point, telescoping_sequence_beta, Ball, DensitySequence, SpaceTimeSet, TimeMask};
use crate::optim::{bisect_threshold, minimize_on_sphere, SphereOptions};
use crate::semigroup::{
    evolve, evolve_unchecked, first_component_coeffs, observe, observed_trace_l1, ObservationSelector,
    SpectralState,
};
use crate::spectral::{PhysicalParams, SpectralDomain};

const SLACK: f64 = 1e-9;

/// `θ ∈ (0, 1)`, `γ = θ/(1 − θ)` and the window `0 < S₁ < S₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationParams {
    pub theta: f64,
    pub gamma: f64,
    pub s1: f64,
    pub s2: f64,
}

impl InterpolationParams {
    pub fn new(theta: f64, s1: f64, s2: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::invalid(format!("θ must lie in (0, 1), got {theta}")));
        }
        if !(s1 > 0.0 && s1 < s2 && s2.is_finite()) {
            return Err(Error::invalid(format!("need 0 < S₁ < S₂, got S₁ = {s1}, S₂ = {s2}")));
        }
        Ok(Self { theta, gamma: theta / (1.0 - theta), s1, s2 })
    }

    /// `M e^{M(S₂/(1−θ) + 1/(θS₁))} / e_measure³`.
    pub fn k_template(&self, m: f64, e_measure: f64) -> f64 {
        m * (m * self.exponent()).exp() / e_measure.powi(3)
    }

    fn exponent(&self) -> f64 {
        self.s2 / (1.0 - self.theta) + 1.0 / (self.theta * self.s1)
    }

    /// Smallest `M` with `k_template(M) ≥ k`.
    pub fn implied_m(&self, k: f64, e_measure: f64) -> f64 {
        solve_m_exp(k * e_measure.powi(3), self.exponent())
    }
}

/// Root of `M e^{cM} = target` (0 for a nonpositive target).
fn solve_m_exp(target: f64, c: f64) -> f64 {
    if !(target > 0.0) {
        return 0.0;
    }
    let f = |m: f64| m.ln() + c * m >= target.ln();
    let mut hi = 1.0;
    while !f(hi) {
        hi *= 2.0;
    }
    bisect_threshold(0.0, hi, 1e-14, f)
}

/// Gaussian coefficients, normalized to `‖z‖ = 1`.
pub fn random_unit_state<R: Rng>(n_modes: usize, rng: &mut R) -> SpectralState {
    loop {
        let coeffs: Vec<[f64; 2]> = (0..n_modes)
            .map(|_| [StandardNormal.sample(rng), StandardNormal.sample(rng)])
            .collect();
        let z = SpectralState::new(coeffs);
        let n = z.norm();
        if n > 0.0 {
            return z.scaled(1.0 / n);
        }
    }
}

// ---------------------------------------------------------------------------
// Spectral L¹ constant

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralL1Constant {
    pub lambda: f64,
    /// `k_λ`, the dimension of the coefficient sphere.
    pub k: usize,
    /// `min ‖χ_ω Σ a_i e_i‖_{L¹}` over `Σ a_i² = 1`.
    pub min_l1: f64,
    /// `1 / min_l1²`.
    pub inverse_square: f64,
    /// Smallest `c` with `c e^{c√λ} ≥ 1 / min_l1²`.
    pub c_hat: f64,
    pub argmin: Vec<f64>,
}

/// `‖χ_ω Σ a_i e_i‖_{L¹}` and a subgradient in `a`.
pub fn masked_l1_with_gradient(domain: &SpectralDomain, omega: &[bool], a: &[f64]) -> (f64, Vec<f64>) {
    let field = domain.synthesize(a);
    let w = domain.cell_volume();
    let mut value = 0.0;
    let mut grad = vec![0.0; a.len()];
    for (i, (&u, _)) in field.iter().zip(omega).enumerate().filter(|(_, (_, &m))| m) {
        value += u.abs() * w;
        let s = if u >= 0.0 { w } else { -w };
        for (j, g) in grad.iter_mut().enumerate() {
            *g += s * domain.mode_on_grid(j)[i];
        }
    }
    (value, grad)
}

/// Estimates the Lebeau-Robbiano `L¹` constant at frequency `λ` on `ω`.
/// `extra_starts` seed the restarts (useful to warm-start nested sets).
pub fn estimate_spectral_l1_constant(
    domain: &SpectralDomain,
    lambda: f64,
    omega: &[bool],
    restarts: usize,
    seed: u64,
    extra_starts: &[Vec<f64>],
) -> Result<SpectralL1Constant> {
    if omega.len() != domain.n_cells() {
        return Err(Error::invalid("ω mask does not match the grid"));
    }
    if !omega.iter().any(|&m| m) {
        return Err(Error::invalid("ω is empty"));
    }
    let k = domain.count_below(lambda)?;
    let opts = SphereOptions { restarts, seed, max_iter: 600, ..Default::default() };
    let res = minimize_on_sphere(k, opts, extra_starts, |a| masked_l1_with_gradient(domain, omega, a))?;
    if !(res.value > 0.0) {
        return Err(Error::Numerical(format!("minimal L¹ norm {} is not positive", res.value)));
    }
    let inverse_square = 1.0 / (res.value * res.value);
    let sq = lambda.sqrt();
    Ok(SpectralL1Constant {
        lambda,
        k,
        min_l1: res.value,
        inverse_square,
        c_hat: solve_m_exp(inverse_square, sq),
        argmin: res.point,
    })
}

// ---------------------------------------------------------------------------
// ε-form versus product form

/// Values `(F₁(h), F₂(h), F₃(h))` at one probe.
pub type Probe = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub pi2: f64,
    /// The ε-form holds on every probe over the grid (plus each probe's
    /// balancing point `ε* = (F₂/F₃)^{1/(γ+1)}`).
    pub eps_form_holds: bool,
    pub product_form_holds: bool,
    /// Worst `F₁ / (F₂^{1−θ} F₃^θ)` over probes with a positive denominator.
    pub worst_ratio: f64,
}

/// ε-form check on one probe: the grid, plus `ε*` when `0 < F₂ < F₃`; when
/// `F₂ = 0` the infimum over `(0, 1)` is 0 and `F₁` must vanish.
pub fn eps_form_holds(pi1: f64, gamma: f64, probe: &Probe, eps_grid: &[f64]) -> bool {
    let [f1, f2, f3] = *probe;
    if f2 == 0.0 {
        return f1 == 0.0;
    }
    let bound = |e: f64| pi1 * (e.powf(-gamma) * f2 + e * f3);
    let on_grid = eps_grid.iter().all(|&e| f1 <= bound(e) * (1.0 + SLACK));
    let at_star = if f3 > f2 { f1 <= bound((f2 / f3).powf(1.0 / (gamma + 1.0))) * (1.0 + SLACK) } else { true };
    on_grid && at_star
}

/// Log-spaced `ε` values in `[1e-6, 1)`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..200).map(|i| 10f64.powf(-6.0 + 6.0 * i as f64 / 200.0)).collect()
}

/// Checks the product form with `Π₂ = 2Π₁` on the probes. Errors with
/// [`Error::Violation`] if the ε-form held but the product form did not.
pub fn interp_equivalence(pi1: f64, theta: f64, probes: &[Probe], eps_grid: &[f64]) -> Result<EquivalenceReport> {
    if !(pi1 >= 1.0 && pi1.is_finite()) {
        return Err(Error::invalid(format!("Π₁ must be at least 1, got {pi1}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("θ must lie in (0, 1), got {theta}")));
    }
    if let Some(p) = probes.iter().find(|p| p.iter().any(|&v| !(v >= 0.0)) || p[0] > p[2]) {
        return Err(Error::invalid(format!("probe {p:?} violates 0 ≤ F₁ ≤ F₃")));
    }
    let gamma = theta / (1.0 - theta);
    let pi2 = 2.0 * pi1;
    let eps_ok = probes.iter().all(|p| eps_form_holds(pi1, gamma, p, eps_grid));
    let mut worst = 0.0f64;
    let mut product_ok = true;
    for &[f1, f2, f3] in probes {
        let denom = f2.powf(1.0 - theta) * f3.powf(theta);
        if denom > 0.0 {
            worst = worst.max(f1 / denom);
        }
        product_ok &= f1 <= pi2 * denom * (1.0 + SLACK);
    }
    if eps_ok && !product_ok {
        return Err(Error::Violation(format!(
            "ε-form holds with Π₁ = {pi1} but the product form fails with Π₂ = {pi2}"
        )));
    }
    Ok(EquivalenceReport { pi2, eps_form_holds: eps_ok, product_form_holds: product_ok, worst_ratio: worst })
}

/// Probe values of a random triple on `R⁴`: `F₂(h) = |⟨w, h⟩|`,
/// `F₃(h) = s‖h‖`, `F₁ = min(F₃, κ F₂^{1−θ} F₃^θ)`.
pub fn random_functional_triple<R: Rng>(theta: f64, n_probes: usize, rng: &mut R) -> Vec<Probe> {
    let w: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
    let s: f64 = rng.random_range(0.2..3.0);
    let kappa: f64 = rng.random_range(0.0..2.5);
    (0..n_probes)
        .map(|_| {
            let h: Vec<f64> = (0..4).map(|_| StandardNormal.sample(rng)).collect();
            let f2 = w.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>().abs();
            let f3 = s * h.iter().map(|v| v * v).sum::<f64>().sqrt();
            let f1 = f3.min(kappa * f2.powf(1.0 - theta) * f3.powf(theta));
            [f1, f2, f3]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Observation profiles

/// `t_k ↦ ‖χ_{D_{t_k}} 𝔅 e^{𝒜 t_k} z‖_{L¹}` at the time-cell midpoints.
pub fn observation_profile(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    sel: ObservationSelector,
    d: &SpaceTimeSet,
) -> Result<Vec<f64>> {
    if d.n_space() != domain.n_cells() {
        return Err(Error::invalid("observation set grid does not match the domain"));
    }
    let dt = d.dt();
    (0..d.n_time())
        .map(|k| {
            let row = d.row(k);
            if !row.iter().any(|&m| m) {
                return Ok(0.0);
            }
            observed_trace_l1(state, domain, params, sel, (k as f64 + 0.5) * dt, Some(row))
        })
        .collect()
}

/// First-selector profile, skipping validation (hot loops).
fn first_profile(state: &SpectralState, domain: &SpectralDomain, params: &PhysicalParams, d: &SpaceTimeSet) -> Vec<f64> {
    let dt = d.dt();
    let mut field = vec![0.0; domain.n_cells()];
    (0..d.n_time())
        .map(|k| {
            let row = d.row(k);
            if !row.iter().any(|&m| m) {
                return 0.0;
            }
            let c = first_component_coeffs(state, domain, params, (k as f64 + 0.5) * dt);
            domain.synthesize_into(&c, &mut field);
            domain.l1_norm(&field, Some(row))
        })
        .collect()
}

/// `∫_lo^hi χ_E(t) p(t) dt` for a per-cell profile, partial cells weighted by overlap.
pub fn window_integral(profile: &[f64], e: &TimeMask, lo: f64, hi: f64) -> f64 {
    let dt = e.dt();
    (0..e.n_cells())
        .filter(|&k| e.cell(k) && profile[k] != 0.0)
        .map(|k| {
            let a = (k as f64 * dt).max(lo);
            let b = ((k + 1) as f64 * dt).min(hi);
            if b > a {
                profile[k] * (b - a)
            } else {
                0.0
            }
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Integral-type interpolation inequality

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationSample {
    /// `‖e^{𝒜S₂} z‖`.
    pub lhs: f64,
    /// `∫_{S₁}^{S₂} χ_E ‖χ_{D_t} 𝔅 e^{𝒜t} z‖_{L¹} dt`.
    pub observation: f64,
    /// `(observation / |E ∩ [S₁, S₂]|)^{1−θ} ‖z‖^θ`.
    pub rhs0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationReport {
    pub params: InterpolationParams,
    /// `|E ∩ [S₁, S₂]|`.
    pub e_measure: f64,
    pub samples: Vec<InterpolationSample>,
    /// `max lhs / rhs0` over the nonzero states.
    pub k_hat: f64,
    /// `M` making the K-template equal `k_hat`.
    pub m_hat: f64,
}

/// Integral interpolation check with `E` from the good-time set of `D`
/// (enclosing ball of the domain).
pub fn verify_integral_interpolation(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    ip: &InterpolationParams,
    sel: ObservationSelector,
    batch: &[SpectralState],
) -> Result<InterpolationReport> {
    let e = d.good_time_set(domain, &Ball::enclosing(domain))?.e;
    verify_integral_interpolation_on(domain, params, d, &e, ip, sel, batch)
}

/// As [`verify_integral_interpolation`] with an explicit time set `E`.
pub fn verify_integral_interpolation_on(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    e: &TimeMask,
    ip: &InterpolationParams,
    sel: ObservationSelector,
    batch: &[SpectralState],
) -> Result<InterpolationReport> {
    if ip.s2 > d.horizon() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("S₂ = {} exceeds the horizon {}", ip.s2, d.horizon())));
    }
    if e.n_cells() != d.n_time() {
        return Err(Error::invalid("time set and observation set use different time grids"));
    }
    let e_measure = e.measure_between(ip.s1, ip.s2);
    if e_measure == 0.0 {
        return Err(Error::invalid("|E ∩ [S₁, S₂]| = 0"));
    }
    let samples: Vec<Result<InterpolationSample>> = batch
        .par_iter()
        .map(|z| {
            let lhs = evolve(z, domain, params, ip.s2)?.norm();
            let profile = match sel {
                ObservationSelector::First => {
                    check_modes(z, domain)?;
                    first_profile(z, domain, params, d)
                }
                _ => observation_profile(z, domain, params, sel, d)?,
            };
            let observation = window_integral(&profile, e, ip.s1, ip.s2);
            let rhs0 = (observation / e_measure).powf(1.0 - ip.theta) * z.norm().powf(ip.theta);
            Ok(InterpolationSample { lhs, observation, rhs0 })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;
    let mut k_hat = 0.0f64;
    for (z, s) in batch.iter().zip(&samples) {
        if z.is_zero() {
            continue;
        }
        if !(s.rhs0 > 0.0) {
            return Err(Error::Violation(format!(
                "integrated observation vanished for a nonzero state (lhs {})",
                s.lhs
            )));
        }
        k_hat = k_hat.max(s.lhs / s.rhs0);
    }
    if !k_hat.is_finite() {
        return Err(Error::Violation("fitted constant K̂ is not finite".into()));
    }
    Ok(InterpolationReport { params: *ip, e_measure, samples, k_hat, m_hat: ip.implied_m(k_hat, e_measure) })
}

fn check_modes(z: &SpectralState, domain: &SpectralDomain) -> Result<()> {
    if z.n_modes() > domain.n_modes() {
        return Err(Error::invalid("state has more modes than the domain"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Observation along a direction

/// Per-mode `φ = (μ₁z₁ + μ₂z₂, μ₁z₂ − μ₂z₁)`, so that `B e^{𝒜t} φ = B̂ e^{𝒜t} z`.
pub fn direction_transform(z: &SpectralState, mu1: f64, mu2: f64) -> SpectralState {
    SpectralState::new(
        z.coeffs()
            .iter()
            .map(|p| [mu1 * p[0] + mu2 * p[1], mu1 * p[1] - mu2 * p[0]])
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub interpolation: InterpolationReport,
    /// Worst `|‖φ‖² − (μ₁² + μ₂²)‖z‖²|` relative to `(μ₁² + μ₂²)‖z‖²`.
    pub amplitude_defect: f64,
    /// Worst grid-field difference `|B e^{𝒜t}φ − B̂ e^{𝒜t}z|`.
    pub field_defect: f64,
}

pub fn verify_direction_observation(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    ip: &InterpolationParams,
    mu1: f64,
    mu2: f64,
    batch: &[SpectralState],
) -> Result<DirectionReport> {
    let sel = ObservationSelector::direction(mu1, mu2)?;
    let interpolation = verify_integral_interpolation(domain, params, d, ip, sel, batch)?;
    let scale = mu1 * mu1 + mu2 * mu2;
    let times: Vec<f64> = (0..=8).map(|i| ip.s1 + (ip.s2 - ip.s1) * i as f64 / 8.0).collect();
    let mut amplitude_defect = 0.0f64;
    let mut field_defect = 0.0f64;
    for z in batch {
        let phi = direction_transform(z, mu1, mu2);
        let want = scale * z.norm().powi(2);
        if want > 0.0 {
            amplitude_defect = amplitude_defect.max((phi.norm().powi(2) - want).abs() / want);
        }
        for &t in &times {
            let a = domain.synthesize(&first_component_coeffs(&phi, domain, params, t));
            let evolved = evolve_unchecked(z, domain, params, t);
            let b = match observe(&evolved, domain, sel)? {
                crate::semigroup::ObservedField::Scalar(f) => f,
                crate::semigroup::ObservedField::Pair(..) => unreachable!("direction selectors are scalar"),
            };
            let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            field_defect = field_defect.max(diff);
        }
    }
    if amplitude_defect > 1e-12 || field_defect > 1e-10 {
        return Err(Error::Violation(format!(
            "direction identity defects: amplitude {amplitude_defect:.2e}, field {field_defect:.2e}"
        )));
    }
    Ok(DirectionReport { interpolation, amplitude_defect, field_defect })
}

// ---------------------------------------------------------------------------
// Pointwise counterexamples

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub mode: usize,
    pub lambda: f64,
    pub state: SpectralState,
    pub times: Vec<f64>,
    /// `‖B e^{𝒜S_i} z‖_{L¹(Ω)}`.
    pub first_traces: Vec<f64>,
    /// `‖e^{𝒜S_i} z‖_{L¹(Ω)}` with the Euclidean pair norm.
    pub full_traces: Vec<f64>,
    /// `e^{−aλ S_i} ‖e_j‖_{L¹}`.
    pub full_reference: Vec<f64>,
    /// `‖e^{𝒜T} z‖`.
    pub terminal_norm: f64,
}

impl CounterexampleReport {
    pub fn max_first_trace(&self) -> f64 {
        self.first_traces.iter().cloned().fold(0.0, f64::max)
    }
}

/// `z = (−sin(λ_j b S), cos(λ_j b S)) e_j`.
pub fn vanishing_state(domain: &SpectralDomain, params: &PhysicalParams, j: usize, s: f64) -> SpectralState {
    let (sn, cs) = (domain.eigenvalue(j) * params.b() * s).sin_cos();
    SpectralState::single_mode(domain.n_modes(), j, [-sn, cs])
}

/// Smallest mode index `n` with `2π/(|b|λ_n) ≤ T/(m+1)`.
pub fn admissible_mode(domain: &SpectralDomain, params: &PhysicalParams, horizon: f64, m: usize) -> Result<usize> {
    let need = 2.0 * std::f64::consts::PI * (m + 1) as f64 / (params.b().abs() * horizon);
    domain.eigenvalues().iter().position(|&l| l >= need).ok_or_else(|| {
        Error::InsufficientTruncation(format!(
            "no stored eigenvalue reaches {need:.4} (largest {})",
            domain.eigenvalues().last().unwrap()
        ))
    })
}

/// `S_i = 2iπ/(bλ_n)` for `b > 0`, `T + 2iπ/(bλ_n)` for `b < 0`, `i = 1..=m`.
pub fn vanishing_times(lambda: f64, params: &PhysicalParams, horizon: f64, m: usize) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / (params.b() * lambda);
    let offset = if params.b() > 0.0 { 0.0 } else { horizon };
    (1..=m).map(|i| offset + i as f64 * step).collect()
}

fn counterexample_report(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    j: usize,
    state: SpectralState,
    times: Vec<f64>,
    horizon: f64,
) -> Result<CounterexampleReport> {
    let lambda = domain.eigenvalue(j);
    let ej = domain.l1_norm(domain.mode_on_grid(j), None);
    let mut first_traces = Vec::new();
    let mut full_traces = Vec::new();
    let mut full_reference = Vec::new();
    for &s in &times {
        first_traces.push(observed_trace_l1(&state, domain, params, ObservationSelector::First, s, None)?);
        full_traces.push(observed_trace_l1(&state, domain, params, ObservationSelector::Full, s, None)?);
        full_reference.push((-params.a() * lambda * s).exp() * ej);
    }
    let terminal_norm = evolve(&state, domain, params, horizon)?.norm();
    Ok(CounterexampleReport { mode: j, lambda, state, times, first_traces, full_traces, full_reference, terminal_norm })
}

/// Single-time counterexample in mode `j` vanishing at `S ∈ (0, T)`.
pub fn single_time_counterexample(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    j: usize,
    s: f64,
    horizon: f64,
) -> Result<CounterexampleReport> {
    if j >= domain.n_modes() {
        return Err(Error::InsufficientTruncation(format!("mode {j} is not stored")));
    }
    if !(s > 0.0 && s < horizon) {
        return Err(Error::invalid(format!("S = {s} outside (0, {horizon})")));
    }
    let z = vanishing_state(domain, params, j, s);
    counterexample_report(domain, params, j, z, vec![s], horizon)
}

/// Multi-time counterexample: one state whose First trace vanishes at `m` times.
pub fn multi_time_counterexample(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    horizon: f64,
    m: usize,
) -> Result<CounterexampleReport> {
    if m == 0 {
        return Err(Error::invalid("need at least one observation time"));
    }
    let n = admissible_mode(domain, params, horizon, m)?;
    let times = vanishing_times(domain.eigenvalue(n), params, horizon, m);
    let z = vanishing_state(domain, params, n, times[0]);
    counterexample_report(domain, params, n, z, times, horizon)
}

// ---------------------------------------------------------------------------
// Full observation, pointwise in time

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseFit {
    pub t: f64,
    /// `max ‖e^{𝒜t}z‖ / (‖χ_{D_t} e^{𝒜t} z‖_{L¹}^{1−θ} ‖z‖^θ)`.
    pub k_hat: f64,
    pub m_hat: f64,
    /// Smallest full-observation trace over the nonzero states.
    pub min_trace: f64,
}

pub fn verify_full_observation_pointwise(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    theta: f64,
    times: &[f64],
    batch: &[SpectralState],
) -> Result<Vec<PointwiseFit>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!("θ must lie in (0, 1), got {theta}")));
    }
    let e = d.good_time_set(domain, &Ball::enclosing(domain))?.e;
    times
        .iter()
        .map(|&t| {
            if !e.contains(t) {
                return Err(Error::invalid(format!("t = {t} is not in E")));
            }
            let slice = d.slice(t)?;
            let mut k_hat = 0.0f64;
            let mut min_trace = f64::INFINITY;
            for z in batch.iter().filter(|z| !z.is_zero()) {
                let lhs = evolve(z, domain, params, t)?.norm();
                let trace = observed_trace_l1(z, domain, params, ObservationSelector::Full, t, Some(slice.mask))?;
                if !(trace > 0.0) {
                    return Err(Error::Violation(format!("full observation vanished at t = {t}")));
                }
                min_trace = min_trace.min(trace);
                k_hat = k_hat.max(lhs / (trace.powf(1.0 - theta) * z.norm().powf(theta)));
            }
            let m_hat = solve_m_exp(k_hat, t / (1.0 - theta) + 1.0 / (theta * t));
            Ok(PointwiseFit { t, k_hat, m_hat, min_trace })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Telescoping chain

#[derive(Debug, Clone, PartialEq)]
pub struct RingFit {
    /// Ring index `m` (rings are `(ℓ_{m+1}, ℓ_m)`).
    pub m: usize,
    pub ell_m: f64,
    pub ell_next: f64,
    /// `|E ∩ (ℓ_{m+1}, ℓ_m)|`.
    pub e_measure: f64,
    pub k_hat: f64,
    /// `ln(K̂^{β+1} / |E_m|)`.
    pub log_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelescopeReport {
    pub beta: f64,
    pub theta: f64,
    pub density_point: f64,
    pub sequence: DensitySequence,
    pub rings: Vec<RingFit>,
    /// Fitted `Ĉ` with `K̂_m^{β+1}/|E_m| ≤ e^{Ĉ μ^{m+2}}` on every ring.
    pub c_hat: f64,
    /// Per state: ring observations `∫_{ℓ_{m+1}}^{ℓ_m} χ_E ‖χ_{D_t} B e^{𝒜t}z‖ dt`.
    pub ring_observations: Vec<Vec<f64>>,
    /// Per state: `e^{−Ĉ(β+2)μ²}‖e^{𝒜ℓ₂}z‖`.
    pub head_terms: Vec<f64>,
    /// Per state: the finite-depth remainder `Σ_{m=d+1}^{d+2} e^{−Ĉ(β+2)μ^m}‖e^{𝒜ℓ_m}z‖`.
    pub tail_terms: Vec<f64>,
    /// Largest ring-inequality excess over all rings and states (≤ 0 when all hold).
    pub worst_ring_excess: f64,
    /// Fitted `N̂ = max ‖e^{𝒜T}z‖ / ∫∫_D |B e^{𝒜t}z|`.
    pub n_hat: f64,
}

impl TelescopeReport {
    pub fn depth(&self) -> usize {
        self.rings.len()
    }

    /// `ln e^{−Ĉ(β+2)μ^m}`.
    pub fn log_chain_weight(&self, m: usize) -> f64 {
        -self.c_hat * (self.beta + 2.0) * self.sequence.mu.powi(m as i32)
    }
}

/// Runs the telescoping pipeline on `D` with rings `m = 1..=depth`.
pub fn telescope_chain_demo(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    beta: f64,
    depth: usize,
    batch: &[SpectralState],
) -> Result<TelescopeReport> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("β must be positive, got {beta}")));
    }
    if depth < 1 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    if batch.is_empty() || batch.iter().all(SpectralState::is_zero) {
        return Err(Error::invalid("the state batch has no nonzero state"));
    }
    for z in batch {
        check_modes(z, domain)?;
    }
    let e = d.good_time_set(domain, &Ball::enclosing(domain))?.e;
    let ell = find_density_point(&e, None)?.time;
    let sequence = telescoping_sequence_beta(&e, ell, beta, depth + 1)?;
    let theta = beta / (beta + 1.0);
    let mu = sequence.mu;

    let profiles: Vec<Vec<f64>> = batch.par_iter().map(|z| first_profile(z, domain, params, d)).collect();
    let norms_at = |z: &SpectralState, t: f64| evolve_unchecked(z, domain, params, t).norm();

    let mut rings = Vec::with_capacity(depth);
    let mut ring_observations = vec![Vec::with_capacity(depth); batch.len()];
    for m in 1..=depth {
        let (hi, lo, base) = (sequence.term(m), sequence.term(m + 1), sequence.term(m + 2));
        let e_measure = e.measure_between(lo, hi);
        let mut k_hat = 0.0f64;
        for (i, z) in batch.iter().enumerate() {
            let obs = window_integral(&profiles[i], &e, lo, hi);
            ring_observations[i].push(obs);
            if z.is_zero() {
                continue;
            }
            let (a_m, a_base) = (norms_at(z, hi), norms_at(z, base));
            let rhs0 = (obs / e_measure).powf(1.0 - theta) * a_base.powf(theta);
            if !(rhs0 > 0.0) {
                return Err(Error::Violation(format!("ring {m}: observation vanished for a nonzero state")));
            }
            k_hat = k_hat.max(a_m / rhs0);
        }
        let log_weight = (beta + 1.0) * k_hat.ln() - e_measure.ln();
        rings.push(RingFit { m, ell_m: hi, ell_next: lo, e_measure, k_hat, log_weight });
    }
    let c_hat = rings
        .iter()
        .map(|r| r.log_weight.max(0.0) / mu.powi(r.m as i32 + 2))
        .fold(0.0, f64::max);
    let log_w = |m: usize| -c_hat * (beta + 2.0) * mu.powi(m as i32);

    let mut worst_ring_excess = f64::NEG_INFINITY;
    let mut head_terms = Vec::with_capacity(batch.len());
    let mut tail_terms = Vec::with_capacity(batch.len());
    for (i, z) in batch.iter().enumerate() {
        let a: Vec<f64> = (1..=depth + 2).map(|m| norms_at(z, sequence.term(m))).collect();
        for m in 1..=depth {
            let lhs = (log_w(m)).exp() * a[m - 1] - (log_w(m + 2)).exp() * a[m + 1];
            let obs = ring_observations[i][m - 1];
            worst_ring_excess = worst_ring_excess.max(lhs - obs * (1.0 + SLACK) - 1e-300);
        }
        let head = log_w(2).exp() * a[1];
        let tail = log_w(depth + 1).exp() * a[depth] + log_w(depth + 2).exp() * a[depth + 1];
        let sum: f64 = ring_observations[i].iter().sum();
        if head > (sum + tail) * (1.0 + SLACK) {
            return Err(Error::Violation(format!(
                "telescoped chain fails for state {i}: head {head:.3e} > observations {sum:.3e} + tail {tail:.3e}"
            )));
        }
        head_terms.push(head);
        tail_terms.push(tail);
    }
    if worst_ring_excess > 0.0 {
        return Err(Error::Violation(format!("a ring inequality fails by {worst_ring_excess:.3e}")));
    }

    let full_e = TimeMask::new(vec![true; d.n_time()], d.horizon())?;
    let mut n_hat = 0.0f64;
    for (i, z) in batch.iter().enumerate() {
        if z.is_zero() {
            continue;
        }
        let total = window_integral(&profiles[i], &full_e, 0.0, d.horizon());
        if !(total > 0.0) {
            return Err(Error::Violation(format!("integrated observation vanished for state {i}")));
        }
        n_hat = n_hat.max(norms_at(z, d.horizon()) / total);
    }
    Ok(TelescopeReport {
        beta,
        theta,
        density_point: ell,
        sequence,
        rings,
        c_hat,
        ring_observations,
        head_terms,
        tail_terms,
        worst_ring_excess,
        n_hat,
    })
}
