//! Python bindings: domains, states, evolution, the interpolation checks and
//! the control solvers. Results come back as small read-only objects.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use coupled_obs::control::{
    self, NullControlOptions, NullControlProblem, TimeOptimalOptions, TimeOptimalProblem,
};
use coupled_obs::interp::{self, InterpolationParams};
use coupled_obs::optim::SphereOptions;
use coupled_obs::{measure, remez, semigroup, task_rng, Error, ObservationSelector};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::InsufficientTruncation(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, skip_from_py_object, module = "coupled_obs_py")]
#[derive(Clone)]
struct SpectralDomain(coupled_obs::SpectralDomain);

#[pymethods]
impl SpectralDomain {
    #[staticmethod]
    #[pyo3(signature = (length, n_modes = 16, cells = 256))]
    fn interval(length: f64, n_modes: usize, cells: usize) -> PyResult<Self> {
        coupled_obs::SpectralDomain::interval(length, n_modes, cells).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (lx, ly, n_modes = 16, cells_x = 48, cells_y = 48))]
    fn rectangle(lx: f64, ly: f64, n_modes: usize, cells_x: usize, cells_y: usize) -> PyResult<Self> {
        coupled_obs::SpectralDomain::rectangle(lx, ly, n_modes, cells_x, cells_y).map(Self).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.0.n_cells()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues().to_vec()
    }

    fn cell_centers(&self) -> Vec<Vec<f64>> {
        self.0.cell_centers()
    }

    fn mode_on_grid(&self, j: usize) -> PyResult<Vec<f64>> {
        if j >= self.0.n_modes() {
            return Err(PyValueError::new_err(format!("mode {j} is outside the truncation")));
        }
        Ok(self.0.mode_on_grid(j).to_vec())
    }

    fn count_below(&self, lam: f64) -> PyResult<usize> {
        self.0.count_below(lam).map_err(to_py)
    }

    fn weyl_ratio(&self, lam: f64) -> PyResult<f64> {
        self.0.weyl_ratio(lam).map_err(to_py)
    }

    fn orthonormality_defect(&self) -> f64 {
        self.0.orthonormality_defect()
    }

    fn __repr__(&self) -> String {
        format!("SpectralDomain(dim={}, n_modes={}, n_cells={})", self.0.dim(), self.0.n_modes(), self.0.n_cells())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "coupled_obs_py")]
#[derive(Clone, Copy)]
struct PhysicalParams(coupled_obs::PhysicalParams);

#[pymethods]
impl PhysicalParams {
    #[new]
    fn new(a: f64, b: f64) -> PyResult<Self> {
        coupled_obs::PhysicalParams::new(a, b).map(Self).map_err(to_py)
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b()
    }

    fn __repr__(&self) -> String {
        format!("PhysicalParams(a={}, b={})", self.0.a(), self.0.b())
    }
}

/// Mode coefficients `[(φ₁ⱼ, φ₂ⱼ), ...]`.
#[pyclass(frozen, from_py_object, module = "coupled_obs_py")]
#[derive(Clone)]
struct SpectralState(coupled_obs::SpectralState);

#[pymethods]
impl SpectralState {
    #[new]
    fn new(coeffs: Vec<(f64, f64)>) -> Self {
        Self(coupled_obs::SpectralState::new(coeffs.into_iter().map(|(a, b)| [a, b]).collect()))
    }

    #[staticmethod]
    fn single_mode(n_modes: usize, j: usize, pair: (f64, f64)) -> PyResult<Self> {
        if j >= n_modes {
            return Err(PyValueError::new_err(format!("mode {j} is outside {n_modes} modes")));
        }
        Ok(Self(coupled_obs::SpectralState::single_mode(n_modes, j, [pair.0, pair.1])))
    }

    #[staticmethod]
    fn random_unit(n_modes: usize, seed: u64) -> Self {
        Self(interp::random_unit_state(n_modes, &mut task_rng(seed, 0)))
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.0.n_modes()
    }

    fn coeffs(&self) -> Vec<(f64, f64)> {
        self.0.coeffs().iter().map(|c| (c[0], c[1])).collect()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn dot(&self, other: &SpectralState) -> f64 {
        self.0.dot(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("SpectralState(n_modes={}, norm={})", self.0.n_modes(), self.0.norm())
    }
}

/// A space-time set on the domain grid times a uniform time grid.
#[pyclass(frozen, skip_from_py_object, module = "coupled_obs_py")]
#[derive(Clone)]
struct SpaceTimeSet(coupled_obs::SpaceTimeSet);

#[pymethods]
impl SpaceTimeSet {
    /// `mask[k * n_cells + i]` marks space cell `i` at time cell `k`.
    #[new]
    fn new(domain: &SpectralDomain, n_time: usize, horizon: f64, mask: Vec<bool>) -> PyResult<Self> {
        coupled_obs::SpaceTimeSet::new(&domain.0, n_time, horizon, mask).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn full(domain: &SpectralDomain, n_time: usize, horizon: f64) -> PyResult<Self> {
        coupled_obs::SpaceTimeSet::full(&domain.0, n_time, horizon).map(Self).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (domain, n_time, horizon, min_fraction, keep = 1.0, seed = 0))]
    fn random(
        domain: &SpectralDomain,
        n_time: usize,
        horizon: f64,
        min_fraction: f64,
        keep: f64,
        seed: u64,
    ) -> PyResult<Self> {
        measure::random_space_time_set(&domain.0, n_time, horizon, min_fraction, keep, &mut task_rng(seed, 0))
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_rle(text: &str) -> PyResult<Self> {
        coupled_obs::SpaceTimeSet::from_rle(text).map(Self).map_err(to_py)
    }

    fn to_rle(&self) -> String {
        self.0.to_rle()
    }

    #[getter]
    fn n_time(&self) -> usize {
        self.0.n_time()
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn count(&self) -> usize {
        self.0.count()
    }

    fn measure(&self) -> f64 {
        self.0.measure()
    }

    fn cylinder_measure(&self) -> f64 {
        self.0.cylinder_measure()
    }

    fn mask(&self) -> Vec<bool> {
        self.0.mask().to_vec()
    }
}

#[pyfunction]
fn evolve(state: &SpectralState, domain: &SpectralDomain, params: &PhysicalParams, t: f64) -> PyResult<SpectralState> {
    semigroup::evolve(&state.0, &domain.0, &params.0, t).map(SpectralState).map_err(to_py)
}

#[pyfunction]
fn evolve_adjoint(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> PyResult<SpectralState> {
    semigroup::evolve_adjoint(&state.0, &domain.0, &params.0, t).map(SpectralState).map_err(to_py)
}

/// First component `y₁(t)` on the grid.
#[pyfunction]
fn first_component(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> PyResult<Vec<f64>> {
    let s = semigroup::evolve(&state.0, &domain.0, &params.0, t).map_err(to_py)?;
    Ok(domain.0.synthesize(&s.first_component()))
}

#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct SweepSummary {
    cases: usize,
    violations: usize,
    worst_ratio: f64,
}

impl From<remez::SweepSummary> for SweepSummary {
    fn from(s: remez::SweepSummary) -> Self {
        Self { cases: s.cases, violations: s.violations, worst_ratio: s.worst_ratio }
    }
}

#[pyfunction]
#[pyo3(signature = (cases, seed = 0))]
fn remez_sweep(py: Python<'_>, cases: usize, seed: u64) -> SweepSummary {
    py.detach(|| remez::remez_sweep(cases, seed)).into()
}

#[pyfunction]
#[pyo3(signature = (cases, seed = 0))]
fn sine_bound_sweep(py: Python<'_>, cases: usize, seed: u64) -> SweepSummary {
    py.detach(|| remez::sine_bound_sweep(cases, seed)).into()
}

#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct Counterexample {
    mode: usize,
    lam: f64,
    state: SpectralState,
    times: Vec<f64>,
    first_traces: Vec<f64>,
    full_traces: Vec<f64>,
    terminal_norm: f64,
}

impl From<interp::CounterexampleReport> for Counterexample {
    fn from(r: interp::CounterexampleReport) -> Self {
        Self {
            mode: r.mode,
            lam: r.lambda,
            state: SpectralState(r.state),
            times: r.times,
            first_traces: r.first_traces,
            full_traces: r.full_traces,
            terminal_norm: r.terminal_norm,
        }
    }
}

#[pyfunction]
fn single_time_counterexample(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    j: usize,
    s: f64,
    horizon: f64,
) -> PyResult<Counterexample> {
    interp::single_time_counterexample(&domain.0, &params.0, j, s, horizon).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn multi_time_counterexample(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    horizon: f64,
    m: usize,
) -> PyResult<Counterexample> {
    interp::multi_time_counterexample(&domain.0, &params.0, horizon, m).map(Into::into).map_err(to_py)
}

#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct InterpolationReport {
    e_measure: f64,
    lhs: Vec<f64>,
    observation: Vec<f64>,
    k_hat: f64,
    m_hat: f64,
}

/// Integral interpolation check of the first-component observation over `d`.
#[pyfunction]
#[pyo3(signature = (domain, params, d, states, theta = 0.5, s1 = 0.05, s2 = 1.0))]
#[allow(clippy::too_many_arguments)]
fn verify_integral_interpolation(
    domain: &SpectralDomain,
    params: &PhysicalParams,
    d: &SpaceTimeSet,
    states: Vec<SpectralState>,
    theta: f64,
    s1: f64,
    s2: f64,
) -> PyResult<InterpolationReport> {
    let ip = InterpolationParams::new(theta, s1, s2).map_err(to_py)?;
    let batch: Vec<_> = states.into_iter().map(|s| s.0).collect();
    let r = interp::verify_integral_interpolation(&domain.0, &params.0, &d.0, &ip, ObservationSelector::First, &batch)
        .map_err(to_py)?;
    Ok(InterpolationReport {
        e_measure: r.e_measure,
        lhs: r.samples.iter().map(|s| s.lhs).collect(),
        observation: r.samples.iter().map(|s| s.observation).collect(),
        k_hat: r.k_hat,
        m_hat: r.m_hat,
    })
}

/// `(L̂, argmin)` over unit initial data in the first `n_modes` modes.
#[pyfunction]
#[pyo3(signature = (domain, params, n_modes, d, restarts = 64, seed = 0))]
fn estimate_l(
    py: Python<'_>,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    n_modes: usize,
    d: &SpaceTimeSet,
    restarts: usize,
    seed: u64,
) -> PyResult<(f64, SpectralState)> {
    let opts = SphereOptions { restarts, seed, ..SphereOptions::default() };
    let est = py.detach(|| control::estimate_l(&domain.0, &params.0, n_modes, &d.0, opts)).map_err(to_py)?;
    Ok((est.l_hat, SpectralState(est.argmin)))
}

/// Piecewise-constant control on the space-time grid, `values[k * n_space + i]`.
#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct ControlField {
    n_space: usize,
    n_time: usize,
    horizon: f64,
    values: Vec<f64>,
    support: Vec<bool>,
}

impl From<control::ControlField> for ControlField {
    fn from(u: control::ControlField) -> Self {
        Self { n_space: u.n_space, n_time: u.n_time, horizon: u.horizon, values: u.values, support: u.support }
    }
}

#[pymethods]
impl ControlField {
    fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct NullControl {
    control: Py<ControlField>,
    terminal_norm: f64,
    initial_norm: f64,
    l_hat: f64,
    control_bound: f64,
    sup_norm: f64,
    dual_value: f64,
    holds: bool,
}

#[pyfunction]
#[pyo3(signature = (domain, params, v0, d, tol = 1e-3, max_iter = 10_000, l_restarts = 64, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn synthesize_null_control(
    py: Python<'_>,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    v0: &SpectralState,
    d: &SpaceTimeSet,
    tol: f64,
    max_iter: usize,
    l_restarts: usize,
    seed: u64,
) -> PyResult<NullControl> {
    let problem = NullControlProblem { domain: &domain.0, params: params.0, v0: v0.0.clone(), d: d.0.clone() };
    let opts = NullControlOptions { max_iter, l_restarts, seed, ..NullControlOptions::default() };
    let (u, cert) = py.detach(|| control::synthesize_null_control(&problem, tol, opts)).map_err(to_py)?;
    Ok(NullControl {
        control: Py::new(py, ControlField::from(u))?,
        terminal_norm: cert.terminal_norm,
        initial_norm: cert.initial_norm,
        l_hat: cert.l_hat,
        control_bound: cert.control_bound,
        sup_norm: cert.sup_norm,
        dual_value: cert.dual_value,
        holds: cert.holds(tol),
    })
}

#[pyclass(frozen, get_all, module = "coupled_obs_py")]
struct TimeOptimal {
    t_star: f64,
    control: Py<ControlField>,
    terminal_norm: f64,
    trace: Vec<(f64, bool)>,
    bang_bang_fraction: f64,
    bang_bang: bool,
}

/// Smallest horizon steering `v0` into the ball of `radius` with
/// `nu1 ≤ u ≤ nu2` on `omega` (default: the whole domain).
#[pyfunction]
#[pyo3(signature = (domain, params, v0, nu1, nu2, radius, t_max, tol_t = 1e-2, n_time = 16, omega = None))]
#[allow(clippy::too_many_arguments)]
fn solve_time_optimal(
    py: Python<'_>,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    v0: &SpectralState,
    nu1: f64,
    nu2: f64,
    radius: f64,
    t_max: f64,
    tol_t: f64,
    n_time: usize,
    omega: Option<Vec<bool>>,
) -> PyResult<TimeOptimal> {
    let problem = TimeOptimalProblem {
        domain: &domain.0,
        params: params.0,
        v0: v0.0.clone(),
        omega: omega.unwrap_or_else(|| vec![true; domain.0.n_cells()]),
        nu1,
        nu2,
        radius,
        n_time,
    };
    let sol = py
        .detach(|| control::solve_time_optimal(&problem, t_max, tol_t, TimeOptimalOptions::default()))
        .map_err(to_py)?;
    let (fraction, holds) = control::verify_bang_bang(&sol.control, nu1, nu2, 0.05 * (nu2 - nu1));
    Ok(TimeOptimal {
        t_star: sol.t_star,
        control: Py::new(py, ControlField::from(sol.control))?,
        terminal_norm: sol.terminal_norm,
        trace: sol.trace,
        bang_bang_fraction: fraction,
        bang_bang: holds,
    })
}

#[pymodule]
fn coupled_obs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SpectralDomain>()?;
    m.add_class::<PhysicalParams>()?;
    m.add_class::<SpectralState>()?;
    m.add_class::<SpaceTimeSet>()?;
    m.add_class::<SweepSummary>()?;
    m.add_class::<Counterexample>()?;
    m.add_class::<InterpolationReport>()?;
    m.add_class::<ControlField>()?;
    m.add_class::<NullControl>()?;
    m.add_class::<TimeOptimal>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(first_component, m)?)?;
    m.add_function(wrap_pyfunction!(remez_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(sine_bound_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(single_time_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(multi_time_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(verify_integral_interpolation, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_l, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_null_control, m)?)?;
    m.add_function(wrap_pyfunction!(solve_time_optimal, m)?)?;
    Ok(())
}
