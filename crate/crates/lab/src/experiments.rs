//! One runner per subcommand. Runners fill report sections and CSV series and
//! return an error for the step that could not finish.

use std::time::Instant;

use coupled_obs::control::{
    duality_defect, estimate_l, solve_time_optimal, synthesize_null_control, verify_bang_bang, NullControlOptions,
    NullControlProblem, TimeOptimalOptions, TimeOptimalProblem,
};
use coupled_obs::interp::{
    default_eps_grid, estimate_spectral_l1_constant, interp_equivalence, multi_time_counterexample,
    random_functional_triple, random_unit_state, single_time_counterexample, telescope_chain_demo, vanishing_state,
    verify_direction_observation, verify_integral_interpolation, verify_integral_interpolation_on, InterpolationParams,
};
use coupled_obs::measure::random_space_time_set;
use coupled_obs::remez::{remez_sweep, sine_bound_sweep, sup_remez_sweep, SweepSummary};
use coupled_obs::semigroup::{evolve, observed_trace_l1, ModeTrace};
use coupled_obs::{
    task_rng, Ball, Error, ObservationSelector, PhysicalParams, Result, SpaceTimeSet, SpectralDomain, SpectralState,
    TimeMask,
};
use rand::Rng;

use crate::config::{ExperimentConfig, RegionKind, SelectorKind, SetGenerator, StateKind};
use crate::report::{Csv, Report, Section, Status};

/// Tolerance on traces that must vanish identically.
const VANISHING: f64 = 1e-10;

/// Random-stream indices below the master seed.
const STREAM_STATE: u64 = 1;
const STREAM_BATCH: u64 = 2;
const STREAM_PROBES: u64 = 3;
const STREAM_GEOMETRY: u64 = 1 << 20;
const STREAM_TRIPLES: u64 = 2 << 20;

pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub domain: SpectralDomain,
    pub params: PhysicalParams,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        Ok(Self { cfg, domain: cfg.domain()?, params: cfg.params()? })
    }

    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    /// The configured initial state on `n_modes` modes.
    fn state(&self, n_modes: usize) -> SpectralState {
        let s = &self.cfg.state;
        match s.kind {
            StateKind::Mode if s.mode < n_modes => SpectralState::single_mode(n_modes, s.mode, s.pair),
            StateKind::Mode => SpectralState::zeros(n_modes),
            StateKind::Random => random_unit_state(n_modes, &mut task_rng(self.seed(), STREAM_STATE)),
        }
    }

    fn batch(&self, n_modes: usize) -> Vec<SpectralState> {
        let mut rng = task_rng(self.seed(), STREAM_BATCH);
        (0..self.cfg.interp.batch).map(|_| random_unit_state(n_modes, &mut rng)).collect()
    }

    fn selector(&self) -> Result<ObservationSelector> {
        let s = &self.cfg.selector;
        Ok(match s.kind {
            SelectorKind::First => ObservationSelector::First,
            SelectorKind::Direction => ObservationSelector::direction(s.mu1, s.mu2)?,
            SelectorKind::Full => ObservationSelector::Full,
        })
    }

    /// The observation set `D` on the configured time grid.
    pub fn observation_set(&self) -> Result<SpaceTimeSet> {
        let (n_time, horizon) = (self.cfg.time.n_time, self.cfg.time.horizon);
        let o = &self.cfg.observation;
        match o.generator {
            SetGenerator::Full => SpaceTimeSet::full(&self.domain, n_time, horizon),
            SetGenerator::FirstHalf => SpaceTimeSet::from_fn(&self.domain, n_time, horizon, |_, k| 2 * k < n_time),
            SetGenerator::Random => {
                random_space_time_set(&self.domain, n_time, horizon, o.min_fraction, o.keep, &mut task_rng(o.seed, 0))
            }
            SetGenerator::Fixture => {
                let path = o.fixture.as_ref().expect("validated");
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("cannot read fixture {}: {e}", path.display())))?;
                let d = SpaceTimeSet::from_rle(&text)?;
                if d.n_space() != self.domain.n_cells() || d.n_time() != n_time {
                    return Err(Error::invalid(format!(
                        "fixture grid {}×{} does not match the configured {}×{n_time}",
                        d.n_space(),
                        d.n_time(),
                        self.domain.n_cells()
                    )));
                }
                Ok(d)
            }
        }
    }

    fn interp_params(&self) -> Result<InterpolationParams> {
        let ip = &self.cfg.interp;
        InterpolationParams::new(ip.theta, ip.s1, ip.s2)
    }
}

/// Runs `step`, timing it and folding its error into the report.
pub fn timed(report: &mut Report, name: &str, step: impl FnOnce(&mut Report) -> Result<()>) {
    let start = Instant::now();
    if let Err(e) = step(report) {
        report.record_error(name, &e);
    }
    report.timings.push((name.into(), start.elapsed().as_secs_f64() * 1e3));
}

fn check(report: &mut Report, holds: bool) {
    if !holds {
        report.mark(Status::Violated);
    }
}

fn set_section(s: &mut Section, d: &SpaceTimeSet) {
    s.num("d_measure", d.measure()).num("d_fraction", d.measure() / d.cylinder_measure());
}

// ---------------------------------------------------------------------------

pub fn simulate(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params) = (&ctx.domain, &ctx.params);
    let (n_time, horizon) = (ctx.cfg.time.n_time, ctx.cfg.time.horizon);
    let v0 = ctx.state(domain.n_modes());
    let mode = ctx.cfg.state.mode;
    let trace = ModeTrace::new(&v0, domain, params, mode);
    let mut csv = Csv::new("trace", &["t", "v_abs", "envelope", "first_l1", "norm"]);
    for k in 0..=n_time {
        let t = horizon * k as f64 / n_time as f64;
        let first = observed_trace_l1(&v0, domain, params, ObservationSelector::First, t, None)?;
        let norm = evolve(&v0, domain, params, t)?.norm();
        csv.push(&[t, trace.value(t).abs(), trace.envelope(t), first, norm]);
    }
    let norm_t = evolve(&v0, domain, params, horizon)?.norm();
    let bound = (-params.a() * domain.eigenvalue(0) * horizon).exp() * v0.norm();
    let defect = domain.orthonormality_defect();
    let contraction = norm_t <= bound + 1e-12;
    let mut s = Section::new("simulate");
    s.num("n_modes", domain.n_modes() as f64)
        .num("lambda_1", domain.eigenvalue(0))
        .num("lambda_max", domain.eigenvalue(domain.n_modes() - 1))
        .num("orthonormality_defect", defect)
        .num("trace_mode", mode as f64)
        .num("norm_0", v0.norm())
        .num("norm_t", norm_t)
        .num("contraction_bound", bound)
        .flag("contraction_holds", contraction);
    report.sections.push(s);
    report.csvs.push(csv);
    check(report, contraction && defect <= 1e-3);
    Ok(())
}

fn sweep_entries(s: &mut Section, prefix: &str, sw: &SweepSummary) {
    s.num(&format!("{prefix}.cases"), sw.cases as f64)
        .num(&format!("{prefix}.violations"), sw.violations as f64)
        .num(&format!("{prefix}.worst_ratio"), sw.worst_ratio);
}

pub fn remez(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let sw = &ctx.cfg.sweep;
    let lp = remez_sweep(sw.remez_cases, ctx.seed());
    let sup = sup_remez_sweep(sw.remez_cases, ctx.seed());
    let sine = sine_bound_sweep(sw.sine_cases, ctx.seed());
    let mut s = Section::new("remez");
    sweep_entries(&mut s, "lp", &lp);
    sweep_entries(&mut s, "sup", &sup);
    sweep_entries(&mut s, "sine", &sine);
    let holds = lp.violations + sup.violations + sine.violations == 0;
    s.flag("holds", holds);
    report.sections.push(s);
    check(report, holds);
    Ok(())
}

/// `E` restricted to its first `q` fraction of cells.
fn prefix_mask(e: &TimeMask, q: f64) -> Result<TimeMask> {
    let cut = (q * e.n_cells() as f64).ceil() as usize;
    TimeMask::new((0..e.n_cells()).map(|k| k < cut && e.cell(k)).collect(), e.horizon())
}

pub fn interp(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let d = ctx.observation_set()?;
    let ball = Ball::enclosing(domain);
    let good = d.good_time_set(domain, &ball)?;
    let mut geo = Section::new("interp.geometry");
    set_section(&mut geo, &d);
    geo.num("e_measure", good.e.measure()).num("e_lower_bound", good.lower_bound).num("e_threshold", good.threshold);
    report.sections.push(geo);

    let ip = ctx.interp_params()?;
    let mut batch = ctx.batch(domain.n_modes());
    let ce = &cfg.counterexample;
    batch.push(vanishing_state(domain, params, ce.mode, ce.s));
    if let Ok(r) = multi_time_counterexample(domain, params, cfg.time.horizon, ce.multi) {
        batch.push(r.state);
    }
    let sel = ctx.selector()?;
    let rep = verify_integral_interpolation(domain, params, &d, &ip, sel, &batch)?;
    let min_obs = rep.samples.iter().map(|s| s.observation).fold(f64::INFINITY, f64::min);
    let mut s = Section::new("interp.integral");
    s.num("states", batch.len() as f64)
        .num("e_window_measure", rep.e_measure)
        .num("min_observation", min_obs)
        .num("k_hat", rep.k_hat)
        .num("m_hat", rep.m_hat);
    let integral_ok = min_obs > 1e-8 && rep.k_hat.is_finite();
    s.flag("holds", integral_ok);
    report.sections.push(s);
    check(report, integral_ok);

    let mut curve = Csv::new("k_hat_vs_e", &["e_measure", "k_hat", "m_hat"]);
    for q in [0.25, 0.5, 0.75, 1.0] {
        let e = prefix_mask(&good.e, q)?;
        if e.measure_between(ip.s1, ip.s2) == 0.0 {
            continue;
        }
        let r = verify_integral_interpolation_on(domain, params, &d, &e, &ip, sel, &batch)?;
        curve.push(&[r.e_measure, r.k_hat, r.m_hat]);
    }
    report.csvs.push(curve);

    let dir = verify_direction_observation(domain, params, &d, &ip, cfg.selector.mu1, cfg.selector.mu2, &batch)?;
    let mut s = Section::new("interp.direction");
    s.num("amplitude_defect", dir.amplitude_defect)
        .num("field_defect", dir.field_defect)
        .num("k_hat", dir.interpolation.k_hat);
    report.sections.push(s);

    let omega = d.spatial_support();
    let lr = estimate_spectral_l1_constant(domain, cfg.interp.lambda, &omega, cfg.interp.restarts, ctx.seed(), &[])?;
    let mut s = Section::new("interp.spectral");
    s.num("lambda", lr.lambda)
        .num("k_lambda", lr.k as f64)
        .num("omega_measure", domain.mask_measure(&omega))
        .num("min_l1", lr.min_l1)
        .num("c_hat", lr.c_hat);
    report.sections.push(s);

    equivalence_sweep(ctx, report)?;
    geometry_sweep(ctx, report)
}

fn equivalence_sweep(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let cfg = ctx.cfg;
    let grid = default_eps_grid();
    let (mut eps_pass, mut product_pass, mut violations) = (0, 0, 0);
    let mut worst = 0.0f64;
    for t in 0..cfg.sweep.triples {
        let mut rng = task_rng(ctx.seed(), STREAM_TRIPLES + t as u64);
        let probes = random_functional_triple(cfg.interp.theta, cfg.sweep.probes, &mut rng);
        match interp_equivalence(cfg.interp.pi1, cfg.interp.theta, &probes, &grid) {
            Ok(r) => {
                eps_pass += r.eps_form_holds as usize;
                product_pass += r.product_form_holds as usize;
                if r.eps_form_holds {
                    worst = worst.max(r.worst_ratio / r.pi2);
                }
            }
            Err(Error::Violation(_)) => violations += 1,
            Err(e) => return Err(e),
        }
    }
    let mut s = Section::new("interp.equivalence");
    s.num("triples", cfg.sweep.triples as f64)
        .num("pi1", cfg.interp.pi1)
        .num("eps_form_pass", eps_pass as f64)
        .num("product_form_pass", product_pass as f64)
        .num("violations", violations as f64)
        .num("worst_ratio_over_pi2", worst)
        .flag("holds", violations == 0);
    report.sections.push(s);
    check(report, violations == 0);
    Ok(())
}

fn geometry_sweep(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, cfg) = (&ctx.domain, ctx.cfg);
    let ball = Ball::enclosing(domain);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for i in 0..cfg.sweep.geometry_cases {
        let mut rng = task_rng(ctx.seed(), STREAM_GEOMETRY + i as u64);
        let frac: f64 = rng.random_range(0.02..0.6);
        let keep: f64 = if rng.random::<bool>() { 1.0 } else { rng.random_range(0.3..1.0) };
        let d = random_space_time_set(domain, cfg.time.n_time, cfg.time.horizon, frac, keep, &mut rng)?;
        match d.good_time_set(domain, &ball) {
            Ok(g) => {
                tightest = tightest.min(g.e.measure() / g.lower_bound);
                let field: Vec<f64> = (0..d.mask().len()).map(|_| rng.random::<f64>()).collect();
                let (lhs, rhs) = d.domination_sums(&g.e, &field)?;
                if lhs > rhs * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
            Err(Error::Violation(_)) => violations += 1,
            Err(e) => return Err(e),
        }
    }
    let mut s = Section::new("interp.slices");
    s.num("cases", cfg.sweep.geometry_cases as f64)
        .num("violations", violations as f64)
        .num("min_e_over_bound", tightest)
        .flag("holds", violations == 0);
    report.sections.push(s);
    check(report, violations == 0);
    Ok(())
}

pub fn counterexample(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let horizon = cfg.time.horizon;
    let ce = &cfg.counterexample;
    let mut csv = Csv::new("counterexample", &["state", "time", "first_trace", "full_trace", "full_reference"]);
    let mut all_ok = true;
    for (idx, rep) in [
        single_time_counterexample(domain, params, ce.mode, ce.s, horizon)?,
        multi_time_counterexample(domain, params, horizon, ce.multi)?,
    ]
    .into_iter()
    .enumerate()
    {
        let name = if idx == 0 { "counterexample.single" } else { "counterexample.multi" };
        let floor = (-params.a() * rep.lambda * horizon).exp() - 1e-12;
        let full_ok = rep
            .full_traces
            .iter()
            .zip(&rep.full_reference)
            .all(|(f, r)| (f - r).abs() <= 1e-9 * r && *f > 0.0);
        let ok = rep.max_first_trace() <= VANISHING && full_ok && rep.terminal_norm >= floor;
        let mut s = Section::new(name);
        s.num("mode", rep.mode as f64).num("lambda", rep.lambda);
        for (i, t) in rep.times.iter().enumerate() {
            s.num(&format!("time.{}", i + 1), *t)
                .num(&format!("first_trace.{}", i + 1), rep.first_traces[i])
                .num(&format!("full_trace.{}", i + 1), rep.full_traces[i]);
            csv.push(&[idx as f64, *t, rep.first_traces[i], rep.full_traces[i], rep.full_reference[i]]);
        }
        s.num("terminal_norm", rep.terminal_norm).num("terminal_floor", floor).flag("holds", ok);
        report.sections.push(s);
        all_ok &= ok;
    }
    report.csvs.push(csv);
    check(report, all_ok);
    Ok(())
}

pub fn estimate_l_curve(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let n_modes = cfg.control_modes();
    let d = ctx.observation_set()?;
    let opts = coupled_obs::optim::SphereOptions { restarts: cfg.control.l_restarts, seed: ctx.seed(), ..Default::default() };
    let mut csv = Csv::new("l_hat_vs_d", &["d_measure", "l_hat"]);
    let mut last = 0.0;
    let mut monotone = true;
    for q in [0.25, 0.5, 0.75, 1.0] {
        let cut = (q * d.n_time() as f64).ceil() as usize;
        let sub = SpaceTimeSet::from_fn(domain, d.n_time(), d.horizon(), |i, k| k < cut && d.contains(i, k))?;
        if sub.count() == 0 {
            continue;
        }
        let l = estimate_l(domain, params, n_modes, &sub, opts)?.l_hat;
        monotone &= l >= last * (1.0 - 1e-9);
        last = l;
        csv.push(&[sub.measure(), l]);
    }
    let mut s = Section::new("estimate_l");
    set_section(&mut s, &d);
    s.num("n_modes", n_modes as f64).num("l_hat", last).flag("positive", last > 0.0).flag("monotone_in_d", monotone);
    report.sections.push(s);
    report.csvs.push(csv);
    check(report, last > 0.0);
    Ok(())
}

pub fn null_control(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let n_modes = cfg.control_modes();
    let d = ctx.observation_set()?;
    let v0 = ctx.state(n_modes);
    let problem = NullControlProblem { domain, params: *params, v0: v0.clone(), d };
    let opts = NullControlOptions {
        max_iter: cfg.control.max_iter,
        l_restarts: cfg.control.l_restarts,
        seed: ctx.seed(),
        ..Default::default()
    };
    let (u, cert) = synthesize_null_control(&problem, cfg.control.tol, opts)?;
    let mut rng = task_rng(ctx.seed(), STREAM_PROBES);
    let mut defect = 0.0f64;
    for _ in 0..100 {
        let z = SpectralState::new((0..n_modes).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect());
        defect = defect.max(duality_defect(domain, params, &v0, &u, &z)?);
    }
    let holds = cert.holds(cfg.control.tol) && u.respects_support() && defect <= 1e-8;
    let mut s = Section::new("null_control");
    set_section(&mut s, &problem.d);
    s.num("n_modes", n_modes as f64)
        .num("initial_norm", cert.initial_norm)
        .num("terminal_norm", cert.terminal_norm)
        .num("relative_residual", cert.terminal_norm / cert.initial_norm.max(f64::MIN_POSITIVE))
        .num("dual_value", cert.dual_value)
        .num("l_hat", cert.l_hat)
        .num("control_bound", cert.control_bound)
        .num("sup_norm", cert.sup_norm)
        .num("dual_iterations", cert.iterations as f64)
        .num("polish_iterations", cert.polish_iterations as f64)
        .num("max_duality_defect", defect)
        .flag("holds", holds);
    report.sections.push(s);
    report.csvs.push(Csv::raw("null_control", &u.to_csv(domain)));
    check(report, holds);
    Ok(())
}

pub fn time_optimal(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let c = &cfg.control;
    let n_modes = cfg.control_modes();
    let centers = domain.cell_centers();
    let omega: Vec<bool> = match c.omega {
        RegionKind::Full => vec![true; domain.n_cells()],
        RegionKind::LeftHalf => centers.iter().map(|p| p[0] < 0.5 * cfg.domain.lx).collect(),
    };
    let problem = TimeOptimalProblem {
        domain,
        params: *params,
        v0: ctx.state(n_modes),
        omega,
        nu1: c.nu1,
        nu2: c.nu2,
        radius: c.radius,
        n_time: c.n_time,
    };
    let sol = solve_time_optimal(&problem, c.t_max, 1e-3 * c.t_max, TimeOptimalOptions::default())?;
    let eps = 0.05 * (c.nu2 - c.nu1);
    let (fraction, bang) = verify_bang_bang(&sol.control, c.nu1, c.nu2, eps);
    let in_box = sol.control.within_box(c.nu1, c.nu2);
    let mut s = Section::new("time_optimal");
    s.num("n_modes", n_modes as f64)
        .num("t_star", sol.t_star)
        .num("tol_t", 1e-3 * c.t_max)
        .num("terminal_norm", sol.terminal_norm)
        .num("radius", c.radius)
        .num("bisection_steps", sol.trace.len() as f64)
        .num("bang_bang_eps", eps)
        .num("interior_fraction", fraction)
        .flag("bang_bang", bang)
        .flag("within_box", in_box);
    report.sections.push(s);
    let mut trace = Csv::new("bisection", &["step", "horizon", "feasible"]);
    for (i, &(t, f)) in sol.trace.iter().enumerate() {
        trace.push(&[i as f64, t, f as u8 as f64]);
    }
    report.csvs.push(trace);
    report.csvs.push(Csv::raw("time_optimal", &sol.control.to_csv(domain)));
    check(report, bang && in_box);
    Ok(())
}

pub fn telescope(ctx: &Context<'_>, report: &mut Report) -> Result<()> {
    let (domain, params, cfg) = (&ctx.domain, &ctx.params, ctx.cfg);
    let d = ctx.observation_set()?;
    let batch = ctx.batch(domain.n_modes());
    let rep = telescope_chain_demo(domain, params, &d, cfg.interp.beta, cfg.interp.depth, &batch)?;
    let mut chain_ok = true;
    for i in 0..batch.len() {
        let total: f64 = rep.ring_observations[i].iter().sum();
        chain_ok &= rep.head_terms[i] <= (total + rep.tail_terms[i]) * (1.0 + 1e-9);
    }
    let ring_ok = rep.worst_ring_excess <= 0.0;
    let mut s = Section::new("telescope");
    set_section(&mut s, &d);
    s.num("beta", rep.beta)
        .num("theta", rep.theta)
        .num("mu", rep.sequence.mu)
        .num("density_point", rep.density_point)
        .num("depth", rep.depth() as f64)
        .num("c_hat", rep.c_hat)
        .num("n_hat", rep.n_hat)
        .num("worst_ring_excess", rep.worst_ring_excess);
    for r in &rep.rings {
        s.num(&format!("ring.{}.e_measure", r.m), r.e_measure).num(&format!("ring.{}.k_hat", r.m), r.k_hat);
    }
    s.flag("ring_holds", ring_ok).flag("chain_holds", chain_ok);
    report.sections.push(s);
    let mut csv = Csv::new("telescope", &["m", "ell_m", "ring_observation", "partial_sum"]);
    let mut partial = 0.0;
    for (m, obs) in rep.ring_observations[0].iter().enumerate() {
        partial += obs;
        csv.push(&[(m + 1) as f64, rep.sequence.term(m + 1), *obs, partial]);
    }
    report.csvs.push(csv);
    check(report, ring_ok && chain_ok);
    Ok(())
}
