//! Trigonometric polynomials on `(−π, π)` and the Remez-type bounds used in
//! the low-frequency step: the `L^p` and sup-norm Remez inequalities, the
//! sub-level set estimate and the `|sin|` integral lower bound.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::task_rng;

/// Quadrature cells on `(−π, π)`.
pub const CIRCLE_CELLS: usize = 8192;
/// Samples used for the sup norm before refinement.
pub const SUP_SAMPLES: usize = 4096;

const HOLD_SLACK: f64 = 1e-9;

/// `f(θ) = Σ_{k=0}^{n} (a_k sin kθ + b_k cos kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::invalid("coefficient lists must be nonempty and of equal length"));
        }
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        Ok(Self { a, b })
    }

    pub fn constant(c: f64) -> Self {
        Self { a: vec![0.0], b: vec![c] }
    }

    /// `cos(kθ)`.
    pub fn cosine(k: usize) -> Self {
        let mut b = vec![0.0; k + 1];
        b[k] = 1.0;
        Self { a: vec![0.0; k + 1], b }
    }

    /// Uniform coefficients in `[−1, 1]` for a degree drawn from `0..=max_degree`.
    pub fn random<R: Rng>(max_degree: usize, rng: &mut R) -> Self {
        let n = rng.random_range(0..=max_degree);
        let mut draw = || (0..=n).map(|_| rng.random_range(-1.0..=1.0)).collect::<Vec<f64>>();
        let a = draw();
        let b = draw();
        Self { a, b }
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.b
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a: self.a.iter().map(|x| c * x).collect(),
            b: self.b.iter().map(|x| c * x).collect(),
        }
    }

    /// Zero as a function (`a_0` multiplies `sin 0 = 0`).
    pub fn is_zero(&self) -> bool {
        self.b[0] == 0.0 && self.a[1..].iter().chain(&self.b[1..]).all(|&c| c == 0.0)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.a.len() {
            let (sk, ck) = (k as f64 * theta).sin_cos();
            s += self.a[k] * sk + self.b[k] * ck;
        }
        s
    }

    /// `‖f‖_C`: dense sampling, then golden-section refinement around every
    /// sampled local maximum of `|f|` within 10% of the best sample.
    pub fn sup_norm(&self) -> f64 {
        let h = 2.0 * PI / SUP_SAMPLES as f64;
        let vals: Vec<f64> = (0..SUP_SAMPLES).map(|i| self.eval(-PI + i as f64 * h).abs()).collect();
        let best = vals.iter().cloned().fold(0.0, f64::max);
        let mut sup = best;
        for i in 0..SUP_SAMPLES {
            let (l, r) = (vals[(i + SUP_SAMPLES - 1) % SUP_SAMPLES], vals[(i + 1) % SUP_SAMPLES]);
            if vals[i] >= l && vals[i] >= r && vals[i] >= 0.9 * best {
                let t = -PI + i as f64 * h;
                sup = sup.max(golden_max(|x| self.eval(x).abs(), t - h, t + h));
            }
        }
        sup
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Union of the [`CIRCLE_CELLS`] uniform cells of `(−π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSet {
    cells: Vec<bool>,
}

impl CircleSet {
    pub fn cell_width() -> f64 {
        2.0 * PI / CIRCLE_CELLS as f64
    }

    pub fn cell_center(i: usize) -> f64 {
        -PI + (i as f64 + 0.5) * Self::cell_width()
    }

    pub fn from_cells(cells: Vec<bool>) -> Result<Self> {
        if cells.len() != CIRCLE_CELLS {
            return Err(Error::invalid(format!("circle mask needs {CIRCLE_CELLS} cells, got {}", cells.len())));
        }
        Ok(Self { cells })
    }

    pub fn full() -> Self {
        Self { cells: vec![true; CIRCLE_CELLS] }
    }

    /// Cells whose centers fall in one of the open intervals.
    pub fn from_intervals(intervals: &[(f64, f64)]) -> Self {
        let cells = (0..CIRCLE_CELLS)
            .map(|i| {
                let c = Self::cell_center(i);
                intervals.iter().any(|&(lo, hi)| c > lo && c < hi)
            })
            .collect();
        Self { cells }
    }

    /// Union of 1 to 5 intervals with uniform endpoints, redrawn until `|E| ≥ 0.1`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        loop {
            let k = rng.random_range(1..=5);
            let intervals: Vec<(f64, f64)> = (0..k)
                .map(|_| {
                    let x: f64 = rng.random_range(-PI..PI);
                    let y: f64 = rng.random_range(-PI..PI);
                    (x.min(y), x.max(y))
                })
                .collect();
            let set = Self::from_intervals(&intervals);
            if set.measure() >= 0.1 {
                return set;
            }
        }
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().filter(|&&c| c).count() as f64 * Self::cell_width()
    }
}

/// Midpoint-rule `‖χ_E f‖_{L^p}`; `None` means the whole circle.
pub fn lp_norm(f: &TrigPoly, p: f64, set: Option<&CircleSet>) -> f64 {
    let h = CircleSet::cell_width();
    let sum: f64 = (0..CIRCLE_CELLS)
        .filter(|&i| set.is_none_or(|s| s.cells[i]))
        .map(|i| f.eval(CircleSet::cell_center(i)).abs().powf(p))
        .sum();
    (sum * h).powf(1.0 / p)
}

/// Outcome of one inequality check `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Check {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, holds: lhs <= rhs * (1.0 + HOLD_SLACK) }
    }

    /// `lhs / rhs`, 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// `‖f‖_{L^p} ≤ (64 / sin(|E|/4))^{2(n + 1/p)} ‖χ_E f‖_{L^p}`.
pub fn remez_check(f: &TrigPoly, e: &CircleSet, p: f64) -> Result<Check> {
    if !(1.0..=8.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [1, 8], got {p}")));
    }
    let m = e.measure();
    if m == 0.0 {
        return Err(Error::invalid("the set E is empty"));
    }
    let n = f.degree() as f64;
    let constant = (64.0 / (m / 4.0).sin()).powf(2.0 * (n + 1.0 / p));
    Ok(Check::new(lp_norm(f, p, None), constant * lp_norm(f, p, Some(e))))
}

/// `‖f‖_C ≤ (2 / sin(|Ê|/4))^{2n} sup_Ê |f|`, the restricted sup taken over
/// the cell centers in `Ê`.
pub fn sup_remez_check(f: &TrigPoly, e: &CircleSet) -> Result<Check> {
    let m = e.measure();
    if m == 0.0 {
        return Err(Error::invalid("the set Ê is empty"));
    }
    let restricted = (0..CIRCLE_CELLS)
        .filter(|&i| e.cells[i])
        .map(|i| f.eval(CircleSet::cell_center(i)).abs())
        .fold(0.0, f64::max);
    let constant = (2.0 / (m / 4.0).sin()).powi(2 * f.degree() as i32);
    Ok(Check::new(f.sup_norm(), constant * restricted))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublevelCheck {
    pub measure: f64,
    pub threshold: f64,
    /// Grid allowance: one cell per possible crossing of `|f| = threshold`.
    pub tolerance: f64,
    pub holds: bool,
}

/// `|{θ : |f(θ)| < (½ sin(ε/4))^{2n} ‖f‖_C}| ≤ ε` on the grid.
pub fn sublevel_measure_check(f: &TrigPoly, eps: f64) -> Result<SublevelCheck> {
    if !(eps > 0.0 && eps < 2.0 * PI) {
        return Err(Error::invalid(format!("ε must lie in (0, 2π), got {eps}")));
    }
    if f.is_zero() {
        return Err(Error::invalid("the zero polynomial has no sub-level estimate"));
    }
    let n = f.degree();
    let threshold = (0.5 * (eps / 4.0).sin()).powi(2 * n as i32) * f.sup_norm();
    let h = CircleSet::cell_width();
    let count = (0..CIRCLE_CELLS)
        .filter(|&i| f.eval(CircleSet::cell_center(i)).abs() < threshold)
        .count();
    let measure = count as f64 * h;
    let tolerance = (4 * n + 1) as f64 * h;
    Ok(SublevelCheck { measure, threshold, tolerance, holds: measure <= eps + tolerance })
}

/// `∫_lo^hi |sin η| dη`, exact.
pub fn abs_sin_integral(lo: f64, hi: f64) -> f64 {
    fn g(x: f64) -> f64 {
        let k = (x / PI).floor();
        2.0 * k + 1.0 - (x - k * PI).cos()
    }
    g(hi) - g(lo)
}

/// A set `F` of cells in the window `[δ, λbS + δ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineBoundCase {
    pub lambda: f64,
    pub b: f64,
    pub s: f64,
    pub delta: f64,
    cells: Vec<bool>,
}

impl SineBoundCase {
    pub fn new(lambda: f64, b: f64, s: f64, delta: f64, cells: Vec<bool>) -> Result<Self> {
        if !(lambda > 0.0 && b > 0.0 && s > 0.0) {
            return Err(Error::invalid("λ, b and S must be positive"));
        }
        if !(-PI / 2.0..=PI / 2.0).contains(&delta) {
            return Err(Error::invalid(format!("δ must lie in [−π/2, π/2], got {delta}")));
        }
        if cells.is_empty() {
            return Err(Error::invalid("window grid needs at least one cell"));
        }
        Ok(Self { lambda, b, s, delta, cells })
    }

    /// Cells of an `n_cells` window grid whose centers lie in one of the intervals.
    pub fn from_intervals(
        lambda: f64,
        b: f64,
        s: f64,
        delta: f64,
        n_cells: usize,
        intervals: &[(f64, f64)],
    ) -> Result<Self> {
        let h = lambda * b * s / n_cells as f64;
        let cells = (0..n_cells)
            .map(|i| {
                let c = delta + (i as f64 + 0.5) * h;
                intervals.iter().any(|&(lo, hi)| c > lo && c < hi)
            })
            .collect();
        Self::new(lambda, b, s, delta, cells)
    }

    /// Window length `λbS ≤ 100`, δ uniform, `F` a union of up to 5 intervals.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let n_cells = 2048;
        loop {
            let lambda = rng.random_range(0.1..10.0);
            let b = rng.random_range(0.1..2.0);
            let window: f64 = rng.random_range(0.01..100.0);
            let s = window / (lambda * b);
            let delta = rng.random_range(-PI / 2.0..=PI / 2.0);
            let k = rng.random_range(1..=5);
            let intervals: Vec<(f64, f64)> = (0..k)
                .map(|_| {
                    let x = delta + rng.random_range(0.0..window);
                    let y = delta + rng.random_range(0.0..window);
                    (x.min(y), x.max(y))
                })
                .collect();
            let case = Self::from_intervals(lambda, b, s, delta, n_cells, &intervals).unwrap();
            if case.measure() > 0.0 {
                return case;
            }
        }
    }

    pub fn window(&self) -> f64 {
        self.lambda * self.b * self.s
    }

    pub fn cell_width(&self) -> f64 {
        self.window() / self.cells.len() as f64
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().filter(|&&c| c).count() as f64 * self.cell_width()
    }

    /// Same window with `F` replaced by `F ∪ G`.
    pub fn union(&self, other: &[bool]) -> Result<Self> {
        if other.len() != self.cells.len() {
            return Err(Error::invalid("mask sizes differ"));
        }
        let cells = self.cells.iter().zip(other).map(|(&x, &y)| x || y).collect();
        Self::new(self.lambda, self.b, self.s, self.delta, cells)
    }
}

/// `2^{−50} (λbS + π/2)^{−4} |F|⁴ ≤ ∫ χ_F |sin η| dη`, integral exact per cell.
pub fn sine_integral_bound(case: &SineBoundCase) -> Result<Check> {
    let m = case.measure();
    if m == 0.0 {
        return Err(Error::invalid("the set F is empty"));
    }
    let h = case.cell_width();
    let rhs: f64 = (0..case.cells.len())
        .filter(|&i| case.cells[i])
        .map(|i| {
            let lo = case.delta + i as f64 * h;
            abs_sin_integral(lo, lo + h)
        })
        .sum();
    let lhs = 2f64.powi(-50) * (case.window() + PI / 2.0).powi(-4) * m.powi(4);
    Ok(Check { lhs, rhs, holds: lhs <= rhs })
}

/// Aggregate of a randomized sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub cases: usize,
    pub violations: usize,
    pub worst_ratio: f64,
}

fn summarize(checks: &[Check]) -> SweepSummary {
    SweepSummary {
        cases: checks.len(),
        violations: checks.iter().filter(|c| !c.holds).count(),
        worst_ratio: checks.iter().map(Check::ratio).fold(0.0, f64::max),
    }
}

/// `cases` random `(f, E, p)` with `n ≤ 8`, `p ∈ {1, 2}`; case `i` uses stream `i`.
pub fn remez_sweep(cases: usize, seed: u64) -> SweepSummary {
    let checks: Vec<Check> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let f = TrigPoly::random(8, &mut rng);
            let e = CircleSet::random(&mut rng);
            let p = if rng.random::<bool>() { 1.0 } else { 2.0 };
            remez_check(&f, &e, p).expect("random sets are nonempty")
        })
        .collect();
    summarize(&checks)
}

pub fn sup_remez_sweep(cases: usize, seed: u64) -> SweepSummary {
    let checks: Vec<Check> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            let f = TrigPoly::random(8, &mut rng);
            let e = CircleSet::random(&mut rng);
            sup_remez_check(&f, &e).expect("random sets are nonempty")
        })
        .collect();
    summarize(&checks)
}

pub fn sine_bound_sweep(cases: usize, seed: u64) -> SweepSummary {
    let checks: Vec<Check> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(seed, i as u64);
            sine_integral_bound(&SineBoundCase::random(&mut rng)).expect("random sets are nonempty")
        })
        .collect();
    summarize(&checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assume, proptest, ProptestConfig};

    #[test]
    fn constant_example() {
        let f = TrigPoly::constant(1.0);
        let e = CircleSet::from_intervals(&[(0.0, PI / 2.0)]);
        let c = remez_check(&f, &e, 1.0).unwrap();
        assert!((c.lhs - 2.0 * PI).abs() < 1e-9);
        let want = (64.0 / (PI / 8.0).sin()).powi(2) * PI / 2.0;
        assert!((c.rhs / want - 1.0).abs() < 1e-9);
        assert!((c.rhs - 4.39e4).abs() < 0.01e4);
        assert!(c.holds);
    }

    #[test]
    fn full_set_ratio() {
        let f = TrigPoly::new(vec![0.0, 0.3, -0.2], vec![1.0, 0.5, 0.1]).unwrap();
        let c = remez_check(&f, &CircleSet::full(), 2.0).unwrap();
        assert!((c.rhs / c.lhs - 64f64.powf(2.0 * 2.5)).abs() / 64f64.powf(5.0) < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn errors() {
        let f = TrigPoly::constant(1.0);
        let empty = CircleSet::from_intervals(&[]);
        assert!(remez_check(&f, &empty, 1.0).is_err());
        assert!(remez_check(&f, &CircleSet::full(), 0.5).is_err());
        assert!(sup_remez_check(&f, &empty).is_err());
        assert!(sublevel_measure_check(&TrigPoly::constant(0.0), 1.0).is_err());
        assert!(TrigPoly::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn sup_degree_zero_is_equality() {
        let f = TrigPoly::constant(-3.0);
        let c = sup_remez_check(&f, &CircleSet::from_intervals(&[(0.0, 0.5)])).unwrap();
        assert_eq!(c.lhs, 3.0);
        assert_eq!(c.rhs, 3.0);
        assert!(c.holds);
    }

    #[test]
    fn sup_cosine_near_zero() {
        let e = CircleSet::from_intervals(&[(PI / 2.0 - 0.1, PI / 2.0 + 0.1)]);
        let c = sup_remez_check(&TrigPoly::cosine(1), &e).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12);
        assert!((c.rhs - 160.0).abs() < 1.5, "rhs {}", c.rhs);
        assert!(c.holds);
    }

    #[test]
    fn sup_norm_matches_closed_form() {
        // a sin θ + b cos θ has sup √(a² + b²); the second case against a dense scan.
        let f = TrigPoly::new(vec![0.0, 0.6], vec![0.0, 0.8]).unwrap();
        assert!((f.sup_norm() - 1.0).abs() < 1e-9);
        let g = TrigPoly::new(vec![0.0, 0.0, 0.7, 0.0], vec![0.2, 0.0, 0.0, -0.9]).unwrap();
        let dense = (0..2_000_000).map(|i| g.eval(-PI + i as f64 * 2.0 * PI / 2e6).abs()).fold(0.0, f64::max);
        assert!((g.sup_norm() - dense).abs() < 1e-6);
    }

    #[test]
    fn sublevel_cosine_example() {
        let c = sublevel_measure_check(&TrigPoly::cosine(1), 1.0).unwrap();
        assert!((c.threshold - 0.01531).abs() < 1e-5);
        let exact = 4.0 * c.threshold.asin();
        assert!((exact - 0.06125).abs() < 1e-4);
        assert!((c.measure - exact).abs() <= 4.0 * CircleSet::cell_width());
        assert!(c.holds);
    }

    #[test]
    fn sublevel_constant_is_empty() {
        for eps in [0.1, 1.0, 6.0] {
            let c = sublevel_measure_check(&TrigPoly::constant(1.0), eps).unwrap();
            assert_eq!(c.measure, 0.0);
            assert!(c.holds);
        }
    }

    #[test]
    fn abs_sin_integral_closed_forms() {
        assert!((abs_sin_integral(0.0, PI) - 2.0).abs() < 1e-14);
        assert!((abs_sin_integral(-PI, PI) - 4.0).abs() < 1e-14);
        assert!((abs_sin_integral(-0.01, 0.01) - 2.0 * (1.0 - 0.01f64.cos())).abs() < 1e-16);
        assert!((abs_sin_integral(1.0, 10.0) - {
            let n = 200_000;
            let h = 9.0 / n as f64;
            (0..n).map(|i| (1.0 + (i as f64 + 0.5) * h).sin().abs() * h).sum::<f64>()
        })
        .abs()
            < 1e-8);
    }

    #[test]
    fn sine_bound_examples() {
        let case = SineBoundCase::from_intervals(1.0, 1.0, PI, 0.0, 1024, &[(0.0, PI)]).unwrap();
        let c = sine_integral_bound(&case).unwrap();
        assert!((c.rhs - 2.0).abs() < 1e-12);
        let lhs = 2f64.powi(-50) * (1.5 * PI).powi(-4) * PI.powi(4);
        assert!((c.lhs - lhs).abs() < 1e-28);
        assert!((c.lhs - 1.75e-16).abs() < 0.01e-16);
        assert!(c.holds);

        // F = [−0.01, 0.01] inside a window starting at δ = −π/2.
        let case = SineBoundCase::from_intervals(1.0, 1.0, PI, -PI / 2.0, 31416, &[(-0.01, 0.01)]).unwrap();
        let c = sine_integral_bound(&case).unwrap();
        let m = case.measure();
        assert!((m - 0.02).abs() < 2e-4);
        assert!((c.rhs - 2.0 * (1.0 - (m / 2.0).cos())).abs() < 1e-7);
        assert!(c.holds);
        assert!(sine_integral_bound(&SineBoundCase::from_intervals(1.0, 1.0, 1.0, 0.0, 8, &[]).unwrap()).is_err());
    }

    #[test]
    fn scaling_covariance_is_exact() {
        let mut rng = task_rng(5, 0);
        for _ in 0..20 {
            let f = TrigPoly::random(6, &mut rng);
            let e = CircleSet::random(&mut rng);
            let base = remez_check(&f, &e, 2.0).unwrap();
            for c in [-1.0, 2.0, 0.25, -1024.0] {
                let s = remez_check(&f.scaled(c), &e, 2.0).unwrap();
                assert_eq!(base.ratio(), s.ratio());
                assert_eq!(base.holds, s.holds);
            }
            let s = remez_check(&f.scaled(3.7), &e, 2.0).unwrap();
            assert!((base.ratio() - s.ratio()).abs() <= 1e-12 * base.ratio());
        }
    }

    #[test]
    fn small_sweeps_hold() {
        for s in [remez_sweep(200, 1), sup_remez_sweep(200, 1), sine_bound_sweep(200, 1)] {
            assert_eq!(s.violations, 0, "{s:?}");
        }
        assert_eq!(remez_sweep(50, 9), remez_sweep(50, 9));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sublevel_holds_for_random_polys(seed in 0u64..10_000, eps_idx in 0usize..3) {
            let mut rng = task_rng(seed, 0);
            let f = TrigPoly::random(8, &mut rng);
            prop_assume!(!f.is_zero());
            let eps = [0.1, 0.5, 1.0][eps_idx];
            prop_assert!(sublevel_measure_check(&f, eps).unwrap().holds);
        }

        #[test]
        fn sine_rhs_monotone_under_union(seed in 0u64..10_000) {
            let mut rng = task_rng(seed, 1);
            let case = SineBoundCase::random(&mut rng);
            let extra: Vec<bool> = (0..case.cells().len()).map(|_| rng.random::<f64>() < 0.1).collect();
            let bigger = case.union(&extra).unwrap();
            let small = sine_integral_bound(&case).unwrap();
            let big = sine_integral_bound(&bigger).unwrap();
            prop_assert!(big.rhs >= small.rhs);
            prop_assert!(big.holds && small.holds);
        }
    }
}
