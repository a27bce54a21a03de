//! Small numerical kernels shared by the estimators: bisection, Armijo
//! gradient descent on the unit sphere with seeded restarts, and power
//! iteration for operator norms.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::task_rng;

/// Smallest `x ∈ [lo, hi]` (to `tol`) with `pred(x)` true, for a predicate
/// that is false then true. `pred(hi)` must hold.
pub fn bisect_threshold(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol * hi.abs().max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereMin {
    pub value: f64,
    pub point: Vec<f64>,
    /// Restart that produced the minimum.
    pub restart: usize,
}

/// Settings for [`minimize_on_sphere`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Stop when the Armijo step falls below this.
    pub min_step: f64,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self { restarts: 64, max_iter: 400, seed: 0, min_step: 1e-12 }
    }
}

const ARMIJO: f64 = 0.3;

fn normalize(x: &mut [f64]) -> bool {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

/// Minimizes `f` over the unit sphere of `R^dim`. `f` returns the value and a
/// (sub)gradient. Each restart starts from a Gaussian direction on its own
/// random stream (`extra_starts` are tried first), follows the tangential
/// gradient with Armijo backtracking and normalization as retraction.
pub fn minimize_on_sphere<F>(dim: usize, opts: SphereOptions, extra_starts: &[Vec<f64>], f: F) -> Result<SphereMin>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    if dim == 0 {
        return Err(Error::invalid("sphere of dimension zero"));
    }
    let total = extra_starts.len() + opts.restarts;
    let runs: Vec<Option<(f64, Vec<f64>)>> = (0..total)
        .into_par_iter()
        .map(|r| {
            let mut x = if r < extra_starts.len() {
                extra_starts[r].clone()
            } else {
                let mut rng = task_rng(opts.seed, r as u64);
                (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect()
            };
            if x.len() != dim || !normalize(&mut x) {
                return None;
            }
            descend(&f, x, opts)
        })
        .collect();
    let mut best: Option<SphereMin> = None;
    for (r, run) in runs.into_iter().enumerate() {
        if let Some((value, point)) = run {
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(SphereMin { value, point, restart: r });
            }
        }
    }
    best.ok_or_else(|| Error::Numerical("every restart produced a non-finite objective".into()))
}

fn descend<F>(f: &F, mut x: Vec<f64>, opts: SphereOptions) -> Option<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (mut fx, mut g) = f(&x);
    if !fx.is_finite() {
        return None;
    }
    let mut step = 1.0;
    for _ in 0..opts.max_iter {
        let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        let tangent: Vec<f64> = g.iter().zip(&x).map(|(a, b)| a - radial * b).collect();
        let gnorm2: f64 = tangent.iter().map(|v| v * v).sum();
        if gnorm2 < 1e-30 {
            break;
        }
        let mut accepted = false;
        step *= 2.0;
        while step > opts.min_step {
            let mut y: Vec<f64> = x.iter().zip(&tangent).map(|(a, t)| a - step * t).collect();
            if normalize(&mut y) {
                let (fy, gy) = f(&y);
                if fy.is_finite() && fy <= fx - ARMIJO * step * gnorm2 {
                    x = y;
                    fx = fy;
                    g = gy;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((fx, x))
}

/// `‖M‖₂` by power iteration on `MᵀM`, given `x ↦ Mx` and `y ↦ Mᵀy`.
pub fn operator_norm(
    cols: usize,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    iters: usize,
    seed: u64,
) -> f64 {
    let mut rng = task_rng(seed, 0);
    let mut x: Vec<f64> = (0..cols).map(|_| rng.random::<f64>() + 0.5).collect();
    normalize(&mut x);
    let mut sigma2 = 0.0;
    for _ in 0..iters {
        let mut y = apply_t(&apply(&x));
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        y.iter_mut().for_each(|v| *v /= n);
        let converged = (n - sigma2).abs() <= 1e-12 * n;
        sigma2 = n;
        x = y;
        if converged {
            break;
        }
    }
    sigma2.sqrt()
}
