//! Two-component states as Fourier coefficient pairs, the analytic semigroup
//! `e^{𝒜t}` applied exactly per mode, and the observation operators.
//!
//! On mode `j` the generator acts as `−λ_j A`, so
//! `e^{𝒜t}` maps the pair `v_j` to `e^{−aλ_j t} R(λ_j b t) v_j` with
//! `R(φ) = [[cos φ, sin φ], [−sin φ, cos φ]]`.

use crate::error::{Error, Result};
use crate::spectral::{PhysicalParams, SpectralDomain};

/// Truncated two-component state `z = Σ_j (v_{1,j}, v_{2,j}) e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    coeffs: Vec<[f64; 2]>,
}

impl SpectralState {
    pub fn new(coeffs: Vec<[f64; 2]>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(n_modes: usize) -> Self {
        Self { coeffs: vec![[0.0; 2]; n_modes] }
    }

    /// `pair · e_j` with every other mode zero.
    pub fn single_mode(n_modes: usize, j: usize, pair: [f64; 2]) -> Self {
        let mut s = Self::zeros(n_modes);
        s.coeffs[j] = pair;
        s
    }

    /// Flat layout `[v_{1,1}, v_{2,1}, v_{1,2}, …]`.
    pub fn from_flat(flat: &[f64]) -> Self {
        Self { coeffs: flat.chunks_exact(2).map(|c| [c[0], c[1]]).collect() }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.coeffs.iter().flat_map(|p| p.iter().copied()).collect()
    }

    pub fn coeffs(&self) -> &[[f64; 2]] {
        &self.coeffs
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `L²` norm via Parseval.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(p, q)| p[0] * q[0] + p[1] * q[1])
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|p| [c * p[0], c * p[1]]).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|p| p[0] == 0.0 && p[1] == 0.0)
    }

    /// `(v_1, v_2) ↦ (v_1, −v_2)` in every mode.
    pub fn conjugate(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|p| [p[0], -p[1]]).collect() }
    }

    pub fn first_component(&self) -> Vec<f64> {
        self.coeffs.iter().map(|p| p[0]).collect()
    }

    pub fn second_component(&self) -> Vec<f64> {
        self.coeffs.iter().map(|p| p[1]).collect()
    }

    fn check(&self, domain: &SpectralDomain) -> Result<()> {
        if self.n_modes() > domain.n_modes() {
            return Err(Error::invalid(format!(
                "state has {} modes but the domain stores {}",
                self.n_modes(),
                domain.n_modes()
            )));
        }
        Ok(())
    }
}

/// Which linear combination of the two components is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationSelector {
    /// `B = (1, 0)`.
    First,
    /// `B̂ = (μ₁, μ₂)`.
    Direction(f64, f64),
    /// `B̃ = I`.
    Full,
}

impl ObservationSelector {
    pub fn direction(mu1: f64, mu2: f64) -> Result<Self> {
        if mu1 == 0.0 && mu2 == 0.0 {
            return Err(Error::invalid("observation direction (0, 0) observes nothing"));
        }
        Ok(Self::Direction(mu1, mu2))
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ObservationSelector::Direction(m1, m2) if m1 == 0.0 && m2 == 0.0 => {
                Err(Error::invalid("observation direction (0, 0) observes nothing"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObservedField {
    Scalar(Vec<f64>),
    Pair(Vec<f64>, Vec<f64>),
}

impl ObservedField {
    /// Pointwise magnitude (Euclidean for pairs).
    pub fn magnitude(&self) -> Vec<f64> {
        match self {
            ObservedField::Scalar(f) => f.iter().map(|v| v.abs()).collect(),
            ObservedField::Pair(f, g) => f.iter().zip(g).map(|(x, y)| x.hypot(*y)).collect(),
        }
    }
}

/// Decay factor and rotation angle of mode `j` after time `t`.
#[inline]
pub fn mode_propagator(params: &PhysicalParams, lambda: f64, t: f64) -> (f64, f64, f64) {
    let decay = (-params.a() * lambda * t).exp();
    let (s, c) = (lambda * params.b() * t).sin_cos();
    (decay, c, s)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("time must be nonnegative and finite, got {t}")));
    }
    Ok(())
}

/// `e^{𝒜t} z`.
pub fn evolve(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> Result<SpectralState> {
    check_time(t)?;
    state.check(domain)?;
    Ok(evolve_unchecked(state, domain, params, t))
}

pub(crate) fn evolve_unchecked(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> SpectralState {
    let coeffs = state
        .coeffs
        .iter()
        .zip(domain.eigenvalues())
        .map(|(v, &lam)| {
            let (d, c, s) = mode_propagator(params, lam, t);
            [d * (c * v[0] + s * v[1]), d * (-s * v[0] + c * v[1])]
        })
        .collect();
    SpectralState { coeffs }
}

/// `e^{𝒜* t} z`: the transposed generator, used by the controlled system.
pub fn evolve_adjoint(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> Result<SpectralState> {
    check_time(t)?;
    state.check(domain)?;
    let coeffs = state
        .coeffs
        .iter()
        .zip(domain.eigenvalues())
        .map(|(v, &lam)| {
            let (d, c, s) = mode_propagator(params, lam, t);
            [d * (c * v[0] - s * v[1]), d * (s * v[0] + c * v[1])]
        })
        .collect();
    Ok(SpectralState { coeffs })
}

/// Mode coefficients of `B e^{𝒜t} z` for the First selector:
/// `v_j(t) = e^{−aλ_j t}(φ_{1,j} cos(λ_j b t) + φ_{2,j} sin(λ_j b t))`.
pub fn first_component_coeffs(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    t: f64,
) -> Vec<f64> {
    state
        .coeffs
        .iter()
        .zip(domain.eigenvalues())
        .map(|(v, &lam)| {
            let (d, c, s) = mode_propagator(params, lam, t);
            d * (c * v[0] + s * v[1])
        })
        .collect()
}

/// Observed scalar coefficients `μ₁ v_{1,j} + μ₂ v_{2,j}` (no evolution).
fn selector_coeffs(state: &SpectralState, mu1: f64, mu2: f64) -> Vec<f64> {
    state.coeffs.iter().map(|p| mu1 * p[0] + mu2 * p[1]).collect()
}

/// The observed field of `state` on the domain grid.
pub fn observe(
    state: &SpectralState,
    domain: &SpectralDomain,
    sel: ObservationSelector,
) -> Result<ObservedField> {
    sel.validate()?;
    state.check(domain)?;
    Ok(match sel {
        ObservationSelector::First => ObservedField::Scalar(domain.synthesize(&state.first_component())),
        ObservationSelector::Direction(m1, m2) => {
            ObservedField::Scalar(domain.synthesize(&selector_coeffs(state, m1, m2)))
        }
        ObservationSelector::Full => ObservedField::Pair(
            domain.synthesize(&state.first_component()),
            domain.synthesize(&state.second_component()),
        ),
    })
}

/// `‖χ_ω 𝔅 e^{𝒜t} z‖_{L¹}` by grid quadrature, `𝔅` given by the selector.
pub fn observed_trace_l1(
    state: &SpectralState,
    domain: &SpectralDomain,
    params: &PhysicalParams,
    sel: ObservationSelector,
    t: f64,
    mask: Option<&[bool]>,
) -> Result<f64> {
    check_time(t)?;
    if let Some(m) = mask {
        if m.len() != domain.n_cells() {
            return Err(Error::invalid(format!(
                "spatial mask has {} cells, grid has {}",
                m.len(),
                domain.n_cells()
            )));
        }
    }
    let evolved = evolve(state, domain, params, t)?;
    let field = observe(&evolved, domain, sel)?;
    Ok(domain.l1_norm(&field.magnitude(), mask))
}

/// `t ↦ v_j(t)`, the observed first-component coefficient of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTrace {
    pub mode: usize,
    pub lambda: f64,
    pub pair: [f64; 2],
    pub params: PhysicalParams,
}

impl ModeTrace {
    pub fn new(state: &SpectralState, domain: &SpectralDomain, params: &PhysicalParams, mode: usize) -> Self {
        Self {
            mode,
            lambda: domain.eigenvalue(mode),
            pair: state.coeffs[mode],
            params: *params,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let (d, c, s) = mode_propagator(&self.params, self.lambda, t);
        d * (self.pair[0] * c + self.pair[1] * s)
    }

    /// `e^{−aλ_j t} |v_j(0)|_2`, the envelope bounding `|v_j(t)|`.
    pub fn envelope(&self, t: f64) -> f64 {
        (-self.params.a() * self.lambda * t).exp() * self.pair[0].hypot(self.pair[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup() -> (SpectralDomain, PhysicalParams) {
        (
            SpectralDomain::interval(PI, 8, 512).unwrap(),
            PhysicalParams::new(1.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let (d, p) = setup();
        let z = SpectralState::from_flat(&[0.3, -1.0, 2.0, 0.5, 0.0, 1.0]);
        assert_eq!(evolve(&z, &d, &p, 0.0).unwrap(), z);
    }

    #[test]
    fn evolve_single_mode_at_pi() {
        let (d, p) = setup();
        let z = SpectralState::single_mode(8, 0, [1.0, 0.0]);
        let out = evolve(&z, &d, &p, PI).unwrap();
        // e^{−t}(cos t, −sin t) at t = π.
        assert!((out.coeffs()[0][0] + (-PI).exp()).abs() < 1e-15);
        assert!((out.coeffs()[0][0] + 0.043214).abs() < 1e-6);
        assert!(out.coeffs()[0][1].abs() < 1e-16);
    }

    #[test]
    fn unit_pair_halves_at_ln2() {
        let (d, p) = setup();
        let z = SpectralState::single_mode(8, 0, [0.6, 0.8]);
        let out = evolve(&z, &d, &p, 2f64.ln()).unwrap();
        assert!((out.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn negative_time_rejected() {
        let (d, p) = setup();
        assert!(evolve(&SpectralState::zeros(8), &d, &p, -1e-3).is_err());
    }

    #[test]
    fn observe_examples() {
        let (d, _) = setup();
        let z = SpectralState::single_mode(8, 0, [0.0, 1.0]);
        match observe(&z, &d, ObservationSelector::First).unwrap() {
            ObservedField::Scalar(f) => assert!(f.iter().all(|&v| v == 0.0)),
            _ => unreachable!(),
        }
        let z = SpectralState::single_mode(8, 0, [3.0, 4.0]);
        let sel = ObservationSelector::direction(0.6, 0.8).unwrap();
        let ObservedField::Scalar(f) = observe(&z, &d, sel).unwrap() else { unreachable!() };
        for (v, e) in f.iter().zip(d.mode_on_grid(0)) {
            assert!((v - 5.0 * e).abs() < 1e-12);
        }
        assert!(ObservationSelector::direction(0.0, 0.0).is_err());
        assert!(observe(&z, &d, ObservationSelector::Direction(0.0, 0.0)).is_err());
    }

    #[test]
    fn first_mode_value_at_midpoint() {
        let d = SpectralDomain::interval(PI, 4, 513).unwrap();
        let z = SpectralState::single_mode(4, 0, [1.0, 0.0]);
        let ObservedField::Scalar(f) = observe(&z, &d, ObservationSelector::First).unwrap() else {
            unreachable!()
        };
        // Cell 256 of 513 is centered at π/2.
        assert!((f[256] - (2.0 / PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn l1_trace_of_first_mode() {
        let (d, p) = setup();
        let z = SpectralState::single_mode(8, 0, [1.0, 0.0]);
        let tr = observed_trace_l1(&z, &d, &p, ObservationSelector::First, 0.0, None).unwrap();
        assert!((tr - 2.0 * (2.0 / PI).sqrt()).abs() < 1e-3);
        let zero = observed_trace_l1(&SpectralState::zeros(8), &d, &p, ObservationSelector::First, 0.3, None);
        assert_eq!(zero.unwrap(), 0.0);
        let bad = vec![true; 10];
        assert!(observed_trace_l1(&z, &d, &p, ObservationSelector::First, 0.0, Some(&bad)).is_err());
    }

    #[test]
    fn mode_trace_matches_formula() {
        let (d, p) = setup();
        let z = SpectralState::single_mode(8, 2, [0.4, -0.7]);
        let tr = ModeTrace::new(&z, &d, &p, 2);
        assert_eq!(tr.value(0.0), 0.4);
        for k in 0..50 {
            let t = k as f64 * 0.05;
            assert!(tr.value(t).abs() <= tr.envelope(t) * (1.0 + 1e-14));
        }
    }
}
