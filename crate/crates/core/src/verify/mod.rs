//! Independent numerical oracles: envelope-matched Gauss–Hermite quadrature
//! for inner products and moments, the Schrödinger residual, Gram matrices
//! and moment cross-checks against the closed forms.

pub mod quadrature;
pub mod suite;

use num_complex::Complex64 as C64;

use crate::dynamics::{integrate_bundle, GaussianSeed, TrajectorySample};
use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams};
use crate::observables::{self, MomentReport, StateKind};
use crate::states::{self, PolyGaussian};

pub use quadrature::{gauss_hermite, GaussHermite};

/// Default Gauss–Hermite node count.
pub const DEFAULT_NODES: usize = 120;

/// Time step of the 5-point stencil before scaling by max(1, 1/ω₀).
pub const RESIDUAL_STEP: f64 = 1e-5;

/// Gauss–Hermite rule recentred on x(t) and scaled to the Gaussian width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub node_count: usize,
    pub center: f64,
    pub scale: f64,
}

impl QuadratureSpec {
    pub fn new(node_count: usize, center: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !center.is_finite() {
            return Err(Error::InvalidQuadrature(format!("center {center}, scale {scale}")));
        }
        Ok(Self { node_count, center, scale })
    }

    /// Envelope-matched rule adequate for every state in `states`.
    pub fn for_states(states: &[&PolyGaussian]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidQuadrature("no states".into()))?;
        let deg = states.iter().map(|s| s.coeffs.len().saturating_sub(1)).max().unwrap_or(0);
        Self::new(DEFAULT_NODES.max(Self::required_nodes(deg)), first.core.center, first.core.width())
    }

    pub fn required_nodes(max_degree: usize) -> usize {
        2 * max_degree + 20
    }

    /// Physical abscissae and the matching weights for integrands that
    /// already contain the Gaussian envelope.
    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        let rule = gauss_hermite(self.node_count)?;
        let jac = std::f64::consts::SQRT_2 * self.scale;
        Ok(rule
            .nodes
            .iter()
            .zip(&rule.scaled_weights)
            .map(|(u, sw)| (self.center + jac * u, sw * jac))
            .collect())
    }

    fn check_degree(&self, max_degree: usize) -> Result<()> {
        let required = Self::required_nodes(max_degree);
        if self.node_count < required {
            return Err(Error::InsufficientNodes { given: self.node_count, required });
        }
        Ok(())
    }
}

fn check_same_time(a: &PolyGaussian, b: &PolyGaussian) -> Result<()> {
    if (a.t() - b.t()).abs() > 1e-15 * a.t().abs().max(1.0) {
        return Err(Error::TimeMismatch { ctx: a.t(), state: b.t() });
    }
    Ok(())
}

/// ⟨s1|s2⟩ = ∫ conj(Ψ₁) Ψ₂ dx. Exact for states sharing a Gaussian core up
/// to polynomial degree 2·node_count − 1.
pub fn inner_product(s1: &PolyGaussian, s2: &PolyGaussian, spec: &QuadratureSpec) -> Result<C64> {
    check_same_time(s1, s2)?;
    let deg = s1.coeffs.len().max(s2.coeffs.len()).saturating_sub(1);
    spec.check_degree(deg)?;
    let rule = gauss_hermite(spec.node_count)?;
    let jac = std::f64::consts::SQRT_2 * spec.scale;
    let mut acc = C64::new(0.0, 0.0);
    for (u, w) in rule.nodes.iter().zip(&rule.weights) {
        let x = spec.center + jac * u;
        let xi1 = x - s1.core.center;
        let xi2 = x - s2.core.center;
        // the e^{−u²} weight is divided out in log space
        let log = s1.core.log_amplitude(xi1).conj() + s2.core.log_amplitude(xi2) + u * u;
        acc += w * s1.poly_at(xi1).conj() * s2.poly_at(xi2) * log.exp();
    }
    Ok(acc * jac)
}

pub fn norm_sqr(state: &PolyGaussian) -> Result<f64> {
    let spec = QuadratureSpec::for_states(&[state])?;
    Ok(inner_product(state, state, &spec)?.re)
}

/// ‖a − b‖₂ for two states at the same time.
pub fn distance(a: &PolyGaussian, b: &PolyGaussian) -> Result<f64> {
    check_same_time(a, b)?;
    let spec = QuadratureSpec::for_states(&[a, b])?;
    let mut acc = 0.0;
    for (x, w) in spec.points()? {
        acc += w * (a.evaluate(x) - b.evaluate(x)).norm_sqr();
    }
    Ok(acc.sqrt())
}

/// Moments of a state obtained purely by quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub norm: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub x2_mean: f64,
    pub p2_mean: f64,
    pub energy: f64,
}

/// ⟨x⟩, ⟨x²⟩ from x-weighted |Ψ|² on the nodes; ⟨p⟩, ⟨p²⟩ from the analytic
/// p̂Ψ; all normalized by the quadrature norm.
pub fn quadrature_moments(params: &OscillatorParams, state: &PolyGaussian) -> Result<QuadratureMoments> {
    let dp = states::momentum_operator_apply(state);
    let spec = QuadratureSpec::for_states(&[state, &dp])?;
    let (mut n, mut x1, mut x2, mut p1, mut p2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, w) in spec.points()? {
        let psi = state.evaluate(x);
        let ppsi = dp.evaluate(x);
        let dens = w * psi.norm_sqr();
        n += dens;
        x1 += dens * x;
        x2 += dens * x * x;
        p1 += w * (psi.conj() * ppsi).re;
        p2 += w * ppsi.norm_sqr();
    }
    let t = state.t();
    let (x1, x2, p1, p2) = (x1 / n, x2 / n, p1 / n, p2 / n);
    let energy = (-2.0 * params.gamma * t).exp() * p2 / (2.0 * params.m)
        + 0.5 * params.m * params.omega0 * params.omega0 * x2;
    Ok(QuadratureMoments { norm: n, x_mean: x1, p_mean: p1, x2_mean: x2, p2_mean: p2, energy })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub t: f64,
    /// ‖iħ∂ₜΨ − ĤΨ‖₂ / ‖Ψ‖₂
    pub residual: f64,
    pub step: f64,
    pub nodes: usize,
    pub one_sided: bool,
}

/// Stencil step 1e−5·max(1, 1/ω₀).
pub fn residual_step(params: &OscillatorParams) -> f64 {
    if params.omega0 > 0.0 {
        RESIDUAL_STEP * (1.0 / params.omega0).max(1.0)
    } else {
        RESIDUAL_STEP
    }
}

/// Times at which the residual at `t` evaluates the family.
pub fn stencil_times(t: f64, h: f64) -> (Vec<f64>, bool) {
    if t - 2.0 * h >= 0.0 {
        ((-2..=2).map(|k| t + k as f64 * h).collect(), false)
    } else {
        ((0..=4).map(|k| t + k as f64 * h).collect(), true)
    }
}

/// Residual of the Schrödinger equation for a state family t ↦ Ψ(t). ĤΨ
/// uses analytic x-derivatives; ∂ₜΨ a 5-point finite difference (forward
/// near t = 0).
pub fn schrodinger_residual<F>(
    family: F,
    params: &OscillatorParams,
    t: f64,
    step: Option<f64>,
) -> Result<ResidualReport>
where
    F: Fn(f64) -> Result<PolyGaussian>,
{
    let h = step.unwrap_or_else(|| residual_step(params));
    let (times, one_sided) = stencil_times(t, h);
    let family_at: Vec<PolyGaussian> = times.iter().map(|&s| family(s)).collect::<Result<_>>()?;
    let here = if one_sided { &family_at[0] } else { &family_at[2] };
    let h_psi = states::apply_hamiltonian(params, here);
    let spec = QuadratureSpec::for_states(&[here, &h_psi])?;
    let (c, denom) = if one_sided {
        ([-25.0, 48.0, -36.0, 16.0, -3.0], 12.0 * h)
    } else {
        ([1.0, -8.0, 0.0, 8.0, -1.0], 12.0 * h)
    };
    let (mut num, mut den) = (0.0, 0.0);
    for (x, w) in spec.points()? {
        let mut dt = C64::new(0.0, 0.0);
        for (ck, st) in c.iter().zip(&family_at) {
            if *ck != 0.0 {
                dt += *ck * st.evaluate(x);
            }
        }
        dt /= denom;
        let r = C64::new(0.0, params.hbar) * dt - h_psi.evaluate(x);
        num += w * r.norm_sqr();
        den += w * here.evaluate(x).norm_sqr();
    }
    Ok(ResidualReport { t, residual: (num / den).sqrt(), step: h, nodes: spec.node_count, one_sided })
}

/// Builds |n⟩ or |α⟩ from a trajectory sample.
pub fn build_state(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    kind: StateKind,
) -> Result<PolyGaussian> {
    match kind {
        StateKind::Tcs(n) => states::fock(params, seed, sample, n),
        StateKind::Cs(alpha) => states::coherent(params, seed, sample, alpha, None),
    }
}

/// Residual for |n⟩ or |α⟩ at time t. The trajectory is integrated once on a
/// grid holding the whole stencil. `w_fault` rescales w by (1 + w_fault)
/// before the states are built; a non-zero value must break exactness.
pub fn state_residual(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    kind: StateKind,
    t: f64,
    w_fault: f64,
) -> Result<ResidualReport> {
    state_residual_with_step(params, seed, kind, t, w_fault, residual_step(params))
}

/// `state_residual` with an explicit stencil step.
pub fn state_residual_with_step(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    kind: StateKind,
    t: f64,
    w_fault: f64,
    h: f64,
) -> Result<ResidualReport> {
    let (times, _) = stencil_times(t, h);
    let mut grid = vec![0.0];
    grid.extend(times.iter().copied().filter(|&s| s > 0.0));
    let bundle = integrate_bundle(params, seed, &grid)?;
    let family = |s: f64| {
        let mut smp = *bundle
            .sample_exact(s)
            .ok_or_else(|| Error::BadTimeGrid(format!("no sample at t = {s}")))?;
        smp.w *= 1.0 + w_fault;
        build_state(params, seed, &smp, kind)
    };
    schrodinger_residual(family, params, t, Some(h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub matrix: Vec<Vec<C64>>,
    pub max_deviation: f64,
}

/// ⟨n|m⟩ for n, m ≤ n_max ≤ 8 at time t.
pub fn gram_matrix(params: &OscillatorParams, seed: &GaussianSeed, t: f64, n_max: usize) -> Result<GramReport> {
    if n_max > 8 {
        return Err(Error::LevelTooHigh { n: n_max, max: 8 });
    }
    let grid = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    let bundle = integrate_bundle(params, seed, &grid)?;
    let sample = bundle.samples.last().expect("bundle holds t");
    let tower = states::fock_tower(params, seed, sample, n_max)?;
    let refs: Vec<&PolyGaussian> = tower.iter().collect();
    let spec = QuadratureSpec::for_states(&refs)?;
    let mut matrix = vec![vec![C64::new(0.0, 0.0); n_max + 1]; n_max + 1];
    let mut max_deviation: f64 = 0.0;
    for i in 0..=n_max {
        for j in 0..=n_max {
            let v = inner_product(&tower[i], &tower[j], &spec)?;
            let ideal = if i == j { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((v - ideal).norm());
            matrix[i][j] = v;
        }
    }
    Ok(GramReport { matrix, max_deviation })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub closed: MomentReport,
    pub quadrature: QuadratureMoments,
    /// Largest relative gap; first moments are measured against the
    /// root-mean-square scale so that ⟨x⟩ ≈ 0 does not blow up.
    pub max_rel_error: f64,
}

/// Compares the closed-form averages of a sample against quadrature on the
/// state actually built from it.
pub fn crosscheck_sample(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    kind: StateKind,
) -> Result<MomentCheck> {
    let state = build_state(params, seed, sample, kind)?;
    let closed = match kind {
        StateKind::Tcs(n) => observables::moments_tcs(params, seed, sample, n),
        StateKind::Cs(alpha) => observables::moments_cs(params, seed, sample, alpha),
    };
    let q = quadrature_moments(params, &state)?;
    let rel = |a: f64, b: f64, scale: f64| (a - b).abs() / scale.abs().max(f64::MIN_POSITIVE);
    let errs = [
        (q.norm - 1.0).abs(),
        rel(closed.x_mean, q.x_mean, closed.x2_mean.sqrt()),
        rel(closed.p_mean, q.p_mean, closed.p2_mean.sqrt()),
        rel(closed.x2_mean, q.x2_mean, closed.x2_mean),
        rel(closed.p2_mean, q.p2_mean, closed.p2_mean),
        rel(closed.energy, q.energy, closed.energy),
    ];
    let max_rel_error = errs.iter().copied().fold(0.0, f64::max);
    Ok(MomentCheck { closed, quadrature: q, max_rel_error })
}

/// `crosscheck_sample` at time t on a freshly integrated trajectory.
pub fn crosscheck_moments(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    t: f64,
    kind: StateKind,
) -> Result<MomentCheck> {
    let grid = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    let bundle = integrate_bundle(params, seed, &grid)?;
    crosscheck_sample(params, seed, bundle.samples.last().expect("bundle holds t"), kind)
}

/// E(t) along a sampled trajectory.
pub fn energy_series(params: &OscillatorParams, samples: &[TrajectorySample]) -> Vec<f64> {
    samples
        .iter()
        .map(|s| model::mechanical_energy(params, s.x, s.p, s.t))
        .collect()
}
