//! Quantum states as a complex polynomial in the co-moving coordinate
//! ξ = x − x(t) times the Gaussian vacuum
//!
//! ```text
//! Ψ₀(x, t) = N z(t)^{−1/2} exp{ i/ħ [S₀(t) + p(t) ξ + ½ Q(t) ξ²] },   Q = w/z.
//! ```
//!
//! Ladder operators, x̂ and p̂ all act on the polynomial only, so every state
//! reachable from the vacuum shares its Gaussian core.

use num_complex::Complex64 as C64;

use crate::dynamics::{GaussianSeed, TrajectorySample};
use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams};

/// Highest Fock level `fock` will build.
pub const FOCK_MAX: usize = 64;

/// Squared-norm tail the default coherent-state truncation is pushed below.
pub const COHERENT_TAIL: f64 = 1e-24;

const TIME_MATCH: f64 = 1e-15;

/// The Gaussian factor N Φ(t) e^{iS/ħ} without the polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianCore {
    pub t: f64,
    /// x(t)
    pub center: f64,
    /// p(t)
    pub momentum: f64,
    /// Q = w/z, with Im Q = Im b / |z|² > 0.
    pub quad: C64,
    pub s0: C64,
    /// ln Φ = −(ln|z| + i arg z)/2 on the unwound branch.
    pub phi_log: C64,
    /// ln N = ¼ ln(Im b / πħ).
    pub norm_log: f64,
    pub hbar: f64,
}

impl GaussianCore {
    pub fn new(params: &OscillatorParams, seed: &GaussianSeed, sample: &TrajectorySample) -> Self {
        let hbar = params.hbar;
        Self {
            t: sample.t,
            center: sample.x,
            momentum: sample.p,
            quad: sample.w / sample.z,
            s0: sample.s0,
            phi_log: C64::new(-0.5 * sample.z.norm().ln(), -0.5 * sample.argz),
            norm_log: 0.25 * (seed.im_b() / (std::f64::consts::PI * hbar)).ln(),
            hbar,
        }
    }

    /// Width of |Ψ₀|² as a normal density: (ħ / (2 Im Q))^{1/2}.
    pub fn width(&self) -> f64 {
        (self.hbar / (2.0 * self.quad.im)).sqrt()
    }

    /// ln of the Gaussian factor at offset ξ.
    pub fn log_amplitude(&self, xi: f64) -> C64 {
        let phase = self.s0 + self.momentum * xi + 0.5 * self.quad * xi * xi;
        self.norm_log + self.phi_log + C64::i() * phase / self.hbar
    }

    fn same_time(&self, t: f64) -> bool {
        (self.t - t).abs() <= TIME_MATCH * self.t.abs().max(1.0)
    }
}

/// P(ξ) × Gaussian core.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyGaussian {
    pub core: GaussianCore,
    /// c₀..c_d in powers of ξ.
    pub coeffs: Vec<C64>,
}

/// Coefficients of â(t), â⁺(t) at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderContext {
    pub t: f64,
    pub w: C64,
    pub z: C64,
    pub im_b: f64,
    pub hbar: f64,
    /// (2ħ Im b)^{−1/2}
    pub c: f64,
}

impl LadderContext {
    pub fn new(params: &OscillatorParams, seed: &GaussianSeed, sample: &TrajectorySample) -> Self {
        let im_b = seed.im_b();
        Self {
            t: sample.t,
            w: sample.w,
            z: sample.z,
            im_b,
            hbar: params.hbar,
            c: 1.0 / (2.0 * params.hbar * im_b).sqrt(),
        }
    }

    /// (2 Im b / ħ)^{−1/2}, the ladder-to-x̂/p̂ scale.
    pub fn quadrature_scale(&self) -> f64 {
        (self.hbar / (2.0 * self.im_b)).sqrt()
    }

    fn check(&self, state: &PolyGaussian) -> Result<()> {
        if state.core.same_time(self.t) {
            Ok(())
        } else {
            Err(Error::TimeMismatch { ctx: self.t, state: state.core.t })
        }
    }
}

fn derivative(p: &[C64]) -> Vec<C64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

fn shift_up(p: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(C64::new(0.0, 0.0));
    out.extend_from_slice(p);
    out
}

fn add_into(acc: &mut Vec<C64>, p: &[C64], scale: C64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), C64::new(0.0, 0.0));
    }
    for (a, c) in acc.iter_mut().zip(p) {
        *a += scale * c;
    }
}

fn horner(p: &[C64], xi: f64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * xi + c)
}

impl PolyGaussian {
    pub fn new(core: GaussianCore, coeffs: Vec<C64>) -> Self {
        Self { core, coeffs }
    }

    pub fn t(&self) -> f64 {
        self.core.t
    }

    /// Degree of the polynomial ignoring trailing exact zeros; `None` for
    /// the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn scaled(&self, a: C64) -> Self {
        Self::new(self.core, self.coeffs.iter().map(|c| c * a).collect())
    }

    /// self + a · other; both must share the Gaussian core.
    pub fn add_scaled(&self, other: &PolyGaussian, a: C64) -> Result<Self> {
        if !self.core.same_time(other.core.t) {
            return Err(Error::TimeMismatch { ctx: self.core.t, state: other.core.t });
        }
        let mut coeffs = self.coeffs.clone();
        add_into(&mut coeffs, &other.coeffs, a);
        Ok(Self::new(self.core, coeffs))
    }

    /// Wavefunction value at x, assembled in log space.
    pub fn evaluate(&self, x: f64) -> C64 {
        let xi = x - self.core.center;
        horner(&self.coeffs, xi) * self.core.log_amplitude(xi).exp()
    }

    /// Polynomial value P(ξ) alone.
    pub fn poly_at(&self, xi: f64) -> C64 {
        horner(&self.coeffs, xi)
    }
}

/// Ψ₀ = N Φ(t) e^{iS/ħ}; at t = 0 this is the Cauchy datum
/// N exp{i/ħ [p₀(x − x₀) + b(x − x₀)²/2]}.
pub fn vacuum(params: &OscillatorParams, seed: &GaussianSeed, sample: &TrajectorySample) -> PolyGaussian {
    PolyGaussian::new(GaussianCore::new(params, seed, sample), vec![C64::new(1.0, 0.0)])
}

/// â⁺: P ↦ c [−iħ z̄ P′ + (2i Im b / z) ξ P].
pub fn apply_raise(state: &PolyGaussian, ctx: &LadderContext) -> Result<PolyGaussian> {
    ctx.check(state)?;
    let d = derivative(&state.coeffs);
    let mut out = shift_up(&state.coeffs);
    let xi_coef = C64::new(0.0, 2.0 * ctx.im_b) / ctx.z;
    for v in out.iter_mut() {
        *v *= xi_coef;
    }
    add_into(&mut out, &d, C64::new(0.0, -ctx.hbar) * ctx.z.conj());
    for v in out.iter_mut() {
        *v *= ctx.c;
    }
    Ok(PolyGaussian::new(state.core, out))
}

/// â: P ↦ −iħ c z P′ (the ξP term cancels identically).
pub fn apply_lower(state: &PolyGaussian, ctx: &LadderContext) -> Result<PolyGaussian> {
    ctx.check(state)?;
    let k = C64::new(0.0, -ctx.hbar) * ctx.z * ctx.c;
    let mut out: Vec<C64> = derivative(&state.coeffs).into_iter().map(|v| v * k).collect();
    if out.is_empty() {
        out.push(C64::new(0.0, 0.0));
    }
    Ok(PolyGaussian::new(state.core, out))
}

/// |0⟩, |1⟩, …, |n_max⟩ built by repeated raising.
pub fn fock_tower(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    n_max: usize,
) -> Result<Vec<PolyGaussian>> {
    if n_max > FOCK_MAX {
        return Err(Error::LevelTooHigh { n: n_max, max: FOCK_MAX });
    }
    let ctx = LadderContext::new(params, seed, sample);
    let mut tower = Vec::with_capacity(n_max + 1);
    tower.push(vacuum(params, seed, sample));
    for n in 1..=n_max {
        let raised = apply_raise(&tower[n - 1], &ctx)?;
        tower.push(raised.scaled(C64::new(1.0 / (n as f64).sqrt(), 0.0)));
    }
    Ok(tower)
}

/// |n⟩ = (n!)^{−1/2} (â⁺)ⁿ |0⟩.
pub fn fock(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    n: usize,
) -> Result<PolyGaussian> {
    Ok(fock_tower(params, seed, sample, n)?.pop().expect("tower has n + 1 levels"))
}

/// Ψ₀(x), …, Ψ_{n_max}(x) at a single point from the three-term recurrence
///
/// ```text
/// √(n+1) Ψₙ₊₁ = c (2i Im b / z) ξ Ψₙ + (z̄/z) √n Ψₙ₋₁,
/// ```
///
/// which follows from â|n⟩ = √n |n−1⟩. Unlike Horner on the monomial
/// coefficients it does not cancel catastrophically at high levels, where the
/// monomial form loses about 1e−7 of the norm by n = 50.
pub fn fock_values(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    n_max: usize,
    x: f64,
) -> Result<Vec<C64>> {
    if n_max > FOCK_MAX {
        return Err(Error::LevelTooHigh { n: n_max, max: FOCK_MAX });
    }
    let core = GaussianCore::new(params, seed, sample);
    let ctx = LadderContext::new(params, seed, sample);
    let xi = x - core.center;
    let a = C64::new(0.0, 2.0 * ctx.im_b) / ctx.z * ctx.c * xi;
    let r = ctx.z.conj() / ctx.z;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(core.log_amplitude(xi).exp());
    for n in 0..n_max {
        let prev = if n == 0 { C64::new(0.0, 0.0) } else { out[n - 1] * r * (n as f64).sqrt() };
        let next = (a * out[n] + prev) / ((n + 1) as f64).sqrt();
        out.push(next);
    }
    Ok(out)
}

/// Minimum truncation accepted for a coherent state: |α|² + 10 (|α|² + 1)^{1/2}.
pub fn truncation_rule(alpha: C64) -> usize {
    let a2 = alpha.norm_sqr();
    (a2 + 10.0 * (a2 + 1.0).sqrt()).ceil() as usize
}

/// e^{−|α|²} Σ_{n>K} |α|^{2n}/n!, the squared norm dropped by truncating at K.
pub fn coherent_tail(alpha: C64, truncation: usize) -> f64 {
    let a2 = alpha.norm_sqr();
    if a2 == 0.0 {
        return 0.0;
    }
    let mut log_term = -a2;
    for n in 1..=truncation + 1 {
        log_term += a2.ln() - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = truncation + 1;
    loop {
        let term = log_term.exp();
        tail += term;
        if n as f64 > a2 && term < 1e-40 * tail.max(1e-300) || term == 0.0 && n as f64 > a2 {
            break;
        }
        n += 1;
        log_term += a2.ln() - (n as f64).ln();
    }
    tail
}

/// Default truncation: the rule minimum, raised until the tail drops below
/// `COHERENT_TAIL`.
pub fn default_truncation(alpha: C64) -> usize {
    let mut k = truncation_rule(alpha);
    while coherent_tail(alpha, k) > COHERENT_TAIL {
        k += 1;
    }
    k
}

/// |α⟩ = e^{−|α|²/2} Σ_{n≤K} αⁿ (n!)^{−1/2} |n⟩ as a single polynomial.
pub fn coherent(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    alpha: C64,
    truncation: Option<usize>,
) -> Result<PolyGaussian> {
    let required = truncation_rule(alpha);
    let k = match truncation {
        Some(k) if k < required => {
            return Err(Error::TruncationTooLow { given: k, required, abs_alpha: alpha.norm() })
        }
        Some(k) => k,
        None => default_truncation(alpha),
    };
    let ctx = LadderContext::new(params, seed, sample);
    let mut level = vacuum(params, seed, sample);
    let mut weight = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut acc = level.scaled(weight);
    for n in 1..=k {
        let s = 1.0 / (n as f64).sqrt();
        level = apply_raise(&level, &ctx)?.scaled(C64::new(s, 0.0));
        weight *= alpha * s;
        acc = acc.add_scaled(&level, weight)?;
    }
    Ok(acc)
}

/// x̂Ψ: the polynomial times x(t) + ξ.
pub fn position_operator_apply(state: &PolyGaussian) -> PolyGaussian {
    let mut out = shift_up(&state.coeffs);
    add_into(&mut out, &state.coeffs, C64::new(state.core.center, 0.0));
    PolyGaussian::new(state.core, out)
}

/// p̂Ψ = [−iħP′ + (p(t) + Qξ)P] e^{iS/ħ}.
pub fn momentum_operator_apply(state: &PolyGaussian) -> PolyGaussian {
    let core = &state.core;
    let mut out: Vec<C64> = shift_up(&state.coeffs).into_iter().map(|v| v * core.quad).collect();
    add_into(&mut out, &state.coeffs, C64::new(core.momentum, 0.0));
    add_into(&mut out, &derivative(&state.coeffs), C64::new(0.0, -core.hbar));
    PolyGaussian::new(state.core, out)
}

/// x̂ = x(t) − i(2 Im b/ħ)^{−1/2} (z â⁺ − z̄ â).
pub fn position_via_ladder(state: &PolyGaussian, ctx: &LadderContext) -> Result<PolyGaussian> {
    via_ladder(state, ctx, ctx.z, state.core.center)
}

/// p̂ = p(t) − i(2 Im b/ħ)^{−1/2} (w â⁺ − w̄ â).
pub fn momentum_via_ladder(state: &PolyGaussian, ctx: &LadderContext) -> Result<PolyGaussian> {
    via_ladder(state, ctx, ctx.w, state.core.momentum)
}

fn via_ladder(state: &PolyGaussian, ctx: &LadderContext, u: C64, shift: f64) -> Result<PolyGaussian> {
    let up = apply_raise(state, ctx)?;
    let down = apply_lower(state, ctx)?;
    let k = C64::new(0.0, -ctx.quadrature_scale());
    let combo = up.scaled(u * k).add_scaled(&down, -u.conj() * k)?;
    combo.add_scaled(state, C64::new(shift, 0.0))
}

/// ĤΨ with Ĥ = e^{−γt} p̂²/(2m) + ½ e^{γt} m ω₀² x̂².
pub fn apply_hamiltonian(params: &OscillatorParams, state: &PolyGaussian) -> PolyGaussian {
    let hess = model::hessian_along(params, state.core.t);
    let pp = momentum_operator_apply(&momentum_operator_apply(state));
    let xx = position_operator_apply(&position_operator_apply(state));
    let mut coeffs: Vec<C64> = pp.coeffs.iter().map(|c| c * (0.5 * hess.h_pp)).collect();
    add_into(&mut coeffs, &xx.coeffs, C64::new(0.5 * hess.h_xx, 0.0));
    PolyGaussian::new(state.core, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{closed_form_sample, integrate_bundle};

    fn setup(m: f64, w0: f64, g: f64, b: C64, t: f64) -> (OscillatorParams, GaussianSeed, TrajectorySample) {
        let p = OscillatorParams::new(m, w0, g, 1.0).unwrap();
        let s = GaussianSeed::reference(&p, b).unwrap();
        let grid = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
        let bundle = integrate_bundle(&p, &s, &grid).unwrap();
        let smp = *bundle.samples.last().unwrap();
        (p, s, smp)
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or_default();
                let y = b.get(i).copied().unwrap_or_default();
                (x - y).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn vacuum_amplitude_at_center_is_n() {
        let (p, s, smp) = setup(1.0, 1.0, 0.4, C64::new(0.2, 1.3), 0.0);
        let v = vacuum(&p, &s, &smp);
        let n = (1.3 / std::f64::consts::PI).powf(0.25);
        assert!((v.evaluate(s.x0) - n).norm() < 1e-15);
    }

    #[test]
    fn vacuum_at_t0_is_cauchy_datum() {
        let (p, s, smp) = setup(1.2, 0.7, 0.5, C64::new(0.3, 0.9), 0.0);
        let v = vacuum(&p, &s, &smp);
        let n = (0.9 / std::f64::consts::PI).powf(0.25);
        for x in [-1.0, 0.2, 1.7, 2.5] {
            let d = x - s.x0;
            let expect = n * (C64::i() * (s.p0 * d + 0.5 * s.b() * d * d)).exp();
            assert!((v.evaluate(x) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn raise_on_vacuum() {
        let (p, s, smp) = setup(1.0, 1.0, 0.3, C64::new(0.1, 0.8), 1.4);
        let ctx = LadderContext::new(&p, &s, &smp);
        let one = apply_raise(&vacuum(&p, &s, &smp), &ctx).unwrap();
        assert_eq!(one.degree(), Some(1));
        let expect = ctx.c * C64::new(0.0, 2.0 * 0.8) / smp.z;
        assert!((one.coeffs[1] - expect).norm() < 1e-15);
        assert_eq!(one.coeffs[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn lower_annihilates_vacuum_exactly() {
        let (p, s, smp) = setup(1.0, 1.0, 0.3, C64::new(0.1, 0.8), 2.1);
        let ctx = LadderContext::new(&p, &s, &smp);
        assert!(apply_lower(&vacuum(&p, &s, &smp), &ctx).unwrap().is_zero());
    }

    #[test]
    fn lower_steps_down_the_tower() {
        let (p, s, smp) = setup(1.0, 0.8, 0.6, C64::new(-0.2, 1.1), 1.7);
        let ctx = LadderContext::new(&p, &s, &smp);
        let tower = fock_tower(&p, &s, &smp, 5).unwrap();
        for n in 1..=5 {
            assert_eq!(tower[n].degree(), Some(n));
            let low = apply_lower(&tower[n], &ctx).unwrap();
            let expect = tower[n - 1].scaled(C64::new((n as f64).sqrt(), 0.0));
            assert!(max_diff(&low.coeffs, &expect.coeffs) < 1e-12);
        }
    }

    #[test]
    fn commutator_is_identity_on_polynomials() {
        let (p, s, smp) = setup(1.3, 1.0, 0.9, C64::new(0.4, 0.6), 3.3);
        let ctx = LadderContext::new(&p, &s, &smp);
        let core = vacuum(&p, &s, &smp).core;
        for deg in 0..=8 {
            let coeffs: Vec<C64> = (0..=deg)
                .map(|k| C64::new(0.3 + 0.1 * k as f64, -0.2 * k as f64 + 0.05))
                .collect();
            let st = PolyGaussian::new(core, coeffs);
            let a = apply_lower(&apply_raise(&st, &ctx).unwrap(), &ctx).unwrap();
            let b = apply_raise(&apply_lower(&st, &ctx).unwrap(), &ctx).unwrap();
            let comm = a.add_scaled(&b, C64::new(-1.0, 0.0)).unwrap();
            let scale = st.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(max_diff(&comm.coeffs, &st.coeffs) < 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn context_mismatch_rejected() {
        let (p, s, smp) = setup(1.0, 1.0, 0.3, C64::new(0.0, 1.0), 1.0);
        let mut other = smp;
        other.t = 1.5;
        let ctx = LadderContext::new(&p, &s, &other);
        let v = vacuum(&p, &s, &smp);
        assert!(matches!(apply_raise(&v, &ctx), Err(Error::TimeMismatch { .. })));
        assert!(apply_lower(&v, &ctx).is_err());
    }

    #[test]
    fn fock_bounds() {
        let (p, s, smp) = setup(1.0, 1.0, 0.0, C64::new(0.0, 1.0), 0.0);
        assert_eq!(fock(&p, &s, &smp, 0).unwrap(), vacuum(&p, &s, &smp));
        assert!(fock(&p, &s, &smp, FOCK_MAX).is_ok());
        assert!(matches!(fock(&p, &s, &smp, FOCK_MAX + 1), Err(Error::LevelTooHigh { .. })));
    }

    /// Physicists' Hermite polynomial coefficients from H_{n+1} = 2u H_n − 2n H_{n−1}.
    fn hermite_coeffs(n: usize) -> Vec<f64> {
        let mut prev = vec![1.0];
        if n == 0 {
            return prev;
        }
        let mut cur = vec![0.0, 2.0];
        for k in 1..n {
            let mut next = vec![0.0; k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= 2.0 * k as f64 * c;
            }
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn undamped_tower_is_hermite() {
        let (m, w0) = (1.4, 0.9);
        for t in [0.0, 0.8, 2.9] {
            let (p, s, smp) = setup(m, w0, 0.0, C64::new(0.0, m * w0), t);
            let tower = fock_tower(&p, &s, &smp, 7).unwrap();
            // ξ = u (ħ/mω₀)^{1/2}
            let len = (1.0 / (m * w0)).sqrt();
            for (n, st) in tower.iter().enumerate() {
                let h = hermite_coeffs(n);
                let scaled: Vec<C64> = st.coeffs.iter().enumerate().map(|(k, c)| c * len.powi(k as i32)).collect();
                let ratio = scaled[n] / h[n];
                let size = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
                for k in 0..=n {
                    let err = (scaled[k] - ratio * h[k]).norm();
                    assert!(err < 1e-11 * size, "n={n} k={k} err={err:e} size={size:e}");
                }
            }
        }
    }

    #[test]
    fn recurrence_values_match_tower() {
        let (p, s, smp) = setup(1.1, 0.8, 0.6, C64::new(0.3, 0.7), 1.4);
        let tower = fock_tower(&p, &s, &smp, 12).unwrap();
        for x in [-1.3, 0.2, smp.x, 2.5] {
            let vals = fock_values(&p, &s, &smp, 12, x).unwrap();
            for (n, st) in tower.iter().enumerate() {
                let direct = st.evaluate(x);
                assert!((vals[n] - direct).norm() < 1e-12 * direct.norm().max(1e-3), "n={n} x={x}");
            }
        }
        assert!(fock_values(&p, &s, &smp, FOCK_MAX + 1, 0.0).is_err());
    }

    #[test]
    fn position_operator_on_vacuum() {
        let (p, s, smp) = setup(1.0, 1.0, 0.0, C64::new(0.0, 1.0), 0.0);
        let xv = position_operator_apply(&vacuum(&p, &s, &smp));
        assert_eq!(xv.coeffs, vec![C64::new(s.x0, 0.0), C64::new(1.0, 0.0)]);
    }

    #[test]
    fn ladder_recombination_matches_direct_operators() {
        let (p, s, smp) = setup(0.9, 1.1, 0.7, C64::new(0.25, 0.75), 2.2);
        let ctx = LadderContext::new(&p, &s, &smp);
        for st in fock_tower(&p, &s, &smp, 4).unwrap() {
            let direct = position_operator_apply(&st);
            let ladder = position_via_ladder(&st, &ctx).unwrap();
            assert!(max_diff(&direct.coeffs, &ladder.coeffs) < 1e-12);
            let direct = momentum_operator_apply(&st);
            let ladder = momentum_via_ladder(&st, &ctx).unwrap();
            let scale = direct.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
            assert!(max_diff(&direct.coeffs, &ladder.coeffs) < 1e-10 * scale);
        }
    }

    #[test]
    fn first_excited_state_has_node_at_center() {
        let (p, s, smp) = setup(1.0, 1.0, 0.5, C64::new(0.1, 1.2), 1.9);
        let one = fock(&p, &s, &smp, 1).unwrap();
        assert_eq!(one.evaluate(smp.x).norm(), 0.0);
        let zero = vacuum(&p, &s, &smp);
        for d in [0.1, 0.5, 1.3] {
            let a = zero.evaluate(smp.x + d).norm();
            let b = zero.evaluate(smp.x - d).norm();
            assert!((a - b).abs() < 1e-14 * a.max(1e-300));
            let a = one.evaluate(smp.x + d).norm();
            let b = one.evaluate(smp.x - d).norm();
            assert!((a - b).abs() < 1e-14 * a.max(1e-300));
        }
    }

    #[test]
    fn superposition_matches_extended_precision_oracle() {
        // |0⟩ + (0.3 − 0.2i)|2⟩ + |3⟩, frozen from tests/oracles/mp_oracle.py
        let (p, s, smp) = setup(1.0, 1.3, 0.4, C64::new(0.3, 0.8), 1.1);
        let tower = fock_tower(&p, &s, &smp, 3).unwrap();
        let st = tower[0]
            .add_scaled(&tower[2], C64::new(0.3, -0.2))
            .unwrap()
            .add_scaled(&tower[3], C64::new(1.0, 0.0))
            .unwrap();
        let expect = [
            (-0.4, C64::new(0.27079490263492260141, 0.52628630216014746126)),
            (0.35, C64::new(0.29458570603760877617, -1.0239582332251936389)),
            (1.2, C64::new(-0.26705761437968172154, -0.46725460636957086446)),
        ];
        for (x, e) in expect {
            let got = st.evaluate(x);
            assert!((got - e).norm() < 1e-12 * e.norm(), "x={x}: {got} vs {e}");
        }
    }

    #[test]
    fn closed_form_sample_agrees_with_bundle() {
        let (p, s, smp) = setup(1.0, 1.3, 0.4, C64::new(0.3, 0.8), 1.1);
        let cf = closed_form_sample(&p, &s, 1.1, smp.s0, smp.argz);
        assert!((cf.x - smp.x).abs() < 1e-11);
        assert!((cf.w - smp.w).norm() < 1e-11);
    }

    #[test]
    fn coherent_truncation_rules() {
        let (p, s, smp) = setup(1.0, 1.0, 0.0, C64::new(0.0, 1.0), 0.0);
        assert_eq!(truncation_rule(C64::new(0.0, 0.0)), 10);
        let a = C64::new(1.0, 0.5);
        let k = truncation_rule(a);
        assert!(matches!(coherent(&p, &s, &smp, a, Some(k - 1)), Err(Error::TruncationTooLow { .. })));
        assert!(coherent(&p, &s, &smp, a, Some(k)).is_ok());
        assert!(coherent_tail(C64::new(3.0, 0.0), default_truncation(C64::new(3.0, 0.0))) <= COHERENT_TAIL);
        // a direct partial sum agrees with the tail for a moderate case
        let a2: f64 = 4.0;
        let mut term = (-a2).exp();
        let mut head = term;
        for n in 1..=12 {
            term *= a2 / n as f64;
            head += term;
        }
        assert!((coherent_tail(C64::new(2.0, 0.0), 12) - (1.0 - head)).abs() < 1e-14);
    }

    #[test]
    fn coherent_with_zero_alpha_is_vacuum() {
        let (p, s, smp) = setup(1.0, 1.0, 0.2, C64::new(0.0, 1.0), 0.7);
        let cs = coherent(&p, &s, &smp, C64::new(0.0, 0.0), None).unwrap();
        let v = vacuum(&p, &s, &smp);
        assert_eq!(cs.coeffs[0], C64::new(1.0, 0.0));
        assert!(cs.coeffs[1..].iter().all(|c| *c == C64::new(0.0, 0.0)));
        assert_eq!(cs.core, v.core);
    }
}
