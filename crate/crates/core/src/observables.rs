//! Closed-form averages, uncertainties and uncertainty products for the
//! trajectory-coherent states |n⟩ and coherent states |α⟩, plus the zeros of
//! the excess factor g(t) and the μ that places a zero at a chosen time.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::{self, GaussianSeed, TrajectorySample};
use crate::error::{Error, Result};
use crate::model::{OscillatorParams, Regime};

/// Relative slack on product = floor for the `minimal` flag.
pub const MINIMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Tcs(usize),
    Cs(C64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub t: f64,
    pub kind: StateKind,
    pub x_mean: f64,
    pub p_mean: f64,
    pub x2_mean: f64,
    pub p2_mean: f64,
    pub energy: f64,
}

fn energy_of(params: &OscillatorParams, t: f64, p2: f64, x2: f64) -> f64 {
    (-2.0 * params.gamma * t).exp() * p2 / (2.0 * params.m)
        + 0.5 * params.m * params.omega0 * params.omega0 * x2
}

/// Averages in |n⟩: ⟨x⟩ = x(t), ⟨p⟩ = p(t), ⟨x²⟩ = x² + (ħ/Im b)(n+½)|z|²,
/// ⟨p²⟩ = p² + (ħ/Im b)(n+½)|w|², and ⟨Ê⟩ for the mechanical energy.
pub fn moments_tcs(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    n: usize,
) -> MomentReport {
    let spread = params.hbar / seed.im_b() * (n as f64 + 0.5);
    let (x, p) = (sample.x, sample.p);
    let zz = sample.z.norm_sqr();
    let ww = sample.w.norm_sqr();
    let energy = energy_of(params, sample.t, p * p, x * x) + spread * energy_of(params, sample.t, ww, zz);
    MomentReport {
        t: sample.t,
        kind: StateKind::Tcs(n),
        x_mean: x,
        p_mean: p,
        x2_mean: x * x + spread * zz,
        p2_mean: p * p + spread * ww,
        energy,
    }
}

/// Averages in |α⟩: first moments shifted by −i(2 Im b/ħ)^{−1/2}(α* u − α u*)
/// for u = z, w; second moments add ħ|u|²/(2 Im b).
pub fn moments_cs(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    sample: &TrajectorySample,
    alpha: C64,
) -> MomentReport {
    let k = (2.0 * seed.im_b() / params.hbar).powf(-0.5);
    let shift = |u: C64| (-C64::i() * k * (alpha.conj() * u - alpha * u.conj())).re;
    let x = sample.x + shift(sample.z);
    let p = sample.p + shift(sample.w);
    let spread = params.hbar / (2.0 * seed.im_b());
    let zz = sample.z.norm_sqr();
    let ww = sample.w.norm_sqr();
    let energy = energy_of(params, sample.t, p * p, x * x) + spread * energy_of(params, sample.t, ww, zz);
    MomentReport {
        t: sample.t,
        kind: StateKind::Cs(alpha),
        x_mean: x,
        p_mean: p,
        x2_mean: x * x + spread * zz,
        p2_mean: p * p + spread * ww,
        energy,
    }
}

/// Re b = 0, Im b = μ m ω̂, θ = γ/(2ω̂) with ω̂ the regime's real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintySetup {
    pub mu: f64,
    pub theta: f64,
    pub regime: Regime,
    pub omega: f64,
}

impl UncertaintySetup {
    pub fn new(params: &OscillatorParams, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be > 0, got {mu}")));
        }
        let regime = params.regime();
        if regime == Regime::Critical {
            return Err(Error::RegimeMismatch(
                "uncertainty setup needs a non-zero real frequency (critical damping)".into(),
            ));
        }
        let omega = params.real_frequency();
        Ok(Self { mu, theta: params.gamma / (2.0 * omega), regime, omega })
    }

    pub fn b(&self, params: &OscillatorParams) -> C64 {
        C64::new(0.0, self.mu * params.m * self.omega)
    }

    pub fn seed(&self, params: &OscillatorParams) -> Result<GaussianSeed> {
        GaussianSeed::reference(params, self.b(params))
    }

    fn check(&self, params: &OscillatorParams) -> Result<()> {
        let same = params.regime() == self.regime
            && (params.real_frequency() - self.omega).abs() <= 1e-12 * self.omega;
        if same {
            Ok(())
        } else {
            Err(Error::RegimeMismatch(format!(
                "setup built for {} with omega = {}, params are {} with omega = {}",
                self.regime,
                self.omega,
                params.regime(),
                params.real_frequency()
            )))
        }
    }

    /// Excess factor g(t) for this setup.
    pub fn g(&self, t: f64) -> f64 {
        match self.regime {
            Regime::Overdamped => g_overdamped(self.theta, self.mu, self.omega, t),
            _ => g_underdamped(self.theta, self.mu, self.omega, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub t: f64,
    pub dx2: f64,
    pub dp2: f64,
    pub product: f64,
    pub g: f64,
    /// ħ²(n+½)² or ħ²/4
    pub floor: f64,
    pub minimal: bool,
    /// The long trigonometric/hyperbolic forms of (Δx)², (Δp)².
    pub dx2_expanded: f64,
    pub dp2_expanded: f64,
}

impl UncertaintyReport {
    /// Largest relative gap between the expanded and the |z|², |w|² forms.
    pub fn expansion_error(&self) -> f64 {
        let rx = (self.dx2_expanded - self.dx2).abs() / self.dx2;
        let rp = (self.dp2_expanded - self.dp2).abs() / self.dp2;
        rx.max(rp)
    }
}

/// (Δx)², (Δp)² from the expanded forms with prefactor `level` = ħ(n+½) or ħ/2.
pub fn expanded_uncertainties(setup: &UncertaintySetup, params: &OscillatorParams, level: f64, t: f64) -> (f64, f64) {
    let UncertaintySetup { mu, theta: th, omega, .. } = *setup;
    let m = params.m;
    let gt = params.gamma * t;
    let (sq, dbl, dp_brace) = match setup.regime {
        Regime::Overdamped => {
            let sh = (omega * t).sinh();
            let sq = sh * sh;
            let dbl = (2.0 * omega * t).sinh();
            let brace = 1.0 + sq * (1.0 - 2.0 * th * th + th.powi(4) + mu * mu * th * th + mu * mu) / (mu * mu)
                - th * dbl;
            (sq * (th * th + mu * mu + 1.0), dbl, brace)
        }
        _ => {
            let s = (omega * t).sin();
            let sq = s * s;
            let dbl = (2.0 * omega * t).sin();
            let brace = 1.0 + sq * (2.0 * th * th + th.powi(4) + 1.0 + mu * mu * th * th - mu * mu) / (mu * mu)
                - th * dbl;
            (sq * (th * th + mu * mu - 1.0), dbl, brace)
        }
    };
    let dx2 = level * (-gt).exp() / (mu * m * omega) * (1.0 + sq + th * dbl);
    let dp2 = level * gt.exp() * mu * m * omega * dp_brace;
    (dx2, dp2)
}

fn uncertainty_report(
    params: &OscillatorParams,
    setup: &UncertaintySetup,
    level: f64,
    t: f64,
) -> Result<UncertaintyReport> {
    setup.check(params)?;
    let b = setup.b(params);
    let jp = dynamics::closed_form_variations(params, b, t)?;
    let dx2 = level * jp.z.norm_sqr() / b.im;
    let dp2 = level * jp.w.norm_sqr() / b.im;
    let product = dx2 * dp2;
    let floor = level * level;
    let (dx2_expanded, dp2_expanded) = expanded_uncertainties(setup, params, level, t);
    Ok(UncertaintyReport {
        t,
        dx2,
        dp2,
        product,
        g: setup.g(t),
        floor,
        minimal: product <= floor * (1.0 + MINIMAL_TOL),
        dx2_expanded,
        dp2_expanded,
    })
}

/// (Δx)² = ħ(n+½)|z|²/Im b, (Δp)² = ħ(n+½)|w|²/Im b in |n⟩.
pub fn uncertainties_tcs(
    params: &OscillatorParams,
    setup: &UncertaintySetup,
    n: usize,
    t: f64,
) -> Result<UncertaintyReport> {
    uncertainty_report(params, setup, params.hbar * (n as f64 + 0.5), t)
}

/// (Δx)² = ħ|z|²/(2 Im b), (Δp)² = ħ|w|²/(2 Im b) in any |α⟩.
pub fn uncertainties_cs(params: &OscillatorParams, setup: &UncertaintySetup, t: f64) -> Result<UncertaintyReport> {
    uncertainty_report(params, setup, 0.5 * params.hbar, t)
}

/// g = {(θ/μ)(θ²+μ²+1) sin²ωt + (1/2μ)(θ²−μ²+1) sin 2ωt}².
pub fn g_underdamped(theta: f64, mu: f64, omega: f64, t: f64) -> f64 {
    let s = (omega * t).sin();
    let brace = theta / mu * (theta * theta + mu * mu + 1.0) * s * s
        + (theta * theta - mu * mu + 1.0) / (2.0 * mu) * (2.0 * omega * t).sin();
    brace * brace
}

/// g = {(θ/μ)(θ²+μ²−1) sinh²ωt + (1/2μ)(θ²−μ²−1) sinh 2ωt}².
pub fn g_overdamped(theta: f64, mu: f64, omega: f64, t: f64) -> f64 {
    let s = (omega * t).sinh();
    let brace = theta / mu * (theta * theta + mu * mu - 1.0) * s * s
        + (theta * theta - mu * mu - 1.0) / (2.0 * mu) * (2.0 * omega * t).sinh();
    brace * brace
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinBranch {
    /// t = πk/ω, where sin ωt = 0.
    Node,
    /// The arctan (underdamped) or arctanh (overdamped) branch.
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumTime {
    pub t: f64,
    pub k: usize,
    pub branch: MinBranch,
}

/// Non-negative zeros of g(t), sorted by time.
///
/// Underdamped: t₁ₖ = πk/ω and t₂ₖ = ω⁻¹ arctan[(μ²−θ²−1)/(θ(μ²+θ²+1))] + πk/ω
/// for k = 0..=k_max (principal arctan; θ = 0 takes the ±π/2 limit).
/// Overdamped: t = 0 and, when the argument lies in (−1, 1) and gives a
/// positive time, ω⁻¹ arctanh[(μ²−θ²+1)/(θ(μ²+θ²−1))].
pub fn minimization_times(
    params: &OscillatorParams,
    setup: &UncertaintySetup,
    k_max: usize,
) -> Result<Vec<MinimumTime>> {
    setup.check(params)?;
    let UncertaintySetup { mu, theta: th, omega, .. } = *setup;
    let mut out = Vec::new();
    match setup.regime {
        Regime::Overdamped => {
            out.push(MinimumTime { t: 0.0, k: 0, branch: MinBranch::Node });
            let arg = (mu * mu - th * th + 1.0) / (th * (mu * mu + th * th - 1.0));
            if arg.abs() < 1.0 {
                let t = arg.atanh() / omega;
                if t > 0.0 {
                    out.push(MinimumTime { t, k: 0, branch: MinBranch::Phase });
                }
            }
        }
        _ => {
            let num = mu * mu - th * th - 1.0;
            let den = th * (mu * mu + th * th + 1.0);
            let phase = if den != 0.0 {
                (num / den).atan()
            } else if num != 0.0 {
                num.signum() * PI / 2.0
            } else {
                0.0
            };
            for k in 0..=k_max {
                out.push(MinimumTime { t: PI * k as f64 / omega, k, branch: MinBranch::Node });
                let t2 = phase / omega + PI * k as f64 / omega;
                if t2 >= 0.0 {
                    out.push(MinimumTime { t: t2, k, branch: MinBranch::Phase });
                }
            }
        }
    }
    // the arctan branch collapses onto πk/ω when μ² = θ² + 1; keep the node
    let nodes: Vec<f64> = out.iter().filter(|m| m.branch == MinBranch::Node).map(|m| m.t).collect();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1.0 / omega);
    out.retain(|m| m.branch == MinBranch::Node || !nodes.iter().any(|&n| close(n, m.t)));
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

/// μ > 0 with g(t; μ) = 0. Setting the brace of g to zero is linear in μ²:
///
/// * underdamped: μ² = (θ²+1)(1 + θ tan ωt)/(1 − θ tan ωt), needs |θ tan ωt| < 1;
/// * overdamped:  μ² = (θ²−1)(1 + θ tanh ωt)/(1 − θ tanh ωt), needs |θ tanh ωt| < 1.
///
/// Where sin ωt (sinh ωt) vanishes every μ works and μ = 1 is returned.
pub fn solve_mu_for_time(params: &OscillatorParams, t: f64) -> Result<f64> {
    let regime = params.regime();
    if regime == Regime::Critical {
        return Err(Error::RegimeMismatch("no real frequency at critical damping".into()));
    }
    let omega = params.real_frequency();
    let th = params.gamma / (2.0 * omega);
    let (s, c, func, sign) = match regime {
        Regime::Overdamped => ((omega * t).sinh(), (omega * t).cosh(), "tanh", -1.0),
        _ => ((omega * t).sin(), (omega * t).cos(), "tan", 1.0),
    };
    if s.abs() < 1e-12 {
        return Ok(1.0);
    }
    let value = (th * s / c).abs();
    if !(value < 1.0) {
        return Err(Error::NoMinimizingMu { t, func, value });
    }
    let mu2 = (th * th + sign) * (c + th * s) / (c - th * s);
    let mu = mu2.sqrt();
    debug_assert!(g_at(regime, th, mu, omega, t) < 1e-12);
    Ok(mu)
}

fn g_at(regime: Regime, theta: f64, mu: f64, omega: f64, t: f64) -> f64 {
    match regime {
        Regime::Overdamped => g_overdamped(theta, mu, omega, t),
        _ => g_underdamped(theta, mu, omega, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::closed_form_sample;

    fn under() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 0.6, 1.0).unwrap()
    }

    fn over() -> OscillatorParams {
        OscillatorParams::new(1.0, 0.5, 2.6, 1.0).unwrap()
    }

    #[test]
    fn setup_rejects_bad_input() {
        assert!(UncertaintySetup::new(&under(), 0.0).is_err());
        let crit = OscillatorParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        assert!(matches!(UncertaintySetup::new(&crit, 1.0), Err(Error::RegimeMismatch(_))));
        let s = UncertaintySetup::new(&under(), 1.3).unwrap();
        assert!(matches!(uncertainties_cs(&over(), &s, 0.4), Err(Error::RegimeMismatch(_))));
        assert_eq!(s.b(&under()).re, 0.0);
    }

    #[test]
    fn tcs_first_moments_follow_trajectory() {
        let p = under();
        let seed = GaussianSeed::reference(&p, C64::new(0.2, 0.9)).unwrap();
        for n in 0..5 {
            let smp = closed_form_sample(&p, &seed, 1.7, C64::default(), 0.0);
            let r = moments_tcs(&p, &seed, &smp, n);
            assert_eq!((r.x_mean, r.p_mean), (smp.x, smp.p));
            assert!(r.x2_mean >= r.x_mean * r.x_mean);
            assert!(r.energy >= 0.0);
        }
    }

    #[test]
    fn coherent_with_zero_alpha_sits_on_trajectory() {
        let p = under();
        let seed = GaussianSeed::reference(&p, C64::new(0.0, 1.0)).unwrap();
        let smp = closed_form_sample(&p, &seed, 0.0, C64::default(), 0.0);
        let r = moments_cs(&p, &seed, &smp, C64::new(0.0, 0.0));
        assert_eq!(r.x_mean, seed.x0);
        let v = moments_tcs(&p, &seed, &smp, 0);
        assert!((r.x2_mean - v.x2_mean).abs() < 1e-15);
        assert!((r.energy - v.energy).abs() < 1e-15);
    }

    #[test]
    fn minimal_at_start() {
        for p in [under(), over()] {
            let s = UncertaintySetup::new(&p, 1.7).unwrap();
            let r = uncertainties_tcs(&p, &s, 0, 0.0).unwrap();
            assert!((r.dx2 - 0.5 / s.b(&p).im).abs() < 1e-15);
            assert!((r.product - 0.25).abs() < 1e-15);
            assert_eq!(r.g, 0.0);
            assert!(r.minimal);
        }
    }

    #[test]
    fn tcs_over_cs_is_odd_square() {
        let p = under();
        let s = UncertaintySetup::new(&p, 0.8).unwrap();
        for n in 0..6 {
            for i in 0..20 {
                let t = 0.37 * i as f64;
                let a = uncertainties_tcs(&p, &s, n, t).unwrap();
                let b = uncertainties_cs(&p, &s, t).unwrap();
                let k = (2 * n + 1) as f64;
                assert!((a.product / b.product - k * k).abs() < 1e-12 * k * k);
                assert!((a.dx2 - k * b.dx2).abs() < 1e-13 * a.dx2);
            }
        }
    }

    #[test]
    fn expanded_forms_match_compact_forms() {
        // θ = 0.3, μ = 1.7 underdamped: γ = 2θω, ω₀² = ω² + γ²/4
        let omega: f64 = 1.1;
        let gamma = 2.0 * 0.3 * omega;
        let p = OscillatorParams::new(1.4, (omega * omega + gamma * gamma / 4.0).sqrt(), gamma, 0.7).unwrap();
        let s = UncertaintySetup::new(&p, 1.7).unwrap();
        assert!((s.theta - 0.3).abs() < 1e-14);
        for i in 0..50 {
            let t = 0.173 * i as f64 + 0.01;
            for r in [uncertainties_tcs(&p, &s, 3, t).unwrap(), uncertainties_cs(&p, &s, t).unwrap()] {
                assert!(r.expansion_error() < 1e-10, "t={t}: {}", r.expansion_error());
            }
        }
        let p = over();
        let s = UncertaintySetup::new(&p, 0.6).unwrap();
        for i in 0..50 {
            let t = 0.05 * i as f64;
            let r = uncertainties_tcs(&p, &s, 1, t).unwrap();
            assert!(r.expansion_error() < 1e-10);
        }
    }

    #[test]
    fn g_underdamped_zeros() {
        let (th, mu, om) = (0.4, 1.3, 0.9);
        assert_eq!(g_underdamped(th, mu, om, 0.0), 0.0);
        for k in 1..=3 {
            assert!(g_underdamped(th, mu, om, PI * k as f64 / om) < 1e-28);
        }
        for i in 0..50 {
            assert_eq!(g_underdamped(0.0, 1.0, om, 0.3 * i as f64), 0.0);
        }
    }

    #[test]
    fn g_overdamped_start_and_sign() {
        assert_eq!(g_overdamped(1.7, 0.6, 1.2, 0.0), 0.0);
        for i in 0..1000 {
            let th = 1.0 + 0.003 * i as f64;
            let mu = 0.1 + 0.0027 * i as f64;
            let wt = 0.004 * i as f64;
            assert!(g_overdamped(th, mu, 1.0, wt) >= 0.0);
        }
    }

    #[test]
    fn product_is_floor_times_one_plus_g() {
        for p in [under(), over()] {
            let s = UncertaintySetup::new(&p, 0.9).unwrap();
            for i in 0..40 {
                let t = 0.11 * i as f64;
                let r = uncertainties_cs(&p, &s, t).unwrap();
                let expect = r.floor * (1.0 + r.g);
                assert!((r.product - expect).abs() < 1e-10 * expect);
            }
        }
    }

    #[test]
    fn node_branch_when_mu_squared_is_theta_squared_plus_one() {
        let p = under();
        let th = 0.3 / p.real_frequency();
        let s = UncertaintySetup::new(&p, (th * th + 1.0).sqrt()).unwrap();
        let times = minimization_times(&p, &s, 3).unwrap();
        // arctan 0 collapses the second branch onto πk/ω
        assert_eq!(times.len(), 4);
        for (k, mt) in times.iter().enumerate() {
            assert_eq!(mt.t, PI * k as f64 / s.omega);
        }
    }

    #[test]
    fn returned_minima_are_zeros_of_g() {
        for (p, mu) in [(under(), 0.5), (under(), 2.5), (over(), 0.4), (over(), 3.0)] {
            let s = UncertaintySetup::new(&p, mu).unwrap();
            for mt in minimization_times(&p, &s, 4).unwrap() {
                assert!(mt.t >= 0.0);
                assert!(s.g(mt.t) < 1e-12, "{:?} g={}", mt, s.g(mt.t));
                let r = uncertainties_cs(&p, &s, mt.t).unwrap();
                assert!((r.product - r.floor).abs() <= 1e-10 * r.floor);
                assert!(r.minimal);
            }
        }
    }

    #[test]
    fn overdamped_without_second_zero() {
        let p = over();
        let th = p.gamma / (2.0 * p.real_frequency());
        // θ > 1 keeps the arctanh argument inside (−1, 1); μ² < θ² − 1 makes
        // it negative, so the second zero falls at t < 0
        let mu: f64 = 0.05;
        assert!(mu * mu < th * th - 1.0);
        let arg = (mu * mu - th * th + 1.0) / (th * (mu * mu + th * th - 1.0));
        assert!(arg < 0.0 && arg > -1.0, "arg={arg}");
        let s = UncertaintySetup::new(&p, mu).unwrap();
        let times = minimization_times(&p, &s, 5).unwrap();
        assert_eq!(times, vec![MinimumTime { t: 0.0, k: 0, branch: MinBranch::Node }]);
    }

    #[test]
    fn mu_solver_cases() {
        let p = under();
        let om = p.real_frequency();
        assert_eq!(solve_mu_for_time(&p, PI / om).unwrap(), 1.0);
        assert_eq!(solve_mu_for_time(&p, 0.0).unwrap(), 1.0);
        let th = p.gamma / (2.0 * om);
        // |θ tan ωt| = 1.2
        let t = (1.2 / th).atan() / om;
        assert!(matches!(solve_mu_for_time(&p, t), Err(Error::NoMinimizingMu { .. })));
        let t = (0.5 / th).atan() / om;
        let mu = solve_mu_for_time(&p, t).unwrap();
        assert!(mu > 0.0 && g_underdamped(th, mu, om, t) < 1e-12);

        let p = over();
        let om = p.real_frequency();
        let th = p.gamma / (2.0 * om);
        let t = (0.7 / th).atanh() / om;
        let mu = solve_mu_for_time(&p, t).unwrap();
        assert!(mu > 0.0 && g_overdamped(th, mu, om, t) < 1e-12);
        assert!(solve_mu_for_time(&p, 50.0).is_err());

        let crit = OscillatorParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        assert!(solve_mu_for_time(&crit, 1.0).is_err());
    }
}
