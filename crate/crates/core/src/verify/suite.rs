//! The acceptance checks as reusable drivers. Each criterion returns one or
//! more named checks with the worst error seen and its tolerance; suites
//! group the criteria by the module they exercise.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    crosscheck_sample, distance, gram_matrix, inner_product, norm_sqr, residual_step, state_residual,
    state_residual_with_step, QuadratureSpec,
};
use crate::dynamics::{closed_form_sample, closed_form_variations, integrate_bundle, GaussianSeed, TrajectorySample};
use crate::error::{Error, Result};
use crate::model::{OscillatorParams, Regime};
use crate::observables::{
    minimization_times, moments_cs, moments_tcs, solve_mu_for_time, uncertainties_cs, uncertainties_tcs, MinBranch,
    StateKind, UncertaintySetup,
};
use crate::states::{self, LadderContext, PolyGaussian};

pub const CRITERIA: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when the error is finite and strictly below `tol`.
    pub fn below(name: &str, max_error: f64, tol: f64) -> Self {
        Self { name: name.into(), max_error, tol, pass: max_error.is_finite() && max_error < tol }
    }

    /// Passes when `value` strictly exceeds `floor`; used by the fault controls.
    pub fn above(name: &str, value: f64, floor: f64) -> Self {
        Self { name: name.into(), max_error: value, tol: floor, pass: value.is_finite() && value > floor }
    }

    /// Passes only on a zero error.
    pub fn exact(name: &str, max_error: f64) -> Self {
        Self { name: name.into(), max_error, tol: 0.0, pass: max_error == 0.0 }
    }

    fn guarded(name: &str, tol: f64, f: impl FnOnce() -> Result<f64>) -> Self {
        match f() {
            Ok(e) => Self::below(name, e, tol),
            Err(_) => Self { name: name.into(), max_error: f64::INFINITY, tol, pass: false },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Dynamics,
    States,
    Observables,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Dynamics => "dynamics",
            Suite::States => "states",
            Suite::Observables => "observables",
        }
    }

    pub fn criteria(self) -> &'static [usize] {
        match self {
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
            Suite::Dynamics => &[1, 2],
            Suite::States => &[3, 4, 9, 10],
            Suite::Observables => &[5, 6, 7, 8],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "dynamics" => Ok(Suite::Dynamics),
            "states" => Ok(Suite::States),
            "observables" => Ok(Suite::Observables),
            other => Err(Error::InvalidParams(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    /// Relative fault injected into w before the residual checks build states.
    pub w_fault: f64,
    /// Extra parameter set checked alongside the built-in ones.
    pub user: Option<(OscillatorParams, GaussianSeed)>,
    pub rng_seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { w_fault: 0.0, user: None, rng_seed: 0x7c5_2005 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub pass: bool,
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> SuiteReport {
    let checks: Vec<Check> = suite.criteria().iter().flat_map(|&k| criterion(k, opts)).collect();
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport { suite, checks, pass }
}

/// Checks for acceptance criterion `k` (1..=10); empty for other k.
pub fn criterion(k: usize, opts: &SuiteOptions) -> Vec<Check> {
    match k {
        1 => bose_invariant(opts),
        2 => closed_form_against_ode(opts),
        3 => exactness(opts),
        4 => orthonormality(),
        5 => moment_checks(),
        6 => uncertainty_products(),
        7 => minimization(),
        8 => mu_solver(opts),
        9 => coherent_states(),
        10 => norm_and_reduction(),
        _ => Vec::new(),
    }
}

fn params(m: f64, omega0: f64, gamma: f64) -> OscillatorParams {
    OscillatorParams::new(m, omega0, gamma, 1.0).expect("built-in parameters are valid")
}

fn reference(p: &OscillatorParams, b: C64) -> GaussianSeed {
    GaussianSeed::reference(p, b).expect("built-in seeds have Im b > 0")
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn random_seed(rng: &mut ChaCha8Rng) -> GaussianSeed {
    let b = C64::new(uniform(rng, -0.5, 0.5), uniform(rng, 0.3, 1.5));
    GaussianSeed::new(b, uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)).expect("Im b > 0")
}

/// Parameters kept moderate so that |w|, |z| stay O(10²) up to t = 10.
fn random_moderate(rng: &mut ChaCha8Rng, regime: Regime) -> OscillatorParams {
    let m = uniform(rng, 0.5, 2.0);
    match regime {
        Regime::Underdamped => {
            let g = uniform(rng, 0.05, 0.6);
            params(m, uniform(rng, (0.6 * g).max(0.2), 2.0), g)
        }
        Regime::Critical => {
            let g = uniform(rng, 0.05, 0.6);
            params(m, g / 2.0, g)
        }
        Regime::Overdamped => {
            let g = uniform(rng, 0.1, 0.6);
            params(m, 0.5 * g * uniform(rng, 0.1, 0.8), g)
        }
    }
}

/// Wider ranges; the overdamped rate ω is capped so e^{2ωt} stays below 10⁴.
fn random_wide(rng: &mut ChaCha8Rng, regime: Regime) -> OscillatorParams {
    let m = uniform(rng, 0.5, 2.0);
    match regime {
        Regime::Underdamped => {
            let g = uniform(rng, 0.0, 1.2);
            params(m, uniform(rng, (0.6 * g).max(0.3), 2.0), g)
        }
        Regime::Critical => {
            let g = uniform(rng, 0.1, 1.2);
            params(m, g / 2.0, g)
        }
        Regime::Overdamped => {
            let (om, w0) = (uniform(rng, 0.05, 0.4), uniform(rng, 0.1, 1.0));
            params(m, w0, 2.0 * (om * om + w0 * w0).sqrt())
        }
    }
}

const REGIMES: [Regime; 3] = [Regime::Underdamped, Regime::Critical, Regime::Overdamped];

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

fn sample_at(p: &OscillatorParams, s: &GaussianSeed, t: f64) -> Result<TrajectorySample> {
    let g = if t == 0.0 { vec![0.0] } else { vec![0.0, t] };
    Ok(*integrate_bundle(p, s, &g)?.samples.last().expect("grid is non-empty"))
}

fn max_coeff_diff(a: &[C64], b: &[C64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).copied().unwrap_or_default() - b.get(i).copied().unwrap_or_default()).norm())
        .fold(0.0, f64::max)
}

fn bose_invariant(opts: &SuiteOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut sets: Vec<(OscillatorParams, GaussianSeed)> = (0..20)
        .map(|i| {
            let regime = REGIMES[i % 3];
            let p = random_wide(&mut rng, regime);
            (p, random_seed(&mut rng))
        })
        .collect();
    sets.extend(opts.user);
    let symplectic = Check::guarded("symplectic_invariant", 1e-10, || {
        let mut worst: f64 = 0.0;
        for (p, s) in &sets {
            for t in grid(10.0, 201) {
                let jp = closed_form_variations(p, s.b(), t)?;
                worst = worst.max((jp.symplectic_form() - s.im_b()).abs() / s.im_b());
            }
        }
        Ok(worst)
    });
    let commutator = Check::guarded("bose_commutator", 1e-12, || {
        let mut worst: f64 = 0.0;
        for (p, s) in sets.iter().take(6) {
            for t in [0.0, 1.7, 6.0] {
                let smp = sample_at(p, s, t)?;
                let ctx = LadderContext::new(p, s, &smp);
                let core = states::vacuum(p, s, &smp).core;
                for deg in 0..=8 {
                    let coeffs: Vec<C64> = (0..=deg)
                        .map(|k| C64::new(0.3 + 0.1 * k as f64, 0.05 - 0.2 * k as f64))
                        .collect();
                    let st = PolyGaussian::new(core, coeffs);
                    let ab = states::apply_lower(&states::apply_raise(&st, &ctx)?, &ctx)?;
                    let ba = states::apply_raise(&states::apply_lower(&st, &ctx)?, &ctx)?;
                    let comm = ab.add_scaled(&ba, C64::new(-1.0, 0.0))?;
                    let scale = st.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
                    worst = worst.max(max_coeff_diff(&comm.coeffs, &st.coeffs) / scale);
                }
            }
        }
        Ok(worst)
    });
    vec![symplectic, commutator]
}

fn closed_form_against_ode(opts: &SuiteOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed ^ 0x2);
    let t_grid = grid(10.0, 101);
    REGIMES
        .iter()
        .map(|&regime| {
            let name = format!("closed_form_vs_ode_{}", regime.name());
            let sets: Vec<_> = (0..10)
                .map(|_| {
                    let p = random_moderate(&mut rng, regime);
                    (p, random_seed(&mut rng))
                })
                .collect();
            Check::guarded(&name, 1e-8, || {
                let mut worst: f64 = 0.0;
                for (p, s) in &sets {
                    if p.regime() != regime {
                        return Err(Error::RegimeMismatch(format!("drew {} for {}", p.regime(), regime)));
                    }
                    for smp in integrate_bundle(p, s, &t_grid)?.samples {
                        let cf = closed_form_sample(p, s, smp.t, smp.s0, smp.argz);
                        let devs = [(cf.x - smp.x).abs(), (cf.p - smp.p).abs(), (cf.w - smp.w).norm(), (cf.z - smp.z).norm()];
                        worst = devs.iter().copied().fold(worst, f64::max);
                    }
                }
                Ok(worst)
            })
        })
        .collect()
}

fn residual_sets(opts: &SuiteOptions) -> Vec<(&'static str, OscillatorParams, GaussianSeed)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed ^ 0x3);
    let under = params(1.0, 1.0, 0.8);
    let over = params(1.0, 0.5, 2.4);
    let mut sets = vec![
        ("underdamped", under, reference(&under, C64::new(0.0, 1.0))),
        ("overdamped", over, reference(&over, C64::new(0.2, 0.9))),
    ];
    for (name, regime) in [("underdamped", Regime::Underdamped), ("overdamped", Regime::Overdamped)] {
        let p = random_moderate(&mut rng, regime);
        sets.push((name, p, random_seed(&mut rng)));
    }
    sets
}

fn exactness(opts: &SuiteOptions) -> Vec<Check> {
    let sets = residual_sets(opts);
    // The fixed stencil step stops resolving the overdamped reference set
    // beyond t ≈ 2.5, where the h⁴ truncation term alone passes 1e−6.
    let times: Vec<f64> = (0..10).map(|k| 0.25 * k as f64).collect();
    let levels = [0usize, 1, 3, 5];
    let worst_residual = |p: &OscillatorParams, s: &GaussianSeed, times: &[f64], levels: &[usize]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &t in times {
            for &n in levels {
                worst = worst.max(state_residual(p, s, StateKind::Tcs(n), t, opts.w_fault)?.residual);
            }
        }
        Ok(worst)
    };
    let mut out = Vec::new();
    for regime in ["underdamped", "overdamped"] {
        out.push(Check::guarded(&format!("schrodinger_residual_{regime}"), 1e-6, || {
            let mut worst: f64 = 0.0;
            for (_, p, s) in sets.iter().filter(|(r, ..)| *r == regime) {
                worst = worst.max(worst_residual(p, s, &times, &levels)?);
            }
            Ok(worst)
        }));
    }
    if let Some((p, s)) = opts.user {
        out.push(Check::guarded("schrodinger_residual_user_params", 1e-6, || {
            worst_residual(&p, &s, &[0.0, 0.5, 1.0, 2.0], &[0, 1, 3])
        }));
    }
    let control = (|| -> Result<f64> {
        let mut least = f64::INFINITY;
        for (_, p, s) in sets.iter().take(2) {
            for n in [0, 3] {
                least = least.min(state_residual(p, s, StateKind::Tcs(n), 1.0, 1e-2)?.residual);
            }
        }
        Ok(least)
    })();
    out.push(Check::above("residual_fault_control", control.unwrap_or(f64::NAN), 1e-3));
    // past that window, halving the step must still shrink the residual
    let (_, p, s) = sets[1];
    let refinement = (|| -> Result<f64> {
        let h = residual_step(&p);
        let coarse = state_residual_with_step(&p, &s, StateKind::Tcs(5), 2.7, 0.0, h)?.residual;
        let fine = state_residual_with_step(&p, &s, StateKind::Tcs(5), 2.7, 0.0, 0.5 * h)?.residual;
        Ok(fine / coarse)
    })();
    out.push(Check::guarded("residual_step_refinement", 1.0, || refinement));
    out
}

fn orthonormality() -> Vec<Check> {
    let check = Check::guarded("gram_orthonormality", 1e-8, || {
        let mut worst: f64 = 0.0;
        for gamma in [0.0, 0.4, 1.2] {
            let p = params(1.0, 1.0, gamma);
            let s = reference(&p, C64::new(0.3, 0.9));
            for t in [0.0, 1.3, 4.0] {
                worst = worst.max(gram_matrix(&p, &s, t, 6)?.max_deviation);
            }
        }
        Ok(worst)
    });
    vec![check]
}

fn moment_sets() -> Vec<(OscillatorParams, GaussianSeed)> {
    let sets = [
        (params(1.2, 1.0, 0.4), C64::new(0.2, 0.9), 0.4, -0.3),
        (params(0.8, 0.3, 1.0), C64::new(-0.3, 0.6), -0.6, 0.2),
        (params(1.0, 0.5, 1.0), C64::new(0.1, 1.1), 0.8, 0.5),
        (params(1.0, 1.0, 0.0), C64::new(0.0, 1.0), 1.0, 0.0),
    ];
    sets.iter()
        .map(|&(p, b, x0, p0)| (p, GaussianSeed::new(b, x0, p0).expect("Im b > 0")))
        .collect()
}

fn moment_checks() -> Vec<Check> {
    let alphas = [
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 2.0),
        C64::new(1.2, -1.6),
        C64::new(-0.5, 0.5),
    ];
    let run = |kinds: &[StateKind]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (p, s) in moment_sets() {
            let bundle = integrate_bundle(&p, &s, &[0.0, 0.7, 2.3])?;
            for smp in &bundle.samples {
                for &kind in kinds {
                    worst = worst.max(crosscheck_sample(&p, &s, smp, kind)?.max_rel_error);
                }
            }
        }
        Ok(worst)
    };
    let tcs: Vec<StateKind> = (0..=4).map(StateKind::Tcs).collect();
    let cs: Vec<StateKind> = alphas.iter().map(|&a| StateKind::Cs(a)).collect();
    vec![
        Check::guarded("moments_tcs_vs_quadrature", 1e-7, || run(&tcs)),
        Check::guarded("moments_cs_vs_quadrature", 1e-7, || run(&cs)),
    ]
}

fn uncertainty_setups() -> Vec<(OscillatorParams, UncertaintySetup)> {
    let table = [
        (params(1.0, 1.0, 0.4), vec![0.5, 1.0, 1.7]),
        (params(1.3, 0.8, 1.0), vec![0.8, 2.2]),
        (params(2.0, 1.5, 0.3), vec![1.1]),
        (params(1.0, 0.5, 2.4), vec![0.3, 0.6, 1.5, 3.0]),
        (params(0.7, 0.2, 1.0), vec![1.0, 2.0]),
    ];
    table
        .iter()
        .flat_map(|(p, mus)| {
            mus.iter()
                .map(move |&mu| (*p, UncertaintySetup::new(p, mu).expect("built-in setups are non-critical")))
        })
        .collect()
}

fn uncertainty_products() -> Vec<Check> {
    let times = grid(6.0, 25);
    let mut product_err: Result<f64> = Ok(0.0);
    let mut expansion_err: Result<f64> = Ok(0.0);
    let mut record = |r: Result<crate::observables::UncertaintyReport>| match r {
        Ok(r) => {
            let target = r.floor * (1.0 + r.g);
            if let Ok(e) = product_err.as_mut() {
                *e = e.max((r.product - target).abs() / target);
            }
            if let Ok(e) = expansion_err.as_mut() {
                *e = e.max(r.expansion_error());
            }
        }
        Err(_) => {
            product_err = Err(Error::InvalidParams("uncertainty report failed".into()));
            expansion_err = Err(Error::InvalidParams("uncertainty report failed".into()));
        }
    };
    for (p, setup) in uncertainty_setups() {
        for &t in &times {
            for n in 0..=3 {
                record(uncertainties_tcs(&p, &setup, n, t));
            }
            record(uncertainties_cs(&p, &setup, t));
        }
    }
    vec![
        Check::guarded("uncertainty_product_identity", 1e-10, || product_err),
        Check::guarded("expanded_uncertainties", 1e-9, || expansion_err),
    ]
}

fn minimization() -> Vec<Check> {
    let setups = uncertainty_setups();
    let g_at_minima = Check::guarded("minimization_g_zero", 1e-12, || {
        let mut worst: f64 = 0.0;
        for (p, setup) in &setups {
            for mt in minimization_times(p, setup, 6)? {
                worst = worst.max(setup.g(mt.t));
            }
        }
        Ok(worst)
    });
    let floor = Check::guarded("minimization_product_floor", 1e-10, || {
        let mut worst: f64 = 0.0;
        for (p, setup) in &setups {
            for mt in minimization_times(p, setup, 6)? {
                let mut reports = vec![uncertainties_cs(p, setup, mt.t)?];
                for n in 0..=2 {
                    reports.push(uncertainties_tcs(p, setup, n, mt.t)?);
                }
                for r in reports {
                    worst = worst.max((r.product - r.floor).abs() / r.floor);
                }
            }
        }
        Ok(worst)
    });
    let nodes = match (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut seen = 0;
        for (p, setup) in setups.iter().filter(|(_, s)| s.regime == Regime::Underdamped) {
            for mt in minimization_times(p, setup, 6)? {
                if mt.branch == MinBranch::Node {
                    worst = worst.max((mt.t - PI * mt.k as f64 / setup.omega).abs());
                    seen += 1;
                }
            }
        }
        Ok(if seen > 0 { worst } else { f64::INFINITY })
    })() {
        Ok(e) => Check::exact("node_times_pi_k_over_omega", e),
        Err(_) => Check::exact("node_times_pi_k_over_omega", f64::INFINITY),
    };
    // θ = 1.1 here, so μ² < θ² − 1 leaves t = 0 as the only zero
    let single = {
        let p = params(1.0, 0.5, 2.4);
        let err = UncertaintySetup::new(&p, 0.3)
            .and_then(|s| minimization_times(&p, &s, 6))
            .map(|times| {
                let only_zero = times.len() == 1 && times[0].t == 0.0;
                if only_zero {
                    0.0
                } else {
                    times.len().max(1) as f64
                }
            })
            .unwrap_or(f64::INFINITY);
        Check::exact("overdamped_only_t0", err)
    };
    vec![g_at_minima, floor, nodes, single]
}

fn mu_solver(opts: &SuiteOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed ^ 0x8);
    let table = [
        (params(1.0, 1.0, 0.4), 15.0),
        (params(1.3, 0.8, 1.0), 15.0),
        (params(2.0, 1.5, 0.3), 15.0),
        (params(1.0, 0.5, 2.4), 3.0),
        (params(0.7, 0.2, 1.0), 6.0),
    ];
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for (p, t_max) in table {
        let (mut g, mut b) = (0, 0);
        while g < 20 || b < 5 {
            let t = uniform(&mut rng, 0.0, t_max);
            let om = p.real_frequency();
            let th = p.gamma / (2.0 * om);
            let v = match p.regime() {
                Regime::Overdamped => th * (om * t).tanh(),
                _ => th * (om * t).tan(),
            };
            // a margin from |v| = 1 keeps μ away from its divergence
            if v.abs() < 1.0 - 1e-6 && g < 20 {
                good.push((p, t));
                g += 1;
            } else if v.abs() > 1.0 + 1e-6 && b < 5 {
                bad.push((p, t));
                b += 1;
            }
        }
    }
    let solved = Check::guarded("mu_solver_g_zero", 1e-12, || {
        let mut worst: f64 = 0.0;
        for (p, t) in &good {
            let mu = solve_mu_for_time(p, *t)?;
            if !(mu > 0.0 && mu.is_finite()) {
                return Ok(f64::INFINITY);
            }
            worst = worst.max(UncertaintySetup::new(p, mu)?.g(*t));
        }
        Ok(worst)
    });
    let misses = bad
        .iter()
        .filter(|(p, t)| !matches!(solve_mu_for_time(p, *t), Err(Error::NoMinimizingMu { .. })))
        .count();
    vec![solved, Check::exact("mu_solver_inadmissible_rejected", misses as f64)]
}

fn coherent_sets() -> Vec<(OscillatorParams, GaussianSeed)> {
    let under = params(1.0, 1.0, 0.5);
    let over = params(1.0, 0.5, 2.4);
    let free = params(1.0, 1.0, 0.0);
    vec![
        (under, reference(&under, C64::new(0.3, 0.8))),
        (over, reference(&over, C64::new(0.2, 0.9))),
        (free, reference(&free, C64::new(0.0, 1.0))),
    ]
}

fn coherent_states() -> Vec<Check> {
    let alphas = [
        C64::new(3.0, 0.0),
        C64::new(0.0, 3.0),
        C64::new(2.1, 2.1),
        C64::new(-1.5, 0.4),
        C64::new(0.7, 0.0),
    ];
    let mut eigen: Result<f64> = Ok(0.0);
    let mut norm: Result<f64> = Ok(0.0);
    let mut step = || -> Result<()> {
        for (p, s) in coherent_sets() {
            let bundle = integrate_bundle(&p, &s, &[0.0, 1.1, 2.5])?;
            for smp in &bundle.samples {
                let ctx = LadderContext::new(&p, &s, smp);
                for &a in &alphas {
                    let psi = states::coherent(&p, &s, smp, a, None)?;
                    let lowered = states::apply_lower(&psi, &ctx)?;
                    let e = distance(&lowered, &psi.scaled(a))?;
                    let spec = QuadratureSpec::for_states(&[&psi])?;
                    let n = (inner_product(&psi, &psi, &spec)? - 1.0).norm();
                    if let (Ok(we), Ok(wn)) = (eigen.as_mut(), norm.as_mut()) {
                        *we = we.max(e);
                        *wn = wn.max(n);
                    }
                }
            }
        }
        Ok(())
    };
    if let Err(e) = step() {
        eigen = Err(e);
        norm = Err(Error::InvalidParams("coherent state construction failed".into()));
    }
    vec![
        Check::guarded("coherent_eigen_residual", 1e-8, || eigen),
        Check::guarded("coherent_norm", 1e-8, || norm),
    ]
}

/// Physicists' Hermite coefficients, lowest power first.
fn hermite(n: usize) -> Vec<f64> {
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

fn norm_and_reduction() -> Vec<Check> {
    let norms = Check::guarded("fock_norm_conservation", 1e-8, || {
        let mut worst: f64 = 0.0;
        let mut sets = coherent_sets();
        let crit = params(1.0, 0.5, 1.0);
        sets.push((crit, reference(&crit, C64::new(0.1, 1.1))));
        for (p, s) in sets {
            let bundle = integrate_bundle(&p, &s, &[0.0, 0.9, 3.1])?;
            for smp in &bundle.samples {
                for st in states::fock_tower(&p, &s, smp, 8)? {
                    worst = worst.max((norm_sqr(&st)?.sqrt() - 1.0).abs());
                }
            }
        }
        Ok(worst)
    });
    let hermite_check = Check::guarded("undamped_fock_is_hermite", 1e-10, || {
        let (m, w0) = (1.4, 0.9);
        let p = params(m, w0, 0.0);
        let s = reference(&p, C64::new(0.0, m * w0));
        let len = (p.hbar / (m * w0)).sqrt();
        let mut worst: f64 = 0.0;
        for smp in integrate_bundle(&p, &s, &[0.0, 0.8, 2.9])?.samples {
            for (n, st) in states::fock_tower(&p, &s, &smp, 7)?.iter().enumerate() {
                let h = hermite(n);
                let scaled: Vec<C64> = st.coeffs.iter().enumerate().map(|(k, c)| c * len.powi(k as i32)).collect();
                let ratio = scaled[n] / h[n];
                let size = scaled.iter().map(|c| c.norm()).fold(0.0, f64::max);
                for k in 0..=n {
                    worst = worst.max((scaled[k] - ratio * h[k]).norm() / size);
                }
            }
        }
        Ok(worst)
    });
    let energy = Check::guarded("undamped_energy_constant", 1e-10, || {
        let p = params(1.0, 1.0, 0.0);
        let s = GaussianSeed::new(C64::new(0.3, 0.8), 0.7, -0.2)?;
        let kinds = [StateKind::Tcs(0), StateKind::Tcs(2), StateKind::Cs(C64::new(1.0, 1.0))];
        let closed = |smp: &TrajectorySample, kind: StateKind| match kind {
            StateKind::Tcs(n) => moments_tcs(&p, &s, smp, n).energy,
            StateKind::Cs(a) => moments_cs(&p, &s, smp, a).energy,
        };
        let start = closed_form_sample(&p, &s, 0.0, C64::new(0.0, 0.0), 0.0);
        let mut worst: f64 = 0.0;
        for &kind in &kinds {
            let e0 = closed(&start, kind);
            for t in grid(10.0, 101) {
                let smp = closed_form_sample(&p, &s, t, C64::new(0.0, 0.0), 0.0);
                worst = worst.max((closed(&smp, kind) - e0).abs() / e0);
            }
            for smp in integrate_bundle(&p, &s, &[0.0, 2.0, 5.0])?.samples {
                let q = crosscheck_sample(&p, &s, &smp, kind)?.quadrature.energy;
                worst = worst.max((q - e0).abs() / e0);
            }
        }
        Ok(worst)
    });
    vec![norms, hermite_check, energy]
}
