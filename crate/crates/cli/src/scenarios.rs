use num_complex::Complex64 as C64;
use serde::Serialize;
use tcs_core::dynamics::{closed_form_sample, integrate_bundle};
use tcs_core::model::{self, Regime};
use tcs_core::observables::{
    self, minimization_times, solve_mu_for_time, uncertainties_cs, uncertainties_tcs, MinBranch, StateKind,
    UncertaintySetup,
};
use tcs_core::verify::{self, suite};

use crate::config::{RunConfig, SeedSpec};
use crate::table::{Cell, Table};
use crate::CliError;

pub const TRAJECTORY_COLUMNS: [&str; 10] = ["t", "x", "p", "E", "w_re", "w_im", "z_re", "z_im", "argz", "S0"];

pub const UNCERTAINTY_COLUMNS: [&str; 9] =
    ["t", "dx2_tcs", "dp2_tcs", "dx2_cs", "dp2_cs", "product_tcs", "product_cs", "g", "minimal"];

/// Closed-form x, p, w, z with the ODE's action and unwound phase; with
/// `oracle` set, a last column holds max |closed − ODE| over x, p, w, z.
pub fn trajectory(cfg: &RunConfig) -> Result<Table, CliError> {
    let params = &cfg.params;
    let seed = cfg.gaussian_seed()?;
    let bundle = integrate_bundle(params, &seed, &cfg.grid())?;
    let mut columns = TRAJECTORY_COLUMNS.to_vec();
    if cfg.oracle {
        columns.push("oracle_dev");
    }
    let mut table = Table::new("trajectory", cfg.metadata(), &columns);
    for ode in &bundle.samples {
        let cf = closed_form_sample(params, &seed, ode.t, ode.s0, ode.argz);
        let mut row: Vec<Cell> = vec![
            cf.t.into(),
            cf.x.into(),
            cf.p.into(),
            model::mechanical_energy(params, cf.x, cf.p, cf.t).into(),
            cf.w.re.into(),
            cf.w.im.into(),
            cf.z.re.into(),
            cf.z.im.into(),
            cf.argz.into(),
            cf.s0.re.into(),
        ];
        if cfg.oracle {
            let dev = [(cf.x - ode.x).abs(), (cf.p - ode.p).abs(), (cf.w - ode.w).norm(), (cf.z - ode.z).norm()]
                .into_iter()
                .fold(0.0, f64::max);
            row.push(dev.into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Closed-form moments of |0⟩…|levels⟩ and of |α⟩ on the grid, with the
/// quadrature norm of each state alongside.
pub fn states(cfg: &RunConfig, levels: usize, alpha: C64) -> Result<Table, CliError> {
    let params = &cfg.params;
    let seed = cfg.gaussian_seed()?;
    let bundle = integrate_bundle(params, &seed, &cfg.grid())?;
    let mut meta = cfg.metadata();
    meta.push(("levels".into(), levels.to_string()));
    meta.push(("alpha_re".into(), alpha.re.to_string()));
    meta.push(("alpha_im".into(), alpha.im.to_string()));
    let columns = ["t", "kind", "n", "alpha_re", "alpha_im", "x_mean", "p_mean", "x2_mean", "p2_mean", "energy", "norm"];
    let mut table = Table::new("states", meta, &columns);
    for smp in &bundle.samples {
        let mut kinds: Vec<StateKind> = (0..=levels).map(StateKind::Tcs).collect();
        kinds.push(StateKind::Cs(alpha));
        for kind in kinds {
            let (label, n, a, report) = match kind {
                StateKind::Tcs(n) => ("tcs", Cell::from(n), C64::new(0.0, 0.0), observables::moments_tcs(params, &seed, smp, n)),
                StateKind::Cs(a) => ("cs", Cell::Text(String::new()), a, observables::moments_cs(params, &seed, smp, a)),
            };
            let norm = verify::norm_sqr(&verify::build_state(params, &seed, smp, kind)?)?.sqrt();
            table.push(vec![
                smp.t.into(),
                label.into(),
                n,
                a.re.into(),
                a.im.into(),
                report.x_mean.into(),
                report.p_mean.into(),
                report.x2_mean.into(),
                report.p2_mean.into(),
                report.energy.into(),
                norm.into(),
            ]);
        }
    }
    Ok(table)
}

fn uncertainty_setup(cfg: &RunConfig) -> Result<UncertaintySetup, CliError> {
    let params = &cfg.params;
    if params.regime() == Regime::Critical {
        return Err(CliError::Usage("uncertainty scenarios need a non-critical regime".into()));
    }
    let mu = match cfg.seed {
        SeedSpec::Mu(mu) => mu,
        SeedSpec::Width(b) if b.re == 0.0 => b.im / (params.m * params.real_frequency()),
        SeedSpec::Width(b) => {
            return Err(CliError::Usage(format!("uncertainty scenarios need Re b = 0 (got {}); use --mu", b.re)))
        }
    };
    Ok(UncertaintySetup::new(params, mu)?)
}

fn setup_metadata(cfg: &RunConfig, setup: &UncertaintySetup) -> Vec<(String, String)> {
    let mut meta = cfg.metadata();
    if !meta.iter().any(|(k, _)| k == "mu") {
        meta.push(("mu".into(), setup.mu.to_string()));
    }
    meta.push(("theta".into(), setup.theta.to_string()));
    meta
}

fn minima_up_to(cfg: &RunConfig, setup: &UncertaintySetup) -> Result<Vec<observables::MinimumTime>, CliError> {
    let k_max = (cfg.t_max * setup.omega / std::f64::consts::PI).ceil() as usize + 1;
    let mut times = minimization_times(&cfg.params, setup, k_max)?;
    times.retain(|m| m.t <= cfg.t_max);
    Ok(times)
}

/// (Δx)², (Δp)² in |level⟩ and in any |α⟩ on the grid merged with every
/// minimization time up to t_max.
pub fn uncertainty(cfg: &RunConfig, level: usize) -> Result<Table, CliError> {
    let params = &cfg.params;
    let setup = uncertainty_setup(cfg)?;
    let mut times = cfg.grid();
    times.extend(minima_up_to(cfg, &setup)?.iter().map(|m| m.t));
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let mut meta = setup_metadata(cfg, &setup);
    meta.push(("level".into(), level.to_string()));
    meta.push(("rows".into(), "grid merged with minimization times".into()));
    let mut table = Table::new("uncertainty", meta, &UNCERTAINTY_COLUMNS);
    for t in times {
        let tcs = uncertainties_tcs(params, &setup, level, t)?;
        let cs = uncertainties_cs(params, &setup, t)?;
        table.push(vec![
            t.into(),
            tcs.dx2.into(),
            tcs.dp2.into(),
            cs.dx2.into(),
            cs.dp2.into(),
            tcs.product.into(),
            cs.product.into(),
            cs.g.into(),
            (tcs.minimal && cs.minimal).into(),
        ]);
    }
    Ok(table)
}

pub fn minima(cfg: &RunConfig) -> Result<Table, CliError> {
    let setup = uncertainty_setup(cfg)?;
    let meta = setup_metadata(cfg, &setup);
    let mut table = Table::new("minima", meta, &["k", "branch", "t", "g", "product_cs", "floor_cs"]);
    for m in minima_up_to(cfg, &setup)? {
        let r = uncertainties_cs(&cfg.params, &setup, m.t)?;
        let branch = match m.branch {
            MinBranch::Node => "node",
            MinBranch::Phase => "phase",
        };
        table.push(vec![m.k.into(), branch.into(), m.t.into(), r.g.into(), r.product.into(), r.floor.into()]);
    }
    Ok(table)
}

pub fn solve_mu(cfg: &RunConfig, t: f64) -> Result<Table, CliError> {
    let mu = solve_mu_for_time(&cfg.params, t)?;
    let setup = UncertaintySetup::new(&cfg.params, mu)?;
    let mut table = Table::new("solve-mu", cfg.metadata(), &["t", "mu", "theta", "omega", "g"]);
    table.push(vec![t.into(), mu.into(), setup.theta.into(), setup.omega.into(), setup.g(t).into()]);
    Ok(table)
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub max_error: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOut {
    pub suite: String,
    pub checks: Vec<CheckOut>,
    pub pass: bool,
}

pub fn verify(cfg: &RunConfig, suite_name: &str, w_fault: f64) -> Result<VerifyOut, CliError> {
    let which: suite::Suite = suite_name.parse().map_err(|e: tcs_core::Error| CliError::Usage(e.to_string()))?;
    let opts = suite::SuiteOptions {
        w_fault,
        user: Some((cfg.params, cfg.gaussian_seed()?)),
        ..suite::SuiteOptions::default()
    };
    let report = suite::run_suite(which, &opts);
    Ok(VerifyOut {
        suite: which.name().to_string(),
        checks: report
            .checks
            .into_iter()
            .map(|c| CheckOut { name: c.name, max_error: c.max_error, tol: c.tol, pass: c.pass })
            .collect(),
        pass: report.pass,
    })
}

impl VerifyOut {
    pub fn to_table(&self) -> Table {
        let meta = vec![("suite".to_string(), self.suite.clone()), ("pass".to_string(), self.pass.to_string())];
        let mut table = Table::new("verify", meta, &["name", "max_error", "tol", "pass"]);
        for c in &self.checks {
            table.push(vec![c.name.as_str().into(), c.max_error.into(), c.tol.into(), c.pass.into()]);
        }
        table
    }
}
