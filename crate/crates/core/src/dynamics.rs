//! Classical trajectory, the complex variational pair (w, z) and the action,
//! both in closed form and by direct ODE integration.
//!
//! The closed forms are written through two real fundamental functions of the
//! damped equation q̈ + γq̇ + ω₀²q = 0 after removing the e^{−γt/2} envelope:
//!
//! * `C(t)` = cosh ωt, cos ω̃t or 1,
//! * `S(t)` = sinh(ωt)/ω, sin(ω̃t)/ω̃ or t,
//!
//! for the overdamped, underdamped (ω = iω̃) and critical regimes. With these
//! any solution is q(t) = e^{−γt/2}(q₀C + κS), κ = q̇(0) + γq₀/2, and the
//! regime switch never leaks an imaginary part into real quantities.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{self, OscillatorParams, Regime};
use crate::ode::{self, Tolerances};

/// Complex width parameter b and the initial phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSeed {
    b: C64,
    pub x0: f64,
    pub p0: f64,
}

impl GaussianSeed {
    pub fn new(b: C64, x0: f64, p0: f64) -> Result<Self> {
        if !(b.im > 0.0) || !b.re.is_finite() || !b.im.is_finite() {
            return Err(Error::NonPositiveWidth(b.im));
        }
        if !x0.is_finite() || !p0.is_finite() {
            return Err(Error::InvalidParams("seed point must be finite".into()));
        }
        Ok(Self { b, x0, p0 })
    }

    /// The reference trajectory x(0) = 1, p(0) = −mγ/2.
    pub fn reference(params: &OscillatorParams, b: C64) -> Result<Self> {
        Self::new(b, 1.0, -0.5 * params.m * params.gamma)
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn im_b(&self) -> f64 {
        self.b.im
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub t: f64,
    pub x: f64,
    pub p: f64,
}

/// Solution of the variational system at time t.
///
/// `delta` is δ = (b + γm/2)/(mω) for ω² ≠ 0 (with ω = iω̃ when
/// underdamped); in the critical band, where δ diverges, it holds the finite
/// limit coefficient (b + γm/2)/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiPair {
    pub t: f64,
    pub w: C64,
    pub z: C64,
    pub delta: C64,
}

impl JacobiPair {
    /// Im(w z̄), conserved and equal to Im b.
    pub fn symplectic_form(&self) -> f64 {
        (self.w * self.z.conj()).im
    }
}

/// Everything the wavefunction needs at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub w: C64,
    pub z: C64,
    /// ∫₀ᵗ (ẋp − H) dt.
    pub s0: C64,
    /// Continuous argument of z, starting at 0.
    pub argz: f64,
}

#[derive(Debug, Clone)]
pub struct TrajectoryBundle {
    pub params: OscillatorParams,
    pub seed: GaussianSeed,
    pub samples: Vec<TrajectorySample>,
}

/// Fundamental functions C(t), S(t) and ω² for the regime of `params`.
fn fundamentals(params: &OscillatorParams, t: f64) -> (f64, f64, f64) {
    let w2 = params.omega_sq();
    match params.regime() {
        Regime::Overdamped => {
            let om = w2.sqrt();
            ((om * t).cosh(), (om * t).sinh() / om, w2)
        }
        Regime::Underdamped => {
            let om = (-w2).sqrt();
            ((om * t).cos(), (om * t).sin() / om, w2)
        }
        Regime::Critical => {
            // series in ω²t² around the critical point
            let u = w2 * t * t;
            let c = 1.0 + u / 2.0 + u * u / 24.0 + u * u * u / 720.0;
            let s = t * (1.0 + u / 6.0 + u * u / 120.0 + u * u * u / 5040.0);
            (c, s, w2)
        }
    }
}

/// Evolves complex Cauchy data (q₀, p₀) of Hamilton's equations to time t.
fn propagate(params: &OscillatorParams, q0: C64, p0: C64, t: f64) -> (C64, C64) {
    let m = params.m;
    let g = params.gamma;
    let (c, s, w2) = fundamentals(params, t);
    let kappa = p0 / m + q0 * (0.5 * g);
    let q = (q0 * c + kappa * s) * (-0.5 * g * t).exp();
    let p = ((kappa - q0 * (0.5 * g)) * c + (q0 * w2 - kappa * (0.5 * g)) * s) * (m * (0.5 * g * t).exp());
    (q, p)
}

/// Classical trajectory for arbitrary Cauchy data.
pub fn general_trajectory(params: &OscillatorParams, x0: f64, p0: f64, t: f64) -> PhaseSpacePoint {
    let (x, p) = propagate(params, C64::new(x0, 0.0), C64::new(p0, 0.0), t);
    PhaseSpacePoint { t, x: x.re, p: p.re }
}

/// The reference trajectory x = cosh(ωt)e^{−γt/2},
/// p = m(ω sinh ωt − (γ/2) cosh ωt)e^{γt/2}, continued to all regimes.
pub fn reference_trajectory(params: &OscillatorParams, t: f64) -> PhaseSpacePoint {
    general_trajectory(params, 1.0, -0.5 * params.m * params.gamma, t)
}

/// Closed-form (w, z) with w(0) = b, z(0) = 1.
pub fn closed_form_variations(params: &OscillatorParams, b: C64, t: f64) -> Result<JacobiPair> {
    if !(b.im > 0.0) {
        return Err(Error::NonPositiveWidth(b.im));
    }
    let (z, w) = propagate(params, C64::new(1.0, 0.0), b, t);
    let kappa = b / params.m + 0.5 * params.gamma;
    let delta = match params.regime() {
        Regime::Critical => kappa,
        Regime::Overdamped => kappa / params.real_frequency(),
        Regime::Underdamped => kappa / C64::new(0.0, params.real_frequency()),
    };
    Ok(JacobiPair { t, w, z, delta })
}

/// Closed-form classical and variational data at t, paired with the supplied
/// action and unwound phase (those two need the history).
pub fn closed_form_sample(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    t: f64,
    s0: C64,
    argz: f64,
) -> TrajectorySample {
    let pt = general_trajectory(params, seed.x0, seed.p0, t);
    let (z, w) = propagate(params, C64::new(1.0, 0.0), seed.b, t);
    TrajectorySample { t, x: pt.x, p: pt.p, w, z, s0, argz }
}

/// Continuous argument of a sampled complex curve, starting from the
/// principal argument of the first sample.
pub fn unwind_phase(z_samples: &[C64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(z_samples.len());
    let Some(first) = z_samples.first() else {
        return Ok(out);
    };
    if first.norm() == 0.0 {
        return Err(Error::Caustic(0));
    }
    let mut acc = first.arg();
    out.push(acc);
    for (i, pair) in z_samples.windows(2).enumerate() {
        if pair[1].norm() == 0.0 {
            return Err(Error::Caustic(i + 1));
        }
        let jump = (pair[1] * pair[0].conj()).arg();
        if jump.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::PhaseJump { index: i, jump });
        }
        acc += jump;
        out.push(acc);
    }
    Ok(out)
}

const STATE_DIM: usize = 7;

fn rhs(params: &OscillatorParams, t: f64, y: &[f64; STATE_DIM]) -> [f64; STATE_DIM] {
    let hess = model::hessian_along(params, t);
    let [x, p, wr, wi, zr, zi, _] = *y;
    let xdot = hess.h_pp * p;
    let pdot = -hess.h_xx * x;
    [
        xdot,
        pdot,
        -hess.h_xx * zr,
        -hess.h_xx * zi,
        hess.h_pp * wr,
        hess.h_pp * wi,
        xdot * p - model::hamiltonian(params, x, p, t),
    ]
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => return Err(Error::BadTimeGrid("empty grid".into())),
        Some(&t0) if t0 != 0.0 => return Err(Error::BadTimeGrid(format!("first time is {t0}"))),
        _ => {}
    }
    if let Some(i) = t_grid.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::BadTimeGrid(format!("not increasing at index {}", i + 1)));
    }
    Ok(())
}

/// Integrates (x, p, w, z, S₀) with RK45 at rtol 1e−12 / atol 1e−14 and
/// records the unwound phase of z at every grid time.
pub fn integrate_bundle(
    params: &OscillatorParams,
    seed: &GaussianSeed,
    t_grid: &[f64],
) -> Result<TrajectoryBundle> {
    check_grid(t_grid)?;
    let y0 = [seed.x0, seed.p0, seed.b.re, seed.b.im, 1.0, 0.0, 0.0];

    // arg z is tracked across every accepted internal step, so coarse output
    // grids never alias the winding
    let mut argz = 0.0;
    let mut prev_z = C64::new(1.0, 0.0);
    let mut steps = 0usize;
    let mut phases = Vec::with_capacity(t_grid.len());
    phases.push(0.0);
    let mut grid_iter = t_grid[1..].iter().peekable();
    let states = ode::integrate(
        |t, y| rhs(params, t, y),
        t_grid,
        y0,
        Tolerances::default(),
        |t, y| {
            steps += 1;
            let z = C64::new(y[4], y[5]);
            if z.norm() == 0.0 {
                return Err(Error::Caustic(steps));
            }
            let jump = (z * prev_z.conj()).arg();
            if jump.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(Error::PhaseJump { index: steps, jump });
            }
            argz += jump;
            prev_z = z;
            if grid_iter.peek().is_some_and(|&&g| g == t) {
                grid_iter.next();
                phases.push(argz);
            }
            Ok(())
        },
    )?;

    let samples = t_grid
        .iter()
        .zip(states)
        .zip(phases)
        .map(|((&t, y), argz)| TrajectorySample {
            t,
            x: y[0],
            p: y[1],
            w: C64::new(y[2], y[3]),
            z: C64::new(y[4], y[5]),
            s0: C64::new(y[6], 0.0),
            argz,
        })
        .collect();
    Ok(TrajectoryBundle { params: *params, seed: *seed, samples })
}

impl TrajectoryBundle {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// The stored sample at exactly time t, if any.
    pub fn sample_exact(&self, t: f64) -> Option<&TrajectorySample> {
        self.samples
            .binary_search_by(|s| s.t.total_cmp(&t))
            .ok()
            .map(|i| &self.samples[i])
    }

    /// Dense output by cubic Hermite interpolation between stored samples.
    pub fn interpolate(&self, t: f64) -> Option<TrajectorySample> {
        let n = self.samples.len();
        if n == 0 || t < self.samples[0].t || t > self.samples[n - 1].t {
            return None;
        }
        if let Some(s) = self.sample_exact(t) {
            return Some(*s);
        }
        let j = self.samples.partition_point(|s| s.t < t);
        let (a, b) = (&self.samples[j - 1], &self.samples[j]);
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        let da = self.derivative(a);
        let db = self.derivative(b);
        let va = self.pack(a);
        let vb = self.pack(b);
        let mut v = [0.0; 8];
        for i in 0..8 {
            v[i] = h00 * va[i] + h10 * h * da[i] + h01 * vb[i] + h11 * h * db[i];
        }
        Some(TrajectorySample {
            t,
            x: v[0],
            p: v[1],
            w: C64::new(v[2], v[3]),
            z: C64::new(v[4], v[5]),
            s0: C64::new(v[6], 0.0),
            argz: v[7],
        })
    }

    fn pack(&self, s: &TrajectorySample) -> [f64; 8] {
        [s.x, s.p, s.w.re, s.w.im, s.z.re, s.z.im, s.s0.re, s.argz]
    }

    fn derivative(&self, s: &TrajectorySample) -> [f64; 8] {
        let y = [s.x, s.p, s.w.re, s.w.im, s.z.re, s.z.im, s.s0.re];
        let d = rhs(&self.params, s.t, &y);
        let h_pp = model::hessian_along(&self.params, s.t).h_pp;
        let dargz = h_pp * (s.w * s.z.conj()).im / s.z.norm_sqr();
        [d[0], d[1], d[2], d[3], d[4], d[5], d[6], dargz]
    }
}
