//! The Caldirola–Kanai oscillator: Hamiltonian, Lagrangian, mechanical
//! energy and the second derivatives that drive the variational system.

use crate::error::{Error, Result};

/// Relative width of the band around ω² = 0 that is treated as critical
/// damping. Scaled by `max(γ²/4, ω₀², 1)`.
pub const CRITICAL_BAND: f64 = 1e-10;

/// Damping regime, classified from the sign of ω² = γ²/4 − ω₀².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Underdamped => "underdamped",
            Regime::Critical => "critical",
            Regime::Overdamped => "overdamped",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Physical constants of the damped oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub hbar: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, omega0: f64, gamma: f64, hbar: f64) -> Result<Self> {
        let all_finite = [m, omega0, gamma, hbar].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if m <= 0.0 {
            return Err(Error::InvalidParams(format!("mass must be > 0, got {m}")));
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParams(format!("hbar must be > 0, got {hbar}")));
        }
        if omega0 < 0.0 {
            return Err(Error::InvalidParams(format!("omega0 must be >= 0, got {omega0}")));
        }
        if gamma < 0.0 {
            return Err(Error::InvalidParams(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self { m, omega0, gamma, hbar })
    }

    /// Signed discriminant ω² = γ²/4 − ω₀² (positive when overdamped).
    pub fn omega_sq(&self) -> f64 {
        0.25 * self.gamma * self.gamma - self.omega0 * self.omega0
    }

    fn critical_threshold(&self) -> f64 {
        let scale = (0.25 * self.gamma * self.gamma)
            .max(self.omega0 * self.omega0)
            .max(1.0);
        CRITICAL_BAND * scale
    }

    pub fn regime(&self) -> Regime {
        let w2 = self.omega_sq();
        if w2.abs() < self.critical_threshold() {
            Regime::Critical
        } else if w2 < 0.0 {
            Regime::Underdamped
        } else {
            Regime::Overdamped
        }
    }

    /// Real frequency of the regime, |ω²|^{1/2}: the oscillation frequency
    /// when underdamped and the hyperbolic rate when overdamped. Zero in the
    /// critical band.
    pub fn real_frequency(&self) -> f64 {
        match self.regime() {
            Regime::Critical => 0.0,
            _ => self.omega_sq().abs().sqrt(),
        }
    }
}

/// Second derivatives of the Hamiltonian along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianAlongTrajectory {
    pub h_xx: f64,
    pub h_xp: f64,
    pub h_pp: f64,
}

/// H(x, p, t) = e^{−γt} p²/(2m) + ½ e^{γt} m ω₀² x².
pub fn hamiltonian(params: &OscillatorParams, x: f64, p: f64, t: f64) -> f64 {
    let OscillatorParams { m, omega0, gamma, .. } = *params;
    (-gamma * t).exp() * p * p / (2.0 * m) + 0.5 * (gamma * t).exp() * m * omega0 * omega0 * x * x
}

/// L(x, v, t) = e^{γt}(½ m v² − ½ m ω₀² x²).
pub fn lagrangian(params: &OscillatorParams, x: f64, v: f64, t: f64) -> f64 {
    let OscillatorParams { m, omega0, gamma, .. } = *params;
    (gamma * t).exp() * 0.5 * m * (v * v - omega0 * omega0 * x * x)
}

/// E = e^{−2γt} p²/(2m) + ½ m ω₀² x².
pub fn mechanical_energy(params: &OscillatorParams, x: f64, p: f64, t: f64) -> f64 {
    let OscillatorParams { m, omega0, gamma, .. } = *params;
    (-2.0 * gamma * t).exp() * p * p / (2.0 * m) + 0.5 * m * omega0 * omega0 * x * x
}

/// Hessian of the Hamiltonian at time t. The model is quadratic, so the
/// result does not depend on the trajectory.
pub fn hessian_along(params: &OscillatorParams, t: f64) -> HessianAlongTrajectory {
    let OscillatorParams { m, omega0, gamma, .. } = *params;
    HessianAlongTrajectory {
        h_xx: (gamma * t).exp() * m * omega0 * omega0,
        h_xp: 0.0,
        h_pp: (-gamma * t).exp() / m,
    }
}
