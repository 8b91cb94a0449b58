use thiserror::Error;

/// Errors raised across the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),

    #[error("Gaussian seed requires Im b > 0, got Im b = {0}")]
    NonPositiveWidth(f64),

    #[error("time grid must start at 0 and be strictly increasing ({0})")]
    BadTimeGrid(String),

    #[error("ODE step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("phase jump of {jump:.3} rad between samples {index} and {next}; refine the grid", next = index + 1)]
    PhaseJump { index: usize, jump: f64 },

    #[error("z(t) vanished at sample {0}")]
    Caustic(usize),

    #[error("ladder context at t = {ctx} does not match state at t = {state}")]
    TimeMismatch { ctx: f64, state: f64 },

    #[error("Fock level {n} exceeds configured maximum {max}")]
    LevelTooHigh { n: usize, max: usize },

    #[error("truncation {given} below the tail rule minimum {required} for |alpha| = {abs_alpha}")]
    TruncationTooLow { given: usize, required: usize, abs_alpha: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("no minimizing mu exists at t = {t}: |theta * {func}(omega t)| = {value} >= 1")]
    NoMinimizingMu { t: f64, func: &'static str, value: f64 },

    #[error("quadrature needs at least {required} nodes, got {given}")]
    InsufficientNodes { given: usize, required: usize },

    #[error("invalid quadrature setup: {0}")]
    InvalidQuadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
