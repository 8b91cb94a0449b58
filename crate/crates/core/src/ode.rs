//! Adaptive Dormand–Prince 5(4) integrator that lands exactly on a
//! caller-supplied output grid.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error coefficients: 5th-order weights minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14 }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `grid[0]` and returns the state at every
/// grid point. `on_step(t, y)` is called after every accepted internal step,
/// including the ones that land on grid points.
pub fn integrate<const N: usize, F, S>(
    f: F,
    grid: &[f64],
    y0: [f64; N],
    tol: Tolerances,
    mut on_step: S,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: FnMut(f64, &[f64; N]) -> Result<()>,
{
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t_start) = grid.first() else {
        return Ok(out);
    };
    let mut t = t_start;
    let mut y = y0;
    out.push(y);
    let span = grid.last().unwrap() - t_start;
    let mut h = (1e-3 * span.abs()).clamp(1e-6, 1e-2);
    let mut k1 = f(t, &y);

    for &target in &grid[1..] {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t, h: step });
            }

            let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
            let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * step, &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                t + C5 * step,
                &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + step,
                &axpy(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = axpy(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f(t + step, &y_new);

            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = step
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() {
                h = step * 0.2;
                continue;
            }

            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k1 = k7;
                on_step(t, &y)?;
                // a clamped final step should not shrink the next one
                if !last || factor > 1.0 {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        out.push(y);
    }
    Ok(out)
}
