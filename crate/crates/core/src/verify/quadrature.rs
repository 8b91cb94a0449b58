//! Gauss–Hermite rules for ∫ f(u) e^{−u²} du.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest rule we build; beyond this e^{u²} at the outer nodes overflows.
pub const MAX_NODES: usize = 300;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// wᵢ e^{uᵢ²}, for integrands that already carry the Gaussian.
    pub scaled_weights: Vec<f64>,
}

impl GaussHermite {
    /// Roots are bracketed by Sturm-sequence bisection on the Jacobi matrix
    /// of the Hermite recurrence, then polished by Newton on the orthonormal
    /// polynomials; weights come from the same recurrence so that tiny outer
    /// weights keep full relative precision.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_NODES {
            return Err(Error::InvalidQuadrature(format!("node count {n} outside 1..={MAX_NODES}")));
        }
        let nf = n as f64;
        let bound = (2.0 * nf).sqrt() + 1.0;
        let mut nodes = vec![0.0; n];
        let mut log_w = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // the (i+1)-th largest eigenvalue: n − i − 1 eigenvalues lie below it
            let target = n - i - 1;
            let (mut lo, mut hi) = (0.0, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(n, mid) <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut z = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (p, d) = orthonormal(n, z);
                if d == 0.0 {
                    break;
                }
                let step = p / d;
                if step.abs() > hi - lo + 1e-12 * z.abs().max(1.0) {
                    break;
                }
                z -= step;
            }
            let pp = orthonormal(n, z).1.abs();
            if !z.is_finite() || pp == 0.0 {
                return Err(Error::InvalidQuadrature(format!("root {i} of H_{n} not found")));
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let lw = 2f64.ln() - 2.0 * pp.ln();
            log_w[i] = lw;
            log_w[n - 1 - i] = lw;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        let weights = log_w.iter().map(|l| l.exp()).collect();
        let scaled_weights = log_w.iter().zip(&nodes).map(|(l, u)| (l + u * u).exp()).collect();
        Ok(Self { nodes, weights, scaled_weights })
    }
}

/// Number of eigenvalues of the Hermite Jacobi matrix below `x`.
fn count_below(n: usize, x: f64) -> usize {
    let mut count = 0;
    let mut d = -x;
    for k in 0..n {
        if k > 0 {
            d = -x - (k as f64 / 2.0) / d;
        }
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal Hermite polynomial p̃ₙ(z) and its derivative √(2n)·p̃ₙ₋₁(z).
fn orthonormal(n: usize, z: f64) -> (f64, f64) {
    let (mut p1, mut p2) = (std::f64::consts::PI.powf(-0.25), 0.0);
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Shared, lazily built rule for `n` nodes.
pub fn gauss_hermite(n: usize) -> Result<Arc<GaussHermite>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(GaussHermite::new(n)?);
    cache.lock().expect("quadrature cache poisoned").insert(n, rule.clone());
    Ok(rule)
}
