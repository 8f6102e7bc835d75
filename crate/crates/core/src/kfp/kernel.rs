//! The fundamental solution of `∂_t f + v ∂_x f = ∂_v² f` in `d = 1`.

use crate::error::{KgError, Result};

/// Density at time `t > 0` of the process started at the origin: a centred
/// Gaussian with `Var(v) = 2t`, `Var(x) = 2t³/3`, `Cov(x, v) = t²`.
pub fn kolmogorov_kernel(t: f64, x: f64, v: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(KgError::Domain(format!("kernel needs t > 0, got {t}")));
    }
    let t2 = t * t;
    let e = -3.0 * x * x / (t2 * t) + 3.0 * x * v / t2 - v * v / t;
    Ok(3f64.sqrt() / (2.0 * std::f64::consts::PI * t2) * e.exp())
}

/// `(Var(x), Var(v), Cov(x, v))` of the kernel at time `t`.
pub fn kernel_moments(t: f64) -> (f64, f64, f64) {
    (2.0 * t.powi(3) / 3.0, 2.0 * t, t * t)
}

/// Second moments at time `τ` of the free evolution of an initial law with
/// moments `(var_x0, var_v0, cov0)`: transport adds `2 cov0 τ + var_v0 τ²` to
/// `Var(x)` and `var_v0 τ` to `Cov`, diffusion adds the kernel moments.
pub fn evolved_moments(tau: f64, var_x0: f64, var_v0: f64, cov0: f64) -> (f64, f64, f64) {
    let (kx, kv, kc) = kernel_moments(tau);
    (
        var_x0 + 2.0 * cov0 * tau + var_v0 * tau * tau + kx,
        var_v0 + kv,
        cov0 + var_v0 * tau + kc,
    )
}
