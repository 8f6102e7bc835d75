//! Reference experiments with known answers: the Kolmogorov equation from a
//! near-delta datum and a manufactured smooth solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::evolved_moments;
use super::problem::{Coefficient, CoefficientField, InitialDatum, SolverProblem, TransportScheme, VBoundary};
use super::solver::{phase_moments, solve};
use crate::error::Result;

/// `A = 1`, `B = S = 0` on `[-τ, 0] × [-1.5, 1.5] × [-6, 6]`, started from a
/// Gaussian two cells wide in each phase variable.
pub fn kolmogorov_problem(n: usize, tau: f64, scheme: TransportScheme) -> SolverProblem {
    let (x_half, v_half) = (1.5, 6.0);
    let sd_v = 2.0 * (2.0 * v_half / n as f64);
    let sd_x = 2.0 * (2.0 * x_half / n as f64);
    SolverProblem {
        t0: -tau,
        x_half,
        v_half,
        n_t: n,
        n_x: n,
        n_v: n,
        boundary_v: VBoundary::Neumann,
        scheme,
        substeps: None,
        initial: InitialDatum::Gaussian { x0: 0.0, v0: 0.0, var_x: sd_x * sd_x, var_v: sd_v * sd_v },
        coefficients: CoefficientField::pure_diffusion(1.0),
    }
}

/// Computed against predicted second moments at the final time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub var_x: f64,
    pub var_v: f64,
    pub cov_xv: f64,
    pub expected_var_x: f64,
    pub expected_var_v: f64,
    pub expected_cov_xv: f64,
    pub mass: f64,
    pub max_mass_drift: f64,
    pub seconds: f64,
}

impl MomentComparison {
    /// Largest relative error of the three moments.
    pub fn max_rel_error(&self) -> f64 {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        rel(self.var_x, self.expected_var_x)
            .max(rel(self.var_v, self.expected_var_v))
            .max(rel(self.cov_xv, self.expected_cov_xv))
    }
}

pub fn kolmogorov_moments(n: usize, tau: f64, scheme: TransportScheme) -> Result<MomentComparison> {
    let p = kolmogorov_problem(n, tau, scheme);
    let start = std::time::Instant::now();
    let sol = solve(&p)?;
    let seconds = start.elapsed().as_secs_f64();
    let m = phase_moments(&p, &sol.final_state);
    let InitialDatum::Gaussian { var_x, var_v, .. } = p.initial else { unreachable!() };
    let (ex, ev, ec) = evolved_moments(tau, var_x, var_v, 0.0);
    Ok(MomentComparison {
        var_x: m.var_x,
        var_v: m.var_v,
        cov_xv: m.cov_xv,
        expected_var_x: ex,
        expected_var_v: ev,
        expected_cov_xv: ec,
        mass: m.mass,
        max_mass_drift: sol.max_mass_drift(),
        seconds,
    })
}

/// `f*(t, x, v) = e^t sin(πx/X) cos(πv/(2V))` on `X = V = 1`, `T0 = -1/2`,
/// Dirichlet in `v`.
pub fn manufactured_exact(t: f64, x: f64, v: f64) -> f64 {
    t.exp() * (PI * x).sin() * (0.5 * PI * v).cos()
}

/// The problem solved by [`manufactured_exact`] with smooth variable `A` and
/// `B` and the matching source.
pub fn manufactured_problem(n: usize, scheme: TransportScheme) -> SolverProblem {
    let (kx, kv) = (PI, 0.5 * PI);
    let a = |t: f64, x: f64| 1.5 + 0.5 * (t + x).sin();
    let b = |v: f64| 0.5 * v.cos();
    let source = move |t: f64, x: f64, v: f64| {
        let e = t.exp();
        let f = manufactured_exact(t, x, v);
        let fx = e * kx * (kx * x).cos() * (kv * v).cos();
        let fv = -e * kv * (kx * x).sin() * (kv * v).sin();
        f + v * fx + a(t, x) * kv * kv * f - b(v) * fv
    };
    SolverProblem {
        t0: -0.5,
        x_half: 1.0,
        v_half: 1.0,
        n_t: n,
        n_x: n,
        n_v: n,
        boundary_v: VBoundary::Dirichlet,
        scheme,
        substeps: None,
        initial: InitialDatum::function(|x, v| manufactured_exact(-0.5, x, v)),
        coefficients: CoefficientField {
            a: Coefficient::function(move |t, x, _| a(t, x)),
            b: Coefficient::function(move |_, _, v| b(v)),
            s: Coefficient::function(source),
            lambda: 1.0,
            big_lambda: 2.0,
        },
    }
}

/// Discrete `L²` error at `t = 0`.
pub fn manufactured_error(n: usize, scheme: TransportScheme) -> Result<f64> {
    let p = manufactured_problem(n, scheme);
    let sol = solve(&p)?;
    let e2: f64 = sol
        .final_state
        .iter()
        .enumerate()
        .map(|(idx, u)| (u - manufactured_exact(0.0, p.x_center(idx / n), p.v_center(idx % n))).powi(2))
        .sum();
    Ok((e2 * p.dx() * p.dv()).sqrt())
}

/// Errors on successive grids and the observed orders between them.
pub fn convergence_orders(errors: &[f64], ratio: f64) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).ln() / ratio.ln()).collect()
}

/// Random-block diffusion with `B = S = 0`, Neumann in `v`.
pub fn rough_conservation_problem(n: usize, scheme: TransportScheme, seed: u64) -> SolverProblem {
    SolverProblem {
        t0: -1.0,
        x_half: 1.0,
        v_half: 1.0,
        n_t: n,
        n_x: n,
        n_v: n,
        boundary_v: VBoundary::Neumann,
        scheme,
        substeps: None,
        initial: InitialDatum::Bump { amplitude: 1.0, x0: 0.2, v0: -0.1, wx: 0.6, wv: 0.5 },
        coefficients: CoefficientField {
            a: Coefficient::RandomBlocks { low: 1.0, high: 2.0, block: [0.1, 0.13, 0.07], seed },
            b: Coefficient::constant(0.0),
            s: Coefficient::constant(0.0),
            lambda: 1.0,
            big_lambda: 2.0,
        },
    }
}
