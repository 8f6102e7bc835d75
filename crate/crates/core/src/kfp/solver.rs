//! Operator-split finite differences for the kinetic Fokker-Planck equation.
//!
//! Each substep applies, in order, the conservative transport `-v ∂_x`
//! (periodic in `x`), the explicit drift `B ∂_v` and source `S`, and the
//! backward-Euler flux-form diffusion `∂_v(A ∂_v)` with one tridiagonal solve
//! per `x` line. Face diffusivities are harmonic means of the cell values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::problem::{SolverProblem, TransportScheme, VBoundary};
use crate::error::{KgError, Result};
use crate::field::GridField;

/// Space-time solution and bookkeeping of one solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    /// Time-cell averages `½(u(t_k) + u(t_{k+1}))` on the `(t, x, v)` grid.
    pub field: GridField,
    /// State at `t = 0`, row-major `(x, v)`.
    pub final_state: Vec<f64>,
    /// `Σ u dx dv` before the first and after every substep.
    pub mass_history: Vec<f64>,
    /// `max u` before the first and after every substep.
    pub max_history: Vec<f64>,
    pub substeps: usize,
}

impl Solution {
    /// Largest mass change over one substep, relative to the initial mass.
    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.mass_history[0].abs().max(f64::MIN_POSITIVE);
        self.mass_history
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / m0)
            .fold(0.0, f64::max)
    }
}

/// Solves `(I - dt L) u = rhs` for a tridiagonal `L` given by its three
/// diagonals; `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = sup[0] / beta;
    rhs[0] /= beta;
    for j in 1..n {
        beta = diag[j] - sub[j] * c[j - 1];
        c[j] = if j + 1 < n { sup[j] / beta } else { 0.0 };
        rhs[j] = (rhs[j] - sub[j] * rhs[j - 1]) / beta;
    }
    for j in (0..n - 1).rev() {
        rhs[j] -= c[j] * rhs[j + 1];
    }
}

fn limited_slope(minus: f64, plus: f64) -> f64 {
    if minus * plus <= 0.0 {
        0.0
    } else {
        2.0 * minus * plus / (minus + plus)
    }
}

/// Numerical flux through the face `i+½` of column `j`.
fn face_flux(u: &[f64], n_x: usize, n_v: usize, i: usize, j: usize, v: f64, nu: f64, scheme: TransportScheme) -> f64 {
    let at = |k: isize| u[(k.rem_euclid(n_x as isize) as usize) * n_v + j];
    let i = i as isize;
    match scheme {
        TransportScheme::Upwind => {
            if v >= 0.0 {
                v * at(i)
            } else {
                v * at(i + 1)
            }
        }
        TransportScheme::Limited => {
            let (um, u0, u1, u2) = (at(i - 1), at(i), at(i + 1), at(i + 2));
            if v >= 0.0 {
                v * (u0 + 0.5 * (1.0 - nu.abs()) * limited_slope(u0 - um, u1 - u0))
            } else {
                v * (u1 - 0.5 * (1.0 - nu.abs()) * limited_slope(u2 - u1, u1 - u0))
            }
        }
    }
}

fn transport(p: &SolverProblem, u: &[f64], out: &mut [f64], dt: f64) {
    let (n_x, n_v) = (p.n_x, p.n_v);
    let dx = p.dx();
    let lam = dt / dx;
    out.par_chunks_mut(n_v).enumerate().for_each(|(i, row)| {
        let left = (i + n_x - 1) % n_x;
        for (j, cell) in row.iter_mut().enumerate() {
            let v = p.v_center(j);
            let nu = v * lam;
            let fr = face_flux(u, n_x, n_v, i, j, v, nu, p.scheme);
            let fl = face_flux(u, n_x, n_v, left, j, v, nu, p.scheme);
            *cell = u[i * n_v + j] - lam * (fr - fl);
        }
    });
}

/// Drift, source and implicit diffusion on every `x` line at mid-step time `tm`.
fn vertical(p: &SolverProblem, u: &mut [f64], tm: f64, dt: f64) {
    let n_v = p.n_v;
    let dv = p.dv();
    let c = &p.coefficients;
    let has_drift = !c.b.is_zero();
    let has_source = !c.s.is_zero();
    let dirichlet = p.boundary_v == VBoundary::Dirichlet;
    u.par_chunks_mut(n_v).enumerate().for_each(|(i, row)| {
        let x = p.x_center(i);
        if has_drift || has_source {
            let old = row.to_vec();
            let ghost = |k: isize| -> f64 {
                if k < 0 {
                    if dirichlet { -old[0] } else { old[0] }
                } else if k as usize >= n_v {
                    if dirichlet { -old[n_v - 1] } else { old[n_v - 1] }
                } else {
                    old[k as usize]
                }
            };
            for j in 0..n_v {
                let v = p.v_center(j);
                let mut inc = 0.0;
                if has_drift {
                    let dfdv = (ghost(j as isize + 1) - ghost(j as isize - 1)) / (2.0 * dv);
                    inc += c.b.eval(tm, x, v) * dfdv;
                }
                if has_source {
                    inc += c.s.eval(tm, x, v);
                }
                row[j] += dt * inc;
            }
        }
        let a: Vec<f64> = (0..n_v).map(|j| c.a.eval(tm, x, p.v_center(j))).collect();
        let k = dt / (dv * dv);
        let mut sub = vec![0.0; n_v];
        let mut diag = vec![1.0; n_v];
        let mut sup = vec![0.0; n_v];
        for j in 0..n_v - 1 {
            let af = 2.0 * a[j] * a[j + 1] / (a[j] + a[j + 1]);
            diag[j] += k * af;
            sup[j] = -k * af;
            diag[j + 1] += k * af;
            sub[j + 1] = -k * af;
        }
        if dirichlet {
            diag[0] += 2.0 * k * a[0];
            diag[n_v - 1] += 2.0 * k * a[n_v - 1];
        }
        solve_tridiagonal(&sub, &diag, &sup, row);
    });
}

fn check_coefficients(p: &SolverProblem) -> Result<()> {
    // Bounds are checked on the cell-centre lattice at the time-cell centres.
    let dt = p.dt();
    for k in 0..p.n_t {
        let t = p.t0 + (k as f64 + 0.5) * dt;
        for i in 0..p.n_x {
            for j in 0..p.n_v {
                p.coefficients.check_bounds(t, p.x_center(i), p.v_center(j))?;
            }
        }
    }
    Ok(())
}

pub fn solve(problem: &SolverProblem) -> Result<Solution> {
    problem.validate()?;
    check_coefficients(problem)?;
    let (n_t, n_x, n_v) = (problem.n_t, problem.n_x, problem.n_v);
    let m = problem.substeps();
    let dt = problem.dt();
    let ds = dt / m as f64;
    let cell = problem.dx() * problem.dv();
    let mut u: Vec<f64> = (0..n_x * n_v)
        .map(|idx| problem.initial.eval(problem.x_center(idx / n_v), problem.v_center(idx % n_v)))
        .collect();
    let mut scratch = vec![0.0; n_x * n_v];
    let mut values = Vec::with_capacity(n_t * n_x * n_v);
    let mass = |u: &[f64]| u.iter().sum::<f64>() * cell;
    let umax = |u: &[f64]| u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut mass_history = vec![mass(&u)];
    let mut max_history = vec![umax(&u)];
    let mut step = 0usize;
    for k in 0..n_t {
        let start = u.clone();
        for s in 0..m {
            let tm = problem.t0 + k as f64 * dt + (s as f64 + 0.5) * ds;
            transport(problem, &u, &mut scratch, ds);
            std::mem::swap(&mut u, &mut scratch);
            vertical(problem, &mut u, tm, ds);
            step += 1;
            if let Some(bad) = u.iter().position(|v| !v.is_finite()) {
                return Err(KgError::Instability {
                    step,
                    detail: format!("non-finite value at cell {bad}"),
                });
            }
            mass_history.push(mass(&u));
            max_history.push(umax(&u));
        }
        values.extend(start.iter().zip(&u).map(|(a, b)| 0.5 * (a + b)));
    }
    let field = GridField::from_values(
        1,
        vec![problem.t0, -problem.x_half, -problem.v_half],
        vec![0.0, problem.x_half, problem.v_half],
        vec![n_t, n_x, n_v],
        values,
    )?;
    Ok(Solution {
        field,
        final_state: u,
        mass_history,
        max_history,
        substeps: m,
    })
}

/// Mass, means and second central moments of a phase-space state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMoments {
    pub mass: f64,
    pub mean_x: f64,
    pub mean_v: f64,
    pub var_x: f64,
    pub var_v: f64,
    pub cov_xv: f64,
}

pub fn phase_moments(problem: &SolverProblem, state: &[f64]) -> PhaseMoments {
    let n_v = problem.n_v;
    let cell = problem.dx() * problem.dv();
    let (mut m0, mut mx, mut mv) = (0.0, 0.0, 0.0);
    for (idx, &u) in state.iter().enumerate() {
        let (x, v) = (problem.x_center(idx / n_v), problem.v_center(idx % n_v));
        m0 += u;
        mx += u * x;
        mv += u * v;
    }
    let (ex, ev) = (mx / m0, mv / m0);
    let (mut sxx, mut svv, mut sxv) = (0.0, 0.0, 0.0);
    for (idx, &u) in state.iter().enumerate() {
        let (x, v) = (problem.x_center(idx / n_v) - ex, problem.v_center(idx % n_v) - ev);
        sxx += u * x * x;
        svv += u * v * v;
        sxv += u * x * v;
    }
    PhaseMoments {
        mass: m0 * cell,
        mean_x: ex,
        mean_v: ev,
        var_x: sxx / m0,
        var_v: svv / m0,
        cov_xv: sxv / m0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kfp::problem::{Coefficient, CoefficientField, InitialDatum};

    fn base(n: usize) -> SolverProblem {
        SolverProblem {
            t0: -0.5,
            x_half: 1.0,
            v_half: 1.0,
            n_t: n,
            n_x: n,
            n_v: n,
            boundary_v: VBoundary::Neumann,
            scheme: TransportScheme::Limited,
            substeps: None,
            initial: InitialDatum::Constant { value: 2.0 },
            coefficients: CoefficientField::pure_diffusion(1.0),
        }
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let sub = [0.0, -1.0, -1.0, -1.0];
        let diag = [4.0, 4.0, 4.0, 4.0];
        let sup = [-1.0, -1.0, -1.0, 0.0];
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|j| {
                diag[j] * x[j]
                    + if j > 0 { sub[j] * x[j - 1] } else { 0.0 }
                    + if j < 3 { sup[j] * x[j + 1] } else { 0.0 }
            })
            .collect();
        solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
        for j in 0..4 {
            assert!((rhs[j] - x[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_stays_constant() {
        let sol = solve(&base(16)).unwrap();
        assert!(sol.field.values().iter().all(|&v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn rough_coefficients_conserve_mass_and_max() {
        let mut p = base(24);
        p.initial = InitialDatum::Bump { amplitude: 1.0, x0: 0.1, v0: -0.2, wx: 0.5, wv: 0.5 };
        p.coefficients.a = Coefficient::Checkerboard { low: 1.0, high: 2.0, block: [0.1, 0.2, 0.25] };
        p.coefficients.big_lambda = 2.0;
        let sol = solve(&p).unwrap();
        assert!(sol.max_mass_drift() < 1e-12);
        assert!(sol.max_history.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn out_of_bounds_coefficient_rejected() {
        let mut p = base(8);
        p.coefficients.a = Coefficient::constant(3.0);
        assert!(matches!(solve(&p), Err(KgError::Configuration(_))));
    }
}
