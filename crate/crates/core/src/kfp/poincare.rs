//! Empirical constants of the local hypoelliptic Poincaré-Wirtinger
//! inequality and of its form for solutions.
//!
//! The transport term `T = (∂_t + v ∂_x) f` is measured in
//! `L^q(𝒬; W^{-1,q}(B))`. On one velocity line `B = (-r, r)` the dual norm is
//! `min_c ‖Φ - c‖_{L^q(B)}` with `Φ' = T`. For `q = 2` it is computed by a
//! Dirichlet Laplacian solve per line, and the antiderivative form is kept as
//! a cross-check; for other `q` the minimisation over `c` is a golden-section
//! search and the value is reported as approximate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gradient::velocity_gradient_norm;
use super::solver::solve_tridiagonal;
use crate::error::{KgError, Result};
use crate::field::{average, lp_norm, GridField};
use crate::geometry::Cylinder;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub q: f64,
    pub mean: f64,
    /// `‖f - ⟨⟨f⟩⟩_Q‖_{L^q(Q)}`
    pub lhs: f64,
    /// `‖∇_v f‖_{L^q(Q)}`
    pub gradient_norm: f64,
    /// `‖(∂_t + v ∂_x) f‖_{L^q(𝒬; W^{-1,q}(B))}`
    pub transport_dual: f64,
    /// Relative gap between the Laplacian-solve and antiderivative forms of
    /// the dual norm (`q = 2` only).
    pub dual_crosscheck: Option<f64>,
    pub dual_exact: bool,
    /// `‖S‖_{L²(Q)}` when a source is supplied.
    pub source_norm: Option<f64>,
    /// `lhs / (transport_dual + gradient_norm)`
    pub constant: Option<f64>,
    /// `lhs / gradient_norm`
    pub gradient_constant: Option<f64>,
    /// `lhs / (gradient_norm + source_norm)`
    pub solution_constant: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    if den > 0.0 {
        Some(num / den)
    } else if num == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// Derivative along `axis`: centred inside, one-sided at the ends.
fn axis_derivative(f: &GridField, axis: usize, i: usize) -> f64 {
    let n = f.shape()[axis];
    if n == 1 {
        return 0.0;
    }
    let stride = f.strides()[axis];
    let h = f.spacing(axis);
    let j = (i / stride) % n;
    let vals = f.values();
    if j == 0 {
        (vals[i + stride] - vals[i]) / h
    } else if j == n - 1 {
        (vals[i] - vals[i - stride]) / h
    } else {
        (vals[i + stride] - vals[i - stride]) / (2.0 * h)
    }
}

/// `(∂_t + v ∂_x) f` at every cell (`d = 1`).
pub fn transport_term(f: &GridField) -> GridField {
    let vals: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let v = f.coord(2, i % f.shape()[2]);
            axis_derivative(f, 0, i) + v * axis_derivative(f, 1, i)
        })
        .collect();
    f.with_values(vals).expect("same layout")
}

/// `min_c Σ |Φ_k - c|^q h` to the power `1/q`.
fn antiderivative_dual(t: &[f64], h: f64, q: f64) -> f64 {
    let mut phi = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for &tk in t {
        phi.push(acc + 0.5 * tk * h);
        acc += tk * h;
    }
    let cost = |c: f64| phi.iter().map(|p| (p - c).abs().powf(q)).sum::<f64>() * h;
    let c = if q == 2.0 {
        phi.iter().sum::<f64>() / phi.len() as f64
    } else {
        let (mut a, mut b) = phi.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            if b - a <= 1e-14 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
            let c1 = b - g * (b - a);
            let c2 = a + g * (b - a);
            if cost(c1) <= cost(c2) {
                b = c2;
            } else {
                a = c1;
            }
        }
        0.5 * (a + b)
    };
    cost(c).powf(1.0 / q)
}

/// `(h Σ T_k u_k)^{1/2}` with `-u'' = T`, `u = 0` on the faces bounding the
/// line.
fn laplacian_dual(t: &[f64], h: f64) -> f64 {
    let n = t.len();
    let h2 = h * h;
    let mut diag = vec![2.0 / h2; n];
    diag[0] = 3.0 / h2;
    diag[n - 1] += 1.0 / h2;
    if n == 1 {
        diag[0] = 4.0 / h2;
    }
    let off = vec![-1.0 / h2; n];
    let mut u = t.to_vec();
    solve_tridiagonal(&off, &diag, &off, &mut u);
    let e: f64 = t.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() * h;
    e.max(0.0).sqrt()
}

/// Poincaré check on `Q` for a field on a `d = 1` grid. `Q` must have zero
/// velocity centre so that it is the product `𝒬 × B`.
pub fn poincare_check(f: &GridField, s: Option<&GridField>, q: &Cylinder, q_exp: f64) -> Result<PoincareReport> {
    if f.dim() != 1 {
        return Err(KgError::Domain("the Poincaré check is implemented for d = 1".into()));
    }
    if !(q_exp > 1.0 && q_exp <= 2.0) {
        return Err(KgError::Domain(format!("need 1 < q <= 2, got {q_exp}")));
    }
    if q.center.v[0] != 0.0 {
        return Err(KgError::Domain("the cylinder must have zero velocity centre".into()));
    }
    if !f.contains_cylinder(q) {
        return Err(KgError::Domain("cylinder outside the grid".into()));
    }
    let mean = average(f, q)?;
    let lhs = lp_norm(&f.map(|v| v - mean), q_exp, q)?;
    let gradient_norm = lp_norm(&velocity_gradient_norm(f), q_exp, q)?;
    let source_norm = s.map(|s| lp_norm(s, 2.0, q)).transpose()?;

    let transport = transport_term(f);
    let nv = f.shape()[2];
    let mut lines: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    f.for_each_cell_in(q, |i| lines.entry(i / nv).or_default().push(i));
    let hv = f.spacing(2);
    let area = f.spacing(0) * f.spacing(1);
    let tv = transport.values();
    let per_line: Vec<(f64, f64)> = lines
        .values()
        .map(|cells| {
            let t: Vec<f64> = cells.iter().map(|&i| tv[i]).collect();
            let anti = antiderivative_dual(&t, hv, q_exp);
            let lap = if q_exp == 2.0 { laplacian_dual(&t, hv) } else { anti };
            (lap, anti)
        })
        .collect();
    let dual_exact = q_exp == 2.0;
    let sum_q = |sel: fn(&(f64, f64)) -> f64| {
        (per_line.iter().map(|l| sel(l).powf(q_exp)).sum::<f64>() * area).powf(1.0 / q_exp)
    };
    let transport_dual = sum_q(|l| l.0);
    let anti_total = sum_q(|l| l.1);
    let dual_crosscheck = dual_exact.then(|| {
        let scale = transport_dual.max(anti_total);
        if scale > 0.0 {
            (transport_dual - anti_total).abs() / scale
        } else {
            0.0
        }
    });

    Ok(PoincareReport {
        q: q_exp,
        mean,
        lhs,
        gradient_norm,
        transport_dual,
        dual_crosscheck,
        dual_exact,
        source_norm,
        constant: ratio(lhs, transport_dual + gradient_norm),
        gradient_constant: ratio(lhs, gradient_norm),
        solution_constant: source_norm.and_then(|sn| ratio(lhs, gradient_norm + sn)),
    })
}
