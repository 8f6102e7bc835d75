//! Discrete right inverse of the `(t, x)` divergence with zero boundary
//! values.
//!
//! On a staggered (MAC) grid `h_t` lives on `t`-faces and `h_x` on `x`-faces;
//! faces on the rectangle's boundary are fixed to zero. Among all fields with
//! `D h = G` the solver returns the one of least discrete `H¹₀` norm,
//! `h = M⁻¹ Dᵀ λ` with `(D M⁻¹ Dᵀ) λ = G`, where `M` is the Dirichlet
//! Laplacian on each face grid. Both systems are solved by conjugate
//! gradients.

use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};

/// Cell-centred scalar data on an `n_t × n_x` rectangle, `t` slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectGrid {
    pub n_t: usize,
    pub n_x: usize,
    pub ht: f64,
    pub hx: f64,
}

impl RectGrid {
    pub fn new(n_t: usize, n_x: usize, lt: f64, lx: f64) -> Result<Self> {
        if n_t < 2 || n_x < 2 || !(lt > 0.0) || !(lx > 0.0) {
            return Err(KgError::Configuration("rectangle grid needs >= 2 cells per axis".into()));
        }
        Ok(RectGrid { n_t, n_x, ht: lt / n_t as f64, hx: lx / n_x as f64 })
    }

    pub fn cells(&self) -> usize {
        self.n_t * self.n_x
    }

    pub fn cell_area(&self) -> f64 {
        self.ht * self.hx
    }

    /// Cell centre in `[0, lt] × [0, lx]`.
    pub fn center(&self, c: usize) -> (f64, f64) {
        let (i, j) = (c / self.n_x, c % self.n_x);
        ((i as f64 + 0.5) * self.ht, (j as f64 + 0.5) * self.hx)
    }

    fn nt_faces(&self) -> usize {
        (self.n_t - 1) * self.n_x
    }

    fn nx_faces(&self) -> usize {
        self.n_t * (self.n_x - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogovskiiSolution {
    pub grid: RectGrid,
    /// `(n_t + 1) × n_x` values on `t`-faces, boundary rows zero.
    pub h_t: Vec<f64>,
    /// `n_t × (n_x + 1)` values on `x`-faces, boundary columns zero.
    pub h_x: Vec<f64>,
    /// `‖D h - G‖₂ / ‖G‖₂`
    pub residual: f64,
    /// Discrete `H¹₀` seminorm of `h`.
    pub h1_norm: f64,
    /// `‖G‖_{L²}`
    pub g_norm: f64,
    /// `h1_norm / g_norm`
    pub stability: f64,
    /// `‖∇h‖_{L^p} / ‖G‖_{L^p}` at the requested exponent.
    pub stability_p: f64,
    pub iterations: usize,
}

impl BogovskiiSolution {
    /// Largest magnitude over the boundary faces.
    pub fn boundary_max(&self) -> f64 {
        let (n_t, n_x) = (self.grid.n_t, self.grid.n_x);
        let mut m: f64 = 0.0;
        for j in 0..n_x {
            m = m.max(self.h_t[j].abs()).max(self.h_t[n_t * n_x + j].abs());
        }
        for i in 0..n_t {
            m = m.max(self.h_x[i * (n_x + 1)].abs()).max(self.h_x[i * (n_x + 1) + n_x].abs());
        }
        m
    }
}

/// `G - mean(G)`.
pub fn demean(g: &[f64]) -> Vec<f64> {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter().map(|v| v - mean).collect()
}

/// Face unknowns: interior `t`-faces first, then interior `x`-faces.
struct Ops<'a> {
    g: &'a RectGrid,
}

impl Ops<'_> {
    fn unknowns(&self) -> usize {
        self.g.nt_faces() + self.g.nx_faces()
    }

    /// `D h`
    fn div(&self, h: &[f64], out: &mut [f64]) {
        let (n_t, n_x, ht, hx) = (self.g.n_t, self.g.n_x, self.g.ht, self.g.hx);
        let off = self.g.nt_faces();
        let ft = |i: usize, j: usize| if i == 0 || i == n_t { 0.0 } else { h[(i - 1) * n_x + j] };
        let fx = |i: usize, j: usize| if j == 0 || j == n_x { 0.0 } else { h[off + i * (n_x - 1) + j - 1] };
        for i in 0..n_t {
            for j in 0..n_x {
                out[i * n_x + j] = (ft(i + 1, j) - ft(i, j)) / ht + (fx(i, j + 1) - fx(i, j)) / hx;
            }
        }
    }

    /// `Dᵀ λ`
    fn div_t(&self, lam: &[f64], out: &mut [f64]) {
        let (n_t, n_x, ht, hx) = (self.g.n_t, self.g.n_x, self.g.ht, self.g.hx);
        let off = self.g.nt_faces();
        for i in 1..n_t {
            for j in 0..n_x {
                out[(i - 1) * n_x + j] = (lam[(i - 1) * n_x + j] - lam[i * n_x + j]) / ht;
            }
        }
        for i in 0..n_t {
            for j in 1..n_x {
                out[off + i * (n_x - 1) + j - 1] = (lam[i * n_x + j - 1] - lam[i * n_x + j]) / hx;
            }
        }
    }

    /// Dirichlet Laplacian `M` on each face grid.
    fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let (ht, hx) = (self.g.ht, self.g.hx);
        let off = self.g.nt_faces();
        let block = |rows: usize, cols: usize, u: &[f64], out: &mut [f64]| {
            let at = |a: isize, b: isize| {
                if a < 0 || b < 0 || a as usize >= rows || b as usize >= cols {
                    0.0
                } else {
                    u[a as usize * cols + b as usize]
                }
            };
            for a in 0..rows {
                for b in 0..cols {
                    let (ai, bi) = (a as isize, b as isize);
                    let c = u[a * cols + b];
                    out[a * cols + b] = (2.0 * c - at(ai - 1, bi) - at(ai + 1, bi)) / (ht * ht)
                        + (2.0 * c - at(ai, bi - 1) - at(ai, bi + 1)) / (hx * hx);
                }
            }
        };
        block(self.g.n_t - 1, self.g.n_x, &u[..off], &mut out[..off]);
        block(self.g.n_t, self.g.n_x - 1, &u[off..], &mut out[off..]);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn project_mean_zero(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

/// Conjugate gradients for an SPD operator (on the mean-zero subspace when
/// `mean_zero`). Returns the iteration count.
fn cg<A: FnMut(&[f64], &mut [f64])>(
    mut apply: A,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
    mean_zero: bool,
) -> Result<usize> {
    let n = b.len();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if mean_zero {
        project_mean_zero(&mut r);
    }
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            return Ok(it);
        }
        apply(&p, &mut ap);
        if mean_zero {
            project_mean_zero(&mut ap);
        }
        let alpha = rr / dot(&p, &ap);
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    if rr.sqrt() <= rel_tol * bnorm {
        return Ok(max_iter);
    }
    Err(KgError::NotConverged(format!(
        "CG residual {:.3e} after {max_iter} iterations",
        rr.sqrt() / bnorm
    )))
}

/// Least-`H¹₀` solution of `div h = G`; `p_exp` selects the exponent of the
/// reported `L^p` stability ratio.
pub fn bogovskii_solve(grid: &RectGrid, g: &[f64], p_exp: f64) -> Result<BogovskiiSolution> {
    if g.len() != grid.cells() {
        return Err(KgError::Domain(format!("G has {} values, grid has {}", g.len(), grid.cells())));
    }
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    if mean.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(KgError::Precondition(format!("G has non-zero mean {mean:e}")));
    }
    if !(p_exp >= 1.0) {
        return Err(KgError::Domain(format!("need p >= 1, got {p_exp}")));
    }
    let ops = Ops { g: grid };
    let nu = ops.unknowns();
    let nc = grid.cells();
    let inner_budget = 20 * nu;
    let solve_m = |rhs: &[f64], out: &mut [f64]| -> Result<()> {
        out.iter_mut().for_each(|v| *v = 0.0);
        cg(|u, o| ops.laplacian(u, o), rhs, out, 1e-14, inner_budget, false)?;
        Ok(())
    };
    let mut lam = vec![0.0; nc];
    let mut inner_err = None;
    let mut tmp_f = vec![0.0; nu];
    let mut tmp_y = vec![0.0; nu];
    let iterations = cg(
        |l, out| {
            ops.div_t(l, &mut tmp_f);
            if let Err(e) = solve_m(&tmp_f, &mut tmp_y) {
                inner_err.get_or_insert(e);
            }
            ops.div(&tmp_y, out);
        },
        g,
        &mut lam,
        1e-12,
        10 * nc,
        true,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    let mut h = vec![0.0; nu];
    ops.div_t(&lam, &mut tmp_f);
    solve_m(&tmp_f, &mut h)?;

    let mut dh = vec![0.0; nc];
    ops.div(&h, &mut dh);
    let gl2 = dot(g, g).sqrt();
    let res = dh.iter().zip(g).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let mut mh = vec![0.0; nu];
    ops.laplacian(&h, &mut mh);
    let area = grid.cell_area();
    let h1 = (dot(&h, &mh) * area).sqrt();
    let g_norm = gl2 * area.sqrt();

    // Assemble with boundary faces.
    let (n_t, n_x) = (grid.n_t, grid.n_x);
    let off = grid.nt_faces();
    let mut h_t = vec![0.0; (n_t + 1) * n_x];
    h_t[n_x..n_t * n_x].copy_from_slice(&h[..off]);
    let mut h_x = vec![0.0; n_t * (n_x + 1)];
    for i in 0..n_t {
        for j in 1..n_x {
            h_x[i * (n_x + 1) + j] = h[off + i * (n_x - 1) + j - 1];
        }
    }
    let grad_p = gradient_lp(grid, &h_t, &h_x, p_exp);
    let g_p = (g.iter().map(|v| v.abs().powf(p_exp)).sum::<f64>() * area).powf(1.0 / p_exp);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(BogovskiiSolution {
        grid: grid.clone(),
        h_t,
        h_x,
        residual: ratio(res, gl2),
        h1_norm: h1,
        g_norm,
        stability: ratio(h1, g_norm),
        stability_p: ratio(grad_p, g_p),
        iterations,
    })
}

/// `‖∇h‖_{L^p}` from forward differences of both face fields.
fn gradient_lp(grid: &RectGrid, h_t: &[f64], h_x: &[f64], p: f64) -> f64 {
    let (n_t, n_x, ht, hx) = (grid.n_t, grid.n_x, grid.ht, grid.hx);
    let mut acc = 0.0;
    for i in 0..=n_t {
        for j in 0..n_x {
            let c = h_t[i * n_x + j];
            if i < n_t {
                acc += ((h_t[(i + 1) * n_x + j] - c) / ht).abs().powf(p);
            }
            let right = if j + 1 < n_x { h_t[i * n_x + j + 1] } else { 0.0 };
            acc += ((right - c) / hx).abs().powf(p);
        }
    }
    for i in 0..n_t {
        for j in 0..=n_x {
            let c = h_x[i * (n_x + 1) + j];
            if j < n_x {
                acc += ((h_x[i * (n_x + 1) + j + 1] - c) / hx).abs().powf(p);
            }
            let up = if i + 1 < n_t { h_x[(i + 1) * (n_x + 1) + j] } else { 0.0 };
            acc += ((up - c) / ht).abs().powf(p);
        }
    }
    (acc * grid.cell_area()).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_source_gives_zero_field() {
        let grid = RectGrid::new(8, 8, 1.0, 1.0).unwrap();
        let sol = bogovskii_solve(&grid, &vec![0.0; 64], 2.0).unwrap();
        assert!(sol.h_t.iter().chain(&sol.h_x).all(|&v| v == 0.0));
    }

    #[test]
    fn sine_source_residual_and_boundary() {
        let grid = RectGrid::new(24, 24, 1.0, 1.0).unwrap();
        let g: Vec<f64> = (0..grid.cells())
            .map(|c| {
                let (t, x) = grid.center(c);
                (2.0 * PI * t).sin() * (2.0 * PI * x).sin()
            })
            .collect();
        let g = demean(&g);
        let sol = bogovskii_solve(&grid, &g, 2.0).unwrap();
        assert!(sol.residual <= 1e-8, "residual {}", sol.residual);
        assert_eq!(sol.boundary_max(), 0.0);
        assert!(sol.stability.is_finite() && sol.stability > 0.0);
    }

    #[test]
    fn non_mean_zero_rejected() {
        let grid = RectGrid::new(4, 4, 1.0, 1.0).unwrap();
        assert!(matches!(
            bogovskii_solve(&grid, &vec![1.0; 16], 2.0),
            Err(KgError::Precondition(_))
        ));
    }

    #[test]
    fn adjoint_identity() {
        let grid = RectGrid::new(5, 7, 1.0, 2.0).unwrap();
        let ops = Ops { g: &grid };
        let h: Vec<f64> = (0..ops.unknowns()).map(|k| (k as f64 * 0.37).sin()).collect();
        let l: Vec<f64> = (0..grid.cells()).map(|k| (k as f64 * 0.71).cos()).collect();
        let mut dh = vec![0.0; grid.cells()];
        let mut dtl = vec![0.0; ops.unknowns()];
        ops.div(&h, &mut dh);
        ops.div_t(&l, &mut dtl);
        assert!((dot(&dh, &l) - dot(&h, &dtl)).abs() < 1e-10);
    }
}
