//! Coefficients, initial data and the problem description for the `d = 1`
//! solver.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::sampling::stream_rng;

/// A function of `(t, x, v)`.
pub type ScalarFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Piecewise-constant or explicit scalar coefficient on `(t, x, v)`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Constant {
        value: f64,
    },
    /// `low` and `high` alternating on blocks of size `block = [bt, bx, bv]`.
    Checkerboard {
        low: f64,
        high: f64,
        block: [f64; 3],
    },
    /// Independent uniform values in `[low, high]` on each block.
    RandomBlocks {
        low: f64,
        high: f64,
        block: [f64; 3],
        seed: u64,
    },
    #[serde(skip)]
    Function(ScalarFn),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant { value } => write!(f, "Constant({value})"),
            Coefficient::Checkerboard { low, high, block } => {
                write!(f, "Checkerboard({low}, {high}, {block:?})")
            }
            Coefficient::RandomBlocks { low, high, block, seed } => {
                write!(f, "RandomBlocks({low}, {high}, {block:?}, seed {seed})")
            }
            Coefficient::Function(_) => write!(f, "Function"),
        }
    }
}

fn block_index(c: f64, size: f64) -> i64 {
    (c / size).floor() as i64
}

impl Coefficient {
    pub fn constant(value: f64) -> Self {
        Coefficient::Constant { value }
    }

    pub fn function<F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Constant { value } if *value == 0.0)
    }

    pub fn eval(&self, t: f64, x: f64, v: f64) -> f64 {
        match self {
            Coefficient::Constant { value } => *value,
            Coefficient::Checkerboard { low, high, block } => {
                let k = block_index(t, block[0]) + block_index(x, block[1]) + block_index(v, block[2]);
                if k.rem_euclid(2) == 0 {
                    *low
                } else {
                    *high
                }
            }
            Coefficient::RandomBlocks { low, high, block, seed } => {
                let (a, b, c) = (
                    block_index(t, block[0]),
                    block_index(x, block[1]),
                    block_index(v, block[2]),
                );
                // Block coordinates hashed into a stream id.
                let key = (a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (b as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
                    ^ (c as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
                low + (high - low) * stream_rng(*seed, key).gen::<f64>()
            }
            Coefficient::Function(f) => f(t, x, v),
        }
    }

    /// `c · self(r² t, r³ x, r v)` as an explicit function.
    pub fn rescaled(&self, r: f64, factor: f64) -> Coefficient {
        let inner = self.clone();
        Coefficient::function(move |t, x, v| factor * inner.eval(r * r * t, r.powi(3) * x, r * v))
    }
}

/// Diffusion `A`, drift `B`, source `S` and the ellipticity bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientField {
    pub a: Coefficient,
    pub b: Coefficient,
    pub s: Coefficient,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
}

impl CoefficientField {
    /// `A = a`, `B = 0`, `S = 0` with `λ = Λ = a`.
    pub fn pure_diffusion(a: f64) -> Self {
        CoefficientField {
            a: Coefficient::constant(a),
            b: Coefficient::constant(0.0),
            s: Coefficient::constant(0.0),
            lambda: a,
            big_lambda: a,
        }
    }

    /// Coefficients of `f(r²t + t0, r³x + x0 + r² t v0, r v + v0)` when the
    /// centre is the origin: `(A(scaled), r B(scaled), r² S(scaled))`.
    pub fn rescaled(&self, r: f64) -> CoefficientField {
        CoefficientField {
            a: self.a.rescaled(r, 1.0),
            b: self.b.rescaled(r, r),
            s: self.s.rescaled(r, r * r),
            lambda: self.lambda,
            big_lambda: self.big_lambda,
        }
    }

    pub fn check_bounds(&self, t: f64, x: f64, v: f64) -> Result<()> {
        let a = self.a.eval(t, x, v);
        let b = self.b.eval(t, x, v);
        let tol = 1e-12 * self.big_lambda;
        if !(a >= self.lambda - tol && a <= self.big_lambda + tol) {
            return Err(KgError::Configuration(format!(
                "A = {a} at ({t}, {x}, {v}) outside [{}, {}]",
                self.lambda, self.big_lambda
            )));
        }
        if !(b.abs() <= self.big_lambda + tol) {
            return Err(KgError::Configuration(format!(
                "|B| = {} at ({t}, {x}, {v}) exceeds {}",
                b.abs(),
                self.big_lambda
            )));
        }
        Ok(())
    }
}

/// Initial datum at `t = T0`.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDatum {
    Constant {
        value: f64,
    },
    /// Unit-mass Gaussian with independent `x` and `v` variances.
    Gaussian {
        x0: f64,
        v0: f64,
        var_x: f64,
        var_v: f64,
    },
    /// `amplitude · cos²` bump supported in `|x - x0| < wx`, `|v - v0| < wv`.
    Bump {
        amplitude: f64,
        x0: f64,
        v0: f64,
        wx: f64,
        wv: f64,
    },
    #[serde(skip)]
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for InitialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDatum::Constant { value } => write!(f, "Constant({value})"),
            InitialDatum::Gaussian { x0, v0, var_x, var_v } => {
                write!(f, "Gaussian({x0}, {v0}, {var_x}, {var_v})")
            }
            InitialDatum::Bump { amplitude, x0, v0, wx, wv } => {
                write!(f, "Bump({amplitude}, {x0}, {v0}, {wx}, {wv})")
            }
            InitialDatum::Function(_) => write!(f, "Function"),
        }
    }
}

impl InitialDatum {
    pub fn function<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        InitialDatum::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64, v: f64) -> f64 {
        match self {
            InitialDatum::Constant { value } => *value,
            InitialDatum::Gaussian { x0, v0, var_x, var_v } => {
                let e = -(x - x0).powi(2) / (2.0 * var_x) - (v - v0).powi(2) / (2.0 * var_v);
                e.exp() / (2.0 * std::f64::consts::PI * (var_x * var_v).sqrt())
            }
            InitialDatum::Bump { amplitude, x0, v0, wx, wv } => {
                let sx = (x - x0) / wx;
                let sv = (v - v0) / wv;
                if sx.abs() >= 1.0 || sv.abs() >= 1.0 {
                    0.0
                } else {
                    let c = |s: f64| (0.5 * std::f64::consts::PI * s).cos().powi(2);
                    amplitude * c(sx) * c(sv)
                }
            }
            InitialDatum::Function(f) => f(x, v),
        }
    }

    /// `self(r³ x, r v)`.
    pub fn rescaled(&self, r: f64) -> InitialDatum {
        let inner = self.clone();
        InitialDatum::function(move |x, v| inner.eval(r.powi(3) * x, r * v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VBoundary {
    /// `f = 0` at `v = ±V`.
    Dirichlet,
    /// Zero diffusive flux at `v = ±V`.
    Neumann,
}

/// Spatial reconstruction for the `v ∂_x` step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportScheme {
    /// First-order donor cell.
    Upwind,
    /// Second-order flux-limited (van Leer) upwind; TVD under the CFL bound.
    Limited,
}

/// `(∂_t + v ∂_x) f = ∂_v(A ∂_v f) + B ∂_v f + S` on
/// `[T0, 0] × [-X, X] × [-V, V]`, periodic in `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverProblem {
    pub t0: f64,
    pub x_half: f64,
    pub v_half: f64,
    pub n_t: usize,
    pub n_x: usize,
    pub n_v: usize,
    pub boundary_v: VBoundary,
    pub scheme: TransportScheme,
    /// Substeps per time cell; chosen from the CFL bound when absent.
    #[serde(default)]
    pub substeps: Option<usize>,
    pub initial: InitialDatum,
    pub coefficients: CoefficientField,
}

impl SolverProblem {
    pub fn dt(&self) -> f64 {
        -self.t0 / self.n_t as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_half / self.n_x as f64
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_half / self.n_v as f64
    }

    pub fn x_center(&self, i: usize) -> f64 {
        -self.x_half + (i as f64 + 0.5) * self.dx()
    }

    pub fn v_center(&self, j: usize) -> f64 {
        -self.v_half + (j as f64 + 0.5) * self.dv()
    }

    /// Largest `|v|` at a cell centre, the transport speed bound.
    pub fn max_speed(&self) -> f64 {
        self.v_center(self.n_v - 1).abs()
    }

    /// Substeps per time cell so that `dt_sub · max|v| <= 0.9 dx`.
    pub fn auto_substeps(&self) -> usize {
        let courant = self.dt() * self.max_speed() / self.dx();
        ((courant / 0.9).ceil() as usize).max(1)
    }

    pub fn substeps(&self) -> usize {
        self.substeps.unwrap_or_else(|| self.auto_substeps())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 < 0.0) || !(self.x_half > 0.0) || !(self.v_half > 0.0) {
            return Err(KgError::Configuration(
                "need T0 < 0 and positive half-widths".into(),
            ));
        }
        if self.n_t == 0 || self.n_x < 4 || self.n_v < 3 {
            return Err(KgError::Configuration(format!(
                "grid {}x{}x{} too small",
                self.n_t, self.n_x, self.n_v
            )));
        }
        let c = &self.coefficients;
        if !(c.lambda > 0.0 && c.lambda <= c.big_lambda) {
            return Err(KgError::Configuration(format!(
                "need 0 < lambda <= Lambda, got {} and {}",
                c.lambda, c.big_lambda
            )));
        }
        let m = self.substeps();
        if m == 0 {
            return Err(KgError::Configuration("substeps must be positive".into()));
        }
        let courant = self.dt() / m as f64 * self.max_speed() / self.dx();
        if courant > 1.0 {
            return Err(KgError::Configuration(format!(
                "CFL violated: max|v| dt / dx = {courant:.3} > 1"
            )));
        }
        Ok(())
    }

    /// The problem satisfied by `f(r² t, r³ x, r v)`, on the same number of
    /// cells.
    pub fn rescaled(&self, r: f64) -> SolverProblem {
        SolverProblem {
            t0: self.t0 / (r * r),
            x_half: self.x_half / r.powi(3),
            v_half: self.v_half / r,
            initial: self.initial.rescaled(r),
            coefficients: self.coefficients.rescaled(r),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkerboard_alternates() {
        let c = Coefficient::Checkerboard { low: 1.0, high: 2.0, block: [1.0, 1.0, 1.0] };
        assert_eq!(c.eval(0.5, 0.5, 0.5), 1.0);
        assert_eq!(c.eval(-0.5, 0.5, 0.5), 2.0);
        assert_eq!(c.eval(-0.5, -0.5, 0.5), 1.0);
    }

    #[test]
    fn random_blocks_constant_on_blocks_and_bounded() {
        let c = Coefficient::RandomBlocks { low: 1.0, high: 2.0, block: [0.5, 0.5, 0.5], seed: 3 };
        assert_eq!(c.eval(0.1, 0.1, 0.1), c.eval(0.4, 0.2, 0.3));
        for k in 0..200 {
            let s = k as f64 * 0.137 - 10.0;
            let a = c.eval(s, -s, 0.5 * s);
            assert!((1.0..=2.0).contains(&a));
        }
    }

    #[test]
    fn cfl_violation_is_configuration_error() {
        let p = SolverProblem {
            t0: -1.0,
            x_half: 1.0,
            v_half: 4.0,
            n_t: 4,
            n_x: 32,
            n_v: 16,
            boundary_v: VBoundary::Neumann,
            scheme: TransportScheme::Upwind,
            substeps: Some(1),
            initial: InitialDatum::Constant { value: 1.0 },
            coefficients: CoefficientField::pure_diffusion(1.0),
        };
        assert!(matches!(p.validate(), Err(KgError::Configuration(_))));
        let auto = SolverProblem { substeps: None, ..p };
        assert!(auto.validate().is_ok());
    }

    #[test]
    fn gaussian_has_unit_peak_normalisation() {
        let g = InitialDatum::Gaussian { x0: 0.0, v0: 0.0, var_x: 1.0, var_v: 1.0 };
        assert!((g.eval(0.0, 0.0) - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    }
}
