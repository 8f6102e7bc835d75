//! The rough-coefficient ensemble used by the empirical checks.
//!
//! Every member lives on `[-1.75, 0] × [-2.25, 2.25] × [-1.75, 1.75]`, which
//! contains `Q_{γR}(0)` for `γ = 1.25`, `R = 1`. Even members use a
//! checkerboard diffusion, odd members independent random blocks; all have a
//! small random drift, a random block source and a bump initial datum.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::problem::{Coefficient, CoefficientField, InitialDatum, SolverProblem, TransportScheme, VBoundary};
use super::solver::{solve, Solution};
use crate::error::{KgError, Result};
use crate::field::GridField;
use crate::sampling::stream_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleSpec {
    pub size: usize,
    pub seed: u64,
    /// Cells per axis.
    pub n: usize,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub t0: f64,
    pub x_half: f64,
    pub v_half: f64,
    /// Largest `|B|`.
    pub drift: f64,
    /// Largest `|S|`.
    pub source: f64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            size: 50,
            seed: 20240611,
            n: 64,
            lambda: 1.0,
            big_lambda: 2.0,
            t0: -1.75,
            x_half: 2.25,
            v_half: 1.75,
            drift: 0.25,
            source: 0.5,
        }
    }
}

/// A solved member with its source sampled on the solution grid.
#[derive(Debug, Clone)]
pub struct Member {
    pub index: usize,
    pub problem: SolverProblem,
    pub solution: Solution,
    pub source: GridField,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.n < 8 {
            return Err(KgError::Configuration("ensemble needs members and >= 8 cells per axis".into()));
        }
        if !(self.lambda > 0.0 && self.big_lambda >= self.lambda) {
            return Err(KgError::Configuration("need 0 < lambda <= Lambda".into()));
        }
        if !(self.drift >= 0.0 && self.drift <= self.big_lambda && self.source >= 0.0) {
            return Err(KgError::Configuration("drift must lie in [0, Lambda], source >= 0".into()));
        }
        if !(self.t0 < 0.0 && self.x_half > 0.0 && self.v_half > 0.0) {
            return Err(KgError::Configuration("empty ensemble domain".into()));
        }
        Ok(())
    }

    /// Problem for member `index`, independent of the other members.
    pub fn problem(&self, index: usize) -> SolverProblem {
        let mut rng = stream_rng(self.seed, index as u64);
        let block = [
            rng.gen_range(0.15..0.45),
            rng.gen_range(0.2..0.6),
            rng.gen_range(0.15..0.45),
        ];
        let a = if index % 2 == 0 {
            Coefficient::Checkerboard { low: self.lambda, high: self.big_lambda, block }
        } else {
            Coefficient::RandomBlocks { low: self.lambda, high: self.big_lambda, block, seed: rng.gen() }
        };
        let b = Coefficient::RandomBlocks { low: -self.drift, high: self.drift, block, seed: rng.gen() };
        let s = Coefficient::RandomBlocks { low: -self.source, high: self.source, block, seed: rng.gen() };
        let initial = InitialDatum::Bump {
            amplitude: rng.gen_range(0.5..2.0),
            x0: rng.gen_range(-0.5..0.5),
            v0: rng.gen_range(-0.3..0.3),
            wx: rng.gen_range(1.0..2.0),
            wv: rng.gen_range(0.8..1.4),
        };
        SolverProblem {
            t0: self.t0,
            x_half: self.x_half,
            v_half: self.v_half,
            n_t: self.n,
            n_x: self.n,
            n_v: self.n,
            boundary_v: VBoundary::Neumann,
            scheme: TransportScheme::Limited,
            substeps: None,
            initial,
            coefficients: CoefficientField { a, b, s, lambda: self.lambda, big_lambda: self.big_lambda },
        }
    }

    pub fn member(&self, index: usize) -> Result<Member> {
        let problem = self.problem(index);
        let solution = solve(&problem)?;
        let source = source_field(&problem, &solution.field)?;
        Ok(Member { index, problem, solution, source })
    }

    /// Same member on `n` cells per axis.
    pub fn refined(&self, n: usize) -> EnsembleSpec {
        EnsembleSpec { n, ..self.clone() }
    }
}

/// `S` sampled at the cell centres of `layout`.
pub fn source_field(problem: &SolverProblem, layout: &GridField) -> Result<GridField> {
    let s = &problem.coefficients.s;
    let vals = (0..layout.len())
        .map(|i| {
            let p = layout.cell_center(i);
            s.eval(p.t, p.x[0], p.v[0])
        })
        .collect();
    layout.with_values(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_deterministic_and_valid() {
        let spec = EnsembleSpec { n: 16, ..Default::default() };
        spec.validate().unwrap();
        for k in 0..4 {
            let p = spec.problem(k);
            p.validate().unwrap();
            let q = spec.problem(k);
            assert_eq!(format!("{:?}", p.coefficients), format!("{:?}", q.coefficients));
        }
    }

    #[test]
    fn small_member_solves() {
        let spec = EnsembleSpec { n: 16, ..Default::default() };
        let m = spec.member(1).unwrap();
        assert!(m.solution.field.values().iter().all(|v| v.is_finite()));
        assert!(m.source.values().iter().all(|v| v.abs() <= spec.source));
    }
}
