//! Empirical constants of the energy estimate and of the gain-of-integrability
//! statements, evaluated by cylinder quadrature on solver output.

use serde::{Deserialize, Serialize};

use super::gradient::velocity_gradient_norm;
use crate::error::{KgError, Result};
use crate::field::{average, lp_norm, GridField};
use crate::geometry::{Cylinder, Point};

/// `∫_{Q_r}|∇_v f|² / (∫_{Q_R} f² + ∫_{Q_R} S²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRatio {
    pub gradient_energy: f64,
    pub solution_energy: f64,
    pub source_energy: f64,
    pub ratio: f64,
}

fn squared_integral(f: &GridField, q: &Cylinder) -> Result<f64> {
    Ok(lp_norm(f, 2.0, q)?.powi(2))
}

pub fn energy_ratio(f: &GridField, s: &GridField, r: f64, big_r: f64, z0: &Point) -> Result<EnergyRatio> {
    if !(r > 0.0 && r < big_r) {
        return Err(KgError::Domain(format!("need 0 < r < R, got {r}, {big_r}")));
    }
    let small = Cylinder::new(z0.clone(), r)?;
    let big = Cylinder::new(z0.clone(), big_r)?;
    let grad = velocity_gradient_norm(f);
    let gradient_energy = squared_integral(&grad, &small)?;
    let solution_energy = squared_integral(f, &big)?;
    let source_energy = squared_integral(s, &big)?;
    let denom = solution_energy + source_energy;
    if !(denom > 0.0) {
        return Err(KgError::Degenerate(
            "f and S vanish on the outer cylinder".into(),
        ));
    }
    Ok(EnergyRatio {
        gradient_energy,
        solution_energy,
        source_energy,
        ratio: gradient_energy / denom,
    })
}

/// One ratio, `None` when numerator and denominator both vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub exponent: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub value: Option<f64>,
}

impl Ratio {
    fn new(exponent: f64, numerator: f64, denominator: f64) -> Ratio {
        let value = if denominator > 0.0 {
            Some(numerator / denominator)
        } else if numerator == 0.0 {
            None
        } else {
            Some(f64::INFINITY)
        };
        Ratio { exponent, numerator, denominator, value }
    }

    pub fn is_finite(&self) -> bool {
        self.value.map_or(false, f64::is_finite)
    }
}

/// The three gain-of-integrability ratios at one cylinder pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRatios {
    /// `‖∇_v f‖_{L^{2+ε}(Q_R)} / (‖∇_v f‖_{L²(Q_{γR})} + ‖S‖_{L^{2+ε}(Q_{γR})})`
    pub gradient: Ratio,
    /// `‖f‖²_{L^p(Q_R)} / (‖f‖²_{L²(Q_{γR})} + ‖S‖²_{L²(Q_{γR})})`, `p = 2 + 1/d`
    pub solution: Ratio,
    /// `‖f - ⟨⟨f⟩⟩‖_{L^p(Q_ρ)} / (‖∇_v f‖_{L²(Q_{2ρ})} + ‖S‖_{L²(Q_{2ρ})})`,
    /// `ρ = γR/2`, `p = 6(2d+1)/(6d+1)`
    pub mean_free: Ratio,
}

/// `2 + 1/d`
pub fn solution_gain_exponent(d: usize) -> f64 {
    2.0 + 1.0 / d as f64
}

/// `6(2d+1)/(6d+1)`
pub fn mean_free_gain_exponent(d: usize) -> f64 {
    6.0 * (2 * d + 1) as f64 / (6 * d + 1) as f64
}

pub fn gain_ratios(f: &GridField, s: &GridField, z: &Point, big_r: f64, gamma: f64, eps: f64) -> Result<GainRatios> {
    if !(eps > 0.0) || !(gamma > 1.0) || !(big_r > 0.0) {
        return Err(KgError::Domain(format!(
            "need eps > 0, gamma > 1, R > 0, got {eps}, {gamma}, {big_r}"
        )));
    }
    let d = f.dim();
    let inner = Cylinder::new(z.clone(), big_r)?;
    let outer = Cylinder::new(z.clone(), gamma * big_r)?;
    for q in [&inner, &outer] {
        if !f.contains_cylinder(q) {
            return Err(KgError::Domain(format!("cylinder {q:?} outside the solver grid")));
        }
    }
    let grad = velocity_gradient_norm(f);
    let pe = 2.0 + eps;
    let gradient = Ratio::new(
        pe,
        lp_norm(&grad, pe, &inner)?,
        lp_norm(&grad, 2.0, &outer)? + lp_norm(s, pe, &outer)?,
    );

    let ps = solution_gain_exponent(d);
    let solution = Ratio::new(
        ps,
        lp_norm(f, ps, &inner)?.powi(2),
        lp_norm(f, 2.0, &outer)?.powi(2) + lp_norm(s, 2.0, &outer)?.powi(2),
    );

    let pm = mean_free_gain_exponent(d);
    let rho = Cylinder::new(z.clone(), 0.5 * gamma * big_r)?;
    let mean = average(f, &rho)?;
    let centred = f.map(|v| v - mean);
    let mean_free = Ratio::new(
        pm,
        lp_norm(&centred, pm, &rho)?,
        lp_norm(&grad, 2.0, &outer)? + lp_norm(s, 2.0, &outer)?,
    );
    Ok(GainRatios { gradient, solution, mean_free })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid<F: Fn(&Point) -> f64 + Sync>(f: F) -> GridField {
        let q = Cylinder::centered(1, 1.5).unwrap();
        GridField::around_cylinder(&q, 25, f).unwrap()
    }

    #[test]
    fn exponents() {
        assert_eq!(solution_gain_exponent(1), 3.0);
        assert!((mean_free_gain_exponent(1) - 18.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_is_degenerate() {
        let z = grid(|_| 0.0);
        let err = energy_ratio(&z, &z, 0.5, 1.0, &Point::origin(1));
        assert!(matches!(err, Err(KgError::Degenerate(_))));
    }

    #[test]
    fn energy_ratio_is_homogeneous() {
        let f = grid(|p| (p.v[0] * 2.0).sin() + p.x[0]);
        let zero = grid(|_| 0.0);
        let a = energy_ratio(&f, &zero, 0.5, 1.0, &Point::origin(1)).unwrap();
        let b = energy_ratio(&f.map(|v| 2.0 * v), &zero, 0.5, 1.0, &Point::origin(1)).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio, "{a:?} {b:?}");
    }

    #[test]
    fn constant_solution_gradient_ratios_degenerate() {
        let f = grid(|_| 3.0);
        let zero = grid(|_| 0.0);
        let g = gain_ratios(&f, &zero, &Point::origin(1), 1.0, 1.25, 0.01).unwrap();
        assert!(g.gradient.value.is_none());
        assert!(g.mean_free.value.is_none());
        assert!(g.solution.is_finite());
    }
}
