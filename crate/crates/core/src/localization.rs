//! The cut-off `ζ` and the localised fields `𝐠`, `𝐡`.
//!
//! `ζ(t,x,v) = ½ min((γ-|v|)₊/5, ((γ²+t)₊/13)^{1/2}, ((γ³-|x|)₊/(25γ))^{1/2})`
//! vanishes off `Q_γ` and is `1/2`-Lipschitz along kinetic cylinders. The
//! localised field `𝐠 = |Q_{ζ}|^{1/q} g / (C₀ ‖g‖_{L^q(Q_γ)})` has normalised
//! averages on every cylinder of radius comparable to `ζ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::field::{lp_norm, GridField};
use crate::geometry::{homogeneous_dimension, norm, unit_ball_volume, Cylinder, Point};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationContext {
    pub gamma: f64,
    pub d: usize,
    pub q: f64,
    /// `‖g‖_{L^q(Q_γ)}`
    pub gnorm: f64,
    /// `2^{(4d+2)/q}`
    pub c0: f64,
}

impl LocalizationContext {
    pub fn new(gamma: f64, d: usize, q: f64, gnorm: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(KgError::Domain(format!("need gamma > 1, got {gamma}")));
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(KgError::Domain(format!("need q > 1, got {q}")));
        }
        if d == 0 {
            return Err(KgError::Domain("dimension must be positive".into()));
        }
        if !(gnorm > 0.0) || !gnorm.is_finite() {
            return Err(KgError::Degenerate(format!(
                "normalising norm must be positive and finite, got {gnorm}"
            )));
        }
        Ok(LocalizationContext {
            gamma,
            d,
            q,
            gnorm,
            c0: 2f64.powf(homogeneous_dimension(d) as f64 / q),
        })
    }

    /// Context normalised by `g`'s own `L^q(Q_γ)` norm.
    pub fn for_field(g: &GridField, gamma: f64, q: f64) -> Result<Self> {
        let container = Cylinder::centered(g.dim(), gamma)?;
        let gnorm = lp_norm(g, q, &container)?;
        Self::new(gamma, g.dim(), q, gnorm)
    }

    pub fn container(&self) -> Cylinder {
        Cylinder::centered(self.d, self.gamma).expect("gamma > 1")
    }

    pub fn zeta(&self, z: &Point) -> f64 {
        zeta_gamma(self.gamma, z)
    }

    /// `|Q_{ζ(z)}|^{1/q} / (C₀ ‖g‖)`, the factor turning `g` into `𝐠`.
    pub fn weight(&self, z: &Point) -> f64 {
        let s = self.zeta(z);
        if s <= 0.0 {
            return 0.0;
        }
        let vol = s.powi(homogeneous_dimension(self.d)) * unit_ball_volume(self.d).powi(2);
        vol.powf(1.0 / self.q) / (self.c0 * self.gnorm)
    }
}

/// `ζ` for the container `Q_γ`.
pub fn zeta_gamma(gamma: f64, z: &Point) -> f64 {
    let v_term = (gamma - norm(&z.v)).max(0.0) / 5.0;
    let t_term = ((gamma * gamma + z.t).max(0.0) / 13.0).sqrt();
    let x_term = ((gamma.powi(3) - norm(&z.x)).max(0.0) / (25.0 * gamma)).sqrt();
    0.5 * v_term.min(t_term).min(x_term)
}

pub fn zeta(ctx: &LocalizationContext, z: &Point) -> f64 {
    ctx.zeta(z)
}

/// Lower bound of `ζ` on `Q_1`.
pub fn c_gamma(gamma: f64, d: usize) -> Result<f64> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(KgError::Domain(format!("need gamma > 1, got {gamma}")));
    }
    let _ = d;
    let t1 = (gamma - 1.0) / 5.0;
    let t2 = ((gamma * gamma - 1.0) / 13.0).sqrt();
    let t3 = ((gamma.powi(3) - 1.0) / (25.0 * gamma)).sqrt();
    Ok(0.5 * t1.min(t2).min(t3))
}

/// `𝐠` on the grid of `g`.
pub fn localize(ctx: &LocalizationContext, g: &GridField) -> Result<GridField> {
    if g.dim() != ctx.d {
        return Err(KgError::Domain(format!(
            "field dimension {} does not match context dimension {}",
            g.dim(),
            ctx.d
        )));
    }
    if g.values().iter().any(|&v| v < 0.0) {
        return Err(KgError::Domain("localisation needs a non-negative field".into()));
    }
    let values: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let w = ctx.weight(&g.cell_center(i));
            if w == 0.0 {
                0.0
            } else {
                w * g.values()[i]
            }
        })
        .collect();
    g.with_values(values)
}

/// `(𝐠, 𝐡)`, both normalised by `‖g‖_{L^q(Q_γ)}`.
pub fn localize_pair(
    g: &GridField,
    h: &GridField,
    gamma: f64,
    q: f64,
) -> Result<(GridField, GridField, LocalizationContext)> {
    let ctx = LocalizationContext::for_field(g, gamma, q)?;
    Ok((localize(&ctx, g)?, localize(&ctx, h)?, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta_at_origin_gamma_two() {
        assert_relative_eq!(zeta_gamma(2.0, &Point::origin(1)), 0.2, max_relative = 1e-15);
    }

    #[test]
    fn zeta_vanishes_on_velocity_boundary() {
        assert_eq!(zeta_gamma(2.0, &Point::new(-0.5, &[0.1], &[2.0])), 0.0);
        assert_eq!(zeta_gamma(2.0, &Point::new(-0.5, &[0.1], &[-3.0])), 0.0);
    }

    #[test]
    fn zeta_bounded_by_gamma_over_five() {
        for gamma in [1.1, 1.5, 2.0, 4.0] {
            for d in 1..=3 {
                let z = Point::origin(d);
                assert!(zeta_gamma(gamma, &z) <= gamma / 5.0 + 1e-15);
            }
        }
    }

    #[test]
    fn c_gamma_values() {
        assert_relative_eq!(c_gamma(2.0, 1).unwrap(), 0.1, max_relative = 1e-15);
        assert!(c_gamma(1.0 + 1e-12, 1).unwrap() < 1e-6);
        assert!(c_gamma(1.0, 1).is_err());
    }

    #[test]
    fn constant_field_localises_to_hand_value() {
        let q = Cylinder::centered(1, 2.0).unwrap();
        let g = GridField::around_cylinder(&q, 16, |_| 1.0).unwrap();
        let ctx = LocalizationContext::new(2.0, 1, 2.0, 16.0).unwrap();
        assert_relative_eq!(ctx.c0, 8.0, max_relative = 1e-14);
        assert_relative_eq!(ctx.weight(&Point::origin(1)), 1.25e-4, max_relative = 1e-12);
        let gb = localize(&ctx, &g).unwrap();
        assert!(gb.values().iter().all(|&v| v >= 0.0 && v <= 1.25e-4 * (1.0 + 1e-12)));
    }

    #[test]
    fn zero_norm_is_degenerate() {
        let q = Cylinder::centered(1, 2.0).unwrap();
        let g = GridField::around_cylinder(&q, 8, |_| 0.0).unwrap();
        assert!(matches!(
            LocalizationContext::for_field(&g, 2.0, 2.0),
            Err(KgError::Degenerate(_))
        ));
    }
}
