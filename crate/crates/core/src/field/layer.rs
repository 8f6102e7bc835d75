//! Superlevel sets and the layer-cake calculus.
//!
//! For a non-negative field `g` the level function is
//! `G(t) = ∫_{g > t} g`, and moments of `g` over superlevel sets are
//! Stieltjes integrals against it: `-∫_t^∞ s^{r-1} dG(s) = ∫_{g > t} g^r`.

use serde::{Deserialize, Serialize};

use super::GridField;
use crate::error::{KgError, Result};
use crate::geometry::Cylinder;

/// Level function sampled on an increasing grid of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFunction {
    pub levels: Vec<f64>,
    /// `∫_{g > t} g` at each level.
    pub values: Vec<f64>,
    /// `|{g > t}|` at each level.
    pub measures: Vec<f64>,
}

impl LevelFunction {
    /// Index of the first level `>= t`.
    pub fn level_index(&self, t: f64) -> Option<usize> {
        self.levels.iter().position(|&s| s >= t)
    }
}

/// `n` geometrically spaced levels from 1 to `max`.
pub fn geometric_levels(max: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two levels");
    let top = max.max(1.0);
    let ratio = top.ln() / (n - 1) as f64;
    let mut levels: Vec<f64> = (0..n).map(|k| (ratio * k as f64).exp()).collect();
    levels[n - 1] = top;
    levels
}

/// Level function of `f` over `domain` at the given levels.
pub fn layer_cake(f: &GridField, domain: &Cylinder, levels: &[f64]) -> Result<LevelFunction> {
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KgError::Domain("levels must be strictly increasing".into()));
    }
    if !f.contains_cylinder(domain) {
        return Err(KgError::Domain("layer-cake domain is not inside the grid".into()));
    }
    let mut vals = Vec::new();
    let data = f.values();
    f.for_each_cell_in(domain, |i| vals.push(data[i]));
    if vals.iter().any(|&v| v < 0.0) {
        return Err(KgError::Domain("layer-cake needs a non-negative field".into()));
    }
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite field values"));
    // Prefix sums over values sorted in decreasing order.
    let mut prefix = Vec::with_capacity(vals.len() + 1);
    prefix.push(0.0);
    for v in &vals {
        prefix.push(prefix.last().unwrap() + v);
    }
    let dv = f.cell_volume();
    let mut values = Vec::with_capacity(levels.len());
    let mut measures = Vec::with_capacity(levels.len());
    for &t in levels {
        // Number of cells with value > t.
        let k = vals.partition_point(|&v| v > t);
        values.push(prefix[k] * dv);
        measures.push(k as f64 * dv);
    }
    Ok(LevelFunction {
        levels: levels.to_vec(),
        values,
        measures,
    })
}

/// `-∫_t^∞ s^{r-1} dG(s)` by midpoint Riemann-Stieltjes sums over the level
/// grid, plus the tail `s_last^{r-1} G(s_last)` beyond the last level.
pub fn stieltjes_moment(l: &LevelFunction, r: f64, t: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(KgError::Domain(format!("moment order must be >= 1, got {r}")));
    }
    let Some(start) = l.level_index(t) else {
        return Ok(0.0);
    };
    let mut acc = 0.0;
    for k in start..l.levels.len() - 1 {
        let mid = 0.5 * (l.levels[k] + l.levels[k + 1]);
        acc -= mid.powf(r - 1.0) * (l.values[k + 1] - l.values[k]);
    }
    let last = l.levels.len() - 1;
    acc += l.levels[last].powf(r - 1.0) * l.values[last];
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point};
    use approx::assert_relative_eq;

    fn bump() -> (GridField, Cylinder) {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 48, |z| {
            3.0 * (-(z.t + 0.5).powi(2) * 4.0 - z.x[0] * z.x[0] * 2.0 - z.v[0] * z.v[0] * 3.0).exp()
        })
        .unwrap();
        (f, q)
    }

    #[test]
    fn indicator_level_function() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 20, |_| 2.5).unwrap();
        let l = layer_cake(&f, &q, &[1.0, 2.0, 2.5, 3.0]).unwrap();
        let mass = 2.5 * f.counted_volume(&q).unwrap();
        assert_relative_eq!(l.values[0], mass, max_relative = 1e-12);
        assert_relative_eq!(l.values[1], mass, max_relative = 1e-12);
        assert_eq!(l.values[2], 0.0);
        assert_eq!(l.values[3], 0.0);
    }

    #[test]
    fn level_function_is_non_increasing() {
        let (f, q) = bump();
        let l = layer_cake(&f, &q, &geometric_levels(f.max_value(), 64)).unwrap();
        assert!(l.values.windows(2).all(|w| w[1] <= w[0]));
        assert!(l.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn first_moment_telescopes() {
        let (f, q) = bump();
        let l = layer_cake(&f, &q, &geometric_levels(f.max_value(), 128)).unwrap();
        for k in [0, 10, 50] {
            let t = l.levels[k];
            assert_relative_eq!(stieltjes_moment(&l, 1.0, t).unwrap(), l.values[k], max_relative = 1e-12);
        }
    }

    #[test]
    fn empty_superlevel_set_has_zero_moment() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 8, |_| 1.5).unwrap();
        let l = layer_cake(&f, &q, &[1.0, 1.5, 2.0, 3.0]).unwrap();
        assert_eq!(stieltjes_moment(&l, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_negative_fields_and_bad_levels() {
        let q = Cylinder::new(Point::origin(1), 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 8, |z| z.v[0]).unwrap();
        assert!(layer_cake(&f, &q, &[1.0, 2.0]).is_err());
        let g = f.map(f64::abs);
        assert!(layer_cake(&g, &q, &[2.0, 1.0]).is_err());
    }
}
