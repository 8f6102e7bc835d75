//! Vitali selection over finite cylinder families, coverings of superlevel
//! sets, and a sampling check of Lebesgue differentiation.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::field::{mapped_average, GridField};
use crate::geometry::{
    compose, contained_in, contains_point, intersects, shift_scale_5q, Cylinder, Point,
};
use crate::localization::zeta_gamma;
use crate::sampling::{quasi_random_points, random_point, stream_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringResult {
    /// Indices into the input family, in selection order.
    pub selected: Vec<usize>,
    pub cylinders: Vec<Cylinder>,
    /// For each input cylinder, the position in `selected` whose 5Q contains it.
    pub assignment: Vec<usize>,
}

impl CoveringResult {
    pub fn dilated(&self) -> Result<Vec<Cylinder>> {
        self.cylinders.iter().map(shift_scale_5q).collect()
    }

    /// Copy with the `k`-th selected cylinder removed (for mutation tests).
    pub fn without(&self, k: usize) -> CoveringResult {
        let mut out = self.clone();
        out.selected.remove(k);
        out.cylinders.remove(k);
        out.assignment = self
            .assignment
            .iter()
            .map(|&a| if a > k { a - 1 } else { a.min(out.selected.len().saturating_sub(1)) })
            .collect();
        out
    }
}

/// Greedy selection by decreasing radius, ties broken by input index.
pub fn vitali_select(family: &[Cylinder]) -> Result<CoveringResult> {
    if let Some(q) = family.iter().find(|q| q.center.t > 0.0) {
        return Err(KgError::Domain(format!(
            "cylinder centre time {} is positive",
            q.center.t
        )));
    }
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by(|&i, &j| {
        family[j]
            .radius
            .partial_cmp(&family[i].radius)
            .expect("finite radii")
            .then(i.cmp(&j))
    });
    let mut selected: Vec<usize> = Vec::new();
    for &i in &order {
        if selected.iter().all(|&s| !intersects(&family[s], &family[i])) {
            selected.push(i);
        }
    }
    // Each input meets a selected cylinder chosen no later than itself, hence
    // of radius at least its own.
    let assignment = family
        .iter()
        .map(|q| {
            selected
                .iter()
                .position(|&s| intersects(&family[s], q))
                .expect("maximal selection meets every input")
        })
        .collect();
    Ok(CoveringResult {
        cylinders: selected.iter().map(|&s| family[s].clone()).collect(),
        selected,
        assignment,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub family_size: usize,
    pub selected: usize,
    pub samples: usize,
    /// Sampled points of the family outside every selected 5Q.
    pub escapes: usize,
    /// Intersecting pairs among the selected cylinders.
    pub overlaps: usize,
    /// Inputs not contained in their assigned 5Q by the exact test.
    pub assignment_failures: usize,
}

impl CoveringReport {
    pub fn pass(&self) -> bool {
        self.escapes == 0 && self.overlaps == 0 && self.assignment_failures == 0
    }
}

/// Samples `samples` quasi-random points from every input cylinder and counts
/// those escaping the union of selected 5Q cylinders.
pub fn verify_covering(
    family: &[Cylinder],
    result: &CoveringResult,
    samples: usize,
) -> Result<CoveringReport> {
    let dilated = result.dilated()?;
    let mut overlaps = 0;
    for i in 0..result.cylinders.len() {
        for j in i + 1..result.cylinders.len() {
            if intersects(&result.cylinders[i], &result.cylinders[j]) {
                overlaps += 1;
            }
        }
    }
    let assignment_failures = family
        .iter()
        .zip(&result.assignment)
        .filter(|(q, &a)| dilated.get(a).map_or(true, |big| !contained_in(q, big)))
        .count();
    let escapes = family
        .par_iter()
        .enumerate()
        .map(|(i, q)| {
            quasi_random_points(q, samples, 7919 * i as u64)
                .iter()
                .filter(|z| !dilated.iter().any(|big| contains_point(big, z)))
                .count()
        })
        .sum();
    Ok(CoveringReport {
        family_size: family.len(),
        selected: result.selected.len(),
        samples: samples * family.len(),
        escapes,
        overlaps,
        assignment_failures,
    })
}

/// `z ∘ (min(-t, r²/2), 0, 0)`, the centre whose `Q_r` contains `z` and whose
/// 5Q is again of this form.
pub fn shifted_center(z: &Point, r: f64) -> Point {
    let tau = (-z.t).min(0.5 * r * r);
    compose(z, &Point::time_shift(tau, z.dim()))
}

/// `Q_r(z_r)`.
pub fn shifted_cylinder(z: &Point, r: f64) -> Result<Cylinder> {
    Cylinder::new(shifted_center(z, r), r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperlevelOptions {
    /// Coarse radii scanned before bisection.
    pub scan_radii: usize,
    /// Relative bisection tolerance on the radius.
    pub rel_tol: f64,
    /// Quadrature nodes per axis for the mapped cylinder averages.
    pub nodes: usize,
    /// Smallest radius scanned, as a fraction of `ζ(z)`.
    pub min_fraction: f64,
}

impl Default for SuperlevelOptions {
    fn default() -> Self {
        SuperlevelOptions {
            scan_radii: 64,
            rel_tol: 1e-6,
            nodes: 24,
            min_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SuperlevelOutcome {
    Resolved {
        seed: Point,
        cylinder: Cylinder,
        /// `⨍_{Q_r̄(z_r̄)} 𝐠^q`
        mean: f64,
        /// `⨍_{5Q_r̄(z_r̄)} 𝐠^q`
        mean_5q: f64,
        /// `|mean - s^q| / s^q`
        residual: f64,
    },
    /// `𝐠(seed) <= s`.
    Skipped { seed: Point, value: f64 },
    /// No crossing of `s^q` in the scanned radii.
    Unresolved { seed: Point },
}

impl SuperlevelOutcome {
    pub fn is_resolved(&self) -> bool {
        matches!(self, SuperlevelOutcome::Resolved { .. })
    }
}

/// For each seed, the cylinder `Q_r̄(z_r̄)` with the largest `r̄ <= ζ(seed)`
/// at which `⨍_{Q_r̄(z_r̄)} 𝐠^q = s^q`.
pub fn superlevel_cover(
    gbold: &GridField,
    q: f64,
    gamma: f64,
    s: f64,
    seeds: &[Point],
    options: &SuperlevelOptions,
) -> Result<Vec<SuperlevelOutcome>> {
    if !(q > 1.0) || !(gamma > 1.0) || !(s > 1.0) {
        return Err(KgError::Domain(format!(
            "need q > 1, gamma > 1 and s > 1, got {q}, {gamma}, {s}"
        )));
    }
    let sq = s.powf(q);
    seeds
        .par_iter()
        .map(|z| {
            let value = gbold.interpolate(z);
            if !(value > s) {
                warn!("superlevel seed skipped: g({z:?}) = {value} <= {s}");
                return Ok(SuperlevelOutcome::Skipped { seed: z.clone(), value });
            }
            let top = zeta_gamma(gamma, z);
            let bottom = top * options.min_fraction;
            if !(top > 0.0) {
                return Ok(SuperlevelOutcome::Unresolved { seed: z.clone() });
            }
            let mean = |r: f64| -> Result<f64> {
                let cyl = shifted_cylinder(z, r)?;
                mapped_average(gbold, &cyl, options.nodes, |v| v.abs().powf(q))
            };
            let n = options.scan_radii.max(2);
            let radii: Vec<f64> = (0..n)
                .map(|k| bottom * (top / bottom).powf(k as f64 / (n - 1) as f64))
                .collect();
            let excess: Vec<f64> = radii
                .iter()
                .map(|&r| mean(r).map(|m| m - sq))
                .collect::<Result<_>>()?;
            // Largest bracket with excess >= 0 on the left and < 0 on the right.
            let Some(k) = (0..n - 1).rev().find(|&k| excess[k] >= 0.0 && excess[k + 1] < 0.0) else {
                return Ok(SuperlevelOutcome::Unresolved { seed: z.clone() });
            };
            let (mut lo, mut hi) = (radii[k], radii[k + 1]);
            while hi - lo > options.rel_tol * hi {
                let mid = 0.5 * (lo + hi);
                if mean(mid)? - sq >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r_bar = 0.5 * (lo + hi);
            let cylinder = shifted_cylinder(z, r_bar)?;
            let m = mean(r_bar)?;
            let big = shift_scale_5q(&cylinder)?;
            let mean_5q = mapped_average(gbold, &big, options.nodes, |v| v.abs().powf(q))?;
            Ok(SuperlevelOutcome::Resolved {
                seed: z.clone(),
                cylinder,
                mean: m,
                mean_5q,
                residual: (m - sq).abs() / sq,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LebesgueReport {
    pub radii: Vec<f64>,
    pub points: Vec<Point>,
    /// `averages[i][k] = ⨍_{Q_{r_k}(z_{r_k})} |f - f(z_i)|`
    pub averages: Vec<Vec<f64>>,
    /// Largest average at each radius.
    pub max_by_radius: Vec<f64>,
    /// `max_{i,k} averages[i][k] / r_k`
    pub lipschitz_fit: f64,
}

/// Averages of `|f - f(z)|` over shrinking shifted cylinders at random points
/// of `domain`.
pub fn lebesgue_check(
    f: &GridField,
    domain: &Cylinder,
    points: usize,
    radii: &[f64],
    seed: u64,
    nodes: usize,
) -> Result<LebesgueReport> {
    if radii.is_empty() {
        return Err(KgError::Domain("need at least one radius".into()));
    }
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let rows: Vec<(Point, Vec<f64>)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            for _ in 0..10_000 {
                let z = random_point(domain, &mut rng);
                if !f.contains_cylinder(&shifted_cylinder(&z, r_max)?) {
                    continue;
                }
                let fz = f.interpolate(&z);
                let avgs = radii
                    .iter()
                    .map(|&r| mapped_average(f, &shifted_cylinder(&z, r)?, nodes, |v| (v - fz).abs()))
                    .collect::<Result<Vec<f64>>>()?;
                return Ok((z, avgs));
            }
            Err(KgError::Scale(format!("no point of the domain admits radius {r_max}")))
        })
        .collect::<Result<_>>()?;
    let max_by_radius: Vec<f64> = (0..radii.len())
        .map(|k| rows.iter().map(|(_, a)| a[k]).fold(0.0, f64::max))
        .collect();
    let lipschitz_fit = max_by_radius
        .iter()
        .zip(radii)
        .map(|(m, r)| m / r)
        .fold(0.0, f64::max);
    let (points, averages) = rows.into_iter().unzip();
    Ok(LebesgueReport {
        radii: radii.to_vec(),
        points,
        averages,
        max_by_radius,
        lipschitz_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyl(t: f64, x: f64, v: f64, r: f64) -> Cylinder {
        Cylinder::new(Point::new(t, &[x], &[v]), r).unwrap()
    }

    #[test]
    fn single_and_disjoint_families() {
        let a = cyl(-1.0, 0.0, 0.0, 0.5);
        let res = vitali_select(std::slice::from_ref(&a)).unwrap();
        assert_eq!(res.selected, vec![0]);
        assert_eq!(res.assignment, vec![0]);
        let b = cyl(-1.0, 0.0, 3.0, 0.5);
        let res = vitali_select(&[a, b]).unwrap();
        assert_eq!(res.selected.len(), 2);
    }

    #[test]
    fn nested_family_keeps_largest() {
        let fam = vec![cyl(0.0, 0.0, 0.0, 0.25), cyl(0.0, 0.0, 0.0, 0.5), cyl(0.0, 0.0, 0.0, 1.0)];
        let res = vitali_select(&fam).unwrap();
        assert_eq!(res.selected, vec![2]);
        assert_eq!(res.assignment, vec![0, 0, 0]);
    }

    #[test]
    fn ties_broken_by_index() {
        let fam = vec![cyl(-1.0, 0.0, 0.0, 0.5), cyl(-1.0, 0.0, 0.1, 0.5)];
        assert_eq!(vitali_select(&fam).unwrap().selected, vec![0]);
    }

    #[test]
    fn positive_time_rejected() {
        assert!(vitali_select(&[cyl(0.5, 0.0, 0.0, 1.0)]).is_err());
        assert!(vitali_select(&[]).unwrap().selected.is_empty());
    }

    #[test]
    fn covering_verified_and_mutation_detected() {
        let fam = vec![cyl(-1.0, 0.0, 0.0, 0.5), cyl(-1.0, 50.0, 5.0, 0.4), cyl(-0.9, 0.1, 0.2, 0.3)];
        let res = vitali_select(&fam).unwrap();
        assert!(verify_covering(&fam, &res, 2000).unwrap().pass());
        let broken = res.without(1);
        assert!(verify_covering(&fam, &broken, 2000).unwrap().escapes > 0);
    }

    #[test]
    fn shifted_center_identity() {
        // 5Q_r(z_r) = Q_{5r}(z_{5r})
        for (t, r) in [(-0.01, 0.3), (-1.0, 0.2), (-5.0, 0.5), (0.0, 0.4)] {
            let z = Point::new(t, &[0.3], &[-0.7]);
            let five = shift_scale_5q(&shifted_cylinder(&z, r).unwrap()).unwrap();
            let direct = shifted_cylinder(&z, 5.0 * r).unwrap();
            assert!((five.center.t - direct.center.t).abs() < 1e-12);
            assert!((five.center.x[0] - direct.center.x[0]).abs() < 1e-12);
            assert_eq!(five.radius, direct.radius);
            assert!(contains_point(&shifted_cylinder(&z, r).unwrap(), &z));
        }
    }

    #[test]
    fn constant_below_level_is_unresolved() {
        let q = Cylinder::centered(1, 1.5).unwrap();
        let g = GridField::around_cylinder(&q, 24, |_| 1.2).unwrap();
        let seeds = vec![Point::new(-0.5, &[0.0], &[0.0])];
        let out = superlevel_cover(&g, 2.0, 1.5, 1.1, &seeds, &SuperlevelOptions::default()).unwrap();
        assert!(matches!(out[0], SuperlevelOutcome::Unresolved { .. }));
        let out = superlevel_cover(&g, 2.0, 1.5, 1.5, &seeds, &SuperlevelOptions::default()).unwrap();
        assert!(matches!(out[0], SuperlevelOutcome::Skipped { .. }));
    }

    #[test]
    fn constant_field_lebesgue_is_zero() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 16, |_| 3.0).unwrap();
        let dom = Cylinder::new(Point::new(-0.3, &[0.0], &[0.0]), 0.3).unwrap();
        let rep = lebesgue_check(&f, &dom, 4, &[0.2, 0.1], 1, 8).unwrap();
        assert!(rep.max_by_radius.iter().all(|&m| m < 1e-12));
    }
}
