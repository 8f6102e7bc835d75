//! Galilean group law, kinetic dilations and kinetic cylinders.
//!
//! Points are `z = (t, x, v)` with `x, v` in `R^d`. The group law is
//!
//! ```text
//! z0 ∘ z = (t0 + t, x0 + x + t v0, v0 + v)
//! ```
//!
//! and the cylinder of radius `r` centred at `z0` is
//!
//! ```text
//! Q_r(z0) = { z : -r² < t - t0 <= 0, |x - x0 - (t - t0) v0| < r³, |v - v0| < r }.
//! ```
//!
//! The `x`-slab of a cylinder moves affinely in `t`, which makes the intersection
//! and containment predicates exact closed-form tests.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{KgError, Result};

/// Coordinate storage for `x` and `v`; inline up to `d = 3`.
pub type Coords = SmallVec<[f64; 3]>;

/// A point `(t, x, v)` of `R × R^d × R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub x: Coords,
    pub v: Coords,
}

impl Point {
    pub fn new(t: f64, x: &[f64], v: &[f64]) -> Self {
        assert_eq!(x.len(), v.len(), "x and v must have the same dimension");
        Point {
            t,
            x: Coords::from_slice(x),
            v: Coords::from_slice(v),
        }
    }

    /// The group identity in dimension `d`.
    pub fn origin(d: usize) -> Self {
        Point {
            t: 0.0,
            x: smallvec::smallvec![0.0; d],
            v: smallvec::smallvec![0.0; d],
        }
    }

    /// A pure time translation `(tau, 0, 0)`.
    pub fn time_shift(tau: f64, d: usize) -> Self {
        let mut p = Point::origin(d);
        p.t = tau;
        p
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(self.v.iter()).all(|c| c.is_finite())
    }

    /// Flattened coordinates in grid axis order `(t, x_1..x_d, v_1..v_d)`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(1 + 2 * self.dim());
        out.push(self.t);
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.v);
        out
    }

    pub fn from_flat(coords: &[f64]) -> Self {
        assert!(coords.len() % 2 == 1, "flat point must have 1 + 2d entries");
        let d = coords.len() / 2;
        Point::new(coords[0], &coords[1..1 + d], &coords[1 + d..])
    }
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Group law `z0 ∘ z = (t0 + t, x0 + x + t v0, v0 + v)`.
pub fn compose(z0: &Point, z: &Point) -> Point {
    debug_assert_eq!(z0.dim(), z.dim());
    Point {
        t: z0.t + z.t,
        x: z0
            .x
            .iter()
            .zip(&z.x)
            .zip(&z0.v)
            .map(|((x0, x), v0)| x0 + x + z.t * v0)
            .collect(),
        v: z0.v.iter().zip(&z.v).map(|(v0, v)| v0 + v).collect(),
    }
}

/// Group inverse `(-t, -x + t v, -v)`.
pub fn inverse(z: &Point) -> Point {
    Point {
        t: -z.t,
        x: z.x.iter().zip(&z.v).map(|(x, v)| -x + z.t * v).collect(),
        v: z.v.iter().map(|v| -v).collect(),
    }
}

/// Kinetic dilation `(r² t, r³ x, r v)`.
pub fn dilate(r: f64, z: &Point) -> Result<Point> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(KgError::InvalidScale(r));
    }
    let r3 = r * r * r;
    Ok(Point {
        t: r * r * z.t,
        x: z.x.iter().map(|x| r3 * x).collect(),
        v: z.v.iter().map(|v| r * v).collect(),
    })
}

/// Volume of the Euclidean unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // V_d = 2π/d · V_{d-2}, V_0 = 1, V_1 = 2.
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Homogeneous dimension `4d + 2` of the kinetic scaling.
pub fn homogeneous_dimension(d: usize) -> i32 {
    4 * d as i32 + 2
}

/// A kinetic cylinder `Q_r(z0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub center: Point,
    pub radius: f64,
}

impl Cylinder {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(KgError::InvalidScale(radius));
        }
        if !center.is_finite() {
            return Err(KgError::Domain("cylinder center must be finite".into()));
        }
        Ok(Cylinder { center, radius })
    }

    /// `Q_r` centred at the origin.
    pub fn centered(d: usize, radius: f64) -> Result<Self> {
        Cylinder::new(Point::origin(d), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Time interval `(t0 - r², t0]`, returned as its closure endpoints.
    pub fn time_interval(&self) -> (f64, f64) {
        (self.center.t - self.radius * self.radius, self.center.t)
    }

    /// Spatial radius `r³` of the `x`-slab.
    pub fn x_radius(&self) -> f64 {
        self.radius * self.radius * self.radius
    }

    /// Center of the `x`-slab at time `t`: `x0 + (t - t0) v0`.
    pub fn slab_center(&self, t: f64) -> Coords {
        let dt = t - self.center.t;
        self.center
            .x
            .iter()
            .zip(&self.center.v)
            .map(|(x0, v0)| x0 + dt * v0)
            .collect()
    }

    /// The cylinder of the same radius centred at `z0 ∘ shift`.
    pub fn translated(&self, shift: &Point) -> Cylinder {
        Cylinder {
            center: compose(&self.center, shift),
            radius: self.radius,
        }
    }

    pub fn with_radius(&self, radius: f64) -> Result<Cylinder> {
        Cylinder::new(self.center.clone(), radius)
    }
}

/// `|Q_r| = r^{4d+2} |B_1|²`.
pub fn volume(q: &Cylinder) -> f64 {
    let d = q.dim();
    q.radius.powi(homogeneous_dimension(d)) * unit_ball_volume(d).powi(2)
}

/// Membership with the time interval half-open at the top.
pub fn contains_point(q: &Cylinder, z: &Point) -> bool {
    contains_point_tol(q, z, 0.0)
}

/// Membership test with an absolute slack `tol` added to every constraint.
pub fn contains_point_tol(q: &Cylinder, z: &Point, tol: f64) -> bool {
    let c = &q.center;
    let r = q.radius;
    let dt = z.t - c.t;
    if !(dt > -r * r - tol && dt <= tol) {
        return false;
    }
    if dist(&z.v, &c.v) >= r + tol {
        return false;
    }
    let slab = q.slab_center(z.t);
    dist(&z.x, &slab) < q.x_radius() + tol
}

/// Time shift `τ_{t0,R} = min(-t0, 12 R²)` of the enlarged cylinder.
pub fn five_q_time_shift(t0: f64, radius: f64) -> f64 {
    (-t0).min(12.0 * radius * radius)
}

/// The enlarged cylinder `5Q_R(z0) = Q_{5R}(z0 ∘ (τ, 0, 0))` with `τ = min(-t0, 12R²)`.
pub fn shift_scale_5q(q: &Cylinder) -> Result<Cylinder> {
    if q.center.t > 0.0 {
        return Err(KgError::Domain(format!(
            "5Q requires a center time <= 0, got {}",
            q.center.t
        )));
    }
    let tau = five_q_time_shift(q.center.t, q.radius);
    let center = compose(&q.center, &Point::time_shift(tau, q.dim()));
    Ok(Cylinder {
        center,
        radius: 5.0 * q.radius,
    })
}

/// Offset `a` and rate `w` such that `c1(t) - c2(t) = a + t w`.
fn slab_offset(q1: &Cylinder, q2: &Cylinder) -> (Coords, Coords) {
    let (c1, c2) = (&q1.center, &q2.center);
    let a = (0..q1.dim())
        .map(|i| (c1.x[i] - c1.t * c1.v[i]) - (c2.x[i] - c2.t * c2.v[i]))
        .collect();
    let w = c1.v.iter().zip(&c2.v).map(|(a, b)| a - b).collect();
    (a, w)
}

fn affine_norm(a: &[f64], w: &[f64], t: f64) -> f64 {
    a.iter()
        .zip(w)
        .map(|(a, w)| (a + t * w) * (a + t * w))
        .sum::<f64>()
        .sqrt()
}

/// Exact test for `Q1 ∩ Q2 ≠ ∅`.
pub fn intersects(q1: &Cylinder, q2: &Cylinder) -> bool {
    intersects_tol(q1, q2, 0.0)
}

/// Intersection test with absolute slack `tol`; `tol = 0` is strict.
pub fn intersects_tol(q1: &Cylinder, q2: &Cylinder, tol: f64) -> bool {
    let (lo1, hi1) = q1.time_interval();
    let (lo2, hi2) = q2.time_interval();
    let lo = lo1.max(lo2);
    let hi = hi1.min(hi2);
    // (lo, hi] is non-empty iff lo < hi.
    if !(lo < hi + tol) {
        return false;
    }
    if dist(&q1.center.v, &q2.center.v) >= q1.radius + q2.radius + tol {
        return false;
    }
    let (a, w) = slab_offset(q1, q2);
    let ww: f64 = w.iter().map(|c| c * c).sum();
    let t_star = if ww > 0.0 {
        let aw: f64 = a.iter().zip(&w).map(|(a, w)| a * w).sum();
        (-aw / ww).clamp(lo.min(hi), hi)
    } else {
        hi
    };
    // The infimum over (lo, hi] equals the minimum over [lo, hi] by continuity.
    affine_norm(&a, &w, t_star) < q1.x_radius() + q2.x_radius() + tol
}

/// Exact test for `Q_inner ⊂ Q_outer`.
pub fn contained_in(inner: &Cylinder, outer: &Cylinder) -> bool {
    contained_in_tol(inner, outer, 0.0)
}

/// Containment test with absolute slack `tol`; `tol = 0` is strict.
pub fn contained_in_tol(inner: &Cylinder, outer: &Cylinder, tol: f64) -> bool {
    let (lo1, hi1) = inner.time_interval();
    let (lo2, hi2) = outer.time_interval();
    if lo1 < lo2 - tol || hi1 > hi2 + tol {
        return false;
    }
    if dist(&inner.center.v, &outer.center.v) > outer.radius - inner.radius + tol {
        return false;
    }
    // A convex function of t attains its max over an interval at an endpoint.
    let (a, w) = slab_offset(inner, outer);
    let bound = outer.x_radius() - inner.x_radius() + tol;
    affine_norm(&a, &w, lo1) <= bound && affine_norm(&a, &w, hi1) <= bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p1(t: f64, x: f64, v: f64) -> Point {
        Point::new(t, &[x], &[v])
    }

    #[test]
    fn compose_examples() {
        let z = p1(4.0, 5.0, 6.0);
        assert_eq!(compose(&Point::origin(1), &z), z);
        assert_eq!(compose(&p1(1.0, 2.0, 3.0), &z), p1(5.0, 19.0, 9.0));
        assert_eq!(compose(&z, &inverse(&z)), Point::origin(1));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(&Point::origin(1)), Point::origin(1));
        assert_eq!(inverse(&p1(1.0, 2.0, 3.0)), p1(-1.0, 1.0, -3.0));
        assert_eq!(inverse(&inverse(&p1(1.0, 2.0, 3.0))), p1(1.0, 2.0, 3.0));
    }

    #[test]
    fn dilate_examples() {
        let z = p1(1.0, 1.0, 1.0);
        assert_eq!(dilate(1.0, &z).unwrap(), z);
        assert_eq!(dilate(2.0, &z).unwrap(), p1(4.0, 8.0, 2.0));
        assert!(matches!(dilate(0.0, &z), Err(KgError::InvalidScale(_))));
        assert!(matches!(dilate(-1.0, &z), Err(KgError::InvalidScale(_))));
    }

    #[test]
    fn membership_boundaries() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        assert!(contains_point(&q, &Point::origin(1)));
        assert!(!contains_point(&q, &p1(-1.0, 0.0, 0.0)));
        assert!(contains_point(&q, &p1(-0.5, 0.9, 0.5)));
        assert!(!contains_point(&q, &p1(1e-12, 0.0, 0.0)));
        assert!(!contains_point(&q, &p1(-0.5, 0.0, 1.0)));
    }

    #[test]
    fn volume_examples() {
        assert_relative_eq!(volume(&Cylinder::centered(1, 1.0).unwrap()), 4.0);
        assert_relative_eq!(volume(&Cylinder::centered(1, 2.0).unwrap()), 256.0);
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * std::f64::consts::PI / 3.0);
    }

    #[test]
    fn five_q_examples() {
        let q = Cylinder::new(p1(0.0, 1.0, 2.0), 1.0).unwrap();
        let big = shift_scale_5q(&q).unwrap();
        assert_eq!(big.center, q.center);
        assert_eq!(big.radius, 5.0);

        let q = Cylinder::new(p1(-1.0, 0.5, 2.0), 1.0).unwrap();
        let big = shift_scale_5q(&q).unwrap();
        assert_eq!(big.center, p1(0.0, 2.5, 2.0));
        assert!(contains_point(&big, &q.center));

        let q = Cylinder::new(p1(-100.0, 0.0, 0.0), 1.0).unwrap();
        assert_eq!(shift_scale_5q(&q).unwrap().center.t, -88.0);

        let bad = Cylinder::new(p1(0.5, 0.0, 0.0), 1.0).unwrap();
        assert!(matches!(shift_scale_5q(&bad), Err(KgError::Domain(_))));
    }

    #[test]
    fn intersection_examples() {
        let q = Cylinder::new(p1(-0.5, 0.0, 0.0), 0.5).unwrap();
        assert!(intersects(&q, &q));
        let q2 = Cylinder::new(p1(-0.4, 0.01, 0.1), 0.5).unwrap();
        assert!(intersects(&q, &q2));
        // (-0.55, 0.0, 0.05) is a common point.
        let common = p1(-0.55, 0.0, 0.05);
        assert!(contains_point(&q, &common) && contains_point(&q2, &common));

        let far_v = Cylinder::new(p1(-0.5, 0.0, 1.0), 0.5).unwrap();
        assert!(!intersects(&q, &far_v));
        // Touching time intervals share no point: (-1,-0.5] and (-1.5,-1].
        let below = Cylinder::new(p1(-1.0, 0.0, 0.0), 0.5_f64.sqrt()).unwrap();
        let above = Cylinder::new(p1(-0.5, 0.0, 0.0), 0.5_f64.sqrt()).unwrap();
        assert!(!intersects(&below, &above));
        assert!(!intersects(&above, &below));
    }

    #[test]
    fn sheared_slabs_can_miss() {
        // Same time window, overlapping velocity balls, but slabs drift apart.
        let a = Cylinder::new(p1(0.0, 0.0, 0.0), 1.0).unwrap();
        let b = Cylinder::new(p1(0.0, 2.5, 1.5), 1.0).unwrap();
        // c_a(t) - c_b(t) = -2.5 - 1.5 t has minimum norm 1 < 2 at t = -1.
        assert!(intersects(&a, &b));
        let c = Cylinder::new(p1(0.0, 3.5, 1.5), 1.0).unwrap();
        assert!(!intersects(&a, &c));
    }

    #[test]
    fn containment_examples() {
        let z = p1(-1.0, 0.3, 0.2);
        let q = Cylinder::new(z.clone(), 1.0).unwrap();
        assert!(contained_in(&q, &q));
        assert!(!contained_in(&Cylinder::new(z.clone(), 2.0).unwrap(), &q));
        let shifted = Cylinder::new(p1(-0.9, 0.3, 0.2), 0.5).unwrap();
        assert!(!contained_in(&shifted, &Cylinder::new(z, 0.6).unwrap()));
    }

    #[test]
    fn nested_same_top_time_containment() {
        // Same center: Q_r(z) ⊂ Q_R(z) for r <= R.
        let z = p1(0.0, 0.0, 0.0);
        let small = Cylinder::new(z.clone(), 0.5).unwrap();
        let big = Cylinder::new(z, 2.0).unwrap();
        assert!(contained_in(&small, &big));
        assert!(!contained_in(&big, &small));
    }

    #[test]
    fn general_dimension_volume_scaling() {
        for d in 1..=4 {
            let q1 = Cylinder::centered(d, 1.0).unwrap();
            let q = Cylinder::centered(d, 1.7).unwrap();
            assert_relative_eq!(
                volume(&q) / volume(&q1),
                1.7_f64.powi(4 * d as i32 + 2),
                max_relative = 1e-14
            );
        }
    }
}
