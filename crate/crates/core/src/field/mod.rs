//! Scalar fields sampled at cell centres of a tensor grid in `(t, x, v)`, and
//! the cylinder calculus built on them.
//!
//! Axis order is `t, x_1..x_d, v_1..v_d`; storage is row-major with `t` the
//! slowest axis. Cylinder integrals use the midpoint rule restricted to cells
//! whose centre lies in the cylinder, and averages divide by the counted
//! volume so constants average exactly.

mod io;
mod layer;
mod scan;

pub use io::{read_binary, read_csv, write_binary, write_csv, GridHeader};
pub use layer::{geometric_levels, layer_cake, stieltjes_moment, LevelFunction};
pub use scan::{
    admissible_radius_range, gehring_check, max_admissible_radius, min_resolved_radius,
    reverse_holder_scan, GehringCheck, RhCheck, RhFit, RhSample, ScanOptions, ScanReport,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KgError, Result};
use crate::geometry::{Cylinder, Point};

/// A scalar field on a uniform cell-centred grid over an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    d: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
}

/// Sum of a cell function over the cells of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSum {
    pub sum: f64,
    pub cells: usize,
    pub cell_volume: f64,
}

impl CellSum {
    pub fn integral(&self) -> f64 {
        self.sum * self.cell_volume
    }

    pub fn counted_volume(&self) -> f64 {
        self.cells as f64 * self.cell_volume
    }

    pub fn average(&self) -> Result<f64> {
        if self.cells == 0 {
            return Err(KgError::Degenerate(
                "cylinder contains no cell centres".into(),
            ));
        }
        Ok(self.sum / self.cells as f64)
    }
}

fn validate_layout(d: usize, lo: &[f64], hi: &[f64], shape: &[usize]) -> Result<()> {
    let axes = 1 + 2 * d;
    if d == 0 || lo.len() != axes || hi.len() != axes || shape.len() != axes {
        return Err(KgError::Format(format!(
            "grid layout needs {axes} axes for d = {d}"
        )));
    }
    for a in 0..axes {
        if !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
            return Err(KgError::Format(format!("empty or non-finite axis {a}")));
        }
        if shape[a] == 0 {
            return Err(KgError::Format(format!("axis {a} has no cells")));
        }
    }
    Ok(())
}

impl GridField {
    pub fn zeros(d: usize, lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        validate_layout(d, &lo, &hi, &shape)?;
        let n = shape.iter().product();
        Ok(GridField {
            d,
            lo,
            hi,
            shape,
            values: vec![0.0; n],
        })
    }

    pub fn from_values(
        d: usize,
        lo: Vec<f64>,
        hi: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        validate_layout(d, &lo, &hi, &shape)?;
        if values.len() != shape.iter().product::<usize>() {
            return Err(KgError::Format(format!(
                "expected {} values, got {}",
                shape.iter().product::<usize>(),
                values.len()
            )));
        }
        Ok(GridField {
            d,
            lo,
            hi,
            shape,
            values,
        })
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn<F>(d: usize, lo: Vec<f64>, hi: Vec<f64>, shape: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let mut field = GridField::zeros(d, lo, hi, shape)?;
        let proto = field.clone_layout();
        field
            .values
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, val)| *val = f(&proto.cell_center(i)));
        Ok(field)
    }

    /// A box grid with `n` cells per axis around the bounding box of `q`.
    pub fn around_cylinder<F>(q: &Cylinder, n: usize, f: F) -> Result<Self>
    where
        F: Fn(&Point) -> f64 + Sync,
    {
        let (lo, hi) = cylinder_bounding_box(q);
        GridField::from_fn(q.dim(), lo, hi, vec![n; 1 + 2 * q.dim()], f)
    }

    fn clone_layout(&self) -> GridField {
        GridField {
            d: self.d,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            shape: self.shape.clone(),
            values: Vec::new(),
        }
    }

    /// Same layout, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        GridField::from_values(
            self.d,
            self.lo.clone(),
            self.hi.clone(),
            self.shape.clone(),
            values,
        )
    }

    pub fn map<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> GridField {
        GridField {
            values: self.values.par_iter().map(|&v| f(v)).collect(),
            ..self.clone_layout()
        }
    }

    pub fn same_layout(&self, other: &GridField) -> bool {
        self.d == other.d && self.lo == other.lo && self.hi == other.hi && self.shape == other.shape
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn axes(&self) -> usize {
        1 + 2 * self.d
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.shape[axis] as f64
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.spacing(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.axes()).map(|a| self.spacing(a)).product()
    }

    pub fn box_volume(&self) -> f64 {
        (0..self.axes()).map(|a| self.hi[a] - self.lo[a]).product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.axes()];
        for a in (0..self.axes() - 1).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes()];
        for a in (0..self.axes()).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn cell_center(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let coords: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(a, &i)| self.coord(a, i))
            .collect();
        Point::from_flat(&coords)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.values[self.flat_index(idx)]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the cell containing `z`, if `z` lies in the box.
    pub fn locate(&self, z: &Point) -> Option<Vec<usize>> {
        let c = z.to_flat();
        let mut idx = Vec::with_capacity(self.axes());
        for a in 0..self.axes() {
            let s = (c[a] - self.lo[a]) / self.spacing(a);
            if !(s >= 0.0) || s >= self.shape[a] as f64 {
                return None;
            }
            idx.push(s as usize);
        }
        Some(idx)
    }

    /// Value of the cell containing `z`.
    pub fn nearest(&self, z: &Point) -> Option<f64> {
        self.locate(z).map(|idx| self.get(&idx))
    }

    /// Multilinear interpolation between cell centres, constant beyond the
    /// outermost centres.
    pub fn interpolate(&self, z: &Point) -> f64 {
        let c = z.to_flat();
        let axes = self.axes();
        let mut base = Vec::with_capacity(axes);
        let mut frac = Vec::with_capacity(axes);
        for a in 0..axes {
            let n = self.shape[a];
            let s = (c[a] - self.lo[a]) / self.spacing(a) - 0.5;
            if n == 1 || s <= 0.0 {
                base.push(0);
                frac.push(0.0);
            } else if s >= (n - 1) as f64 {
                base.push(n - 2);
                frac.push(1.0);
            } else {
                let i = s.floor() as usize;
                base.push(i.min(n - 2));
                frac.push(s - i as f64);
            }
        }
        let strides = self.strides();
        let mut acc = 0.0;
        for corner in 0..(1usize << axes) {
            let mut w = 1.0;
            let mut flat = 0;
            for a in 0..axes {
                let up = (corner >> a) & 1 == 1;
                let i = if self.shape[a] == 1 { 0 } else { base[a] + up as usize };
                w *= if up { frac[a] } else { 1.0 - frac[a] };
                flat += i * strides[a];
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// Whether the closure of `q` lies inside the grid box.
    pub fn contains_cylinder(&self, q: &Cylinder) -> bool {
        if q.dim() != self.d {
            return false;
        }
        let (lo, hi) = cylinder_bounding_box(q);
        let eps = 1e-12;
        (0..self.axes()).all(|a| {
            let scale = 1.0 + self.hi[a].abs().max(self.lo[a].abs());
            lo[a] >= self.lo[a] - eps * scale && hi[a] <= self.hi[a] + eps * scale
        })
    }

    fn require_inside(&self, q: &Cylinder) -> Result<()> {
        if self.contains_cylinder(q) {
            Ok(())
        } else {
            Err(KgError::Domain(format!(
                "cylinder of radius {} at t = {} is not inside the grid box",
                q.radius, q.center.t
            )))
        }
    }

    /// Calls `visit(flat_index)` for every cell whose centre lies in `q`.
    pub fn for_each_cell_in<F: FnMut(usize)>(&self, q: &Cylinder, mut visit: F) {
        let d = self.d;
        let r = q.radius;
        let r3 = q.x_radius();
        let c = &q.center;
        let strides = self.strides();
        let (t_lo, t_hi) = q.time_interval();
        let Some((it0, it1)) = self.index_range(0, t_lo, t_hi) else {
            return;
        };
        let mut v_ranges = Vec::with_capacity(d);
        for k in 0..d {
            match self.index_range(1 + d + k, c.v[k] - r, c.v[k] + r) {
                Some(range) => v_ranges.push(range),
                None => return,
            }
        }
        let mut x_ranges = Vec::with_capacity(d);
        for it in it0..=it1 {
            let t = self.coord(0, it);
            let dt = t - c.t;
            if !(dt > -r * r && dt <= 0.0) {
                continue;
            }
            let slab = q.slab_center(t);
            x_ranges.clear();
            let mut empty = false;
            for k in 0..d {
                match self.index_range(1 + k, slab[k] - r3, slab[k] + r3) {
                    Some(range) => x_ranges.push(range),
                    None => {
                        empty = true;
                        break;
                    }
                }
            }
            if empty {
                continue;
            }
            let base_t = it * strides[0];
            if d == 1 {
                let (vx0, vx1) = v_ranges[0];
                let (xx0, xx1) = x_ranges[0];
                for ix in xx0..=xx1 {
                    if (self.coord(1, ix) - slab[0]).abs() >= r3 {
                        continue;
                    }
                    let row = base_t + ix * strides[1];
                    for iv in vx0..=vx1 {
                        if (self.coord(2, iv) - c.v[0]).abs() < r {
                            visit(row + iv);
                        }
                    }
                }
            } else {
                self.visit_balls(&x_ranges, &v_ranges, &slab, &c.v, r3, r, base_t, &strides, &mut visit);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn visit_balls<F: FnMut(usize)>(
        &self,
        x_ranges: &[(usize, usize)],
        v_ranges: &[(usize, usize)],
        slab: &[f64],
        v0: &[f64],
        r3: f64,
        r: f64,
        base_t: usize,
        strides: &[usize],
        visit: &mut F,
    ) {
        let d = self.d;
        let ranges: Vec<(usize, usize)> = x_ranges.iter().chain(v_ranges).cloned().collect();
        let mut idx: Vec<usize> = ranges.iter().map(|r| r.0).collect();
        'outer: loop {
            let mut x2 = 0.0;
            let mut v2 = 0.0;
            for k in 0..d {
                let dx = self.coord(1 + k, idx[k]) - slab[k];
                x2 += dx * dx;
                let dv = self.coord(1 + d + k, idx[d + k]) - v0[k];
                v2 += dv * dv;
            }
            if x2.sqrt() < r3 && v2.sqrt() < r {
                let flat = base_t
                    + idx
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| i * strides[1 + k])
                        .sum::<usize>();
                visit(flat);
            }
            for k in (0..idx.len()).rev() {
                if idx[k] < ranges[k].1 {
                    idx[k] += 1;
                    continue 'outer;
                }
                idx[k] = ranges[k].0;
            }
            break;
        }
    }

    /// Candidate cell range whose centres may fall in `[a, b]`, padded by one
    /// cell; callers apply the exact test per centre.
    fn index_range(&self, axis: usize, a: f64, b: f64) -> Option<(usize, usize)> {
        let h = self.spacing(axis);
        let n = self.shape[axis] as i64;
        let i0 = ((a - self.lo[axis]) / h - 0.5).floor() as i64;
        let i1 = ((b - self.lo[axis]) / h - 0.5).ceil() as i64;
        let i0 = i0.max(0);
        let i1 = i1.min(n - 1);
        (i0 <= i1).then_some((i0 as usize, i1 as usize))
    }

    /// `Σ g(f)` over the cells of `q`.
    pub fn cylinder_sum<G: Fn(f64) -> f64>(&self, q: &Cylinder, g: G) -> Result<CellSum> {
        self.require_inside(q)?;
        let mut sum = 0.0;
        let mut cells = 0;
        self.for_each_cell_in(q, |i| {
            sum += g(self.values[i]);
            cells += 1;
        });
        Ok(CellSum {
            sum,
            cells,
            cell_volume: self.cell_volume(),
        })
    }

    /// Volume of `q` as counted by the grid.
    pub fn counted_volume(&self, q: &Cylinder) -> Result<f64> {
        Ok(self.cylinder_sum(q, |_| 0.0)?.counted_volume())
    }
}

/// Axis-aligned bounding box `(lo, hi)` of the closure of `q`.
pub fn cylinder_bounding_box(q: &Cylinder) -> (Vec<f64>, Vec<f64>) {
    let d = q.dim();
    let (t0, t1) = q.time_interval();
    let r3 = q.x_radius();
    let s0 = q.slab_center(t0);
    let s1 = q.slab_center(t1);
    let mut lo = vec![t0];
    let mut hi = vec![t1];
    for k in 0..d {
        lo.push(s0[k].min(s1[k]) - r3);
        hi.push(s0[k].max(s1[k]) + r3);
    }
    for k in 0..d {
        lo.push(q.center.v[k] - q.radius);
        hi.push(q.center.v[k] + q.radius);
    }
    (lo, hi)
}

/// `∫_Q f` by the cell-centre midpoint rule.
pub fn integrate(f: &GridField, q: &Cylinder) -> Result<f64> {
    Ok(f.cylinder_sum(q, |v| v)?.integral())
}

/// `⨍_Q f`, normalised by the counted volume.
pub fn average(f: &GridField, q: &Cylinder) -> Result<f64> {
    f.cylinder_sum(q, |v| v)?.average()
}

/// `⨍_Q |f|^p`.
pub fn average_pow(f: &GridField, q: &Cylinder, p: f64) -> Result<f64> {
    f.cylinder_sum(q, |v| v.abs().powf(p))?.average()
}

/// `(∫_Q |f|^p)^{1/p}`.
pub fn lp_norm(f: &GridField, p: f64, q: &Cylinder) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(KgError::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    let s = f.cylinder_sum(q, |v| v.abs().powf(p))?;
    Ok(s.integral().powf(1.0 / p))
}

/// `(⨍_Q |f|^p)^{1/p}`.
pub fn lp_average_norm(f: &GridField, p: f64, q: &Cylinder) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(KgError::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    Ok(average_pow(f, q, p)?.powf(1.0 / p))
}

/// Quadrature in the cylinder's own coordinates: a midpoint rule with
/// `nodes` points per axis, mapped through `(t0 - r² s, slab(t) + r³ ξ, v0 + r η)`
/// and evaluated by multilinear interpolation. Unlike the cell-count rule the
/// result depends continuously on the radius and centre.
pub fn mapped_average<G: Fn(f64) -> f64>(
    f: &GridField,
    q: &Cylinder,
    nodes: usize,
    g: G,
) -> Result<f64> {
    f.require_inside(q)?;
    let d = q.dim();
    let unit: Vec<f64> = (0..nodes)
        .map(|i| -1.0 + (2.0 * i as f64 + 1.0) / nodes as f64)
        .collect();
    // Ball nodes: cube midpoints inside the unit ball.
    let mut ball: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..d {
        ball = ball
            .into_iter()
            .flat_map(|p| {
                unit.iter().map(move |&u| {
                    let mut q = p.clone();
                    q.push(u);
                    q
                })
            })
            .collect();
    }
    ball.retain(|p| p.iter().map(|c| c * c).sum::<f64>() < 1.0);
    let r = q.radius;
    let r3 = q.x_radius();
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut z = q.center.clone();
    for k in 0..nodes {
        let s = (k as f64 + 0.5) / nodes as f64;
        let t = q.center.t - r * r * s;
        let slab = q.slab_center(t);
        z.t = t;
        for xi in &ball {
            for (a, c) in z.x.iter_mut().enumerate() {
                *c = slab[a] + r3 * xi[a];
            }
            for eta in &ball {
                for (a, c) in z.v.iter_mut().enumerate() {
                    *c = q.center.v[a] + r * eta[a];
                }
                sum += g(f.interpolate(&z));
                count += 1;
            }
        }
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{contains_point, volume};
    use approx::assert_relative_eq;

    fn unit_grid(n: usize) -> GridField {
        GridField::zeros(1, vec![-1.0, -1.0, -1.0], vec![0.0, 1.0, 1.0], vec![n, n, n]).unwrap()
    }

    #[test]
    fn constant_averages_exactly() {
        let f = unit_grid(16).map(|_| 1.0);
        let q = Cylinder::new(Point::new(-0.2, &[0.1], &[0.3]), 0.6).unwrap();
        assert_eq!(average(&f, &q).unwrap(), 1.0);
    }

    #[test]
    fn average_of_v_squared() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 64, |z| z.v[0] * z.v[0]).unwrap();
        assert!((average(&f, &q).unwrap() - 1.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn indicator_norm() {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 64, |z| if z.v[0] > 0.0 { 1.0 } else { 0.0 }).unwrap();
        assert_relative_eq!(lp_norm(&f, 2.0, &q).unwrap(), 2f64.sqrt(), max_relative = 1e-12);
        assert!(matches!(lp_norm(&f, 0.5, &q), Err(KgError::Domain(_))));
    }

    #[test]
    fn cell_iteration_matches_membership() {
        let f = GridField::zeros(1, vec![-2.0, -3.0, -2.0], vec![0.0, 3.0, 2.0], vec![17, 23, 19]).unwrap();
        let q = Cylinder::new(Point::new(-0.4, &[0.3], &[0.7]), 0.9).unwrap();
        let mut visited = vec![false; f.len()];
        f.for_each_cell_in(&q, |i| visited[i] = true);
        for (i, &seen) in visited.iter().enumerate() {
            assert_eq!(seen, contains_point(&q, &f.cell_center(i)), "cell {i}");
        }
    }

    #[test]
    fn cell_iteration_matches_membership_d2() {
        let f = GridField::zeros(
            2,
            vec![-1.0, -1.5, -1.5, -1.2, -1.2],
            vec![0.0, 1.5, 1.5, 1.2, 1.2],
            vec![7, 9, 8, 9, 7],
        )
        .unwrap();
        let q = Cylinder::new(Point::new(-0.1, &[0.2, -0.1], &[0.3, 0.2]), 0.85).unwrap();
        let mut visited = vec![false; f.len()];
        f.for_each_cell_in(&q, |i| visited[i] = true);
        for (i, &seen) in visited.iter().enumerate() {
            assert_eq!(seen, contains_point(&q, &f.cell_center(i)), "cell {i}");
        }
    }

    #[test]
    fn outside_box_is_domain_error() {
        let f = unit_grid(8);
        let q = Cylinder::centered(1, 2.0).unwrap();
        assert!(matches!(integrate(&f, &q), Err(KgError::Domain(_))));
    }

    #[test]
    fn interpolation_reproduces_affine() {
        let f = GridField::from_fn(1, vec![-1.0, -1.0, -1.0], vec![0.0, 1.0, 1.0], vec![8, 9, 10], |z| {
            1.0 + 2.0 * z.t - z.x[0] + 0.5 * z.v[0]
        })
        .unwrap();
        let z = Point::new(-0.33, &[0.21], &[-0.4]);
        assert_relative_eq!(f.interpolate(&z), 1.0 - 0.66 - 0.21 - 0.2, max_relative = 1e-12);
    }

    #[test]
    fn mapped_average_is_exact_for_constants() {
        let f = unit_grid(10).map(|_| 3.0);
        let q = Cylinder::new(Point::new(-0.3, &[0.0], &[0.1]), 0.5).unwrap();
        assert_relative_eq!(mapped_average(&f, &q, 12, |v| v).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn counted_volume_converges() {
        let q = Cylinder::new(Point::new(0.0, &[0.0], &[0.4]), 1.0).unwrap();
        let exact = volume(&q);
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let f = GridField::around_cylinder(&q, n, |_| 1.0).unwrap();
            let err = (f.counted_volume(&q).unwrap() - exact).abs() / exact;
            assert!(err < prev + 1e-12);
            prev = err;
        }
        assert!(prev < 6.0 / 64.0);
    }
}
