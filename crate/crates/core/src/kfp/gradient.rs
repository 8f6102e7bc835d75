//! Velocity derivatives of grid fields.

use rayon::prelude::*;

use crate::field::GridField;

/// `∂_{v_k} f` for the `k`-th velocity axis: centred differences inside,
/// one-sided at the two velocity boundaries.
pub fn velocity_derivative(f: &GridField, k: usize) -> GridField {
    let d = f.dim();
    assert!(k < d, "velocity axis {k} out of range");
    let axis = 1 + d + k;
    let n = f.shape()[axis];
    let stride = f.strides()[axis];
    let h = f.spacing(axis);
    let vals = f.values();
    let out: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let j = (i / stride) % n;
            if n == 1 {
                0.0
            } else if j == 0 {
                (vals[i + stride] - vals[i]) / h
            } else if j == n - 1 {
                (vals[i] - vals[i - stride]) / h
            } else {
                (vals[i + stride] - vals[i - stride]) / (2.0 * h)
            }
        })
        .collect();
    f.with_values(out).expect("same layout")
}

/// `∂_v f` for `d = 1`.
pub fn velocity_gradient(f: &GridField) -> GridField {
    velocity_derivative(f, 0)
}

/// `|∇_v f|` in any dimension.
pub fn velocity_gradient_norm(f: &GridField) -> GridField {
    let d = f.dim();
    let parts: Vec<GridField> = (0..d).map(|k| velocity_derivative(f, k)).collect();
    let out: Vec<f64> = (0..f.len())
        .into_par_iter()
        .map(|i| parts.iter().map(|p| p.values()[i].powi(2)).sum::<f64>().sqrt())
        .collect();
    f.with_values(out).expect("same layout")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cylinder;

    fn grid<F: Fn(f64) -> f64 + Sync>(f: F) -> GridField {
        let q = Cylinder::centered(1, 1.0).unwrap();
        GridField::around_cylinder(&q, 40, |z| f(z.v[0])).unwrap()
    }

    #[test]
    fn constant_has_zero_gradient() {
        assert!(velocity_gradient(&grid(|_| 4.0)).values().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn quadratic_interior_exact() {
        let f = grid(|v| v * v);
        let g = velocity_gradient(&f);
        let n = f.shape()[2];
        for i in 0..f.len() {
            let j = i % n;
            if j > 0 && j < n - 1 {
                let v = f.cell_center(i).v[0];
                assert!((g.values()[i] - 2.0 * v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kink_is_confined_to_one_cell() {
        let f = grid(f64::abs);
        let g = velocity_gradient(&f);
        let n = f.shape()[2];
        let h = f.spacing(2);
        for i in 0..n {
            let v = f.cell_center(i).v[0];
            let gi = g.values()[i];
            if v.abs() > 1.5 * h && i > 0 && i < n - 1 {
                assert!((gi - v.signum()).abs() < 1e-12);
            } else {
                assert!(gi.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
