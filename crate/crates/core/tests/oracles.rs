//! Closed-form values checked against the library.

use approx::assert_relative_eq;
use kinetic_gehring::constants::theta0_exact;
use kinetic_gehring::field::{average, mapped_average, GridField};
use kinetic_gehring::geometry::{shift_scale_5q, volume};
use kinetic_gehring::kfp::{kernel_moments, kolmogorov_kernel, mean_free_gain_exponent, solution_gain_exponent};
use kinetic_gehring::localization::{c_gamma, zeta_gamma, LocalizationContext};
use kinetic_gehring::{Cylinder, Point};

#[test]
fn cut_off_values_for_gamma_two() {
    // ½ min(0.4, (4/13)^{1/2}, (8/50)^{1/2})
    assert_relative_eq!(zeta_gamma(2.0, &Point::origin(1)), 0.2, max_relative = 1e-15);
    // ½ min(0.2, (3/13)^{1/2}, (7/50)^{1/2})
    assert_relative_eq!(c_gamma(2.0, 1).unwrap(), 0.1, max_relative = 1e-15);
}

#[test]
fn localized_unit_field_at_origin() {
    // ‖1‖_{L²(Q_2)} = |Q_2|^{1/2} = (2^6 · 4)^{1/2} = 16, C₀ = 2³.
    let ctx = LocalizationContext::new(2.0, 1, 2.0, 16.0).unwrap();
    let expected = (0.2f64.powi(6) * 4.0).sqrt() / (8.0 * 16.0);
    assert_relative_eq!(ctx.weight(&Point::origin(1)), expected, max_relative = 1e-14);
    assert_relative_eq!(ctx.c0, 8.0, max_relative = 1e-14);
}

#[test]
fn theta0_matches_hand_value() {
    // [2 · 75^6 · 4^2]^{-1}
    let denom = 2u64 * 75u64.pow(6) * 16;
    assert_eq!(denom, 5_695_312_500_000);
    assert_eq!(theta0_exact(1, 2).to_string(), format!("1/{denom}"));
}

#[test]
fn unit_cylinder_volume_and_five_q() {
    assert_relative_eq!(volume(&Cylinder::centered(1, 1.0).unwrap()), 4.0, max_relative = 1e-15);
    assert_relative_eq!(volume(&Cylinder::centered(2, 1.0).unwrap()), std::f64::consts::PI.powi(2), max_relative = 1e-15);
    // Q_1 centred at t = -3: shift min(3, 12) then scale by 5.
    let q = Cylinder::new(Point::new(-3.0, &[0.0], &[0.0]), 1.0).unwrap();
    let big = shift_scale_5q(&q).unwrap();
    assert_relative_eq!(big.center.t, 0.0, epsilon = 1e-15);
    assert_relative_eq!(big.radius, 5.0, max_relative = 1e-15);
}

#[test]
fn velocity_square_average() {
    // ½ ∫_{-1}^{1} v² dv = 1/3
    let q = Cylinder::centered(1, 1.0).unwrap();
    let f = GridField::around_cylinder(&q, 64, |z| z.v[0] * z.v[0]).unwrap();
    assert!((average(&f, &q).unwrap() - 1.0 / 3.0).abs() < 1e-3);
    assert!((mapped_average(&f, &q, 64, |s| s).unwrap() - 1.0 / 3.0).abs() < 1e-3);
}

#[test]
fn kolmogorov_kernel_moments_by_quadrature() {
    let t = 0.5;
    let (n, xr, vr) = (800usize, 2.0, 7.0);
    let (hx, hv) = (2.0 * xr / n as f64, 2.0 * vr / n as f64);
    let (mut m0, mut mxx, mut mvv, mut mxv) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let x = -xr + (i as f64 + 0.5) * hx;
        for j in 0..n {
            let v = -vr + (j as f64 + 0.5) * hv;
            let k = kolmogorov_kernel(t, x, v).unwrap() * hx * hv;
            m0 += k;
            mxx += x * x * k;
            mvv += v * v * k;
            mxv += x * v * k;
        }
    }
    let (ex, ev, ec) = kernel_moments(t);
    assert!((m0 - 1.0).abs() < 1e-6);
    assert!((mxx - ex).abs() < 1e-3 * ex);
    assert!((mvv - ev).abs() < 1e-3 * ev);
    assert!((mxv - ec).abs() < 1e-3 * ec);
}

#[test]
fn integrability_exponents() {
    assert_eq!(solution_gain_exponent(1), 3.0);
    assert_relative_eq!(mean_free_gain_exponent(1), 18.0 / 7.0, max_relative = 1e-15);
    assert_relative_eq!(mean_free_gain_exponent(3), 42.0 / 19.0, max_relative = 1e-15);
}
