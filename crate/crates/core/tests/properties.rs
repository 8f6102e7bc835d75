use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use kinetic_gehring::constants::{c_pq_exact, seventy_five_identity};
use kinetic_gehring::covering::vitali_select;
use kinetic_gehring::field::{average_pow, geometric_levels, layer_cake, stieltjes_moment, GridField};
use kinetic_gehring::geometry::{
    compose, contained_in, dilate, homogeneous_dimension, intersects, inverse, shift_scale_5q, volume,
};
use kinetic_gehring::kfp::solve_tridiagonal;
use kinetic_gehring::localization::{c_gamma, zeta_gamma};
use kinetic_gehring::sampling::{random_point, stream_rng};
use kinetic_gehring::{Cylinder, Point};

fn close(a: &Point, b: &Point, tol: f64) -> bool {
    a.to_flat().iter().zip(b.to_flat()).all(|(p, q)| (p - q).abs() <= tol * (1.0 + p.abs().max(q.abs())))
}

fn point(d: usize) -> impl Strategy<Value = Point> {
    (-3.0..3.0f64, prop::collection::vec(-3.0..3.0f64, d), prop::collection::vec(-3.0..3.0f64, d))
        .prop_map(|(t, x, v)| Point::new(t, &x, &v))
}

fn past_cylinder() -> impl Strategy<Value = Cylinder> {
    (-2.0..0.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.05..0.6f64)
        .prop_map(|(t, x, v, r)| Cylinder::new(Point::new(t, &[x], &[v]), r).unwrap())
}

proptest! {
    #[test]
    fn composition_matches_coordinates(a in point(1), b in point(1)) {
        // (t0 + t, x0 + x + t v0, v0 + v)
        let expected = Point::new(a.t + b.t, &[a.x[0] + b.x[0] + b.t * a.v[0]], &[a.v[0] + b.v[0]]);
        prop_assert!(close(&compose(&a, &b), &expected, 1e-14));
    }

    #[test]
    fn group_axioms(a in point(2), b in point(2), c in point(2)) {
        prop_assert!(close(&compose(&compose(&a, &b), &c), &compose(&a, &compose(&b, &c)), 1e-12));
        prop_assert!(close(&compose(&a, &inverse(&a)), &Point::origin(2), 1e-12));
        prop_assert!(close(&compose(&inverse(&a), &a), &Point::origin(2), 1e-12));
    }

    #[test]
    fn dilation_is_a_homomorphism(a in point(2), b in point(2), r in 0.1..10.0f64, s in 0.1..10.0f64) {
        let lhs = dilate(r, &compose(&a, &b)).unwrap();
        let rhs = compose(&dilate(r, &a).unwrap(), &dilate(r, &b).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
        let twice = dilate(r, &dilate(s, &a).unwrap()).unwrap();
        prop_assert!(close(&twice, &dilate(r * s, &a).unwrap(), 1e-12));
    }

    #[test]
    fn volume_scales_with_homogeneous_dimension(c in point(1), r in 0.01..20.0f64) {
        // |Q_1| = 1 · |B_1| · |B_1| = 4 in d = 1.
        let v = volume(&Cylinder::new(c, r).unwrap());
        let expected = 4.0 * r.powi(homogeneous_dimension(1));
        prop_assert!((v - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn cut_off_is_half_lipschitz(seed in any::<u64>(), gamma in 1.05..3.0f64) {
        let container = Cylinder::centered(1, gamma).unwrap();
        let mut rng = stream_rng(seed, 0);
        let z0 = random_point(&container, &mut rng);
        let r = 0.5 * gamma * rand::Rng::gen::<f64>(&mut rng);
        let q = Cylinder::new(z0.clone(), r).unwrap();
        prop_assume!(contained_in(&q, &container));
        let z = random_point(&q, &mut rng);
        prop_assert!((zeta_gamma(gamma, &z) - zeta_gamma(gamma, &z0)).abs() <= 0.5 * r + 1e-12);
    }

    #[test]
    fn cut_off_bounds(seed in any::<u64>(), gamma in 1.05..3.0f64) {
        let mut rng = stream_rng(seed, 1);
        let z = random_point(&Cylinder::centered(1, 1.0).unwrap(), &mut rng);
        let zeta = zeta_gamma(gamma, &z);
        prop_assert!(zeta <= gamma / 5.0 + 1e-15);
        prop_assert!(zeta >= c_gamma(gamma, 1).unwrap());
    }

    #[test]
    fn small_cylinders_dilate_inside_container(seed in any::<u64>(), gamma in 1.05..3.0f64, u in 0.0..1.0f64) {
        let container = Cylinder::centered(1, gamma).unwrap();
        let z0 = random_point(&container, &mut stream_rng(seed, 2));
        let zeta = zeta_gamma(gamma, &z0);
        prop_assume!(zeta > 0.0 && u > 0.0);
        let q = Cylinder::new(z0, 2.0 * zeta * u).unwrap();
        prop_assert!(contained_in(&shift_scale_5q(&q).unwrap(), &container));
    }

    #[test]
    fn vitali_selection_is_disjoint_and_covers(family in prop::collection::vec(past_cylinder(), 1..25)) {
        let res = vitali_select(&family).unwrap();
        for i in 0..res.cylinders.len() {
            for j in i + 1..res.cylinders.len() {
                prop_assert!(!intersects(&res.cylinders[i], &res.cylinders[j]));
            }
        }
        let big = res.dilated().unwrap();
        for (q, &a) in family.iter().zip(&res.assignment) {
            prop_assert!(contained_in(q, &big[a]));
        }
    }

    #[test]
    fn averages_are_monotone_in_the_exponent(seed in any::<u64>(), p in 1.0..4.0f64, dp in 0.0..3.0f64) {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let base = GridField::around_cylinder(&q, 12, |_| 0.0).unwrap();
        let mut rng = stream_rng(seed, 3);
        let vals = (0..base.len()).map(|_| rand::Rng::gen_range(&mut rng, -2.0..2.0)).collect();
        let f = base.with_values(vals).unwrap();
        let lo = average_pow(&f, &q, p).unwrap().powf(1.0 / p);
        let hi = average_pow(&f, &q, p + dp).unwrap().powf(1.0 / (p + dp));
        prop_assert!(lo <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn level_function_is_non_increasing(amp in 1.5..6.0f64, w in 0.5..4.0f64) {
        let q = Cylinder::centered(1, 1.0).unwrap();
        let f = GridField::around_cylinder(&q, 16, |z| amp * (-w * (z.t * z.t + z.x[0] * z.x[0] + z.v[0] * z.v[0])).exp()).unwrap();
        let levels = geometric_levels(amp, 64);
        let l = layer_cake(&f, &q, &levels).unwrap();
        prop_assert!(l.values.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(l.measures.windows(2).all(|p| p[1] <= p[0]));
        // r = 1 telescopes back to the level function.
        let t = levels[10];
        let m = stieltjes_moment(&l, 1.0, t).unwrap();
        prop_assert!((m - l.values[10]).abs() <= 1e-12 * (1.0 + l.values[10]));
    }

    #[test]
    fn c_pq_at_q_is_twice_a(num in 2u64..10_000, den in 1u64..100, q in 2i64..6) {
        let a = BigRational::new(BigInt::from(num + den), BigInt::from(den));
        let q = BigRational::from_integer(BigInt::from(q));
        prop_assert_eq!(c_pq_exact(&a, &q, &q), BigRational::from_integer(BigInt::from(2)) * &a);
    }

    #[test]
    fn tridiagonal_solve_has_small_residual(diag in prop::collection::vec(3.0..5.0f64, 2..40), seed in any::<u64>()) {
        let n = diag.len();
        let mut rng = stream_rng(seed, 4);
        let mut g = || rand::Rng::gen_range(&mut rng, -1.0..1.0);
        let sub: Vec<f64> = (0..n).map(|_| g()).collect();
        let sup: Vec<f64> = (0..n).map(|_| g()).collect();
        let rhs: Vec<f64> = (0..n).map(|_| g()).collect();
        let mut u = rhs.clone();
        solve_tridiagonal(&sub, &diag, &sup, &mut u);
        for j in 0..n {
            let mut row = diag[j] * u[j];
            if j > 0 { row += sub[j] * u[j - 1]; }
            if j + 1 < n { row += sup[j] * u[j + 1]; }
            prop_assert!((row - rhs[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn seventy_five_identity_holds_up_to_dimension_eight() {
    assert!((1..=8).all(seventy_five_identity));
}
