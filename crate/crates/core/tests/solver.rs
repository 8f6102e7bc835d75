use std::f64::consts::PI;

use kinetic_gehring::field::{average, mapped_average, GridField};
use kinetic_gehring::kfp::{
    evolved_moments, phase_moments, solve, velocity_gradient_norm, Coefficient, CoefficientField,
    InitialDatum, SolverProblem, TransportScheme, VBoundary,
};
use kinetic_gehring::{Cylinder, Point};

fn kolmogorov_problem(n: usize, scheme: TransportScheme) -> SolverProblem {
    let (x_half, v_half) = (1.5, 6.0);
    let dv = 2.0 * v_half / n as f64;
    let sd = 2.0 * dv;
    SolverProblem {
        t0: -0.5,
        x_half,
        v_half,
        n_t: n,
        n_x: n,
        n_v: n,
        boundary_v: VBoundary::Neumann,
        scheme,
        substeps: None,
        initial: InitialDatum::Gaussian { x0: 0.0, v0: 0.0, var_x: sd * sd * (2.0 * x_half / (2.0 * v_half)).powi(2), var_v: sd * sd },
        coefficients: CoefficientField::pure_diffusion(1.0),
    }
}

#[test]
fn kolmogorov_moments_at_128() {
    let p = kolmogorov_problem(128, TransportScheme::Limited);
    let start = std::time::Instant::now();
    let sol = solve(&p).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let m = phase_moments(&p, &sol.final_state);
    let InitialDatum::Gaussian { var_x, var_v, .. } = p.initial else { unreachable!() };
    let (ex, ev, ec) = evolved_moments(0.5, var_x, var_v, 0.0);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    println!(
        "var_x {:.5} / {ex:.5}, var_v {:.5} / {ev:.5}, cov {:.5} / {ec:.5}, {elapsed:.2}s",
        m.var_x, m.var_v, m.cov_xv
    );
    assert!(rel(m.var_v, ev) < 0.02);
    assert!(rel(m.var_x, ex) < 0.02);
    assert!(rel(m.cov_xv, ec) < 0.02);
    assert!((m.mass - 1.0).abs() < 1e-6);
    assert!(elapsed < 60.0);
}

#[test]
fn kolmogorov_moment_laws_without_initial_spread() {
    let (vx, vv, c) = evolved_moments(0.5, 0.0, 0.0, 0.0);
    assert!((vv - 1.0).abs() < 1e-15);
    assert!((vx - 2.0 * 0.125 / 3.0).abs() < 1e-15);
    assert!((c - 0.25).abs() < 1e-15);
}

fn mms_problem(n: usize) -> SolverProblem {
    let (x_half, v_half) = (1.0, 1.0);
    let kx = PI / x_half;
    let kv = PI / (2.0 * v_half);
    let a = |t: f64, x: f64| 1.5 + 0.5 * (t + x).sin();
    let b = |v: f64| 0.5 * v.cos();
    let exact = move |t: f64, x: f64, v: f64| t.exp() * (kx * x).sin() * (kv * v).cos();
    let source = move |t: f64, x: f64, v: f64| {
        let e = t.exp();
        let f = exact(t, x, v);
        let fx = e * kx * (kx * x).cos() * (kv * v).cos();
        let fv = -e * kv * (kx * x).sin() * (kv * v).sin();
        let fvv = -kv * kv * f;
        f + v * fx - a(t, x) * fvv - b(v) * fv
    };
    SolverProblem {
        t0: -0.5,
        x_half,
        v_half,
        n_t: n,
        n_x: n,
        n_v: n,
        boundary_v: VBoundary::Dirichlet,
        scheme: TransportScheme::Upwind,
        substeps: None,
        initial: InitialDatum::function(move |x, v| exact(-0.5, x, v)),
        coefficients: CoefficientField {
            a: Coefficient::function(move |t, x, _| a(t, x)),
            b: Coefficient::function(move |_, _, v| b(v)),
            s: Coefficient::function(source),
            lambda: 1.0,
            big_lambda: 2.0,
        },
    }
}

fn mms_error(n: usize) -> f64 {
    let p = mms_problem(n);
    let sol = solve(&p).unwrap();
    let kx = PI / p.x_half;
    let kv = PI / (2.0 * p.v_half);
    let cell = p.dx() * p.dv();
    let e2: f64 = sol
        .final_state
        .iter()
        .enumerate()
        .map(|(idx, u)| {
            let (x, v) = (p.x_center(idx / n), p.v_center(idx % n));
            (u - (kx * x).sin() * (kv * v).cos()).powi(2)
        })
        .sum::<f64>()
        * cell;
    e2.sqrt()
}

#[test]
fn manufactured_solution_converges_first_order() {
    let errs: Vec<f64> = [32, 64, 128].iter().map(|&n| mms_error(n)).collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    println!("errors {errs:?}, orders {orders:?}");
    assert!(orders.iter().all(|&o| o >= 0.9), "{orders:?}");
}

#[test]
fn mass_conserved_with_rough_coefficients() {
    for scheme in [TransportScheme::Upwind, TransportScheme::Limited] {
        let p = SolverProblem {
            t0: -1.0,
            x_half: 1.0,
            v_half: 1.0,
            n_t: 40,
            n_x: 40,
            n_v: 40,
            boundary_v: VBoundary::Neumann,
            scheme,
            substeps: None,
            initial: InitialDatum::Bump { amplitude: 1.0, x0: 0.2, v0: -0.1, wx: 0.6, wv: 0.5 },
            coefficients: CoefficientField {
                a: Coefficient::RandomBlocks { low: 1.0, high: 2.0, block: [0.1, 0.13, 0.07], seed: 9 },
                b: Coefficient::constant(0.0),
                s: Coefficient::constant(0.0),
                lambda: 1.0,
                big_lambda: 2.0,
            },
        };
        let sol = solve(&p).unwrap();
        assert!(sol.max_mass_drift() <= 1e-10, "{}", sol.max_mass_drift());
        assert!(sol.max_history.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }
}

fn scaling_base() -> SolverProblem {
    SolverProblem {
        t0: -1.0,
        x_half: 1.5,
        v_half: 1.2,
        n_t: 32,
        n_x: 32,
        n_v: 32,
        boundary_v: VBoundary::Neumann,
        scheme: TransportScheme::Limited,
        substeps: None,
        initial: InitialDatum::Bump { amplitude: 1.0, x0: 0.1, v0: 0.0, wx: 1.0, wv: 0.8 },
        coefficients: CoefficientField {
            a: Coefficient::Checkerboard { low: 1.0, high: 2.0, block: [0.3, 0.4, 0.3] },
            b: Coefficient::RandomBlocks { low: -0.3, high: 0.3, block: [0.3, 0.4, 0.3], seed: 4 },
            s: Coefficient::RandomBlocks { low: -0.5, high: 0.5, block: [0.3, 0.4, 0.3], seed: 5 },
            lambda: 1.0,
            big_lambda: 2.0,
        },
    }
}

#[test]
fn discrete_scaling_law() {
    let r = 0.5;
    let p = scaling_base();
    let q = p.rescaled(r);
    let f = solve(&p).unwrap().field;
    let g = solve(&q).unwrap().field;
    // Cell k of the rescaled grid sits at the preimage of cell k of the
    // original grid.
    let max_diff = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = f.max_value();
    assert!(max_diff <= 1e-9 * scale, "{max_diff}");
    for k in [0, 1000, 20000] {
        let z = g.cell_center(k);
        let image = Point::new(r * r * z.t, &[r.powi(3) * z.x[0]], &[r * z.v[0]]);
        assert!((f.interpolate(&image) - g.values()[k]).abs() <= 1e-9 * scale);
    }
}

#[test]
fn average_identities_under_rescaling() {
    // f̄(t, x, v) = f(r²t, r³x, rv) evaluated analytically on two grids.
    let r: f64 = 0.4;
    let gamma = 1.25;
    let f = |t: f64, x: f64, v: f64| (2.0 * v).sin() * (1.0 + x * x) + t * v * v;
    let s = |t: f64, x: f64, v: f64| (3.0 * x + v).cos() + t;
    let big = Cylinder::centered(1, gamma).unwrap();
    let small = Cylinder::centered(1, gamma * r).unwrap();
    let n = 64;
    let fg = GridField::around_cylinder(&small, n, |p| f(p.t, p.x[0], p.v[0])).unwrap();
    let fb = GridField::around_cylinder(&big, n, |p| f(r * r * p.t, r.powi(3) * p.x[0], r * p.v[0])).unwrap();
    let sg = GridField::around_cylinder(&small, n, |p| s(p.t, p.x[0], p.v[0])).unwrap();
    let sb = GridField::around_cylinder(&big, n, |p| r * r * s(r * r * p.t, r.powi(3) * p.x[0], r * p.v[0])).unwrap();
    let gf = velocity_gradient_norm(&fg);
    let gb = velocity_gradient_norm(&fb);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let nodes = 32;

    let q_r = Cylinder::centered(1, r).unwrap();
    let q_1 = Cylinder::centered(1, 1.0).unwrap();
    let lhs = mapped_average(&gf, &q_r, nodes, |v| v * v).unwrap();
    let rhs = r.powi(-2) * mapped_average(&gb, &q_1, nodes, |v| v * v).unwrap();
    assert!(rel(lhs, rhs) < 1e-9, "{lhs} {rhs}");

    let lhs = mapped_average(&gf, &small, nodes, |v| v).unwrap();
    let rhs = mapped_average(&gb, &big, nodes, |v| v).unwrap() / r;
    assert!(rel(lhs, rhs) < 1e-9, "{lhs} {rhs}");

    let lhs = mapped_average(&sg, &small, nodes, |v| v * v).unwrap();
    let rhs = r.powi(-4) * mapped_average(&sb, &big, nodes, |v| v * v).unwrap();
    assert!(rel(lhs, rhs) < 1e-9, "{lhs} {rhs}");

    // Cell-count quadrature agrees to discretisation accuracy.
    let lhs = average(&sg.map(|v| v * v), &small).unwrap();
    let rhs = r.powi(-4) * average(&sb.map(|v| v * v), &big).unwrap();
    assert!(rel(lhs, rhs) < 5e-2, "{lhs} {rhs}");
}

#[test]
fn upwind_transport_smears_the_position_variance() {
    let rel_err = |scheme| {
        let p = kolmogorov_problem(128, scheme);
        let sol = solve(&p).unwrap();
        let m = phase_moments(&p, &sol.final_state);
        let InitialDatum::Gaussian { var_x, var_v, .. } = p.initial else { unreachable!() };
        let (ex, _, _) = evolved_moments(0.5, var_x, var_v, 0.0);
        (m.var_x - ex).abs() / ex
    };
    let upwind = rel_err(TransportScheme::Upwind);
    let limited = rel_err(TransportScheme::Limited);
    println!("var_x relative error: upwind {upwind:.4}, limited {limited:.4}");
    assert!(upwind > limited);
}
