use rand::Rng;

use super::Context;
use crate::error::Result;
use crate::field::GridField;
use crate::geometry::Cylinder;
use crate::harness::report::{CheckRecord, Table};
use crate::kfp::{
    bogovskii_solve, convergence_orders, demean, kolmogorov_moments, manufactured_error, poincare_check,
    rough_conservation_problem, solve, InitialDatum, RectGrid,
};
use crate::sampling::stream_rng;

const FP: &str = "Fokker-Planck discretisation";

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.solver.clone();
    let scheme = cfg.scheme;

    // Second moments against the Kolmogorov kernel.
    let m = kolmogorov_moments(cfg.moment_resolution, cfg.moment_time, scheme)?;
    let err = m.max_rel_error();
    ctx.push(
        CheckRecord::new("kolmogorov moments", "Kolmogorov kernel", &(cfg.moment_resolution, cfg.moment_time, scheme))
            .measure("var_x", m.var_x)
            .measure("var_v", m.var_v)
            .measure("cov_xv", m.cov_xv)
            .measure("expected_var_x", m.expected_var_x)
            .measure("expected_var_v", m.expected_var_v)
            .measure("expected_cov_xv", m.expected_cov_xv)
            .measure("max_rel_error", err)
            .threshold(format!("<= {}", cfg.moment_tolerance))
            .verdict(err <= cfg.moment_tolerance),
    );
    ctx.push(
        CheckRecord::new("kolmogorov runtime", "Kolmogorov kernel", &(cfg.moment_resolution, scheme))
            .measure("seconds", m.seconds)
            .measure("max_mass_drift", m.max_mass_drift)
            .threshold("< 60 s")
            .verdict(m.seconds < 60.0),
    );

    // Manufactured solution on successive grids.
    let errors = cfg
        .mms_resolutions
        .iter()
        .map(|&n| manufactured_error(n, scheme))
        .collect::<Result<Vec<_>>>()?;
    let ratio = match cfg.mms_resolutions.as_slice() {
        [a, b, ..] => *b as f64 / *a as f64,
        _ => 2.0,
    };
    let orders = convergence_orders(&errors, ratio);
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut table = Table::new("mms", &["n", "l2_error", "order"]);
    for (k, (n, e)) in cfg.mms_resolutions.iter().zip(&errors).enumerate() {
        let o = if k == 0 { String::new() } else { orders[k - 1].to_string() };
        table.push(&[n.to_string(), e.to_string(), o]);
    }
    ctx.table(table);
    ctx.push(
        CheckRecord::new("manufactured convergence", FP, &(&cfg.mms_resolutions, scheme))
            .measure("errors", &errors)
            .measure("orders", &orders)
            .measure("min_order", min_order)
            .threshold(format!(">= {}", cfg.min_order))
            .verdict(orders.len() >= 1 && min_order >= cfg.min_order),
    );

    // Mass, maximum principle and constants under rough coefficients.
    let seed = ctx.seed(30);
    let p = rough_conservation_problem(cfg.conservation_resolution, scheme, seed);
    let sol = solve(&p)?;
    let drift = sol.max_mass_drift();
    let max_ok = sol.max_history.windows(2).all(|w| w[1] <= w[0] + 1e-14);
    ctx.push(
        CheckRecord::new("mass conservation", FP, &(cfg.conservation_resolution, scheme, seed))
            .measure("max_mass_drift_per_step", drift)
            .measure("substeps", sol.substeps)
            .measure("max_non_increasing", max_ok)
            .threshold("<= 1e-10")
            .verdict(drift <= 1e-10 && max_ok),
    );
    let mut constant = p.clone();
    constant.initial = InitialDatum::function(|_, _| 1.0);
    let sol = solve(&constant)?;
    let dev = sol.field.values().iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max);
    ctx.push(
        CheckRecord::new("constants preserved", FP, &(cfg.conservation_resolution, scheme, seed))
            .measure("max_deviation", dev)
            .threshold("<= 1e-12")
            .verdict(dev <= 1e-12),
    );

    // Divergence right inverse on the unit square.
    let n = cfg.bogovskii_resolution;
    let grid = RectGrid::new(n, n, 1.0, 1.0)?;
    let seed = ctx.seed(31);
    let mut worst_residual: f64 = 0.0;
    let mut worst_boundary: f64 = 0.0;
    let mut worst_stability: f64 = 0.0;
    let mut table = Table::new("bogovskii", &["source", "residual", "stability", "stability_p", "iterations"]);
    for k in 0..cfg.bogovskii_sources {
        let mut rng = stream_rng(seed, k as u64);
        let g: Vec<f64> = (0..grid.cells()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sol = bogovskii_solve(&grid, &demean(&g), 2.0)?;
        worst_residual = worst_residual.max(sol.residual);
        worst_boundary = worst_boundary.max(sol.boundary_max());
        worst_stability = worst_stability.max(sol.stability);
        table.push(&[k.to_string(), sol.residual.to_string(), sol.stability.to_string(), sol.stability_p.to_string(), sol.iterations.to_string()]);
    }
    ctx.table(table);
    let inputs = (n, cfg.bogovskii_sources, seed);
    ctx.push(
        CheckRecord::new("bogovskii residual", "divergence right inverse", &inputs)
            .measure("max_relative_residual", worst_residual)
            .measure("max_boundary_value", worst_boundary)
            .threshold("<= 1e-8, boundary == 0")
            .verdict(worst_residual <= 1e-8 && worst_boundary == 0.0),
    );
    ctx.pinned("bogovskii_stability", "divergence right inverse", &inputs, worst_stability);

    // f = v: the mean-free part over Q_1 against ‖∇_v f‖ is (1/3)^{1/2}.
    let unit = Cylinder::centered(1, 1.0)?;
    let f = GridField::around_cylinder(&Cylinder::centered(1, 1.2)?, cfg.poincare_resolution, |z| z.v[0])?;
    let r = poincare_check(&f, None, &unit, 2.0)?;
    let c = r.gradient_constant.unwrap_or(f64::NAN);
    let expected = (1.0f64 / 3.0).sqrt();
    let e = (c - expected).abs() / expected;
    ctx.push(
        CheckRecord::new("poincare velocity field", "hypoelliptic Poincaré inequality", &cfg.poincare_resolution)
            .measure("lhs_over_gradient", c)
            .measure("expected", expected)
            .measure("rel_error", e)
            .measure("transport_dual", r.transport_dual)
            .threshold("<= 1e-2")
            .verdict(e <= 1e-2),
    );
    Ok(())
}
