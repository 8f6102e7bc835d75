use rand::Rng;
use rayon::prelude::*;

use super::Context;
use crate::error::Result;
use crate::field::{mapped_average, GridField};
use crate::geometry::{contained_in, shift_scale_5q, Cylinder, Point};
use crate::harness::report::{CheckRecord, Table};
use crate::localization::{c_gamma, localize, zeta_gamma, LocalizationContext};
use crate::sampling::{random_point, stream_rng};

/// Quadrature nodes per axis for cylinder averages of `𝐠^q`.
const NODES: usize = 12;

fn synthetic(k: usize) -> (&'static str, fn(&Point) -> f64) {
    match k {
        0 => ("constant", |_| 1.0),
        1 => ("gaussian", |z| (-(z.t + 0.6).powi(2) - z.x[0] * z.x[0] - 2.0 * z.v[0] * z.v[0]).exp()),
        _ => ("spike", |z| {
            let s = 40.0 * ((z.t + 0.3).powi(2) + 4.0 * (z.x[0] - 0.1).powi(2) + (z.v[0] + 0.2).powi(2));
            0.05 + (-s).exp() * 20.0
        }),
    }
}

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.localization.clone();
    let gamma = ctx.config.params.gamma;
    let q_exp = ctx.config.params.q;
    let d = ctx.config.params.d.max(1);
    let container = Cylinder::centered(d, gamma)?;

    // |ζ(z) - ζ(z0)| <= r/2 for z in Q_r(z0) ⊂ Q_γ.
    let seed = ctx.seed(10);
    let worst = (0..cfg.lipschitz_triples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            loop {
                let z0 = random_point(&container, &mut rng);
                let r = gamma * rng.gen::<f64>().powi(2);
                let Ok(q) = Cylinder::new(z0.clone(), r) else { continue };
                if !contained_in(&q, &container) {
                    continue;
                }
                let z = random_point(&q, &mut rng);
                return (zeta_gamma(gamma, &z) - zeta_gamma(gamma, &z0)).abs() - 0.5 * r;
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let mut rec = CheckRecord::new("cut-off lipschitz", "cut-off Lipschitz bound", &(seed, gamma, d, cfg.lipschitz_triples))
        .measure("max_excess_over_half_r", worst)
        .measure("triples", cfg.lipschitz_triples)
        .threshold("<= 1e-12")
        .verdict(worst <= 1e-12);
    if cfg.lipschitz_triples == 0 {
        rec = rec.warn("no samples; vacuous pass");
    }
    ctx.push(rec);

    // r <= 2ζ(z0) gives 5Q_r(z0) ⊂ Q_γ.
    let seed = ctx.seed(11);
    let failures = (0..cfg.inclusion_pairs)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = stream_rng(seed, i as u64);
            loop {
                let z0 = random_point(&container, &mut rng);
                let zeta = zeta_gamma(gamma, &z0);
                if zeta <= 0.0 {
                    continue;
                }
                let r = 2.0 * zeta * (1.0 - rng.gen::<f64>());
                let q = Cylinder::new(z0, r).expect("positive radius");
                return match shift_scale_5q(&q) {
                    Ok(big) => !contained_in(&big, &container),
                    Err(_) => true,
                };
            }
        })
        .count();
    ctx.push(
        CheckRecord::new("dilated cylinder inclusion", "dilated cylinder inclusion", &(seed, gamma, d, cfg.inclusion_pairs))
            .measure("pairs", cfg.inclusion_pairs)
            .measure("failures", failures)
            .threshold("== 0")
            .verdict(failures == 0),
    );

    // ζ >= c_γ on Q_1.
    let seed = ctx.seed(12);
    let cg = c_gamma(gamma, d)?;
    let unit = Cylinder::centered(d, 1.0)?;
    let min_zeta = (0..cfg.lower_bound_samples)
        .into_par_iter()
        .map(|i| zeta_gamma(gamma, &random_point(&unit, &mut stream_rng(seed, i as u64))))
        .reduce(|| f64::INFINITY, f64::min);
    ctx.push(
        CheckRecord::new("cut-off lower bound", "cut-off lower bound", &(seed, gamma, d, cfg.lower_bound_samples))
            .measure("c_gamma", cg)
            .measure("min_sampled_zeta", min_zeta)
            .threshold(">= c_gamma")
            .verdict(cfg.lower_bound_samples == 0 || min_zeta >= cg),
    );

    // ⨍_{Q_r(z0)} 𝐠^q <= 1 for r > (2/3)ζ(z0).
    if d != 1 {
        ctx.push(
            CheckRecord::new("localized normalisation", "localized normalisation", &d)
                .verdict(true)
                .warn("normalisation check runs in d = 1 only; skipped"),
        );
        return Ok(());
    }
    let seed = ctx.seed(13);
    let tol = cfg.tolerance;
    let mut table = Table::new("normalisation", &["field", "cylinders", "max_average", "mean_average"]);
    let mut worst_all: f64 = 0.0;
    let mut rec = CheckRecord::new(
        "localized normalisation",
        "localized normalisation",
        &(seed, gamma, q_exp, cfg.resolution, cfg.normalisation_cylinders),
    );
    for k in 0..3 {
        let (name, f) = synthetic(k);
        let g = GridField::around_cylinder(&container, cfg.resolution, f)?;
        let lctx = LocalizationContext::for_field(&g, gamma, q_exp)?;
        let bold = localize(&lctx, &g)?;
        let avgs: Vec<f64> = (0..cfg.normalisation_cylinders)
            .into_par_iter()
            .map(|i| -> Result<f64> {
                let mut rng = stream_rng(seed ^ ((k as u64) << 40), i as u64);
                loop {
                    let z0 = random_point(&container, &mut rng);
                    let zeta = zeta_gamma(gamma, &z0);
                    if zeta <= 0.0 {
                        continue;
                    }
                    let lo = 2.0 * zeta / 3.0;
                    let r = lo + (gamma - lo) * rng.gen::<f64>().powi(3);
                    let q = Cylinder::new(z0, r)?;
                    if !contained_in(&q, &container) || !bold.contains_cylinder(&q) {
                        continue;
                    }
                    return mapped_average(&bold, &q, NODES, |s| s.abs().powf(q_exp));
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let max = avgs.iter().cloned().fold(0.0, f64::max);
        let mean = if avgs.is_empty() { 0.0 } else { avgs.iter().sum::<f64>() / avgs.len() as f64 };
        table.push(&[name.to_string(), avgs.len().to_string(), format!("{max:e}"), format!("{mean:e}")]);
        worst_all = worst_all.max(max);
        rec = rec.measure(&format!("max_average_{name}"), max);
    }
    ctx.table(table);
    ctx.push(
        rec.measure("max_average", worst_all)
            .threshold(format!("<= 1 + {tol:e}"))
            .verdict(worst_all <= 1.0 + tol),
    );
    Ok(())
}
