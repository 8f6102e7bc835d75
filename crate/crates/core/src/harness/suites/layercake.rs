use super::{rel, Context};
use crate::error::Result;
use crate::field::{geometric_levels, layer_cake, stieltjes_moment, GridField};
use crate::geometry::{Cylinder, Point};
use crate::harness::report::{CheckRecord, Table};

const REF: &str = "layer-cake identities";
const ORDERS: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
const THRESHOLDS: [f64; 5] = [1.0, 1.25, 1.5, 2.0, 3.0];

fn field(name: &str, z: &Point) -> f64 {
    let (t, x, v) = (z.t, z.x[0], z.v[0]);
    match name {
        "g" => 4.0 * (-(t + 0.4).powi(2) * 3.0 - x * x * 4.0 - v * v * 2.5).exp(),
        _ => 1.0 + 2.5 * (0.5 + 0.5 * (2.0 * v + x).sin()) * (1.0 + t).max(0.0),
    }
}

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.layercake.clone();
    let domain = Cylinder::centered(1, 1.0)?;
    let tol = cfg.tolerance;
    let mut table = Table::new("layercake", &["field", "identity", "r", "t", "lhs", "rhs", "rel_error"]);
    for name in ["g", "h"] {
        let f = GridField::around_cylinder(&domain, cfg.resolution, |z| field(name, z))?;
        let mut peak: f64 = 0.0;
        f.for_each_cell_in(&domain, |i| peak = peak.max(f.values()[i]));
        let levels = geometric_levels(peak, cfg.levels.max(2));
        let l = layer_cake(&f, &domain, &levels)?;
        let inputs = (name, cfg.resolution, cfg.levels);
        let mut worst_stieltjes: f64 = 0.0;
        let mut worst_level: f64 = 0.0;
        for &t in THRESHOLDS.iter().filter(|&&t| t < 0.75 * peak) {
            // Thresholds snap to the grid of levels.
            let k = l.level_index(t).expect("threshold below peak");
            let ts = levels[k];
            for &r in &ORDERS {
                let lhs = stieltjes_moment(&l, r, ts)?;
                let rhs = f.cylinder_sum(&domain, |s| if s > ts { s.powf(r) } else { 0.0 })?.integral();
                let e = rel(lhs, rhs);
                worst_stieltjes = worst_stieltjes.max(e);
                table.push(&[name.into(), "stieltjes".into(), r.to_string(), ts.to_string(), lhs.to_string(), rhs.to_string(), e.to_string()]);
            }
            // 𝓰(t) = t |𝔤(t)| + ∫_t^∞ |𝔤(s)| ds, the integral by trapezoids on the level grid.
            let tail: f64 = (k..levels.len() - 1)
                .map(|j| 0.5 * (l.measures[j] + l.measures[j + 1]) * (levels[j + 1] - levels[j]))
                .sum();
            let rhs = ts * l.measures[k] + tail;
            let e = rel(l.values[k], rhs);
            worst_level = worst_level.max(e);
            table.push(&[name.into(), "level".into(), "1".into(), ts.to_string(), l.values[k].to_string(), rhs.to_string(), e.to_string()]);
        }
        let monotone = l.values.windows(2).all(|w| w[1] <= w[0]);
        ctx.push(
            CheckRecord::new(&format!("stieltjes moments {name}"), REF, &inputs)
                .measure("peak", peak)
                .measure("max_rel_error", worst_stieltjes)
                .threshold(format!("<= {tol:e}"))
                .verdict(peak > 1.0 && worst_stieltjes <= tol),
        );
        ctx.push(
            CheckRecord::new(&format!("level function identity {name}"), REF, &inputs)
                .measure("max_rel_error", worst_level)
                .measure("non_increasing", monotone)
                .threshold(format!("<= {tol:e}"))
                .verdict(monotone && worst_level <= tol),
        );
    }
    ctx.table(table);
    Ok(())
}
