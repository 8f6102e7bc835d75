use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::Context;
use crate::covering::{verify_covering, vitali_select};
use crate::error::Result;
use crate::geometry::{compose, contained_in, intersects, inverse, shift_scale_5q, Cylinder, Point};
use crate::harness::report::{CheckRecord, Table};
use crate::sampling::{random_point, stream_rng};

fn random_cylinder<R: Rng>(rng: &mut R, d: usize) -> Cylinder {
    let t = rng.gen_range(-2.0..0.0);
    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = (rng.gen_range(0.05f64.ln()..0.5f64.ln())).exp();
    Cylinder::new(Point::new(t, &x, &v), r).expect("positive radius")
}

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.covering.clone();
    let seed = ctx.seed(2);
    let start = Instant::now();
    let reports: Vec<_> = (0..cfg.families)
        .into_par_iter()
        .map(|f| -> Result<_> {
            let mut rng = stream_rng(seed, f as u64);
            let d = 1 + f % 2;
            let size = rng.gen_range(1..=cfg.max_family_size.max(1));
            let family: Vec<Cylinder> = (0..size).map(|_| random_cylinder(&mut rng, d)).collect();
            let result = vitali_select(&family)?;
            let per = (cfg.samples_per_family / size).max(1);
            verify_covering(&family, &result, per)
        })
        .collect::<Result<Vec<_>>>()?;
    let seconds = start.elapsed().as_secs_f64();
    let mut table = Table::new("covering_families", &["family", "size", "selected", "samples", "escapes", "overlaps", "assignment_failures"]);
    for (i, r) in reports.iter().enumerate() {
        table.push(&[i, r.family_size, r.selected, r.samples, r.escapes, r.overlaps, r.assignment_failures]);
    }
    ctx.table(table);
    let escapes: usize = reports.iter().map(|r| r.escapes).sum();
    let overlaps: usize = reports.iter().map(|r| r.overlaps).sum();
    let assign: usize = reports.iter().map(|r| r.assignment_failures).sum();
    let samples: usize = reports.iter().map(|r| r.samples).sum();
    let inputs = (seed, &cfg.families, &cfg.max_family_size, &cfg.samples_per_family);
    ctx.push(
        CheckRecord::new("vitali disjointness", "Vitali covering", &inputs)
            .measure("families", reports.len())
            .measure("overlapping_pairs", overlaps)
            .threshold("== 0")
            .verdict(overlaps == 0),
    );
    ctx.push(
        CheckRecord::new("vitali sampled cover", "Vitali covering", &inputs)
            .measure("samples", samples)
            .measure("escapes", escapes)
            .measure("assignment_failures", assign)
            .threshold("== 0")
            .verdict(escapes == 0 && assign == 0),
    );
    ctx.push(
        CheckRecord::new("vitali runtime", "Vitali covering", &inputs)
            .measure("seconds", seconds)
            .threshold("< 120 s")
            .verdict(seconds < 120.0),
    );

    // Q1 meets Q2 and r1 <= 2 r2 imply Q1 ⊂ 5Q2.
    let kseed = ctx.seed(3);
    let outcomes: Vec<(bool, bool)> = (0..cfg.kernel_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(kseed, i as u64);
            let d = 1 + i % 2;
            loop {
                let q2 = random_cylinder(&mut rng, d);
                let r1 = q2.radius * 2.0 * rng.gen::<f64>().max(1e-3);
                // A common point p = z1 ∘ w with w in Q_{r1}(0).
                let p = random_point(&q2, &mut rng);
                let w = random_point(&Cylinder::centered(d, r1).expect("positive"), &mut rng);
                let z1 = compose(&p, &inverse(&w));
                if z1.t > 0.0 {
                    continue;
                }
                let q1 = Cylinder::new(z1, r1).expect("positive");
                let meets = intersects(&q1, &q2);
                let big = shift_scale_5q(&q2).expect("non-positive centre time");
                return (meets, contained_in(&q1, &big));
            }
        })
        .collect();
    let constructed = outcomes.iter().filter(|o| o.0).count();
    let failures = outcomes.iter().filter(|o| o.0 && !o.1).count();
    let mut rec = CheckRecord::new("vitali kernel containment", "Vitali covering", &(kseed, cfg.kernel_pairs))
        .measure("pairs", cfg.kernel_pairs)
        .measure("intersecting_pairs", constructed)
        .measure("containment_failures", failures)
        .threshold("== 0")
        .verdict(failures == 0);
    if constructed < cfg.kernel_pairs {
        rec = rec.warn(format!(
            "{} constructed pairs met only on a boundary and were not tested",
            cfg.kernel_pairs - constructed
        ));
    }
    ctx.push(rec);
    Ok(())
}
