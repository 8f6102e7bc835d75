use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::{rel, Context};
use crate::error::Result;
use crate::field::GridField;
use crate::geometry::{compose, dilate, homogeneous_dimension, inverse, volume, Cylinder, Point};
use crate::harness::report::CheckRecord;
use crate::sampling::stream_rng;

const TOL: f64 = 1e-12;

fn random_point<R: Rng>(rng: &mut R, d: usize) -> Point {
    let mut c = || rng.gen_range(-2.0..2.0);
    let t = c();
    let x: Vec<f64> = (0..d).map(|_| c()).collect();
    let v: Vec<f64> = (0..d).map(|_| c()).collect();
    Point::new(t, &x, &v)
}

/// Largest componentwise `|a - b| / (1 + max(|a|, |b|))`.
fn distance(a: &Point, b: &Point) -> f64 {
    a.to_flat()
        .iter()
        .zip(b.to_flat())
        .map(|(p, q)| (p - q).abs() / (1.0 + p.abs().max(q.abs())))
        .fold(0.0, f64::max)
}

pub fn run(ctx: &mut Context) -> Result<()> {
    let cfg = ctx.config.geometry.clone();
    let seed = ctx.seed(1);
    let n = cfg.samples;
    let max_dim = cfg.max_dim.max(1);
    let start = Instant::now();
    let errors: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let d = 1 + i % max_dim;
            let (a, b, c) = (random_point(&mut rng, d), random_point(&mut rng, d), random_point(&mut rng, d));
            let assoc = distance(&compose(&compose(&a, &b), &c), &compose(&a, &compose(&b, &c)));
            let o = Point::origin(d);
            let inv = distance(&compose(&a, &inverse(&a)), &o).max(distance(&compose(&inverse(&a), &a), &o));
            let r = (rng.gen_range(-2.3f64..2.3)).exp();
            let lhs = dilate(r, &compose(&a, &b)).expect("positive scale");
            let rhs = compose(&dilate(r, &a).expect("positive scale"), &dilate(r, &b).expect("positive scale"));
            (assoc, inv, distance(&lhs, &rhs))
        })
        .collect();
    let seconds = start.elapsed().as_secs_f64();
    let worst = errors.iter().fold((0.0f64, 0.0f64, 0.0f64), |m, e| (m.0.max(e.0), m.1.max(e.1), m.2.max(e.2)));
    let inputs = (seed, n, max_dim);
    for (name, reference, err) in [
        ("group associativity", "group law", worst.0),
        ("group inverse", "group law", worst.1),
        ("dilation homomorphism", "dilation", worst.2),
    ] {
        let mut rec = CheckRecord::new(name, reference, &inputs)
            .measure("max_rel_error", err)
            .measure("instances", n)
            .threshold(format!("<= {TOL:e}"))
            .verdict(err <= TOL);
        if n == 0 {
            rec = rec.warn("no samples; vacuous pass");
        }
        ctx.push(rec);
    }
    ctx.push(
        CheckRecord::new("group axioms runtime", "group law", &inputs)
            .measure("seconds", seconds)
            .threshold("< 1 s")
            .verdict(seconds < 1.0),
    );

    // Exact scaling of the volume.
    let mut worst_scaling: f64 = 0.0;
    let mut rng = stream_rng(seed, u64::MAX);
    for d in 1..=max_dim {
        let q1 = volume(&Cylinder::centered(d, 1.0)?);
        for _ in 0..16 {
            let r: f64 = rng.gen_range(0.05..5.0);
            let qr = volume(&Cylinder::new(random_point(&mut rng, d), r)?);
            worst_scaling = worst_scaling.max(rel(qr, r.powi(homogeneous_dimension(d)) * q1));
        }
    }
    ctx.push(
        CheckRecord::new("volume scaling law", "cylinder volume", &(seed, max_dim))
            .measure("max_rel_error", worst_scaling)
            .threshold(format!("<= {TOL:e}"))
            .verdict(worst_scaling <= TOL),
    );

    // Quadrature volume on a grid around the cylinder.
    let res = cfg.volume_resolution;
    let tol = 2.0 / res as f64;
    let mut rec = CheckRecord::new("quadrature volume", "cylinder volume", &(seed, res));
    let mut worst_axis: f64 = 0.0;
    for (k, (center, r)) in [
        (Point::origin(1), 1.0),
        (Point::new(-0.3, &[0.2], &[0.7]), 0.6),
        (Point::new(0.4, &[-1.0], &[-0.5]), 1.7),
    ]
    .into_iter()
    .enumerate()
    {
        let q = Cylinder::new(center, r)?;
        let g = GridField::around_cylinder(&q, res, |_| 1.0)?;
        let counted = g.counted_volume(&q)?;
        let err = rel(counted, volume(&q));
        // Relative error per axis of a three-axis product.
        let per_axis = err / 3.0;
        worst_axis = worst_axis.max(per_axis);
        rec = rec.measure(&format!("rel_error_{k}"), err);
    }
    ctx.push(
        rec.measure("max_rel_error_per_axis", worst_axis)
            .threshold(format!("<= 2/n = {tol}"))
            .verdict(worst_axis <= tol),
    );
    Ok(())
}
