//! Empirical reverse Hölder constants and the final Gehring inequality check.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{average_pow, GridField};
use crate::constants::{p_star, GehringParams};
use crate::error::{KgError, Result};
use crate::geometry::{contained_in, Cylinder, Point};
use crate::sampling::{random_point, stream_rng};

/// Smallest radius whose cylinder spans at least `cells` cells along every
/// axis of `f`'s grid.
pub fn min_resolved_radius(f: &GridField, cells: f64) -> f64 {
    let d = f.dim();
    let mut r: f64 = (cells * f.spacing(0)).sqrt();
    for k in 0..d {
        r = r.max((0.5 * cells * f.spacing(1 + k)).cbrt());
        r = r.max(0.5 * cells * f.spacing(1 + d + k));
    }
    r
}

/// Largest `R` with `Q_{γR}(z0) ⊂ container`, found by bisection (the
/// cylinders are nested in `R`). Returns 0 when no positive radius works.
pub fn max_admissible_radius(z0: &Point, gamma: f64, container: &Cylinder) -> f64 {
    let fits = |r: f64| {
        Cylinder::new(z0.clone(), gamma * r)
            .map(|q| contained_in(&q, container))
            .unwrap_or(false)
    };
    let mut hi = container.radius / gamma;
    if fits(hi) {
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Admissible `[R_min, R_max]` at `z0`, if non-empty.
pub fn admissible_radius_range(
    z0: &Point,
    gamma: f64,
    container: &Cylinder,
    r_min: f64,
) -> Option<(f64, f64)> {
    let r_max = max_admissible_radius(z0, gamma, container);
    (r_max >= r_min).then_some((r_min, r_max))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Lower radius bound; defaults to four cells per axis.
    pub min_radius: Option<f64>,
    /// Rejection-sampling budget per requested cylinder.
    pub max_attempts: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            min_radius: None,
            max_attempts: 20_000,
        }
    }
}

/// One sampled pair `(Q_R(z0), Q_{γR}(z0))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhSample {
    pub center: Point,
    pub radius: f64,
    /// `⨍_{Q_R} g^q`
    pub a: f64,
    /// `(⨍_{Q_{γR}} g)^q`
    pub m: f64,
    /// `⨍_{Q_{γR}} h^q`
    pub h: f64,
    /// `⨍_{Q_{γR}} g^q`
    pub g: f64,
}

impl RhSample {
    /// Smallest `b` with `A <= b (M + H) + θ G` on this sample.
    pub fn required_b(&self, theta: f64) -> f64 {
        let excess = self.a - theta * self.g;
        let base = self.m + self.h;
        if excess <= 0.0 {
            0.0
        } else if base > 0.0 {
            excess / base
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub q: f64,
    pub gamma: f64,
    pub seed: u64,
    pub min_radius: f64,
    pub samples: Vec<RhSample>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhFit {
    pub theta: f64,
    pub b: f64,
    pub worst_index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RhCheck {
    pub b: f64,
    pub theta: f64,
    pub violations: usize,
    /// `max A / (b (M + H) + θ G)` over the samples.
    pub worst_ratio: f64,
    pub worst_index: usize,
}

impl ScanReport {
    /// Minimal `b` making the inequality hold on every sample for fixed `θ`.
    pub fn fit_b(&self, theta: f64) -> RhFit {
        let (worst_index, b) = self
            .samples
            .iter()
            .map(|s| s.required_b(theta))
            .enumerate()
            .fold((0, 0.0), |acc, (i, b)| if b > acc.1 { (i, b) } else { acc });
        RhFit {
            theta,
            b,
            worst_index,
        }
    }

    pub fn check(&self, b: f64, theta: f64) -> RhCheck {
        let mut violations = 0;
        let mut worst_ratio = 0.0;
        let mut worst_index = 0;
        for (i, s) in self.samples.iter().enumerate() {
            let rhs = b * (s.m + s.h) + theta * s.g;
            if s.a > rhs {
                violations += 1;
            }
            let ratio = if rhs > 0.0 { s.a / rhs } else if s.a > 0.0 { f64::INFINITY } else { 0.0 };
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_index = i;
            }
        }
        RhCheck {
            b,
            theta,
            violations,
            worst_ratio,
            worst_index,
        }
    }
}

/// `(⨍_Q |g|, ⨍_Q |g|^q)` in one pass.
fn two_moments(g: &GridField, cyl: &Cylinder, q: f64) -> Result<(f64, f64)> {
    if !g.contains_cylinder(cyl) {
        return Err(KgError::Domain("cylinder is not inside the grid".into()));
    }
    let vals = g.values();
    let (mut s1, mut sq, mut n) = (0.0, 0.0, 0usize);
    g.for_each_cell_in(cyl, |i| {
        let v = vals[i].abs();
        s1 += v;
        sq += v.powf(q);
        n += 1;
    });
    if n == 0 {
        return Err(KgError::Degenerate("cylinder contains no cell centres".into()));
    }
    Ok((s1 / n as f64, sq / n as f64))
}

/// Samples `n_cylinders` admissible pairs `Q_{γR}(z0) ⊂ Q_γ` and records the
/// four averages of the reverse Hölder inequality for `(g, h)`.
///
/// Centres are uniform in `Q_γ`, radii log-uniform in `[R_min, R_max(z0)]`.
/// Each sample draws from its own random stream, so the report depends only
/// on `rng_seed`.
pub fn reverse_holder_scan(
    g: &GridField,
    h: &GridField,
    q: f64,
    gamma: f64,
    n_cylinders: usize,
    rng_seed: u64,
    options: &ScanOptions,
) -> Result<ScanReport> {
    if !g.same_layout(h) {
        return Err(KgError::Domain("g and h must share a grid".into()));
    }
    if !(gamma > 1.0) || !(q >= 1.0) {
        return Err(KgError::Domain(format!("need gamma > 1 and q >= 1, got {gamma}, {q}")));
    }
    let d = g.dim();
    let container = Cylinder::centered(d, gamma)?;
    if !g.contains_cylinder(&container) {
        return Err(KgError::Domain("grid does not contain Q_gamma".into()));
    }
    let r_min = options.min_radius.unwrap_or_else(|| min_resolved_radius(g, 4.0));
    let samples: Result<Vec<RhSample>> = (0..n_cylinders)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(rng_seed, i as u64);
            for _ in 0..options.max_attempts {
                let z0 = random_point(&container, &mut rng);
                let Some((lo, hi)) = admissible_radius_range(&z0, gamma, &container, r_min) else {
                    continue;
                };
                let radius = if hi > lo {
                    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
                } else {
                    lo
                };
                let small = Cylinder::new(z0.clone(), radius)?;
                let big = Cylinder::new(z0.clone(), gamma * radius)?;
                let (mean_g, mean_gq) = two_moments(g, &big, q)?;
                return Ok(RhSample {
                    center: z0,
                    radius,
                    a: average_pow(g, &small, q)?,
                    m: mean_g.powf(q),
                    h: average_pow(h, &big, q)?,
                    g: mean_gq,
                });
            }
            Err(KgError::Scale(format!(
                "no admissible cylinder with R >= {r_min:.4} after {} attempts",
                options.max_attempts
            )))
        })
        .collect();
    Ok(ScanReport {
        q,
        gamma,
        seed: rng_seed,
        min_radius: r_min,
        samples: samples?,
    })
}

/// Both sides of the improved integrability estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GehringCheck {
    pub p: f64,
    pub p_star: f64,
    pub c_g: f64,
    /// `(⨍_{Q_1} g^p)^{1/p}`
    pub lhs: f64,
    /// `C_G ((⨍_{Q_γ} g^q)^{1/q} + (⨍_{Q_γ} h^p)^{1/p})`
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Evaluates `(⨍_{Q_1} g^p)^{1/p} <= C_G ((⨍_{Q_γ} g^q)^{1/q} + (⨍_{Q_γ} h^p)^{1/p})`.
pub fn gehring_check(
    g: &GridField,
    h: &GridField,
    params: &GehringParams,
    p: f64,
    c_g: f64,
) -> Result<GehringCheck> {
    params.validate()?;
    let ps = p_star(params)?.value;
    if !(p >= params.q) || !(p < ps) {
        return Err(KgError::Domain(format!(
            "exponent p = {p} outside [q, p*) = [{}, {ps})",
            params.q
        )));
    }
    let q1 = Cylinder::centered(params.d, 1.0)?;
    let qg = Cylinder::centered(params.d, params.gamma)?;
    let lhs = average_pow(g, &q1, p)?.powf(1.0 / p);
    let rhs = c_g * (average_pow(g, &qg, params.q)?.powf(1.0 / params.q)
        + average_pow(h, &qg, p)?.powf(1.0 / p));
    let ratio = if rhs > 0.0 { lhs / rhs } else { f64::INFINITY };
    Ok(GehringCheck {
        p,
        p_star: ps,
        c_g,
        lhs,
        rhs,
        ratio,
        pass: lhs <= rhs,
    })
}
