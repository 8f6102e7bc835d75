//! Deterministic point generators: Halton sequences mapped into kinetic
//! cylinders, and counter-based random streams for parallel ensembles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Coords, Cylinder, Point};

/// Random stream `stream` of the generator seeded with `seed`.
///
/// Streams are independent of scheduling, so parallel loops that index their
/// work items produce the same values on any thread count.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut c = 2u64;
    while primes.len() < n {
        if primes.iter().all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// Halton sequence in `[0,1)^dim`, starting at index 1 so no coordinate is 0.
#[derive(Debug, Clone)]
pub struct Halton {
    bases: Vec<u64>,
    index: u64,
}

impl Halton {
    pub fn new(dim: usize) -> Self {
        Halton {
            bases: first_primes(dim),
            index: 0,
        }
    }

    /// Skip ahead so that independent users see disjoint segments.
    pub fn with_offset(dim: usize, offset: u64) -> Self {
        Halton {
            bases: first_primes(dim),
            index: offset,
        }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        self.index += 1;
        self.bases
            .iter()
            .map(|&b| radical_inverse(self.index, b))
            .collect()
    }
}

/// Maps unit-cube coordinates to a point of the unit ball, or `None` when the
/// cube point falls outside the ball.
fn cube_to_ball(u: &[f64]) -> Option<Coords> {
    let p: Coords = u.iter().map(|c| 2.0 * c - 1.0).collect();
    let n2: f64 = p.iter().map(|c| c * c).sum();
    (n2 < 1.0).then_some(p)
}

/// Maps a point of `[0,1)^{1+2d}` into `q`; `None` when rejected.
pub fn map_into_cylinder(q: &Cylinder, u: &[f64]) -> Option<Point> {
    let d = q.dim();
    let r = q.radius;
    // t = t0 - r² u keeps the closed top and open bottom.
    let t = q.center.t - r * r * u[0];
    let xb = cube_to_ball(&u[1..1 + d])?;
    let vb = cube_to_ball(&u[1 + d..1 + 2 * d])?;
    let slab = q.slab_center(t);
    let r3 = q.x_radius();
    Some(Point {
        t,
        x: slab.iter().zip(&xb).map(|(c, b)| c + r3 * b).collect(),
        v: q.center.v.iter().zip(&vb).map(|(c, b)| c + r * b).collect(),
    })
}

/// `n` quasi-random points of `q` drawn from a Halton sequence.
pub fn quasi_random_points(q: &Cylinder, n: usize, offset: u64) -> Vec<Point> {
    let mut seq = Halton::with_offset(1 + 2 * q.dim(), offset);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if let Some(p) = map_into_cylinder(q, &seq.next_point()) {
            out.push(p);
        }
    }
    out
}

/// A uniformly random point of `q`.
pub fn random_point<R: rand::Rng>(q: &Cylinder, rng: &mut R) -> Point {
    let dim = 1 + 2 * q.dim();
    loop {
        let u: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        if let Some(p) = map_into_cylinder(q, &u) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::contains_point;

    #[test]
    fn halton_base_two_prefix() {
        let mut h = Halton::new(1);
        let xs: Vec<f64> = (0..4).map(|_| h.next_point()[0]).collect();
        assert_eq!(xs, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn mapped_points_are_members() {
        for d in 1..=3 {
            let q = Cylinder::new(
                Point::new(-0.7, &vec![0.3; d], &vec![-1.1; d]),
                0.8,
            )
            .unwrap();
            for p in quasi_random_points(&q, 2000, 0) {
                assert!(contains_point(&q, &p));
            }
        }
    }

    #[test]
    fn streams_are_reproducible() {
        use rand::Rng;
        let a: f64 = stream_rng(7, 3).gen();
        let b: f64 = stream_rng(7, 3).gen();
        let c: f64 = stream_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
