//! Seeded generators of certified point sets.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{Point2, PointSet};
use crate::scalar::rational;
use crate::Points;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Uniform,
    ConvexPosition,
    GridJitter,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Uniform, Generator::ConvexPosition, Generator::GridJitter];

    pub fn as_str(self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::ConvexPosition => "convex-position",
            Generator::GridJitter => "grid-jitter",
        }
    }

    pub fn generate(self, n: usize, seed: u64) -> Points {
        match self {
            Generator::Uniform => uniform_points(n, seed),
            Generator::ConvexPosition => convex_position(n, seed),
            Generator::GridJitter => grid_jitter(n, seed),
        }
    }
}

/// Certified integer points with coordinates in `[-range, range]`.
///
/// Draws are rejected until the set has distinct x-coordinates and no
/// collinear triple, so the output always certifies.
pub fn lattice_points(n: usize, range: i64, seed: u64) -> PointSet<i128> {
    assert!(n >= 3 && (2 * range + 1) as usize >= n, "range too small for {n} points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut seen = BTreeSet::new();
        let mut pts: Vec<Point2<i128>> = Vec::with_capacity(n);
        while pts.len() < n {
            let x = rng.random_range(-range..=range);
            if seen.insert(x) {
                pts.push(Point2::new(x as i128, rng.random_range(-range..=range) as i128));
            }
        }
        if let Ok((s, c)) = PointSet::certified(pts) {
            if c.is_certified() {
                return s;
            }
        }
    }
}

/// Certified points with coordinates in `(-1, 1)` on the grid `1/2^20`.
pub fn uniform_points(n: usize, seed: u64) -> Points {
    let scale = 1i64 << 20;
    let l = lattice_points(n, scale - 1, seed);
    from_lattice(&l, scale)
}

fn from_lattice(l: &PointSet<i128>, scale: i64) -> Points {
    let pts = l
        .points()
        .iter()
        .map(|p| Point2::new(rational(p.x as i64, scale), rational(p.y as i64, scale)))
        .collect();
    let (s, _) = PointSet::certified(pts).expect("scaled lattice set stays distinct");
    s
}

/// Points on the unit circle, hence in convex position, from the rational
/// parametrisation `((1-t^2)/(1+t^2), 2t/(1+t^2))` with distinct `|t|`.
pub fn convex_position(n: usize, seed: u64) -> Points {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mags = BTreeSet::new();
    while mags.len() < n {
        mags.insert(rng.random_range(1..=64 * n as i64));
    }
    let den = 16 * n as i64;
    let pts: Vec<Point2<BigRational>> = mags
        .into_iter()
        .map(|m| {
            let t = if rng.random_bool(0.5) { rational(m, den) } else { rational(-m, den) };
            circle_point(&t)
        })
        .collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(&mut rng);
    let pts = order.into_iter().map(|i| pts[i].clone()).collect();
    let (s, c) = PointSet::certified(pts).expect("circle points are distinct");
    debug_assert!(c.is_certified());
    s
}

/// Rational point of the unit circle with parameter `t`.
pub fn circle_point(t: &BigRational) -> Point2<BigRational> {
    let one = BigRational::from_integer(BigInt::from(1));
    let t2 = t * t;
    let den = &one + &t2;
    Point2::new((&one - &t2) / &den, (t * BigInt::from(2)) / den)
}

/// A square grid with small distinct jitter, redrawn until certified.
pub fn grid_jitter(n: usize, seed: u64) -> Points {
    let side = (n as f64).sqrt().ceil() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = 1i64 << 12;
    loop {
        let mut cells: Vec<(i64, i64)> = (0..side).flat_map(|i| (0..side).map(move |j| (i, j))).collect();
        cells.shuffle(&mut rng);
        let pts: Vec<Point2<i128>> = cells[..n]
            .iter()
            .map(|&(i, j)| {
                let jx = rng.random_range(-fine / 8..=fine / 8);
                let jy = rng.random_range(-fine / 8..=fine / 8);
                Point2::new((i * fine + jx) as i128, (j * fine + jy) as i128)
            })
            .collect();
        if let Ok((s, c)) = PointSet::certified(pts) {
            if c.is_certified() {
                return from_lattice(&s, fine * side);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_certify_and_repeat() {
        for g in Generator::ALL {
            let a = g.generate(12, 5);
            assert!(a.is_certified(), "{}", g.as_str());
            assert_eq!(a.len(), 12);
            assert_eq!(a, g.generate(12, 5));
        }
    }

    #[test]
    fn circle_points_lie_on_circle() {
        let p = circle_point(&rational(3, 7));
        assert_eq!(&p.x * &p.x + &p.y * &p.y, rational(1, 1));
    }
}
