//! Planar distributions: samplers, halfplane measures and equal-mass slabs.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{rational_perturb, Point2, PointSet};
use crate::scalar::{cmp_scalar, rational_from_f64, rational_to_f64, serde_rational, Scalar};
use crate::{Point, Points};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistError {
    #[error("distribution `{0}` has no closed-form halfplane measure")]
    MeasureUnavailable(String),
    #[error("point lies on partition line {0}")]
    OnPartitionLine(usize),
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),
    #[error("sample size must be at least 1")]
    EmptySample,
}

/// Seeded point generator for distributions without a closed form.
#[derive(Clone)]
pub struct Sampler {
    pub name: String,
    pub draw: Arc<dyn Fn(&mut ChaCha8Rng) -> (f64, f64) + Send + Sync>,
}

impl fmt::Debug for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sampler({})", self.name)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixtureComponent {
    #[serde(with = "serde_rational")]
    pub weight: BigRational,
    pub spec: DistributionSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum DistributionSpec {
    /// Uniform on a strictly convex polygon given counterclockwise.
    UniformPolygon {
        #[serde(with = "serde_rational::points")]
        vertices: Vec<Point>,
    },
    UniformDisk {
        #[serde(with = "serde_rational::point")]
        center: Point,
        #[serde(with = "serde_rational")]
        radius: BigRational,
    },
    /// Isotropic normal with mean `mean` and per-axis deviation `sigma`.
    Gaussian2D {
        #[serde(with = "serde_rational::point")]
        mean: Point,
        #[serde(with = "serde_rational")]
        sigma: BigRational,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
    #[serde(skip)]
    SamplerOnly(Sampler),
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

impl DistributionSpec {
    /// Uniform on `[0, 1]^2`.
    pub fn unit_square() -> Self {
        DistributionSpec::UniformPolygon {
            vertices: vec![
                Point::from_ints(0, 0),
                Point::from_ints(1, 0),
                Point::from_ints(1, 1),
                Point::from_ints(0, 1),
            ],
        }
    }

    pub fn unit_disk() -> Self {
        DistributionSpec::UniformDisk { center: Point::from_ints(0, 0), radius: int(1) }
    }

    pub fn standard_gaussian() -> Self {
        DistributionSpec::Gaussian2D { mean: Point::from_ints(0, 0), sigma: int(1) }
    }

    /// Short identifier used in CSV output.
    pub fn id(&self) -> String {
        match self {
            DistributionSpec::UniformPolygon { vertices } => {
                if self.is_unit_square() {
                    "uniform-square".into()
                } else {
                    format!("uniform-polygon-{}", vertices.len())
                }
            }
            DistributionSpec::UniformDisk { .. } => "uniform-disk".into(),
            DistributionSpec::Gaussian2D { .. } => "gaussian".into(),
            DistributionSpec::Mixture { components } => format!("mixture-{}", components.len()),
            DistributionSpec::SamplerOnly(s) => format!("sampler-{}", s.name),
        }
    }

    fn is_unit_square(&self) -> bool {
        match self {
            DistributionSpec::UniformPolygon { vertices } => {
                let DistributionSpec::UniformPolygon { vertices: unit } = Self::unit_square() else {
                    unreachable!()
                };
                *vertices == unit
            }
            _ => false,
        }
    }

    pub fn has_closed_form(&self) -> bool {
        match self {
            DistributionSpec::SamplerOnly(_) => false,
            DistributionSpec::Mixture { components } => components.iter().all(|c| c.spec.has_closed_form()),
            _ => true,
        }
    }

    /// Checks the variant invariants exactly.
    pub fn validate(&self) -> Result<(), DistError> {
        let bad = |m: &str| Err(DistError::InvalidSpec(m.to_string()));
        match self {
            DistributionSpec::UniformPolygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return bad("polygon needs at least 3 vertices");
                }
                for i in 0..n {
                    let (a, b, c) = (&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
                    if !b.sub(a).cross(&c.sub(b)).is_positive() {
                        return bad("polygon must be strictly convex and counterclockwise");
                    }
                }
                // a strictly left-turning closed path is convex only if it winds once
                let mut winding = BigRational::zero();
                for i in 1..n - 1 {
                    winding += vertices[i].sub(&vertices[0]).cross(&vertices[i + 1].sub(&vertices[0]));
                }
                if !winding.is_positive() || !turns_once(vertices) {
                    return bad("polygon must be simple");
                }
                Ok(())
            }
            DistributionSpec::UniformDisk { radius, .. } if !radius.is_positive() => bad("radius must be positive"),
            DistributionSpec::Gaussian2D { sigma, .. } if !sigma.is_positive() => bad("sigma must be positive"),
            DistributionSpec::Mixture { components } => {
                if components.is_empty() {
                    return bad("mixture needs at least one component");
                }
                if components.iter().any(|c| !c.weight.is_positive()) {
                    return bad("mixture weights must be positive");
                }
                let total: BigRational = components.iter().map(|c| c.weight.clone()).sum();
                if total != int(1) {
                    return bad("mixture weights must sum to 1");
                }
                components.iter().try_for_each(|c| c.spec.validate())
            }
            _ => Ok(()),
        }
    }

    /// One raw draw in floating point.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        match self {
            DistributionSpec::UniformPolygon { vertices } => {
                let v: Vec<(f64, f64)> = vertices.iter().map(Point::to_f64).collect();
                let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
                for &(x, y) in &v {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
                loop {
                    let x = x0 + (x1 - x0) * rng.random::<f64>();
                    let y = y0 + (y1 - y0) * rng.random::<f64>();
                    let inside = (0..v.len()).all(|i| {
                        let (a, b) = (v[i], v[(i + 1) % v.len()]);
                        (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0) >= 0.0
                    });
                    if inside {
                        return (x, y);
                    }
                }
            }
            DistributionSpec::UniformDisk { center, radius } => {
                let (cx, cy) = center.to_f64();
                let r = rational_to_f64(radius);
                loop {
                    let x = 2.0 * rng.random::<f64>() - 1.0;
                    let y = 2.0 * rng.random::<f64>() - 1.0;
                    if x * x + y * y < 1.0 {
                        return (cx + r * x, cy + r * y);
                    }
                }
            }
            DistributionSpec::Gaussian2D { mean, sigma } => {
                let (mx, my) = mean.to_f64();
                let s = rational_to_f64(sigma);
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                (mx + s * x, my + s * y)
            }
            DistributionSpec::Mixture { components } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for c in components {
                    acc += rational_to_f64(&c.weight);
                    if u < acc {
                        return c.spec.draw(rng);
                    }
                }
                components.last().expect("validated mixture").spec.draw(rng)
            }
            DistributionSpec::SamplerOnly(s) => (s.draw)(rng),
        }
    }
}

fn turns_once(vertices: &[Point]) -> bool {
    // total turning of a strictly convex polygon is one full turn: edge
    // directions sorted by angle must visit each half-plane exactly once
    let n = vertices.len();
    let dirs: Vec<Point> = (0..n).map(|i| vertices[(i + 1) % n].sub(&vertices[i])).collect();
    let upper = |d: &Point| d.y.is_positive() || (d.y.is_zero() && d.x.is_positive());
    let changes = (0..n).filter(|&i| upper(&dirs[i]) != upper(&dirs[(i + 1) % n])).count();
    changes == 2
}

/// Points drawn by [`sample`] together with the rounding metadata.
#[derive(Clone, Debug)]
pub struct Sample {
    pub points: Points,
    /// Coordinates are integers times `2^-grid_bits`.
    pub grid_bits: i32,
    /// True when the raw draw was degenerate and had to be perturbed.
    pub perturbed: bool,
    /// False for samples above [`CERTIFY_LIMIT`], which are only checked
    /// for distinctness.
    pub certified: bool,
}

/// Largest sample size that is certified on creation.
pub const CERTIFY_LIMIT: usize = 4096;

/// Bits used to place sampled integers below `2^52`.
const SAMPLE_BITS: i32 = 52;

/// `n` iid draws with ChaCha8 stream `seed`, rounded to one shared dyadic grid.
///
/// The grid `2^-s` is chosen per sample so the largest coordinate becomes an
/// integer of at most 52 bits, which keeps the set on the fast lattice path.
/// Degenerate draws (a collinear triple or shared x) are repaired with
/// [`rational_perturb`] and flagged in the result. Samples larger than
/// [`CERTIFY_LIMIT`] skip certification.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Sample, DistError> {
    if n == 0 {
        return Err(DistError::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<(f64, f64)> = (0..n).map(|_| spec.draw(&mut rng)).collect();
    let max_abs = raw.iter().fold(f64::MIN_POSITIVE, |m, &(x, y)| m.max(x.abs()).max(y.abs()));
    let bits = SAMPLE_BITS - max_abs.log2().ceil() as i32;
    let mut pts: Vec<Point> = raw
        .iter()
        .map(|&(x, y)| Point2::new(crate::scalar::dyadic_round(x, bits), crate::scalar::dyadic_round(y, bits)))
        .collect();
    // coincident rounded points are redrawn from the same stream
    loop {
        match PointSet::new(pts.clone()) {
            Ok(_) => break,
            Err(crate::geom::GeomError::DuplicatePoint(_, j)) => {
                let (x, y) = spec.draw(&mut rng);
                pts[j] = Point2::new(crate::scalar::dyadic_round(x, bits), crate::scalar::dyadic_round(y, bits));
            }
            Err(e) => unreachable!("{e}"),
        }
    }
    if n < 3 || n > CERTIFY_LIMIT {
        let points = PointSet::new(pts).expect("distinct");
        return Ok(Sample { points, grid_bits: bits, perturbed: false, certified: false });
    }
    let (set, cert) = PointSet::certified_fast(pts).expect("distinct points");
    if cert.is_certified() {
        return Ok(Sample { points: set, grid_bits: bits, perturbed: false, certified: true });
    }
    let magnitude = BigRational::new(1.into(), num_bigint::BigInt::from(1) << bits.max(0) as usize);
    let repaired = rational_perturb(&set, &magnitude, seed).map_err(|e| DistError::InvalidSpec(e.to_string()))?;
    Ok(Sample { points: repaired, grid_bits: bits, perturbed: true, certified: true })
}

/// The open halfplane `{x : a.x > b}` with a unit normal `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedLine {
    pub a: [f64; 2],
    pub b: f64,
}

impl OrientedLine {
    /// Normalises `(a, b)` so that `|a| = 1`.
    pub fn new(a: [f64; 2], b: f64) -> Self {
        let norm = a[0].hypot(a[1]);
        assert!(norm > 0.0, "zero normal");
        OrientedLine { a: [a[0] / norm, a[1] / norm], b: b / norm }
    }

    pub fn reversed(&self) -> Self {
        OrientedLine { a: [-self.a[0], -self.a[1]], b: -self.b }
    }

    /// Halfplane above the non-vertical line through `p` and `q`.
    pub fn above(p: &Point, q: &Point) -> Self {
        ExactLine::above(p, q).to_f64()
    }
}

/// The halfplane `{x : a.x > b}` with exact, not necessarily unit, normal.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactLine<T> {
    pub a: Point2<T>,
    pub b: T,
}

impl<T: Scalar> ExactLine<T> {
    /// Halfplane above `aff(p, q)`; the normal points to positive y.
    pub fn above(p: &Point2<T>, q: &Point2<T>) -> Self {
        let (l, r) = if p.x < q.x { (p, q) } else { (q, p) };
        let d = r.sub(l);
        let a = Point2::new(-d.y.clone(), d.x.clone());
        let b = a.dot(l);
        ExactLine { a, b }
    }

    fn side(&self, p: &Point2<T>) -> T {
        self.a.dot(p) - self.b.clone()
    }
}

impl ExactLine<BigRational> {
    pub fn to_f64(&self) -> OrientedLine {
        OrientedLine::new([rational_to_f64(&self.a.x), rational_to_f64(&self.a.y)], rational_to_f64(&self.b))
    }
}

/// Part of a convex polygon in the closed halfplane `a.x >= b`
/// (Sutherland-Hodgman against one line).
pub fn clip_polygon<T: Scalar>(poly: &[Point2<T>], line: &ExactLine<T>) -> Vec<Point2<T>> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let (cur, next) = (&poly[i], &poly[(i + 1) % n]);
        let (sc, sn) = (line.side(cur), line.side(next));
        if !sc.is_negative() {
            out.push(cur.clone());
        }
        if (sc.is_negative() && sn.is_positive()) || (sc.is_positive() && sn.is_negative()) {
            let t = sc.clone() / (sc - sn);
            let d = next.sub(cur);
            out.push(Point2::new(cur.x.clone() + t.clone() * d.x, cur.y.clone() + t * d.y));
        }
    }
    out
}

/// Twice the signed area.
pub fn polygon_area2<T: Scalar>(poly: &[Point2<T>]) -> T {
    let n = poly.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + poly[i].cross(&poly[(i + 1) % n]);
    }
    acc
}

/// Exact polygon measure of an exact halfplane.
pub fn polygon_halfplane_measure_exact(vertices: &[Point], line: &ExactLine<BigRational>) -> BigRational {
    let clipped = clip_polygon(vertices, line);
    if clipped.len() < 3 {
        return BigRational::zero();
    }
    polygon_area2(&clipped) / polygon_area2(vertices)
}

/// Measure of the positive side of `l`.
pub fn halfplane_measure(spec: &DistributionSpec, l: &OrientedLine) -> Result<f64, DistError> {
    match spec {
        DistributionSpec::UniformPolygon { vertices } => {
            let poly: Vec<Point2<f64>> = vertices.iter().map(|v| {
                let (x, y) = v.to_f64();
                Point2::new(x, y)
            }).collect();
            let line = ExactLine { a: Point2::new(l.a[0], l.a[1]), b: l.b };
            let clipped = clip_polygon(&poly, &line);
            if clipped.len() < 3 {
                return Ok(0.0);
            }
            Ok((polygon_area2(&clipped) / polygon_area2(&poly)).clamp(0.0, 1.0))
        }
        DistributionSpec::UniformDisk { center, radius } => {
            let (cx, cy) = center.to_f64();
            let r = rational_to_f64(radius);
            // signed distance from the center to the line, measured along a
            let t = l.b - (l.a[0] * cx + l.a[1] * cy);
            Ok(disk_cap_fraction(t / r))
        }
        DistributionSpec::Gaussian2D { mean, sigma } => {
            let (mx, my) = mean.to_f64();
            let s = rational_to_f64(sigma);
            let z = (l.b - (l.a[0] * mx + l.a[1] * my)) / s;
            Ok(0.5 * libm::erfc(z / std::f64::consts::SQRT_2))
        }
        DistributionSpec::Mixture { components } => components.iter().try_fold(0.0, |acc, c| {
            Ok(acc + rational_to_f64(&c.weight) * halfplane_measure(&c.spec, l)?)
        }),
        DistributionSpec::SamplerOnly(_) => Err(DistError::MeasureUnavailable(spec.id())),
    }
}

/// Fraction of the unit disk beyond the chord at signed distance `t`.
pub fn disk_cap_fraction(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else if t <= -1.0 {
        1.0
    } else {
        ((t.acos() - t * (1.0 - t * t).sqrt()) / std::f64::consts::PI).clamp(0.0, 1.0)
    }
}

const SLAB_TOLERANCE: f64 = 1e-12;
const SLAB_MAX_ITER: usize = 200;

/// Mass strictly left of the vertical line at `x`.
fn left_mass(spec: &DistributionSpec, x: f64) -> Result<f64, DistError> {
    halfplane_measure(spec, &OrientedLine { a: [-1.0, 0.0], b: -x })
}

/// `m` increasing x-values cutting the plane into `m+1` equal-mass slabs.
pub fn equiprob_vertical_lines(spec: &DistributionSpec, m: usize) -> Result<Vec<f64>, DistError> {
    if !spec.has_closed_form() {
        return Err(DistError::MeasureUnavailable(spec.id()));
    }
    if m == 0 {
        return Err(DistError::InvalidSpec("at least one partition line is required".into()));
    }
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while left_mass(spec, lo)? > 0.0 && lo > -1e300 {
        lo *= 2.0;
    }
    while left_mass(spec, hi)? < 1.0 && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lines = Vec::with_capacity(m);
    for j in 1..=m {
        let target = j as f64 / (m + 1) as f64;
        let (mut a, mut b) = (lines.last().copied().unwrap_or(lo), hi);
        let mut mid = 0.5 * (a + b);
        for _ in 0..SLAB_MAX_ITER {
            mid = 0.5 * (a + b);
            let f = left_mass(spec, mid)?;
            if (f - target).abs() <= SLAB_TOLERANCE * 0.5 {
                break;
            }
            if f < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        lines.push(mid);
    }
    Ok(lines)
}

/// Index of the open slab containing `p`, compared exactly.
pub fn cell_index(lines: &[f64], p: &Point) -> Result<usize, DistError> {
    let mut idx = 0;
    for (i, &x) in lines.iter().enumerate() {
        let lx = rational_from_f64(x).ok_or_else(|| DistError::InvalidSpec("non-finite line".into()))?;
        match cmp_scalar(&p.x, &lx) {
            std::cmp::Ordering::Equal => return Err(DistError::OnPartitionLine(i)),
            std::cmp::Ordering::Greater => idx = i + 1,
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(idx)
}
