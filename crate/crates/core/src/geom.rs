//! Planar points, exact orientation and position certificates.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{cmp_scalar, common_denominator, parse_rational, Scalar, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("points {0} and {1} share an x-coordinate")]
    VerticalPair(usize, usize),
    #[error("query point is not a member of the point set")]
    NotMembers,
    #[error("at least 3 points are required, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("perturbation magnitude must be positive")]
    NonPositiveMagnitude,
    #[error("point set still degenerate after {0} perturbation attempts")]
    StillDegenerate(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }
}

impl<T: Scalar> Point2<T> {
    pub fn sub(&self, other: &Point2<T>) -> Point2<T> {
        Point2::new(self.x.clone() - other.x.clone(), self.y.clone() - other.y.clone())
    }

    pub fn add(&self, other: &Point2<T>) -> Point2<T> {
        Point2::new(self.x.clone() + other.x.clone(), self.y.clone() + other.y.clone())
    }

    pub fn neg(&self) -> Point2<T> {
        Point2::new(-self.x.clone(), -self.y.clone())
    }

    pub fn dot(&self, other: &Point2<T>) -> T {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn cross(&self, other: &Point2<T>) -> T {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn norm2(&self) -> T {
        self.dot(self)
    }
}

impl Point2<BigRational> {
    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(
            BigRational::from_integer(BigInt::from(x)),
            BigRational::from_integer(BigInt::from(y)),
        )
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl<T: fmt::Display> fmt::Display for Point2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

/// Sign of `(q - p) x (r - p)`: positive for a counterclockwise turn.
pub fn orientation<T: Scalar>(p: &Point2<T>, q: &Point2<T>, r: &Point2<T>) -> Sign {
    let lhs = (q.x.clone() - p.x.clone()) * (r.y.clone() - p.y.clone());
    let rhs = (q.y.clone() - p.y.clone()) * (r.x.clone() - p.x.clone());
    Sign::from_ordering(cmp_scalar(&lhs, &rhs))
}

/// Compares the slopes of two direction vectors with positive x-components.
pub fn cmp_slope<T: Scalar>(a: &Point2<T>, b: &Point2<T>) -> Ordering {
    // a.y / a.x  vs  b.y / b.x with a.x, b.x > 0
    cmp_scalar(&(a.y.clone() * b.x.clone()), &(b.y.clone() * a.x.clone()))
}

/// Outcome of [`certify_position`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub general_position: bool,
    pub no_vertical_pair: bool,
    /// A collinear triple of ids (sorted) when `general_position` is false.
    pub collinear: Option<[usize; 3]>,
    /// Two ids sharing an x-coordinate when `no_vertical_pair` is false.
    pub vertical: Option<[usize; 2]>,
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        self.general_position && self.no_vertical_pair
    }
}

/// Distinct planar points with stable ids (their indices).
///
/// The two flags are only ever set by certification, never assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<T> {
    points: Vec<Point2<T>>,
    general_position: bool,
    no_vertical_pair: bool,
}

impl<T: Scalar> PointSet<T> {
    pub fn new(points: Vec<Point2<T>>) -> Result<Self, GeomError> {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            cmp_scalar(&points[a].x, &points[b].x).then_with(|| cmp_scalar(&points[a].y, &points[b].y))
        });
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(GeomError::DuplicatePoint(a, b));
            }
        }
        Ok(PointSet { points, general_position: false, no_vertical_pair: false })
    }

    /// Builds the set and certifies it in one step.
    pub fn certified(points: Vec<Point2<T>>) -> Result<(Self, Certification), GeomError> {
        let mut set = Self::new(points)?;
        let cert = certify_position(&set)?;
        set.general_position = cert.general_position;
        set.no_vertical_pair = cert.no_vertical_pair;
        Ok((set, cert))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn point(&self, id: usize) -> &Point2<T> {
        &self.points[id]
    }

    pub fn general_position(&self) -> bool {
        self.general_position
    }

    pub fn no_vertical_pair(&self) -> bool {
        self.no_vertical_pair
    }

    pub fn is_certified(&self) -> bool {
        self.general_position && self.no_vertical_pair
    }

    pub fn id_of(&self, p: &Point2<T>) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn into_points(self) -> Vec<Point2<T>> {
        self.points
    }

    /// Image under `p -> -p`; flags carry over since the map is a rotation.
    pub fn rotated_half_turn(&self) -> PointSet<T> {
        PointSet {
            points: self.points.iter().map(Point2::neg).collect(),
            general_position: self.general_position,
            no_vertical_pair: self.no_vertical_pair,
        }
    }

    /// Points of `self` with the flags of an already checked set.
    pub(crate) fn with_flags_of<U>(points: Vec<Point2<T>>, other: &PointSet<U>) -> PointSet<T> {
        PointSet {
            points,
            general_position: other.general_position,
            no_vertical_pair: other.no_vertical_pair,
        }
    }

    /// Number of points of `self` other than `p_id`, `q_id` strictly below
    /// the line through them.
    pub fn below_count_ids(&self, p_id: usize, q_id: usize) -> Result<usize, GeomError> {
        let (p, q) = (&self.points[p_id], &self.points[q_id]);
        if p.x == q.x {
            return Err(GeomError::VerticalPair(p_id.min(q_id), p_id.max(q_id)));
        }
        let (left, right) = if p.x < q.x { (p, q) } else { (q, p) };
        Ok(self
            .points
            .iter()
            .enumerate()
            .filter(|&(i, r)| i != p_id && i != q_id && orientation(left, right, r) == Sign::Negative)
            .count())
    }
}

/// Number of points of `s` other than `p`, `q` strictly below `aff(p, q)`.
pub fn below_count<T: Scalar>(s: &PointSet<T>, p: &Point2<T>, q: &Point2<T>) -> Result<usize, GeomError> {
    let p_id = s.id_of(p).ok_or(GeomError::NotMembers)?;
    let q_id = s.id_of(q).ok_or(GeomError::NotMembers)?;
    if p_id == q_id {
        return Err(GeomError::NotMembers);
    }
    s.below_count_ids(p_id, q_id)
}

/// Checks general linear position and the absence of vertical pairs.
///
/// Runs in `O(n^2 log n)`: around each point the directions to all others
/// are sorted by slope, and a collinear triple shows up as two equal
/// neighbouring directions.
pub fn certify_position<T: Scalar>(s: &PointSet<T>) -> Result<Certification, GeomError> {
    let n = s.len();
    if n < 3 {
        return Err(GeomError::TooFewPoints(n));
    }
    let pts = s.points();

    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&a, &b| cmp_scalar(&pts[a].x, &pts[b].x).then(a.cmp(&b)));
    let vertical = by_x
        .windows(2)
        .find(|w| pts[w[0]].x == pts[w[1]].x)
        .map(|w| [w[0].min(w[1]), w[0].max(w[1])]);

    let mut collinear = None;
    let mut dirs: Vec<(Point2<T>, usize)> = Vec::with_capacity(n);
    'outer: for i in 0..n {
        dirs.clear();
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut d = pts[j].sub(&pts[i]);
            // canonical half-plane: x > 0, or x == 0 and y > 0
            if d.x.is_negative() || (d.x.is_zero() && d.y.is_negative()) {
                d = d.neg();
            }
            dirs.push((d, j));
        }
        dirs.sort_by(|(a, _), (b, _)| {
            let c = a.cross(b);
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        });
        for w in dirs.windows(2) {
            if w[0].0.cross(&w[1].0).is_zero() {
                let mut t = [i, w[0].1, w[1].1];
                t.sort_unstable();
                collinear = Some(t);
                break 'outer;
            }
        }
    }

    Ok(Certification {
        general_position: collinear.is_none(),
        no_vertical_pair: vertical.is_none(),
        collinear,
        vertical,
    })
}

/// Brute-force `O(n^3)` collinearity check.
pub fn has_collinear_triple_naive<T: Scalar>(s: &PointSet<T>) -> Option<[usize; 3]> {
    let p = s.points();
    let n = p.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&p[i], &p[j], &p[k]).is_zero() {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

pub type RationalPointSet = PointSet<BigRational>;

const PERTURB_ATTEMPTS: usize = 8;
const PERTURB_BITS: u32 = 32;

/// Offsets every coordinate by a seed-determined rational in
/// `(-magnitude, magnitude)` until the result certifies.
///
/// Attempt `a` draws from ChaCha stream `a` of `seed`, so the output depends
/// only on `(s, magnitude, seed)`.
pub fn rational_perturb(
    s: &RationalPointSet,
    magnitude: &BigRational,
    seed: u64,
) -> Result<RationalPointSet, GeomError> {
    if !magnitude.is_positive() {
        return Err(GeomError::NonPositiveMagnitude);
    }
    let den = BigInt::one() << PERTURB_BITS as usize;
    let range = 1u64 << PERTURB_BITS;
    for attempt in 0..=PERTURB_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let mut offset = || {
            // uniform numerator in (-2^32, 2^32), strictly inside the open interval
            let u: u64 = rng.random_range(1..2 * range);
            let num = BigInt::from(u as i64 - range as i64);
            BigRational::new(num, den.clone()) * magnitude
        };
        let moved: Vec<_> = s
            .points()
            .iter()
            .map(|p| Point2::new(&p.x + offset(), &p.y + offset()))
            .collect();
        if let Ok((set, cert)) = PointSet::certified_fast(moved) {
            if cert.is_certified() {
                return Ok(set);
            }
        }
    }
    Err(GeomError::StillDegenerate(PERTURB_ATTEMPTS + 1))
}

const LATTICE_LIMIT_BITS: u64 = 62;

impl RationalPointSet {
    /// [`PointSet::certified`] with the predicates evaluated on the integer
    /// lattice image when it fits; same flags and witnesses either way.
    pub fn certified_fast(points: Vec<Point2<BigRational>>) -> Result<(Self, Certification), GeomError> {
        let mut set = PointSet::new(points)?;
        let cert = match set.lattice_coordinates() {
            Some((_, pts)) => certify_position(&PointSet::with_flags_of(pts, &set))?,
            None => certify_position(&set)?,
        };
        set.general_position = cert.general_position;
        set.no_vertical_pair = cert.no_vertical_pair;
        Ok((set, cert))
    }

    /// Integer image of the set under scaling by the common denominator.
    ///
    /// Positive scaling preserves every orientation sign and every
    /// x-ordering, so predicates on the lattice agree with the rational ones.
    /// Returns `None` when a coordinate would not fit in 62 bits, the bound
    /// under which `i128` orientation tests cannot overflow.
    pub fn to_lattice(&self) -> Option<PointSet<i128>> {
        let (scale, pts) = self.lattice_coordinates()?;
        let _ = scale;
        Some(PointSet::with_flags_of(pts, self))
    }

    /// Common denominator and scaled integer points, when they fit.
    pub fn lattice_coordinates(&self) -> Option<(BigInt, Vec<Point2<i128>>)> {
        let scale = common_denominator(self.points().iter().flat_map(|p| [&p.x, &p.y]));
        let to_int = |v: &BigRational| -> Option<i128> {
            let n = v.numer() * (&scale / v.denom());
            if n.bits() > LATTICE_LIMIT_BITS {
                None
            } else {
                n.to_i128()
            }
        };
        let pts = self
            .points()
            .iter()
            .map(|p| Some(Point2::new(to_int(&p.x)?, to_int(&p.y)?)))
            .collect::<Option<Vec<_>>>()?;
        Some((scale, pts))
    }
}

/// Parses the point-set text format: one `x y` pair per line, coordinates as
/// integers, decimals or `p/q`; lines starting with `#` are comments.
pub fn parse_point_set(text: &str) -> Result<RationalPointSet, GeomError> {
    let mut pts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GeomError::Parse {
                line: idx + 1,
                message: format!("expected 2 coordinates, found {}", fields.len()),
            });
        }
        let coord = |f: &str| {
            parse_rational(f).map_err(|e| GeomError::Parse { line: idx + 1, message: e.to_string() })
        };
        pts.push(Point2::new(coord(fields[0])?, coord(fields[1])?));
    }
    PointSet::new(pts)
}

pub fn format_point_set(s: &RationalPointSet) -> String {
    s.points().iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn pt(x: i64, y: i64) -> Point2<BigRational> {
        Point2::from_ints(x, y)
    }

    #[test]
    fn orientation_canonical_cases() {
        assert_eq!(orientation(&pt(0, 0), &pt(1, 0), &pt(0, 1)), Sign::Positive);
        assert_eq!(orientation(&pt(0, 0), &pt(1, 1), &pt(2, 2)), Sign::Zero);
        assert_eq!(orientation(&pt(0, 0), &pt(0, 1), &pt(1, 0)), Sign::Negative);
    }

    #[test]
    fn below_count_examples() {
        let s = PointSet::new(vec![pt(0, 0), pt(2, 0), pt(1, 1), pt(1, 3)]).unwrap();
        assert_eq!(below_count(&s, &pt(0, 0), &pt(2, 0)), Ok(0));
        // line y = x: (2,0) below, (1,3) above
        assert_eq!(below_count(&s, &pt(0, 0), &pt(1, 1)), Ok(1));
        assert_eq!(below_count(&s, &pt(1, 1), &pt(1, 3)), Err(GeomError::VerticalPair(2, 3)));
        assert_eq!(below_count(&s, &pt(5, 5), &pt(1, 3)), Err(GeomError::NotMembers));
    }

    #[test]
    fn certification_examples() {
        // (0,0) and (0,1) share x = 0, so only the collinearity flag is clean
        let (_, c) = PointSet::certified(vec![pt(0, 0), pt(1, 0), pt(0, 1), pt(3, 2)]).unwrap();
        assert!(c.general_position && !c.no_vertical_pair);
        assert_eq!((c.collinear, c.vertical), (None, Some([0, 2])));

        let (_, c) = PointSet::certified(vec![pt(0, 0), pt(1, 0), pt(2, 3), pt(3, 2)]).unwrap();
        assert!(c.is_certified());

        let (_, c) = PointSet::certified(vec![pt(0, 0), pt(1, 1), pt(2, 2), pt(5, 0)]).unwrap();
        assert!(!c.general_position);
        assert_eq!(c.collinear, Some([0, 1, 2]));

        let (s, c) = PointSet::certified(vec![pt(0, 0), pt(0, 3), pt(1, 1)]).unwrap();
        assert!(c.general_position && !c.no_vertical_pair);
        assert_eq!(c.vertical, Some([0, 1]));
        assert!(!s.is_certified());

        let two = PointSet::new(vec![pt(0, 0), pt(1, 1)]).unwrap();
        assert_eq!(certify_position(&two), Err(GeomError::TooFewPoints(2)));
    }

    #[test]
    fn duplicates_rejected() {
        assert_eq!(PointSet::new(vec![pt(1, 2), pt(0, 0), pt(1, 2)]), Err(GeomError::DuplicatePoint(0, 2)));
    }

    #[test]
    fn perturbation_repairs_and_is_deterministic() {
        let s = PointSet::new(vec![pt(0, 0), pt(1, 1), pt(2, 2), pt(5, 0)]).unwrap();
        let m = rational(1, 1000);
        let a = rational_perturb(&s, &m, 7).unwrap();
        let b = rational_perturb(&s, &m, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_certified());
        for (p, q) in s.points().iter().zip(a.points()) {
            assert!((&p.x - &q.x).abs() < m && (&p.y - &q.y).abs() < m);
        }
        assert_eq!(rational_perturb(&s, &rational(0, 1), 7), Err(GeomError::NonPositiveMagnitude));
    }

    #[test]
    fn perturbing_certified_set_keeps_certificate() {
        let (s, _) = PointSet::certified(vec![pt(0, 0), pt(1, 0), pt(2, 3), pt(3, 2)]).unwrap();
        let m = rational(1, 1000);
        let out = rational_perturb(&s, &m, 11).unwrap();
        assert_ne!(out.points(), s.points());
        assert!(out.is_certified());
    }

    #[test]
    fn parses_point_files() {
        let text = "# header\n0 0\n1/2 -3\n\n0.25 7e-1\n";
        let s = parse_point_set(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.point(1), &Point2::new(rational(1, 2), rational(-3, 1)));
        assert_eq!(s.point(2), &Point2::new(rational(1, 4), rational(7, 10)));
        assert!(matches!(parse_point_set("1 2 3\n"), Err(GeomError::Parse { line: 1, .. })));
        let round = parse_point_set(&format_point_set(&s)).unwrap();
        assert_eq!(round.points(), s.points());
    }

    #[test]
    fn lattice_preserves_orientation() {
        let pts = vec![
            Point2::new(rational(1, 3), rational(1, 2)),
            Point2::new(rational(-2, 5), rational(3, 7)),
            Point2::new(rational(5, 6), rational(-1, 9)),
        ];
        let s = PointSet::new(pts).unwrap();
        let l = s.to_lattice().unwrap();
        let p = s.points();
        let q = l.points();
        assert_eq!(orientation(&p[0], &p[1], &p[2]), orientation(&q[0], &q[1], &q[2]));
    }
}
