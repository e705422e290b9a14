//! Translations of a fixed convex body: membership, boundary translations
//! through two points, T_C-k-edges and T_C-k-sets, growth counts and VC
//! checks.
//!
//! Ranges are `x + C` with `C` open. The disk of radius `r` is centred at
//! the origin, so a witness `x` is the centre of the translated disk; the
//! ellipse is `M` applied to the open unit disk; the square is `(0, 1)^2`.
//!
//! Strictly convex bodies are handled in "disk space": points are pulled
//! back through `M^-1` and the body becomes a disk, which keeps everything
//! rational.

pub mod construct;
mod family;
mod kernel;
pub mod scaling;
pub mod surd;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{GeomError, Point2};
use crate::scalar::{common_denominator, serde_rational, Sign};
use crate::{Point, Points, Rational};

use kernel::{Lat, PairKind};

pub use family::{
    exact_family_oracle, grid_family_oracle, growth_count, induced_family, region_set_counts, tc_k_sets, tc_set_counts,
    vc_shatter_check, GrowthReport, InducedFamily, InducedSet, VcReport,
};
pub use surd::{Surd, SurdPoint};

/// Largest point set the subset encodings support.
pub const SET_LIMIT: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TcError {
    #[error("operation requires a strictly convex body")]
    StrictConvexityRequired,
    #[error("points coincide")]
    SamePoint,
    #[error("pair admits no translation with both points on the boundary")]
    NotInV,
    #[error("points {0:?} lie on the boundary of one translate")]
    NotGeneralPositionRelativeToC([usize; 3]),
    #[error("{n} points exceed the limit of {limit}")]
    ScaleExceeded { n: usize, limit: usize },
    #[error("n = {0} is not a valid size for this construction")]
    BadN(usize),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("offset {0} exceeds the diameter")]
    OffsetTooLarge(f64),
    #[error("the region does not contain twice the body")]
    BodyNotContained,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("could not certify a witness for subset {0:?}")]
    WitnessFailure(Vec<usize>),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Row-major 2x2 rational matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point2::new(&self.a * &p.x + &self.b * &p.y, &self.c * &p.x + &self.d * &p.y)
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        Some(Mat2 {
            a: &self.d / &det,
            b: -(&self.b / &det),
            c: -(&self.c / &det),
            d: &self.a / &det,
        })
    }

    fn rows(&self) -> Vec<Point> {
        vec![Point2::new(self.a.clone(), self.b.clone()), Point2::new(self.c.clone(), self.d.clone())]
    }
}

mod serde_mat2 {
    use super::Mat2;
    use crate::scalar::serde_rational::points;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Mat2, s: S) -> Result<S::Ok, S::Error> {
        points::serialize(&m.rows(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat2, D::Error> {
        let rows = points::deserialize(d)?;
        let [r0, r1]: [_; 2] = rows.try_into().map_err(|_| D::Error::custom("matrix needs two rows"))?;
        Ok(Mat2::new(r0.x, r0.y, r1.x, r1.y))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum BodySpec {
    Disk {
        #[serde(with = "serde_rational")]
        radius: Rational,
    },
    /// `M` applied to the open unit disk.
    Ellipse {
        #[serde(with = "serde_mat2")]
        matrix: Mat2,
    },
    OpenUnitSquare,
}

impl BodySpec {
    pub fn disk(radius: Rational) -> BodySpec {
        BodySpec::Disk { radius }
    }

    pub fn unit_disk() -> BodySpec {
        BodySpec::Disk { radius: Rational::one() }
    }

    pub fn validate(&self) -> Result<(), TcError> {
        match self {
            BodySpec::Disk { radius } if !radius.is_positive() => {
                Err(TcError::InvalidBody(format!("radius must be positive, got {radius}")))
            }
            BodySpec::Ellipse { matrix } if matrix.det().is_zero() => {
                Err(TcError::InvalidBody("ellipse matrix is singular".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        !matches!(self, BodySpec::OpenUnitSquare)
    }

    pub fn id(&self) -> String {
        match self {
            BodySpec::Disk { radius } => format!("disk-{}", crate::scalar::format_rational(radius)),
            BodySpec::Ellipse { .. } => "ellipse".into(),
            BodySpec::OpenUnitSquare => "open-unit-square".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

fn location(s: Sign) -> Location {
    match s {
        Sign::Negative => Location::Inside,
        Sign::Zero => Location::Boundary,
        Sign::Positive => Location::Outside,
    }
}

/// Where `s` lies relative to the range `x + C`.
pub fn contains(body: &BodySpec, x: &Point, s: &Point) -> Location {
    let d = s.sub(x);
    match body {
        BodySpec::Disk { radius } => location(Sign::of(&(d.norm2() - radius * radius))),
        BodySpec::Ellipse { matrix } => {
            let inv = matrix.inverse().expect("validated ellipse");
            location(Sign::of(&(inv.apply(&d).norm2() - Rational::one())))
        }
        BodySpec::OpenUnitSquare => {
            let coord = |v: &Rational| {
                if v.is_positive() && v < &Rational::one() {
                    Location::Inside
                } else if v.is_negative() || v > &Rational::one() {
                    Location::Outside
                } else {
                    Location::Boundary
                }
            };
            match (coord(&d.x), coord(&d.y)) {
                (Location::Outside, _) | (_, Location::Outside) => Location::Outside,
                (Location::Inside, Location::Inside) => Location::Inside,
                _ => Location::Boundary,
            }
        }
    }
}

/// Same as [`contains`] for a witness with surd coordinates.
pub fn contains_surd(body: &BodySpec, x: &SurdPoint, s: &Point) -> Result<Location, TcError> {
    match body {
        BodySpec::Disk { radius } => Ok(location(x.side(s, &(radius * radius)))),
        BodySpec::Ellipse { matrix } => {
            let inv = matrix.inverse().ok_or(TcError::InvalidBody("singular".into()))?;
            let pulled = SurdPoint { a: inv.apply(&x.a), b: inv.apply(&x.b), d: x.d.clone() };
            Ok(location(pulled.side(&inv.apply(s), &Rational::one())))
        }
        BodySpec::OpenUnitSquare => Err(TcError::StrictConvexityRequired),
    }
}

/// A strictly convex body reduced to a disk of radius `rho`.
pub(crate) struct Frame {
    pub pts: Vec<Point>,
    pub rho: Rational,
    pub matrix: Option<Mat2>,
    /// Orientation `sigma` of the canonical centre of an ordered pair.
    pub canonical_sigma: i8,
}

impl Frame {
    pub fn new(body: &BodySpec, pts: &[Point]) -> Result<Frame, TcError> {
        body.validate()?;
        match body {
            BodySpec::Disk { radius } => {
                Ok(Frame { pts: pts.to_vec(), rho: radius.clone(), matrix: None, canonical_sigma: -1 })
            }
            BodySpec::Ellipse { matrix } => {
                let inv = matrix.inverse().expect("validated");
                // a reflection swaps the sides of every oriented line
                let sigma = if matrix.det().is_positive() { -1 } else { 1 };
                Ok(Frame {
                    pts: pts.iter().map(|p| inv.apply(p)).collect(),
                    rho: Rational::one(),
                    matrix: Some(matrix.clone()),
                    canonical_sigma: sigma,
                })
            }
            BodySpec::OpenUnitSquare => Err(TcError::StrictConvexityRequired),
        }
    }

    pub fn to_world(&self, p: &Point) -> Point {
        match &self.matrix {
            Some(m) => m.apply(p),
            None => p.clone(),
        }
    }

    pub fn surd_to_world(&self, p: &SurdPoint) -> SurdPoint {
        match &self.matrix {
            Some(m) => SurdPoint { a: m.apply(&p.a), b: m.apply(&p.b), d: p.d.clone() },
            None => p.clone(),
        }
    }

    /// Centre `m + sigma sqrt(D) Jv` of the pair `(i, j)` in disk space, or
    /// `None` when the points are too far apart.
    pub fn centre(&self, i: usize, j: usize, sigma: i8) -> Option<SurdPoint> {
        centre_of(&self.pts[i], &self.pts[j], &self.rho, sigma)
    }

    pub fn kernel(&self, half_side: Option<&Rational>) -> Kernel {
        let mut values: Vec<&Rational> = self.pts.iter().flat_map(|p| [&p.x, &p.y]).collect();
        values.push(&self.rho);
        if let Some(h) = half_side {
            values.push(h);
        }
        let scale = common_denominator(values.iter().copied());
        let to_int = |v: &Rational| v.numer() * (&scale / v.denom());
        let pts: Vec<Point2<BigInt>> = self.pts.iter().map(|p| Point2::new(to_int(&p.x), to_int(&p.y))).collect();
        let r = to_int(&self.rho);
        let h = half_side.map(to_int);
        let small = values.iter().all(|v| to_int(v).bits() <= SMALL_BITS);
        if small {
            let conv = |v: &BigInt| v.to_i128().expect("small");
            Kernel::Small(
                Lat::new(pts.iter().map(|p| Point2::new(conv(&p.x), conv(&p.y))).collect(), conv(&r)),
                h.as_ref().map(conv),
            )
        } else {
            Kernel::Big(Lat::new(pts, r), h)
        }
    }
}

/// Coordinate size up to which the `i128` predicates cannot overflow.
const SMALL_BITS: u64 = 18;

pub(crate) enum Kernel {
    Small(Lat<i128>, Option<i128>),
    Big(Lat<BigInt>, Option<BigInt>),
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn centre_of(p: &Point, q: &Point, rho: &Rational, sigma: i8) -> Option<SurdPoint> {
    let v = q.sub(p);
    let v2 = v.norm2();
    let d = rho * rho / &v2 - half() * half();
    if d.is_negative() {
        return None;
    }
    let m = Point2::new((&p.x + &q.x) * half(), (&p.y + &q.y) * half());
    let jv = Point2::new(-v.y.clone(), v.x.clone());
    let b = if sigma < 0 { jv.neg() } else { jv };
    if d.is_zero() {
        return Some(SurdPoint { a: m, b: Point2::new(Rational::zero(), Rational::zero()), d });
    }
    Some(SurdPoint { a: m, b, d })
}

/// All translations placing both `p` and `q` on the boundary: two, one in
/// the tangent case, or none.
pub fn two_point_translations(body: &BodySpec, p: &Point, q: &Point) -> Result<Vec<SurdPoint>, TcError> {
    if p == q {
        return Err(TcError::SamePoint);
    }
    let frame = Frame::new(body, &[p.clone(), q.clone()])?;
    let mut out = Vec::new();
    for sigma in [1i8, -1] {
        if let Some(c) = frame.centre(0, 1, sigma) {
            let tangent = c.d.is_zero();
            out.push(frame.surd_to_world(&c));
            if tangent {
                break;
            }
        }
    }
    Ok(out)
}

/// The canonical translation of the ordered pair `(p, q)`: of the two
/// candidates, the one whose part on the side
/// `{r : (q - p)_y (r - p)_x - (q - p)_x (r - p)_y > 0}` has larger area.
/// For a disk that is the one whose centre lies on that side.
pub fn canonical_c(body: &BodySpec, p: &Point, q: &Point) -> Result<SurdPoint, TcError> {
    if p == q {
        return Err(TcError::SamePoint);
    }
    let frame = Frame::new(body, &[p.clone(), q.clone()])?;
    let c = frame.centre(0, 1, frame.canonical_sigma).ok_or(TcError::NotInV)?;
    Ok(frame.surd_to_world(&c))
}

/// Checks that no three points lie on the boundary of one translate.
pub fn certify_relative(body: &BodySpec, s: &Points) -> Result<(), TcError> {
    if !body.is_strictly_convex() {
        return Err(TcError::StrictConvexityRequired);
    }
    let frame = Frame::new(body, s.points())?;
    let triple = match frame.kernel(None) {
        Kernel::Small(l, _) => l.concyclic_triple(),
        Kernel::Big(l, _) => l.concyclic_triple(),
    };
    match triple {
        Some(t) => Err(TcError::NotGeneralPositionRelativeToC(t)),
        None => Ok(()),
    }
}

/// Ordered pairs of `V` bucketed by the number of points inside their
/// canonical translation.
#[derive(Clone, Debug, PartialEq)]
pub struct TcEdgeTable {
    n: usize,
    per_k: Vec<Vec<(usize, usize)>>,
}

impl TcEdgeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bucket(&self, k: usize) -> &[(usize, usize)] {
        self.per_k.get(k).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn counts(&self) -> Vec<usize> {
        self.per_k.iter().map(|b| b.len()).collect()
    }

    /// Number of ordered pairs admitting a boundary translation.
    pub fn v_size(&self) -> usize {
        self.per_k.iter().map(|b| b.len()).sum()
    }
}

fn mask_of<T: crate::scalar::Scalar>(lat: &Lat<T>, i: usize, j: usize, sigma: i8) -> (u128, bool) {
    let mut mask = 0u128;
    let mut touched = false;
    for s in 0..lat.len() {
        if s == i || s == j {
            continue;
        }
        match lat.side(i, j, sigma, s) {
            Sign::Negative => mask |= 1 << s,
            Sign::Zero => touched = true,
            Sign::Positive => {}
        }
    }
    (mask, touched)
}

fn edge_table_in<T: crate::scalar::Scalar>(lat: &Lat<T>, canonical: i8) -> Result<TcEdgeTable, TcError> {
    let n = lat.len();
    let mut per_k = vec![Vec::new(); n.saturating_sub(1).max(1)];
    for i in 0..n {
        for j in i + 1..n {
            let kind = lat.pair(i, j);
            if kind == PairKind::Apart {
                continue;
            }
            for sigma in [canonical, -canonical] {
                let (mask, touched) = mask_of(lat, i, j, sigma);
                if touched {
                    let third = (0..n).find(|&s| s != i && s != j && lat.side(i, j, sigma, s).is_zero());
                    return Err(TcError::NotGeneralPositionRelativeToC([i, j, third.unwrap_or(i)]));
                }
                let k = mask.count_ones() as usize;
                if kind == PairKind::Tangent {
                    per_k[k].push((i, j));
                    per_k[k].push((j, i));
                    break;
                }
                per_k[k].push(if sigma == canonical { (i, j) } else { (j, i) });
            }
        }
    }
    for b in &mut per_k {
        b.sort_unstable();
    }
    Ok(TcEdgeTable { n, per_k })
}

/// T_C-k-edges of `s` for every `k`.
pub fn tc_edge_table(body: &BodySpec, s: &Points) -> Result<TcEdgeTable, TcError> {
    if s.len() > SET_LIMIT {
        return Err(TcError::ScaleExceeded { n: s.len(), limit: SET_LIMIT });
    }
    certify_relative(body, s)?;
    let frame = Frame::new(body, s.points())?;
    match frame.kernel(None) {
        Kernel::Small(l, _) => edge_table_in(&l, frame.canonical_sigma),
        Kernel::Big(l, _) => edge_table_in(&l, frame.canonical_sigma),
    }
}

/// Ordered pairs `(p, q)` whose canonical translation contains exactly `k`
/// points of `s`.
pub fn tc_k_edges(body: &BodySpec, s: &Points, k: usize) -> Result<Vec<(usize, usize)>, TcError> {
    Ok(tc_edge_table(body, s)?.bucket(k).to_vec())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShpReport {
    pub k: usize,
    pub a_k: usize,
    pub e_km2: usize,
    pub e_km1: usize,
    pub e_k: usize,
    pub holds: bool,
}

impl ShpReport {
    pub fn rhs(&self) -> usize {
        4 * (self.e_km2 + self.e_km1 + self.e_k)
    }
}

/// Both sides of `a_k <= 4 (e_{k-2} + e_{k-1} + e_k)` for every `k >= 2`.
pub fn shp_reports(body: &BodySpec, s: &Points) -> Result<Vec<ShpReport>, TcError> {
    let table = tc_edge_table(body, s)?;
    let counts = tc_set_counts(body, s)?;
    let e = |k: usize| table.bucket(k).len();
    Ok((2..=s.len())
        .map(|k| {
            let a_k = counts.get(k).copied().unwrap_or(0);
            let (e_km2, e_km1, e_k) = (e(k - 2), e(k - 1), e(k));
            let holds = a_k <= 4 * (e_km2 + e_km1 + e_k);
            ShpReport { k, a_k, e_km2, e_km1, e_k, holds }
        })
        .collect())
}

pub fn check_shp_inequality(body: &BodySpec, s: &Points, k: usize) -> Result<ShpReport, TcError> {
    if k < 2 {
        return Err(TcError::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let reports = shp_reports(body, s)?;
    Ok(reports.into_iter().find(|r| r.k == k).unwrap_or(ShpReport {
        k,
        a_k: 0,
        e_km2: 0,
        e_km1: 0,
        e_k: 0,
        holds: true,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensReport {
    pub area: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Area of `C ∩ (x + C)` for a disk of radius `rho` and `|x| = d`, against
/// the bound `(1 - d/2) area(C)`.
pub fn lens_area_bound(d: f64, rho: f64) -> Result<LensReport, TcError> {
    if !(d >= 0.0) || !(rho > 0.0) {
        return Err(TcError::InvalidParameter(format!("d = {d}, rho = {rho}")));
    }
    if d > 2.0 * rho {
        return Err(TcError::OffsetTooLarge(d));
    }
    let area = 2.0 * rho * rho * (d / (2.0 * rho)).acos() - 0.5 * d * (4.0 * rho * rho - d * d).max(0.0).sqrt();
    let bound = (1.0 - d / 2.0) * std::f64::consts::PI * rho * rho;
    // the bound is claimed for bodies containing a unit ball and d <= 1
    let holds = area <= bound + 1e-12 * bound.abs().max(1.0);
    Ok(LensReport { area: area.max(0.0), bound, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};

    fn pt(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    #[test]
    fn disk_membership() {
        let b = BodySpec::unit_disk();
        let o = pt(0, 0);
        assert_eq!(contains(&b, &o, &o), Location::Inside);
        assert_eq!(contains(&b, &o, &pt(1, 0)), Location::Boundary);
        assert_eq!(contains(&b, &o, &pt(2, 0)), Location::Outside);
    }

    #[test]
    fn square_membership() {
        let b = BodySpec::OpenUnitSquare;
        let o = pt(0, 0);
        let p = Point2::new(rational(1, 2), rational(1, 2));
        assert_eq!(contains(&b, &o, &p), Location::Inside);
        assert_eq!(contains(&b, &o, &Point2::new(rational(1, 2), integer(1))), Location::Boundary);
        assert_eq!(contains(&b, &o, &Point2::new(rational(1, 2), integer(2))), Location::Outside);
    }

    #[test]
    fn kernel_agrees_with_surd_side() {
        let pts = vec![pt(0, 0), pt(3, 1), pt(1, 2), pt(2, -1), pt(-1, 1)];
        let frame = Frame { pts: pts.clone(), rho: rational(5, 2), matrix: None, canonical_sigma: -1 };
        let Kernel::Small(lat, _) = frame.kernel(None) else { panic!() };
        let r2 = rational(25, 4);
        for i in 0..5 {
            for j in 0..5 {
                if i == j {
                    continue;
                }
                for sigma in [1i8, -1] {
                    let c = frame.centre(i, j, sigma).unwrap();
                    for s in 0..5 {
                        assert_eq!(lat.side(i, j, sigma, s), c.side(&pts[s], &r2), "{i} {j} {sigma} {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn lens_examples() {
        let r = lens_area_bound(1.0, 1.0).unwrap();
        let want = 2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((r.area - want).abs() < 1e-12 && r.holds);
        let r = lens_area_bound(0.0, 1.0).unwrap();
        assert!((r.area - std::f64::consts::PI).abs() < 1e-12 && (r.bound - r.area).abs() < 1e-12);
        assert!(lens_area_bound(2.0, 1.0).unwrap().area.abs() < 1e-12);
        assert!(matches!(lens_area_bound(2.5, 1.0), Err(TcError::OffsetTooLarge(_))));
    }
}
