//! Plane algebraic curves against k-edge graphs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::Generator;
use crate::geom::Point2;
use crate::kfacet::{k_edge_table, Edge, KEdgeGraph, KFacetError};
use crate::poly::{certify_irreducible_over_q, sturm_root_count, RootCount, UniPoly};
use crate::scalar::{format_f64, format_rational, parse_rational, rational, Scalar};
use crate::{Point, Points};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("point {0} lies on the curve")]
    PointOnCurve(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("the zero polynomial does not define a curve")]
    ZeroPolynomial,
    #[error(transparent)]
    KFacet(#[from] KFacetError),
}

/// Polynomial `sum c[i][j] x^i y^j` over `i + j <= r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivarPoly<T> {
    /// `c[i][j]`; rows are padded to a common length.
    c: Vec<Vec<T>>,
}

impl<T: Scalar> BivarPoly<T> {
    pub fn zero() -> Self {
        BivarPoly { c: Vec::new() }
    }

    /// Sums the given `(i, j, coefficient)` terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut out = Self::zero();
        for (i, j, v) in terms {
            out.add_term(i, j, v);
        }
        out.normalized()
    }

    fn add_term(&mut self, i: usize, j: usize, v: T) {
        let size = (i.max(j) + 1).max(self.c.len());
        if size > self.c.len() {
            for row in &mut self.c {
                row.resize(size, T::zero());
            }
            self.c.resize(size, vec![T::zero(); size]);
        }
        self.c[i][j] = self.c[i][j].clone() + v;
    }

    fn normalized(mut self) -> Self {
        let keep = self.degree().map_or(0, |d| d + 1);
        self.c.truncate(keep);
        for row in &mut self.c {
            row.truncate(keep);
        }
        self
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.c.get(i).and_then(|row| row.get(j)).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero terms ordered by `(i, j)`.
    pub fn terms(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|row| row.iter().all(|v| v.is_zero()))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms().iter().map(|(i, j, _)| i + j).max()
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut acc = T::zero();
        let mut xp = T::one();
        for row in &self.c {
            let mut inner = T::zero();
            for v in row.iter().rev() {
                inner = inner * y.clone() + v.clone();
            }
            acc = acc + xp.clone() * inner;
            xp = xp * x.clone();
        }
        acc
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(self.terms().into_iter().filter(|t| t.0 > 0).map(|(i, j, v)| (i - 1, j, v * from_usize::<T>(i))))
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(self.terms().into_iter().filter(|t| t.1 > 0).map(|(i, j, v)| (i, j - 1, v * from_usize::<T>(j))))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_terms(self.terms().into_iter().map(|(i, j, v)| (i, j, v * s.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms().into_iter().chain(other.terms()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.terms(), other.terms());
        let mut out = Self::zero();
        for (i, j, u) in &a {
            for (k, l, v) in &b {
                out.add_term(i + k, j + l, u.clone() * v.clone());
            }
        }
        out.normalized()
    }

    /// `g(t) = f(p + t (q - p))`.
    pub fn restrict_to_segment(&self, p: &Point2<T>, q: &Point2<T>) -> UniPoly<T> {
        let d = q.sub(p);
        let xt = UniPoly::linear(p.x.clone(), d.x);
        let yt = UniPoly::linear(p.y.clone(), d.y);
        let deg = self.c.len();
        let xs: Vec<UniPoly<T>> = (0..deg).scan(UniPoly::constant(T::one()), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * &xt;
            Some(cur)
        }).collect();
        let ys: Vec<UniPoly<T>> = (0..deg).scan(UniPoly::constant(T::one()), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * &yt;
            Some(cur)
        }).collect();
        let mut out = UniPoly::zero();
        for (i, j, v) in self.terms() {
            out = &out + &(&xs[i] * &ys[j]).scale(&v);
        }
        out
    }
}

fn from_usize<T: Scalar>(n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

pub type Curve = BivarPoly<BigRational>;

/// `H_f` or the flag that it vanishes identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hessian<T> {
    Zero,
    Curve(BivarPoly<T>),
}

/// `f_y^2 f_xx - 2 f_x f_y f_xy + f_x^2 f_yy`.
pub fn hessian_curve<T: Scalar>(f: &BivarPoly<T>) -> Hessian<T> {
    let (fx, fy) = (f.dx(), f.dy());
    let (fxx, fxy, fyy) = (fx.dx(), fx.dy(), fy.dy());
    let two = T::one() + T::one();
    let h = fy.mul(&fy).mul(&fxx).sub(&fx.mul(&fy).mul(&fxy).scale(&two)).add(&fx.mul(&fx).mul(&fyy));
    if h.is_zero() {
        Hessian::Zero
    } else {
        Hessian::Curve(h)
    }
}

/// Parses lines `i j c` (coefficient `c` of `x^i y^j`); `#` starts a comment.
pub fn parse_curve(text: &str) -> Result<Curve, CurveError> {
    let mut terms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| CurveError::Parse { line: idx + 1, message: m };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(format!("expected `i j c`, found {} fields", f.len())));
        }
        let i: usize = f[0].parse().map_err(|_| err(format!("bad exponent `{}`", f[0])))?;
        let j: usize = f[1].parse().map_err(|_| err(format!("bad exponent `{}`", f[1])))?;
        let c = parse_rational(f[2]).map_err(|e| err(e.to_string()))?;
        terms.push((i, j, c));
    }
    let curve = Curve::from_terms(terms);
    if curve.is_zero() {
        return Err(CurveError::ZeroPolynomial);
    }
    Ok(curve)
}

pub fn format_curve(f: &Curve) -> String {
    f.terms().iter().map(|(i, j, c)| format!("{i} {j} {}\n", format_rational(c))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub total: usize,
    /// Distinct crossing points per edge, for edges that are not contained.
    pub per_edge: Vec<(Edge, usize)>,
    pub contained_edges: Vec<Edge>,
    pub finite: bool,
    /// `13 n r^2`.
    pub bound: usize,
    /// `total <= bound` (vacuous when not finite).
    pub within_bound: bool,
    /// Every per-edge count is at most the degree.
    pub per_edge_within_degree: bool,
}

/// Counts the distinct points where `Z(f)` meets the relatively open edges
/// of `G_k`.
pub fn curve_graph_intersections(f: &Curve, g: &KEdgeGraph<BigRational>) -> Result<IntersectionReport, CurveError> {
    let r = f.degree().ok_or(CurveError::ZeroPolynomial)?;
    for (id, p) in g.points().points().iter().enumerate() {
        if f.eval(&p.x, &p.y).is_zero() {
            return Err(CurveError::PointOnCurve(id));
        }
    }
    let mut per_edge = Vec::with_capacity(g.edges().len());
    let mut contained = Vec::new();
    for &(p, q) in g.edges() {
        let restricted = f.restrict_to_segment(g.points().point(p), g.points().point(q));
        match sturm_root_count(&restricted) {
            RootCount::Count(c) => per_edge.push(((p, q), c)),
            RootCount::Contained => contained.push((p, q)),
        }
    }
    let total = per_edge.iter().map(|e| e.1).sum();
    let bound = 13 * g.n() * r * r;
    let finite = contained.is_empty();
    Ok(IntersectionReport {
        total,
        per_edge_within_degree: per_edge.iter().all(|e| e.1 <= r),
        per_edge,
        contained_edges: contained,
        finite,
        bound,
        within_bound: !finite || total <= bound,
    })
}

/// Restricts `f` to a few seeded rational lines and looks for a restriction
/// that keeps full degree and is irreducible modulo a small prime. Such a
/// restriction proves `f` irreducible over the rationals; the function
/// returns true when no proof was found, i.e. the curve is flagged.
/// Non-singularity and absolute irreducibility are not examined.
pub fn reducibility_flag(f: &Curve, seed: u64) -> bool {
    let Some(r) = f.degree() else { return true };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    for _ in 0..8 {
        let mut q = || rational(rng.random_range(-40..=40), rng.random_range(1..=9));
        let p = Point2::new(q(), q());
        let d = Point2::new(q(), q());
        let g = f.restrict_to_segment(&p, &p.add(&d));
        if g.degree() == Some(r) && certify_irreducible_over_q(&g) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveFamily {
    RandomCoefficients,
    ProductOfCircles,
    PerturbedChebyshev,
}

impl CurveFamily {
    pub const ALL: [CurveFamily; 3] =
        [CurveFamily::RandomCoefficients, CurveFamily::ProductOfCircles, CurveFamily::PerturbedChebyshev];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveFamily::RandomCoefficients => "random-coefficients",
            CurveFamily::ProductOfCircles => "product-of-circles",
            CurveFamily::PerturbedChebyshev => "perturbed-chebyshev",
        }
    }

    /// A degree-`r` curve scaled for point sets in `(-1, 1)^2`.
    pub fn generate(self, r: usize, rng: &mut ChaCha8Rng) -> Curve {
        assert!(r >= 1);
        fn small(rng: &mut ChaCha8Rng, num: i64, den: i64) -> BigRational {
            rational(rng.random_range(-num..=num), den)
        }
        match self {
            CurveFamily::RandomCoefficients => loop {
                let mut terms = Vec::new();
                for d in 0..=r {
                    for i in 0..=d {
                        terms.push((i, d - i, small(rng, 8, 8)));
                    }
                }
                let f = Curve::from_terms(terms);
                if f.degree() == Some(r) {
                    return f;
                }
            },
            CurveFamily::ProductOfCircles => {
                let mut f = Curve::from_terms([(0, 0, BigRational::one())]);
                for _ in 0..r / 2 {
                    let (a, b) = (small(rng, 16, 20), small(rng, 16, 20));
                    let rad = rational(rng.random_range(4..=20), 20);
                    // (x - a)^2 + (y - b)^2 - rad^2
                    let circle = Curve::from_terms([
                        (2, 0, BigRational::one()),
                        (0, 2, BigRational::one()),
                        (1, 0, -&a * BigInt::from(2)),
                        (0, 1, -&b * BigInt::from(2)),
                        (0, 0, &a * &a + &b * &b - &rad * &rad),
                    ]);
                    f = f.mul(&circle);
                }
                if r % 2 == 1 {
                    let (u, v) = (small(rng, 16, 16), small(rng, 16, 16));
                    let line = Curve::from_terms([(1, 0, BigRational::one()), (0, 1, u), (0, 0, v)]);
                    f = f.mul(&line);
                }
                f
            }
            CurveFamily::PerturbedChebyshev => {
                let slope = rational(rng.random_range(8..=24), 16);
                let mut terms: Vec<(usize, usize, BigRational)> = chebyshev(r).into_iter().enumerate().map(|(i, c)| (i, 0, c)).collect();
                terms.push((0, 1, -slope));
                for d in 0..r {
                    for i in 0..=d {
                        terms.push((i, d - i, rational(rng.random_range(-8..=8), 512)));
                    }
                }
                Curve::from_terms(terms)
            }
        }
    }

    /// Whether the family is reducible by construction at degree `r`; at
    /// `r <= 2` a product of circles is a single line or circle.
    pub fn reducible_by_construction(self, r: usize) -> bool {
        self == CurveFamily::ProductOfCircles && r >= 3
    }
}

/// Coefficients of the Chebyshev polynomial `T_r`.
pub fn chebyshev(r: usize) -> Vec<BigRational> {
    let mut prev = UniPoly::constant(BigRational::one());
    let mut cur = UniPoly::linear(BigRational::zero(), BigRational::one());
    if r == 0 {
        return prev.coeffs().to_vec();
    }
    let two_t = UniPoly::linear(BigRational::zero(), rational(2, 1));
    for _ in 1..r {
        let next = &(&two_t * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur.coeffs().to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub r: usize,
    pub generators: Vec<Generator>,
    pub families: Vec<CurveFamily>,
    pub seed: u64,
    pub budget: usize,
    /// Fixed level; drawn per trial when absent.
    pub k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub total: usize,
    pub ratio_nr: f64,
    pub ratio_nr2: f64,
    pub generator: Generator,
    pub curve_family: CurveFamily,
    pub bound: usize,
    pub within_bound: bool,
    pub per_edge_within_degree: bool,
    /// No irreducibility certificate was found for the curve.
    pub reducibility_flag: bool,
}

impl TrialRow {
    pub const CSV_HEADER: &'static str =
        "trial,n,r,k,total,ratio_nr,ratio_nr2,generator,curve_family,bound_13nr2,satisfied,reducibility_flag";

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.trial,
            self.n,
            self.r,
            self.k,
            self.total,
            format_f64(self.ratio_nr),
            format_f64(self.ratio_nr2),
            self.generator.as_str(),
            self.curve_family.as_str(),
            self.bound,
            self.within_bound && self.per_edge_within_degree,
            self.reducibility_flag
        );
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excluded {
    pub trial: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// Every finite trial, in trial order.
    pub rows: Vec<TrialRow>,
    pub excluded: Vec<Excluded>,
    /// Best trials by `total / (n r)`, ties broken by trial index.
    pub leaderboard: Vec<TrialRow>,
}

pub const LEADERBOARD_SIZE: usize = 10;

enum Outcome {
    Row(TrialRow),
    Skip(Excluded),
}

fn run_trial(cfg: &SearchConfig, trial: usize) -> Result<Outcome, CurveError> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let generator = cfg.generators[trial % cfg.generators.len()];
    let family = cfg.families[(trial / cfg.generators.len()) % cfg.families.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Points = generator.generate(cfg.n, seed);
    let f = family.generate(cfg.r, &mut rng);
    let k = cfg.k.unwrap_or_else(|| rng.random_range(0..=cfg.n - 2));
    let skip = |reason: String| Ok(Outcome::Skip(Excluded { trial, reason }));
    if family.reducible_by_construction(cfg.r) {
        return skip(format!("{} curves are reducible", family.as_str()));
    }
    let table = k_edge_table(&points)?;
    let graph = KEdgeGraph::new(points, &table, k)?;
    let report = match curve_graph_intersections(&f, &graph) {
        Ok(r) => r,
        Err(CurveError::PointOnCurve(id)) => return skip(format!("point {id} lies on the curve")),
        Err(e) => return Err(e),
    };
    if !report.finite {
        return skip(format!("{} edges contained in the curve", report.contained_edges.len()));
    }
    let (n, r) = (cfg.n as f64, cfg.r as f64);
    Ok(Outcome::Row(TrialRow {
        trial,
        n: cfg.n,
        r: cfg.r,
        k,
        total: report.total,
        ratio_nr: report.total as f64 / (n * r),
        ratio_nr2: report.total as f64 / (n * r * r),
        generator,
        curve_family: family,
        bound: report.bound,
        within_bound: report.within_bound,
        per_edge_within_degree: report.per_edge_within_degree,
        reducibility_flag: reducibility_flag(&f, seed),
    }))
}

/// Seeded search for curves meeting many k-edges; trial `t` uses seed
/// `seed + t`, generator `t mod |generators|` and the next family every
/// `|generators|` trials.
pub fn question1_search(cfg: &SearchConfig) -> Result<SearchResult, CurveError> {
    assert!(cfg.budget >= 1 && !cfg.generators.is_empty() && !cfg.families.is_empty());
    let outcomes: Vec<Result<Outcome, CurveError>> = (0..cfg.budget).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for o in outcomes {
        match o? {
            Outcome::Row(r) => rows.push(r),
            Outcome::Skip(e) => excluded.push(e),
        }
    }
    let mut leaderboard: Vec<TrialRow> = rows.iter().filter(|r| !r.reducibility_flag).cloned().collect();
    leaderboard.sort_by(|a, b| b.ratio_nr.total_cmp(&a.ratio_nr).then(a.trial.cmp(&b.trial)));
    leaderboard.truncate(LEADERBOARD_SIZE);
    Ok(SearchResult { rows, excluded, leaderboard })
}

/// The four points `2 (+-1, 0), 2 (0, +-1)` rotated by the rational angle
/// with half-angle tangent `1/115` (about one degree), which removes the
/// vertical pair while keeping coordinates rational.
pub fn rotated_cross_example() -> Points {
    let t = rational(1, 115);
    let one = BigRational::one();
    let den = &one + &t * &t;
    let c = (&one - &t * &t) / &den;
    let s = (&t * BigInt::from(2)) / &den;
    let rot = |x: i64, y: i64| -> Point {
        let (x, y) = (rational(x, 1), rational(y, 1));
        Point2::new(&c * &x - &s * &y, &s * &x + &c * &y)
    };
    let pts = vec![rot(2, 0), rot(0, 2), rot(-2, 0), rot(0, -2)];
    let (set, cert) = crate::geom::PointSet::certified(pts).expect("distinct");
    debug_assert!(cert.is_certified());
    set
}

/// `x^2 + y^2 - 1`.
pub fn unit_circle() -> Curve {
    Curve::from_terms([(2, 0, BigRational::one()), (0, 2, BigRational::one()), (0, 0, -BigRational::one())])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> BigRational {
        rational(v, 1)
    }

    #[test]
    fn restriction_examples() {
        let f = unit_circle();
        let g = f.restrict_to_segment(&Point::from_ints(-2, 0), &Point::from_ints(2, 0));
        // (4t - 2)^2 - 1
        assert_eq!(g, UniPoly::new(vec![c(3), c(-16), c(16)]));
        let y = Curve::from_terms([(0, 1, c(1))]);
        assert!(y.restrict_to_segment(&Point::from_ints(-1, 0), &Point::from_ints(3, 0)).is_zero());
        let xy = Curve::from_terms([(1, 0, c(1)), (0, 1, c(1))]);
        assert_eq!(xy.restrict_to_segment(&Point::from_ints(0, 0), &Point::from_ints(1, 1)), UniPoly::new(vec![c(0), c(2)]));
    }

    #[test]
    fn hessian_examples() {
        let h = hessian_curve(&unit_circle());
        assert_eq!(h, Hessian::Curve(Curve::from_terms([(2, 0, c(8)), (0, 2, c(8))])));
        let parabola = Curve::from_terms([(0, 1, c(1)), (2, 0, c(-1))]);
        assert_eq!(hessian_curve(&parabola), Hessian::Curve(Curve::from_terms([(0, 0, c(-2))])));
        let cubic = Curve::from_terms([(0, 1, c(1)), (3, 0, c(-1))]);
        assert_eq!(hessian_curve(&cubic), Hessian::Curve(Curve::from_terms([(1, 0, c(-6))])));
        let line = Curve::from_terms([(1, 0, c(2)), (0, 1, c(1))]);
        assert_eq!(hessian_curve(&line), Hessian::Zero);
    }

    #[test]
    fn parse_round_trip() {
        let f = parse_curve("# circle\n2 0 1\n0 2 1\n0 0 -1\n").unwrap();
        assert_eq!(f, unit_circle());
        assert_eq!(parse_curve(&format_curve(&f)).unwrap(), f);
        assert!(matches!(parse_curve("1 x 2\n"), Err(CurveError::Parse { line: 1, .. })));
        assert_eq!(parse_curve("1 1 0\n"), Err(CurveError::ZeroPolynomial));
    }

    #[test]
    fn chebyshev_coefficients() {
        assert_eq!(chebyshev(3), vec![c(0), c(-3), c(0), c(4)]);
        assert_eq!(chebyshev(4), vec![c(1), c(0), c(-8), c(0), c(8)]);
    }

    #[test]
    fn reducibility_heuristic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let product = CurveFamily::ProductOfCircles.generate(4, &mut rng);
        assert!(reducibility_flag(&product, 3));
        // x^2 + y^2 - 3 restricted to a generic line is usually irreducible
        let f = Curve::from_terms([(2, 0, c(1)), (0, 2, c(1)), (0, 0, c(-3))]);
        assert!(!reducibility_flag(&f, 3));
    }
}
