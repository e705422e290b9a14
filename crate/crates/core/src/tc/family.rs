//! Induced subsets of a point set by translations.
//!
//! In the dual view a point `s` lies in `x + C` iff `x` lies in `s - C`, so
//! the boundary-free induced subsets are the labels of the open cells of
//! the arrangement of the dual boundaries. For a strictly convex body in
//! general position every cell other than the outer one and the interiors
//! of isolated circles has a vertex on its boundary, and the four cells
//! around a vertex are the inside set of the two-point translation plus any
//! subset of the two points. The square decomposes into a product of
//! interval arrangements.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};

use super::kernel::{Lat, PairKind, RegionTest};
use super::surd::Surd;
use super::{certify_relative, contains, mask_of, BodySpec, Frame, Kernel, Location, TcError, SET_LIMIT};
use crate::geom::Point2;
use crate::scalar::{dyadic_round, Scalar, Sign};
use crate::{Point, Points, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct InducedSet {
    pub ids: Vec<usize>,
    pub witness: Point,
    pub boundary_free: bool,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct InducedFamily {
    pub n: usize,
    pub sets: Vec<InducedSet>,
}

pub(crate) fn ids_of(mask: u128) -> Vec<usize> {
    (0..128).filter(|i| mask >> i & 1 == 1).collect()
}

fn mask_from(ids: &[usize]) -> u128 {
    ids.iter().fold(0, |m, &i| m | 1 << i)
}

impl InducedFamily {
    fn from_map(n: usize, map: BTreeMap<u128, Point>) -> InducedFamily {
        let mut sets: Vec<InducedSet> = map
            .into_iter()
            .map(|(m, w)| InducedSet { ids: ids_of(m), witness: w, boundary_free: true })
            .collect();
        sets.sort_by(|a, b| a.ids.len().cmp(&b.ids.len()).then_with(|| a.ids.cmp(&b.ids)));
        InducedFamily { n, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Number of members of each size `0..=n`.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n + 1];
        for s in &self.sets {
            c[s.ids.len()] += 1;
        }
        c
    }

    pub fn of_size(&self, k: usize) -> InducedFamily {
        InducedFamily { n: self.n, sets: self.sets.iter().filter(|s| s.ids.len() == k).cloned().collect() }
    }

    pub fn masks(&self) -> BTreeSet<u128> {
        self.sets.iter().map(|s| mask_from(&s.ids)).collect()
    }

    /// Rows `subset_id,k,witness_x,witness_y,boundary_free`; the subset id
    /// lists member ids separated by `;` (`-` for the empty set).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset_id,k,witness_x,witness_y,boundary_free\n");
        for s in &self.sets {
            let id = if s.ids.is_empty() {
                "-".to_string()
            } else {
                s.ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                id,
                s.ids.len(),
                crate::scalar::format_rational(&s.witness.x),
                crate::scalar::format_rational(&s.witness.y),
                s.boundary_free
            ));
        }
        out
    }
}

fn check_size(n: usize) -> Result<(), TcError> {
    if n > SET_LIMIT {
        Err(TcError::ScaleExceeded { n, limit: SET_LIMIT })
    } else {
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Source {
    Far,
    Own(usize),
    Quadrant { i: usize, j: usize, sigma: i8, in_i: bool, in_j: bool },
}

fn with_pair(mask: u128, i: usize, j: usize, in_i: bool, in_j: bool) -> u128 {
    mask | (in_i as u128) << i | (in_j as u128) << j
}

fn gp_error<T: Scalar>(lat: &Lat<T>, i: usize, j: usize, sigma: i8) -> TcError {
    let third = (0..lat.len()).find(|&s| s != i && s != j && lat.side(i, j, sigma, s).is_zero());
    TcError::NotGeneralPositionRelativeToC([i, j, third.unwrap_or(i)])
}

/// Every cell label of the arrangement, each with one way to reach it.
fn disk_candidates<T: Scalar>(lat: &Lat<T>) -> Result<Vec<(u128, Source)>, TcError> {
    let n = lat.len();
    let mut out = vec![(0u128, Source::Far)];
    let mut isolated = vec![true; n];
    for i in 0..n {
        for j in i + 1..n {
            let kind = lat.pair(i, j);
            if kind == PairKind::Apart {
                continue;
            }
            isolated[i] = false;
            isolated[j] = false;
            let sigmas: &[i8] = if kind == PairKind::Tangent { &[1] } else { &[1, -1] };
            for &sigma in sigmas {
                let (mask, touched) = mask_of(lat, i, j, sigma);
                if touched {
                    return Err(gp_error(lat, i, j, sigma));
                }
                for (in_i, in_j) in [(false, false), (true, false), (false, true), (true, true)] {
                    // tangent disks never overlap
                    if kind == PairKind::Tangent && in_i && in_j {
                        continue;
                    }
                    out.push((with_pair(mask, i, j, in_i, in_j), Source::Quadrant { i, j, sigma, in_i, in_j }));
                }
            }
        }
    }
    for (i, iso) in isolated.into_iter().enumerate() {
        if iso {
            out.push((1 << i, Source::Own(i)));
        }
    }
    Ok(out)
}

fn kernel_candidates(frame: &Frame) -> Result<Vec<(u128, Source)>, TcError> {
    match frame.kernel(None) {
        Kernel::Small(l, _) => disk_candidates(&l),
        Kernel::Big(l, _) => disk_candidates(&l),
    }
}

/// Mask of points strictly inside the disk of radius `rho` at `x`, in disk
/// space, and whether some point is on its circle.
fn rational_mask(frame: &Frame, x: &Point) -> (u128, bool) {
    let r2 = &frame.rho * &frame.rho;
    let mut mask = 0u128;
    let mut touched = false;
    for (i, s) in frame.pts.iter().enumerate() {
        match Sign::of(&(s.sub(x).norm2() - &r2)) {
            Sign::Negative => mask |= 1 << i,
            Sign::Zero => touched = true,
            Sign::Positive => {}
        }
    }
    (mask, touched)
}

fn pow2(e: i32) -> Rational {
    if e >= 0 {
        Rational::from_integer(num_bigint::BigInt::one() << e as usize)
    } else {
        Rational::new(num_bigint::BigInt::one(), num_bigint::BigInt::one() << (-e) as usize)
    }
}

/// A rational point of the cell next to a vertex, found by stepping off the
/// vertex along a direction that moves into or out of both disks.
fn quadrant_witness(frame: &Frame, i: usize, j: usize, sigma: i8, in_i: bool, in_j: bool, target: u128) -> Option<Point> {
    let c = frame.centre(i, j, sigma)?;
    let tangent = c.d.is_zero();
    let (cx, cy) = c.to_f64();
    let (px, py) = frame.pts[i].to_f64();
    let (qx, qy) = frame.pts[j].to_f64();
    let g1 = (cx - px, cy - py);
    let g2 = (cx - qx, cy - qy);
    let dir = if tangent {
        match (in_i, in_j) {
            (true, false) => (-g1.0, -g1.1),
            (false, true) => (-g2.0, -g2.1),
            _ => (-g1.1, g1.0),
        }
    } else {
        // (c - p).d = -tau_i and (c - q).d = -tau_j
        let ti = if in_i { -1.0 } else { 1.0 };
        let tj = if in_j { -1.0 } else { 1.0 };
        let det = g1.0 * g2.1 - g1.1 * g2.0;
        ((ti * g2.1 - tj * g1.1) / det, (g1.0 * tj - g2.0 * ti) / det)
    };
    let scale = dir.0.abs().max(dir.1.abs());
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let d = Point2::new(dyadic_round(dir.0 / scale, 30), dyadic_round(dir.1 / scale, 30));
    for e in 4..=120 {
        let eps = &frame.rho * pow2(-e);
        let base = c.approx(2 * e as u32 + 40);
        let x = Point2::new(&base.x + &eps * &d.x, &base.y + &eps * &d.y);
        let (mask, touched) = rational_mask(frame, &x);
        if !touched && mask == target {
            return Some(x);
        }
    }
    None
}

fn far_witness(frame: &Frame) -> Point {
    let big = frame.pts.iter().map(|p| p.x.abs().max(p.y.abs())).fold(Rational::zero(), |a, b| a.max(b));
    Point2::new(big + &frame.rho * Rational::from_integer(2.into()) + Rational::one(), Rational::zero())
}

/// World-space witness for one candidate, rechecked with [`contains`].
fn witness_for(body: &BodySpec, frame: &Frame, world: &[Point], mask: u128, src: &Source) -> Result<Point, TcError> {
    let local = match src {
        Source::Far => Some(far_witness(frame)),
        Source::Own(i) => Some(frame.pts[*i].clone()),
        Source::Quadrant { i, j, sigma, in_i, in_j } => quadrant_witness(frame, *i, *j, *sigma, *in_i, *in_j, mask),
    };
    let fail = || TcError::WitnessFailure(ids_of(mask));
    let w = frame.to_world(&local.ok_or_else(fail)?);
    let (got, touched) = world_mask(body, &w, world);
    if touched || got != mask {
        return Err(fail());
    }
    Ok(w)
}

fn world_mask(body: &BodySpec, x: &Point, pts: &[Point]) -> (u128, bool) {
    let mut mask = 0u128;
    let mut touched = false;
    for (i, s) in pts.iter().enumerate() {
        match contains(body, x, s) {
            Location::Inside => mask |= 1 << i,
            Location::Boundary => touched = true,
            Location::Outside => {}
        }
    }
    (mask, touched)
}

/// Breakpoints of the square's dual arrangement along one axis.
fn square_axis_values(coords: &[Rational], with_breakpoints: bool) -> Vec<Rational> {
    let mut bps: Vec<Rational> = coords.iter().flat_map(|c| [c - Rational::one(), c.clone()]).collect();
    bps.sort();
    bps.dedup();
    let two = Rational::from_integer(2.into());
    let mut out = vec![&bps[0] - Rational::one()];
    for w in bps.windows(2) {
        out.push((&w[0] + &w[1]) / &two);
    }
    out.push(bps.last().unwrap() + Rational::one());
    if with_breakpoints {
        out.extend(bps);
    }
    out
}

/// Induced subsets of translations of the open unit square: the set only
/// changes when a coordinate of `x` crosses a breakpoint `s - 1` or `s`.
fn square_family(pts: &[Point], with_boundary: bool) -> BTreeMap<u128, Point> {
    let xs: Vec<Rational> = pts.iter().map(|p| p.x.clone()).collect();
    let ys: Vec<Rational> = pts.iter().map(|p| p.y.clone()).collect();
    let cx = square_axis_values(&xs, with_boundary);
    let cy = square_axis_values(&ys, with_boundary);
    let mut out = BTreeMap::new();
    for x in &cx {
        for y in &cy {
            let w = Point2::new(x.clone(), y.clone());
            let (mask, touched) = world_mask(&BodySpec::OpenUnitSquare, &w, pts);
            if touched && !with_boundary {
                continue;
            }
            out.entry(mask).or_insert(w);
        }
    }
    out
}

/// All boundary-free induced subsets of `s`, each with a verified witness.
pub fn induced_family(body: &BodySpec, s: &Points) -> Result<InducedFamily, TcError> {
    check_size(s.len())?;
    body.validate()?;
    if let BodySpec::OpenUnitSquare = body {
        return Ok(InducedFamily::from_map(s.len(), square_family(s.points(), false)));
    }
    certify_relative(body, s)?;
    let frame = Frame::new(body, s.points())?;
    let mut first: BTreeMap<u128, Source> = BTreeMap::new();
    for (m, src) in kernel_candidates(&frame)? {
        first.entry(m).or_insert(src);
    }
    let mut map = BTreeMap::new();
    for (m, src) in first {
        let w = witness_for(body, &frame, s.points(), m, &src)?;
        map.insert(m, w);
    }
    Ok(InducedFamily::from_map(s.len(), map))
}

/// `a_k(S)` and the T_C-k-sets themselves.
pub fn tc_k_sets(body: &BodySpec, s: &Points, k: usize) -> Result<(usize, InducedFamily), TcError> {
    let fam = induced_family(body, s)?.of_size(k);
    Ok((fam.len(), fam))
}

/// `a_k(S)` for every `k = 0..=n`, without witnesses.
pub fn tc_set_counts(body: &BodySpec, s: &Points) -> Result<Vec<usize>, TcError> {
    check_size(s.len())?;
    body.validate()?;
    let masks: Vec<u128> = if let BodySpec::OpenUnitSquare = body {
        square_family(s.points(), false).into_keys().collect()
    } else {
        certify_relative(body, s)?;
        let frame = Frame::new(body, s.points())?;
        kernel_candidates(&frame)?.into_iter().map(|(m, _)| m).collect()
    };
    Ok(histogram(s.len(), masks))
}

fn histogram(n: usize, masks: impl IntoIterator<Item = u128>) -> Vec<usize> {
    let unique: HashSet<u128> = masks.into_iter().collect();
    let mut c = vec![0; n + 1];
    for m in unique {
        c[m.count_ones() as usize] += 1;
    }
    c
}

fn region_masks<T: Scalar>(lat: &Lat<T>, h: &T) -> Result<Vec<u128>, TcError> {
    if let Some(t) = lat.concyclic_triple() {
        return Err(TcError::NotGeneralPositionRelativeToC(t));
    }
    let degenerate = |what: &str| TcError::Degenerate(what.to_string());
    let n = lat.len();
    let mut out = Vec::new();
    for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
        let f = |s: i32| if s > 0 { h.clone() } else { -h.clone() };
        let (mask, touched) = lat.mask_at(&Point2::new(f(sx), f(sy)));
        if touched {
            return Err(degenerate("a corner lies on a dual circle"));
        }
        out.push(mask);
    }
    let mut isolated = vec![true; n];
    for i in 0..n {
        for j in i + 1..n {
            let kind = lat.pair(i, j);
            if kind == PairKind::Apart {
                continue;
            }
            isolated[i] = false;
            isolated[j] = false;
            let sigmas: &[i8] = if kind == PairKind::Tangent { &[1] } else { &[1, -1] };
            for &sigma in sigmas {
                match lat.centre_in_square(i, j, sigma, h) {
                    RegionTest::Outside => continue,
                    RegionTest::Boundary => return Err(degenerate("a vertex lies on the region boundary")),
                    RegionTest::Inside => {}
                }
                let (mask, touched) = mask_of(lat, i, j, sigma);
                if touched {
                    return Err(gp_error(lat, i, j, sigma));
                }
                for (a, b) in [(false, false), (true, false), (false, true), (true, true)] {
                    if kind == PairKind::Tangent && a && b {
                        continue;
                    }
                    out.push(with_pair(mask, i, j, a, b));
                }
            }
        }
    }
    for i in 0..n {
        let crossings = lat.square_crossings(i, h).map_err(|_| degenerate("a dual circle meets a corner"))?;
        for (mask, touched) in crossings {
            if touched {
                return Err(degenerate("a side crossing lies on another dual circle"));
            }
            out.push(mask);
            out.push(mask | 1 << i);
        }
        let p = &lat.pts[i];
        let inside = |c: &T| {
            let r2 = lat.r2.clone();
            // |c| + R < h  <=>  R < h - |c|, compared squared
            let room = h.clone() - c.abs();
            room.is_positive() && r2 < room.clone() * room
        };
        if isolated[i] && inside(&p.x) && inside(&p.y) {
            out.push(1 << i);
        }
    }
    Ok(out)
}

/// `a'_k(S)` for every `k`: boundary-free subsets induced by translations of
/// the disk of radius `rho` that stay inside `[-h, h]^2`.
pub fn region_set_counts(s: &Points, rho: &Rational, h: &Rational) -> Result<Vec<usize>, TcError> {
    check_size(s.len())?;
    let room = h - rho;
    if room.is_negative() {
        return Err(TcError::BodyNotContained);
    }
    let frame = Frame::new(&BodySpec::disk(rho.clone()), s.points())?;
    let masks = match frame.kernel(Some(&room)) {
        Kernel::Small(l, Some(h)) => region_masks(&l, &h)?,
        Kernel::Big(l, Some(h)) => region_masks(&l, &h)?,
        _ => unreachable!("half side supplied"),
    };
    Ok(histogram(s.len(), masks))
}

/// Independent exact enumeration of the boundary-free induced subsets for
/// disks and ellipses. Sample lines are placed strictly between consecutive
/// critical abscissae of the dual arrangement (leftmost and rightmost points
/// of circles and all vertices), and on every line one rational sample is
/// taken in each gap between consecutive crossings, so every open cell is
/// visited. No general position assumption is needed.
pub fn exact_family_oracle(body: &BodySpec, s: &Points) -> Result<InducedFamily, TcError> {
    check_size(s.len())?;
    let frame = Frame::new(body, s.points())?;
    let n = frame.pts.len();
    let rho = frame.rho.clone();
    let r2 = &rho * &rho;
    let mut events: Vec<Surd> = Vec::new();
    for p in &frame.pts {
        events.push(Surd::rational(&p.x - &rho));
        events.push(Surd::rational(&p.x + &rho));
    }
    for i in 0..n {
        for j in i + 1..n {
            for sigma in [1i8, -1] {
                if let Some(c) = frame.centre(i, j, sigma) {
                    events.push(c.x());
                }
            }
        }
    }
    events.sort_by(|a, b| a.cmp(b));
    events.dedup_by(|a, b| a.cmp(b) == std::cmp::Ordering::Equal);
    let mut lines = vec![events[0].a.clone() - Rational::one()];
    for w in events.windows(2) {
        lines.push(w[0].rational_between(&w[1]));
    }
    let mut map = BTreeMap::new();
    for r in &lines {
        let mut ys: Vec<Surd> = Vec::new();
        for p in &frame.pts {
            let dx = r - &p.x;
            let e = &r2 - &dx * &dx;
            if e.is_positive() {
                ys.push(Surd::new(p.y.clone(), Rational::one(), e.clone()));
                ys.push(Surd::new(p.y.clone(), -Rational::one(), e));
            }
        }
        ys.sort_by(|a, b| a.cmp(b));
        ys.dedup_by(|a, b| a.cmp(b) == std::cmp::Ordering::Equal);
        let mut samples = Vec::with_capacity(ys.len() + 1);
        match ys.first() {
            None => samples.push(Rational::zero()),
            Some(first) => samples.push(first.bounds(8).0 - Rational::one()),
        }
        for w in ys.windows(2) {
            samples.push(w[0].rational_between(&w[1]));
        }
        for y in samples {
            let x = Point2::new(r.clone(), y);
            let (mask, touched) = rational_mask(&frame, &x);
            debug_assert!(!touched, "sample on a dual circle");
            if !touched {
                map.entry(mask).or_insert_with(|| frame.to_world(&x));
            }
        }
    }
    Ok(InducedFamily::from_map(n, map))
}

/// Boundary-free subsets seen from a regular `steps x steps` grid of
/// translations covering every translate that meets the points. Only a
/// subset of the true family; used as a soundness check.
pub fn grid_family_oracle(body: &BodySpec, s: &Points, steps: usize) -> Result<InducedFamily, TcError> {
    check_size(s.len())?;
    body.validate()?;
    let pts = s.points();
    let bbox = |f: &dyn Fn(&Point) -> Rational| {
        let lo = pts.iter().map(f).min().unwrap();
        let hi = pts.iter().map(f).max().unwrap();
        (lo, hi)
    };
    // translations meeting the points lie within the points' box grown by
    // the body's extent
    let extent = match body {
        BodySpec::Disk { radius } => radius.clone(),
        BodySpec::Ellipse { matrix } => matrix.a.abs() + matrix.b.abs() + matrix.c.abs() + matrix.d.abs(),
        BodySpec::OpenUnitSquare => Rational::one(),
    };
    let (x0, x1) = bbox(&|p: &Point| p.x.clone());
    let (y0, y1) = bbox(&|p: &Point| p.y.clone());
    let (x0, x1) = (x0 - &extent, x1 + &extent);
    let (y0, y1) = (y0 - &extent, y1 + &extent);
    let steps_r = Rational::from_integer(steps.into());
    // an offset that avoids obvious boundary coincidences
    let off = Rational::new(7.into(), 19.into());
    let mut map = BTreeMap::new();
    for a in 0..steps {
        let fx = (Rational::from_integer(a.into()) + &off) / &steps_r;
        let x = &x0 + (&x1 - &x0) * fx;
        for b in 0..steps {
            let fy = (Rational::from_integer(b.into()) + &off) / &steps_r;
            let y = &y0 + (&y1 - &y0) * fy;
            let w = Point2::new(x.clone(), y);
            let (mask, touched) = world_mask(body, &w, pts);
            if !touched {
                map.entry(mask).or_insert(w);
            }
        }
    }
    Ok(InducedFamily::from_map(s.len(), map))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    pub n: usize,
    pub count: usize,
    pub bound: usize,
    pub within_bound: bool,
}

/// Distinct subsets `S ∩ (x + C)` over all translations, boundary allowed.
fn all_induced(body: &BodySpec, pts: &Points) -> Result<BTreeSet<u128>, TcError> {
    check_size(pts.len())?;
    body.validate()?;
    if let BodySpec::OpenUnitSquare = body {
        return Ok(square_family(pts.points(), true).into_keys().collect());
    }
    // in general position a translation with points on its boundary induces
    // the same set as a nearby cell, so the cell labels are everything
    certify_relative(body, pts)?;
    let frame = Frame::new(body, pts.points())?;
    Ok(kernel_candidates(&frame)?.into_iter().map(|(m, _)| m).collect())
}

pub fn growth_count(body: &BodySpec, s: &Points) -> Result<GrowthReport, TcError> {
    let n = s.len();
    let count = all_induced(body, s)?.len();
    let bound = n * n - n + 2;
    let within_bound = !body.is_strictly_convex() || count <= bound;
    Ok(GrowthReport { n, count, bound, within_bound })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VcReport {
    pub shattered: bool,
    pub induced: usize,
    /// A subset no translation induces, when there is one.
    pub missing: Option<Vec<usize>>,
}

/// Whether translations of the body induce all `2^|Q|` subsets of `Q`.
pub fn vc_shatter_check(body: &BodySpec, q: &Points) -> Result<VcReport, TcError> {
    if q.is_empty() || q.len() > 4 {
        return Err(TcError::InvalidParameter(format!("|Q| = {} is outside 1..=4", q.len())));
    }
    let got = all_induced(body, q)?;
    let missing = (0u128..1 << q.len()).find(|m| !got.contains(m)).map(ids_of);
    Ok(VcReport { shattered: missing.is_none(), induced: got.len(), missing })
}
