//! k-edges, k-facets, the k-edge graph and its chain decompositions.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{cmp_slope, orientation, Point2, PointSet};
use crate::scalar::{cmp_scalar, Scalar, Sign};
use crate::Points;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KFacetError {
    #[error("point set is not certified (general position and no vertical pair required)")]
    UncertifiedInput,
    #[error("k = {k} is outside [0, {max}]")]
    KOutOfRange { k: usize, max: usize },
    #[error("chain decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("x0 coincides with the x-coordinate of point {0}")]
    OnVertex(usize),
    #[error("point {0} lies on the query segment")]
    DegenerateIncidence(usize),
    #[error("query segment has coincident endpoints")]
    DegenerateSegment,
}

/// An edge as an ordered pair of point ids with `id_p < id_q`.
pub type Edge = (usize, usize);

/// Every pair of ids bucketed by the number of points strictly below its line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KEdgeTable {
    n: usize,
    per_k: Vec<Vec<Edge>>,
}

impl KEdgeTable {
    fn from_buckets(n: usize, mut per_k: Vec<Vec<Edge>>) -> Self {
        for bucket in &mut per_k {
            bucket.sort_unstable();
        }
        KEdgeTable { n, per_k }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Buckets indexed by `k` in `0..=n-2`.
    pub fn per_k(&self) -> &[Vec<Edge>] {
        &self.per_k
    }

    pub fn bucket(&self, k: usize) -> Result<&[Edge], KFacetError> {
        self.per_k
            .get(k)
            .map(Vec::as_slice)
            .ok_or(KFacetError::KOutOfRange { k, max: self.n.saturating_sub(2) })
    }

    pub fn total_pairs(&self) -> usize {
        self.per_k.iter().map(Vec::len).sum()
    }

    /// CSV with header `k,id_p,id_q`, rows ordered by `k` then ids.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,id_p,id_q\n");
        for (k, bucket) in self.per_k.iter().enumerate() {
            for (p, q) in bucket {
                let _ = writeln!(out, "{k},{p},{q}");
            }
        }
        out
    }
}

fn require_certified<T>(s: &PointSet<T>) -> Result<(), KFacetError>
where
    T: Scalar,
{
    if s.is_certified() {
        Ok(())
    } else {
        Err(KFacetError::UncertifiedInput)
    }
}

/// `O(n^3)` reference enumeration: one below-count per pair.
pub fn enumerate_k_edges_naive<T: Scalar>(s: &PointSet<T>) -> Result<KEdgeTable, KFacetError> {
    require_certified(s)?;
    let n = s.len();
    let mut per_k = vec![Vec::new(); n - 1];
    for i in 0..n {
        for j in i + 1..n {
            let k = s.below_count_ids(i, j).map_err(|_| KFacetError::UncertifiedInput)?;
            per_k[k].push((i, j));
        }
    }
    Ok(KEdgeTable::from_buckets(n, per_k))
}

/// `O(n^2 log n)` enumeration by a rotational sweep around each point.
///
/// Around the left endpoint `p` of a pair, the directions to all other
/// points are folded into the right half-plane and sorted by slope. A right
/// point with smaller slope, or a folded left point with larger slope, lies
/// below the line through `p` and `q`.
pub fn enumerate_k_edges_sweep<T: Scalar>(s: &PointSet<T>) -> Result<KEdgeTable, KFacetError> {
    require_certified(s)?;
    let n = s.len();
    let pts = s.points();
    let mut per_k = vec![Vec::new(); n - 1];
    let mut dirs: Vec<(Point2<T>, usize, bool)> = Vec::with_capacity(n);
    for i in 0..n {
        dirs.clear();
        for (j, r) in pts.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = r.sub(&pts[i]);
            if d.x.is_negative() {
                dirs.push((d.neg(), j, true));
            } else {
                dirs.push((d, j, false));
            }
        }
        dirs.sort_by(|a, b| cmp_slope(&a.0, &b.0));
        let total_flipped = dirs.iter().filter(|d| d.2).count();
        let (mut right_before, mut flipped_so_far) = (0usize, 0usize);
        for (_, j, flipped) in &dirs {
            if *flipped {
                flipped_so_far += 1;
            } else {
                let k = right_before + (total_flipped - flipped_so_far);
                per_k[k].push((i.min(*j), i.max(*j)));
                right_before += 1;
            }
        }
    }
    Ok(KEdgeTable::from_buckets(n, per_k))
}

/// Sweep enumeration on the scaled integer lattice when it fits, exact
/// rational sweep otherwise. Output is identical either way.
pub fn k_edge_table(s: &Points) -> Result<KEdgeTable, KFacetError> {
    match s.to_lattice() {
        Some(lattice) => enumerate_k_edges_sweep(&lattice),
        None => enumerate_k_edges_sweep(s),
    }
}

/// Number of `k`-facets: pairs with exactly `k` points on either open side.
///
/// The halving bucket `k = n-2-k` is counted once.
pub fn count_k_facets(table: &KEdgeTable, k: usize) -> Result<usize, KFacetError> {
    let max = table.n.saturating_sub(2);
    if k > max {
        return Err(KFacetError::KOutOfRange { k, max });
    }
    let mirror = max - k;
    Ok(if mirror == k {
        table.per_k[k].len()
    } else {
        table.per_k[k].len() + table.per_k[mirror].len()
    })
}

/// `G_k`: the point set together with its `k`-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct KEdgeGraph<T> {
    points: PointSet<T>,
    k: usize,
    edges: Vec<Edge>,
}

impl<T: Scalar> KEdgeGraph<T> {
    pub fn new(points: PointSet<T>, table: &KEdgeTable, k: usize) -> Result<Self, KFacetError> {
        let edges = table.bucket(k)?.to_vec();
        Ok(KEdgeGraph { points, k, edges })
    }

    /// Builds `G_k` directly, enumerating with the sweep.
    pub fn build(points: PointSet<T>, k: usize) -> Result<Self, KFacetError> {
        let table = enumerate_k_edges_sweep(&points)?;
        Self::new(points, &table, k)
    }

    pub fn points(&self) -> &PointSet<T> {
        &self.points
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Endpoints of edge `e` ordered by x.
    fn directed(&self, e: Edge) -> (usize, usize) {
        let pts = self.points.points();
        if pts[e.0].x < pts[e.1].x {
            (e.0, e.1)
        } else {
            (e.1, e.0)
        }
    }

    fn direction(&self, e: Edge) -> Point2<T> {
        let (a, b) = self.directed(e);
        self.points.point(b).sub(self.points.point(a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Convex,
    Concave,
}

impl ChainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChainKind::Convex => "convex",
            ChainKind::Concave => "concave",
        }
    }
}

/// An x-monotone path through edges of `G_k`, listed left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub kind: ChainKind,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDecomposition {
    pub kind: ChainKind,
    pub chains: Vec<Chain>,
    /// `covered[i]` is the chain holding the `i`-th edge of the graph.
    pub covered: Vec<usize>,
}

impl ChainDecomposition {
    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// CSV with header `chain_id,kind,edges`; edges as `p-q` joined by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chain_id,kind,edges\n");
        for (id, chain) in self.chains.iter().enumerate() {
            let edges: Vec<String> = chain.edges.iter().map(|(p, q)| format!("{p}-{q}")).collect();
            let _ = writeln!(out, "{id},{},{}", chain.kind.as_str(), edges.join(";"));
        }
        out
    }
}

/// Splits `G_k` into convex (slopes non-decreasing) or concave chains.
///
/// Vertices are processed left to right. Around a vertex the k-edges
/// alternate between edges arriving from the left and edges leaving to the
/// right when ordered by slope, so each arriving chain is continued by the
/// next leaving edge in slope order (ascending for convex, descending for
/// concave). Leaving edges with no chain to continue start a new chain.
/// The result is re-validated before it is returned.
pub fn chain_decomposition<T: Scalar>(
    g: &KEdgeGraph<T>,
    kind: ChainKind,
) -> Result<ChainDecomposition, KFacetError> {
    let n = g.n();
    let pts = g.points.points();
    if n >= 2 && !g.points.no_vertical_pair() {
        return Err(KFacetError::UncertifiedInput);
    }

    // (edge index, direction) per vertex, split by side
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); n];
    let dirs: Vec<Point2<T>> = g.edges.iter().map(|&e| g.direction(e)).collect();
    for (idx, &e) in g.edges.iter().enumerate() {
        let (a, b) = g.directed(e);
        outgoing[a].push(idx);
        incoming[b].push(idx);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp_scalar(&pts[a].x, &pts[b].x));

    let mut covered = vec![usize::MAX; g.edges.len()];
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        // merge arriving and leaving edges in the continuation order
        let mut events: Vec<(usize, bool)> = incoming[v]
            .iter()
            .map(|&e| (e, true))
            .chain(outgoing[v].iter().map(|&e| (e, false)))
            .collect();
        events.sort_by(|a, b| {
            let o = cmp_slope(&dirs[a.0], &dirs[b.0]);
            match kind {
                ChainKind::Convex => o,
                ChainKind::Concave => o.reverse(),
            }
        });
        let mut pending: Vec<usize> = Vec::new();
        for (e, arriving) in events {
            if arriving {
                pending.push(covered[e]);
            } else {
                let chain = match pending.pop() {
                    Some(c) => c,
                    None => {
                        chains.push(Vec::new());
                        chains.len() - 1
                    }
                };
                chains[chain].push(e);
                covered[e] = chain;
            }
        }
    }

    let decomposition = ChainDecomposition {
        kind,
        chains: chains
            .into_iter()
            .map(|c| Chain { kind, edges: c.into_iter().map(|e| g.edges[e]).collect() })
            .collect(),
        covered,
    };
    validate_decomposition(g, &decomposition)?;
    Ok(decomposition)
}

/// Checks coverage, path structure, slope monotonicity and the size bound.
pub fn validate_decomposition<T: Scalar>(
    g: &KEdgeGraph<T>,
    d: &ChainDecomposition,
) -> Result<(), KFacetError> {
    let fail = |m: String| Err(KFacetError::DecompositionFailure(m));
    let n = g.n();
    let bound = match d.kind {
        ChainKind::Convex => g.k + 1,
        ChainKind::Concave => n - g.k - 1,
    };
    if d.chains.len() > bound {
        return fail(format!("{} chains exceed the bound {bound}", d.chains.len()));
    }
    if d.covered.len() != g.edges.len() {
        return fail("coverage vector length mismatch".into());
    }
    let mut seen = vec![false; g.edges.len()];
    let index_of = |e: &Edge| g.edges.binary_search(e).ok().or_else(|| g.edges.iter().position(|x| x == e));
    for (cid, chain) in d.chains.iter().enumerate() {
        if chain.kind != d.kind || chain.edges.is_empty() {
            return fail(format!("chain {cid} is empty or of the wrong kind"));
        }
        for e in &chain.edges {
            let Some(i) = index_of(e) else {
                return fail(format!("edge {e:?} is not in G_k"));
            };
            if seen[i] || d.covered[i] != cid {
                return fail(format!("edge {e:?} covered inconsistently"));
            }
            seen[i] = true;
        }
        for w in chain.edges.windows(2) {
            let (a0, b0) = g.directed(w[0]);
            let (a1, b1) = g.directed(w[1]);
            if b0 != a1 {
                return fail(format!("chain {cid} is not connected at {:?} -> {:?}", w[0], w[1]));
            }
            if g.points.point(a0).x >= g.points.point(b1).x || g.points.point(a1).x >= g.points.point(b1).x {
                return fail(format!("chain {cid} is not x-monotone"));
            }
            let o = cmp_slope(&g.direction(w[0]), &g.direction(w[1]));
            let ok = match d.kind {
                ChainKind::Convex => o != Ordering::Greater,
                ChainKind::Concave => o != Ordering::Less,
            };
            if !ok {
                return fail(format!("chain {cid} breaks slope monotonicity at {:?}", w[1]));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return fail("some edge is not covered".into());
    }
    Ok(())
}

/// Number of edges of `G_k` whose open x-span contains `x0`.
pub fn vertical_crossings<T: Scalar>(g: &KEdgeGraph<T>, x0: &T) -> Result<usize, KFacetError> {
    let pts = g.points.points();
    if let Some(id) = pts.iter().position(|p| &p.x == x0) {
        return Err(KFacetError::OnVertex(id));
    }
    Ok(g
        .edges
        .iter()
        .filter(|&&(p, q)| {
            let (a, b) = (&pts[p].x, &pts[q].x);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            lo < x0 && x0 < hi
        })
        .count())
}

/// Number of edges of `G_k` properly crossing the open segment `ab`.
///
/// Any point of the set lying on the closed segment, or an endpoint of `ab`
/// lying on an edge, makes the count ill-defined and is reported.
pub fn segment_crossings<T: Scalar>(
    g: &KEdgeGraph<T>,
    a: &Point2<T>,
    b: &Point2<T>,
) -> Result<usize, KFacetError> {
    if a == b {
        return Err(KFacetError::DegenerateSegment);
    }
    let pts = g.points.points();
    let on_segment = |p: &Point2<T>| {
        orientation(a, b, p).is_zero() && {
            let d = p.sub(a).dot(&b.sub(a));
            !d.is_negative() && d <= b.sub(a).norm2()
        }
    };
    for &(p, q) in &g.edges {
        for id in [p, q] {
            if on_segment(&pts[id]) {
                return Err(KFacetError::DegenerateIncidence(id));
            }
        }
    }
    let mut count = 0;
    for &(p, q) in &g.edges {
        let (pp, qq) = (&pts[p], &pts[q]);
        let s1 = orientation(a, b, pp) * orientation(a, b, qq);
        let s2 = orientation(pp, qq, a) * orientation(pp, qq, b);
        if s2 == Sign::Zero && s1 == Sign::Negative {
            // an endpoint of ab touches the edge interior
            let id = if orientation(pp, qq, a).is_zero() { p } else { q };
            return Err(KFacetError::DegenerateIncidence(id));
        }
        if s1 == Sign::Negative && s2 == Sign::Negative {
            count += 1;
        }
    }
    Ok(count)
}

/// Brute-force proper segment intersection count, used as an oracle.
pub fn segment_crossings_naive<T: Scalar>(g: &KEdgeGraph<T>, a: &Point2<T>, b: &Point2<T>) -> usize {
    let pts = g.points.points();
    g.edges
        .iter()
        .filter(|&&(p, q)| {
            let (pp, qq) = (&pts[p], &pts[q]);
            orientation(a, b, pp) != orientation(a, b, qq)
                && !orientation(a, b, pp).is_zero()
                && !orientation(a, b, qq).is_zero()
                && orientation(pp, qq, a) != orientation(pp, qq, b)
                && !orientation(pp, qq, a).is_zero()
                && !orientation(pp, qq, b).is_zero()
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point;

    fn set(coords: &[(i64, i64)]) -> Points {
        let (s, _) = PointSet::certified(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()).unwrap();
        s
    }

    #[test]
    fn convex_quadrilateral_table() {
        let s = set(&[(0, 0), (3, 1), (4, 4), (1, 3)]);
        let naive = enumerate_k_edges_naive(&s).unwrap();
        let sizes: Vec<usize> = naive.per_k().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 2, 2]);
        assert_eq!(count_k_facets(&naive, 0), Ok(4));
        assert_eq!(count_k_facets(&naive, 1), Ok(2));
        assert_eq!(enumerate_k_edges_sweep(&s).unwrap(), naive);
        assert_eq!(k_edge_table(&s).unwrap(), naive);
        assert_eq!(count_k_facets(&naive, 3), Err(KFacetError::KOutOfRange { k: 3, max: 2 }));
    }

    #[test]
    fn triangle_table() {
        let s = set(&[(0, 0), (2, 1), (1, 3)]);
        let naive = enumerate_k_edges_naive(&s).unwrap();
        assert_eq!(naive.per_k()[0].len() + naive.per_k()[1].len(), 3);
        assert_eq!(enumerate_k_edges_sweep(&s).unwrap(), naive);
        assert_eq!(count_k_facets(&naive, 0), Ok(3));
    }

    #[test]
    fn uncertified_rejected() {
        let s = PointSet::new(vec![Point::from_ints(0, 0), Point::from_ints(1, 1), Point::from_ints(2, 2)]).unwrap();
        assert_eq!(enumerate_k_edges_naive(&s), Err(KFacetError::UncertifiedInput));
        assert_eq!(enumerate_k_edges_sweep(&s), Err(KFacetError::UncertifiedInput));
    }

    #[test]
    fn csv_export() {
        let s = set(&[(0, 0), (2, 1), (1, 3)]);
        let t = k_edge_table(&s).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("k,id_p,id_q\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn segment_incidence_reported() {
        let s = set(&[(0, 0), (4, 1), (2, 5)]);
        let g = KEdgeGraph::build(s, 0).unwrap();
        let a = Point::from_ints(0, 0);
        let b = Point::from_ints(1, 7);
        assert_eq!(segment_crossings(&g, &a, &b), Err(KFacetError::DegenerateIncidence(0)));
        assert_eq!(segment_crossings(&g, &a, &a), Err(KFacetError::DegenerateSegment));
    }
}
