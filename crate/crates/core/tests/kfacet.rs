use kset_core::generators::{convex_position, lattice_points, uniform_points};
use kset_core::geom::{below_count, orientation, Point2, PointSet};
use kset_core::kfacet::*;
use kset_core::scalar::rational;
use kset_core::{Point, Points};
use proptest::prelude::*;

fn set(coords: &[(i64, i64)]) -> Points {
    let (s, _) = PointSet::certified(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect()).unwrap();
    s
}

#[test]
fn pentagon_facet_counts() {
    let s = set(&[(0, 0), (4, -1), (6, 3), (3, 6), (-1, 4)]);
    let t = enumerate_k_edges_naive(&s).unwrap();
    assert_eq!(count_k_facets(&t, 0), Ok(5));
    assert_eq!(count_k_facets(&t, 1), Ok(5));
    assert_eq!(enumerate_k_edges_sweep(&s).unwrap(), t);
}

#[test]
fn sweep_matches_naive_on_lattice_and_rational_sets() {
    for seed in 0..40u64 {
        let n = 3 + (seed as usize % 28);
        let l = lattice_points(n, 1000, seed);
        assert_eq!(enumerate_k_edges_sweep(&l).unwrap(), enumerate_k_edges_naive(&l).unwrap());
        let r = uniform_points(n, seed);
        assert_eq!(k_edge_table(&r).unwrap(), enumerate_k_edges_naive(&r).unwrap());
    }
}

#[test]
fn convex_position_hull_chains() {
    for n in [6usize, 9, 12] {
        let s = convex_position(n, n as u64);
        let g0 = KEdgeGraph::build(s.clone(), 0).unwrap();
        let d = chain_decomposition(&g0, ChainKind::Convex).unwrap();
        assert_eq!(d.len(), 1);
        let top = KEdgeGraph::build(s.clone(), n - 2).unwrap();
        assert_eq!(chain_decomposition(&top, ChainKind::Concave).unwrap().len(), 1);

        // an x strictly inside the hull span meets the lower hull once
        let xs: Vec<_> = s.points().iter().map(|p| p.x.clone()).collect();
        let lo = xs.iter().min().unwrap().clone();
        let hi = xs.iter().max().unwrap().clone();
        let mut mid = (&lo + &hi) / rational(2, 1);
        while xs.contains(&mid) {
            mid = (&mid + &hi) / rational(2, 1);
        }
        assert_eq!(vertical_crossings(&g0, &mid), Ok(1));
        assert_eq!(vertical_crossings(&g0, &(lo - rational(1, 1))), Ok(0));
        assert!(matches!(vertical_crossings(&g0, &hi), Err(KFacetError::OnVertex(_))));
    }
}

#[test]
fn vertical_segment_matches_vertical_crossings() {
    for seed in 0..20u64 {
        // even coordinates so odd x0 never hits a vertex
        let l = lattice_points(15, 200, seed);
        let pts = l.points().iter().map(|p| Point2::new(2 * p.x, 2 * p.y)).collect();
        let (s, _) = PointSet::certified(pts).unwrap();
        for k in 0..13 {
            let g = KEdgeGraph::build(s.clone(), k).unwrap();
            for x0 in [-301i128, -11, 1, 77, 399] {
                let v = vertical_crossings(&g, &x0).unwrap();
                let a = Point2::new(x0, -10_000);
                let b = Point2::new(x0, 10_000);
                assert_eq!(segment_crossings(&g, &a, &b), Ok(v));
            }
        }
    }
}

#[test]
fn segment_crossings_match_brute_force() {
    for seed in 0..20u64 {
        let l = lattice_points(14, 100, seed);
        let pts = l.points().iter().map(|p| Point2::new(3 * p.x, 3 * p.y)).collect();
        let (s, _) = PointSet::certified(pts).unwrap();
        let g = KEdgeGraph::build(s, 4).unwrap();
        for &(p, q) in g.edges() {
            // the edge shifted by a vector no lattice point can absorb
            let (pp, qq) = (g.points().point(p), g.points().point(q));
            let a = Point2::new(pp.x + 1, pp.y + 2);
            let b = Point2::new(qq.x + 1, qq.y + 2);
            if let Ok(c) = segment_crossings(&g, &a, &b) {
                assert_eq!(c, segment_crossings_naive(&g, &a, &b));
            }
        }
        let far = segment_crossings(&g, &Point2::new(5000, 5000), &Point2::new(6000, 5001));
        assert_eq!(far, Ok(0));
    }
}

#[test]
fn rotation_maps_levels() {
    for seed in 0..10u64 {
        let s = uniform_points(17, seed);
        let t = k_edge_table(&s).unwrap();
        let r = k_edge_table(&s.rotated_half_turn()).unwrap();
        let n = s.len();
        for k in 0..=n - 2 {
            assert_eq!(t.per_k()[k], r.per_k()[n - 2 - k]);
        }
    }
}

fn small_set() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-50i64..50, -50i64..50), 3..14)
}

proptest! {
    #[test]
    fn orientation_antisymmetry(a in (-99i64..99, -99i64..99), b in (-99i64..99, -99i64..99), c in (-99i64..99, -99i64..99)) {
        let (p, q, r) = (Point::from_ints(a.0, a.1), Point::from_ints(b.0, b.1), Point::from_ints(c.0, c.1));
        let o = orientation(&p, &q, &r);
        prop_assert_eq!(o, -orientation(&p, &r, &q));
        prop_assert_eq!(o, -orientation(&q, &p, &r));
    }

    #[test]
    fn below_and_above_partition(coords in small_set()) {
        let pts: Vec<Point> = coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect();
        if let Ok((s, c)) = PointSet::certified(pts) {
            prop_assume!(c.is_certified());
            let n = s.len();
            let rot = s.rotated_half_turn();
            for i in 0..n {
                for j in i + 1..n {
                    let below = below_count(&s, s.point(i), s.point(j)).unwrap();
                    let above = rot.below_count_ids(i, j).unwrap();
                    prop_assert_eq!(below + above + 2, n);
                    prop_assert!(below <= n - 2);
                }
            }
        }
    }

    #[test]
    fn tables_partition_pairs(coords in small_set()) {
        let pts: Vec<Point> = coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect();
        if let Ok((s, c)) = PointSet::certified(pts) {
            prop_assume!(c.is_certified());
            let n = s.len();
            let t = k_edge_table(&s).unwrap();
            prop_assert_eq!(&t, &enumerate_k_edges_naive(&s).unwrap());
            prop_assert_eq!(t.total_pairs(), n * (n - 1) / 2);
            let facets: usize = (0..=(n - 2) / 2).map(|k| count_k_facets(&t, k).unwrap()).sum();
            prop_assert_eq!(facets, n * (n - 1) / 2);
            for k in 0..=n - 2 {
                let g = KEdgeGraph::new(s.clone(), &t, k).unwrap();
                chain_decomposition(&g, ChainKind::Convex).unwrap();
                chain_decomposition(&g, ChainKind::Concave).unwrap();
            }
        }
    }
}
