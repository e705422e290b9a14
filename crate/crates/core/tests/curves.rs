mod support;

use kset_core::curves::*;
use kset_core::generators::Generator;
use kset_core::geom::Point2;
use kset_core::kfacet::{k_edge_table, segment_crossings, vertical_crossings, KEdgeGraph};
use kset_core::poly::{sturm_root_count, Poly, RootCount};
use kset_core::scalar::rational;
use kset_core::{Point, Rational};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn rotated_cross_meets_unit_circle_four_times() {
    let s = rotated_cross_example();
    let t = k_edge_table(&s).unwrap();
    let g = KEdgeGraph::new(s, &t, 1).unwrap();
    assert_eq!(g.edges().len(), 2);
    let rep = curve_graph_intersections(&unit_circle(), &g).unwrap();
    assert!(rep.finite);
    assert_eq!(rep.total, 4);
    assert!(rep.per_edge.iter().all(|e| e.1 == 2));
}

#[test]
fn far_circle_misses_small_cluster() {
    let s = Generator::Uniform.generate(12, 3);
    let shrink: Vec<Point> = s.points().iter().map(|p| Point2::new(&p.x / rational(100, 1), &p.y / rational(100, 1))).collect();
    let (s, _) = kset_core::geom::PointSet::certified(shrink).unwrap();
    // radius 100 circle around the origin
    let f = Curve::from_terms([(2, 0, Rational::one()), (0, 2, Rational::one()), (0, 0, rational(-10_000, 1))]);
    for k in 0..=10 {
        let g = KEdgeGraph::build(s.clone(), k).unwrap();
        assert_eq!(curve_graph_intersections(&f, &g).unwrap().total, 0);
    }
}

#[test]
fn point_on_curve_is_rejected() {
    let s = rotated_cross_example();
    let g = KEdgeGraph::build(s.clone(), 0).unwrap();
    let p = s.point(0).clone();
    // line through point 0 with slope 1
    let f = Curve::from_terms([(0, 1, Rational::one()), (1, 0, -Rational::one()), (0, 0, &p.x - &p.y)]);
    assert_eq!(curve_graph_intersections(&f, &g), Err(CurveError::PointOnCurve(0)));
}

#[test]
fn sturm_matches_known_roots_and_bisection() {
    for seed in 0..1000u64 {
        let deg = 1 + (seed as usize % 8);
        let (p, want) = support::known_root_poly(seed, deg, seed % 3 == 0);
        assert_eq!(sturm_root_count(&p), RootCount::Count(want), "seed {seed}: {p}");
        if seed % 3 != 0 {
            assert_eq!(support::bisection_count(&p), want, "oracle disagrees at seed {seed}");
        }
    }
}

#[test]
fn sturm_on_random_dense_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let d = rng.random_range(1..=8);
        let c: Vec<Rational> = (0..=d).map(|_| rational(rng.random_range(-50..=50), rng.random_range(1..=7))).collect();
        let p = Poly::new(c);
        if p.is_zero() {
            continue;
        }
        let sf = kset_core::poly::square_free_part(&p);
        assert_eq!(sturm_root_count(&p), RootCount::Count(support::bisection_count(&sf)));
    }
}

#[test]
fn random_corpus_respects_bounds() {
    let mut checked = 0;
    for r in 1..=6usize {
        let n = 10 + 5 * r;
        let cfg = SearchConfig {
            n,
            r,
            generators: Generator::ALL.to_vec(),
            families: CurveFamily::ALL.to_vec(),
            seed: 1000 * r as u64,
            budget: 12,
            k: None,
        };
        let res = question1_search(&cfg).unwrap();
        for row in &res.rows {
            assert!(row.within_bound && row.per_edge_within_degree, "{row:?}");
            assert!(row.total <= 13 * n * r * r);
            checked += 1;
        }
        assert!(res.leaderboard.windows(2).all(|w| w[0].ratio_nr >= w[1].ratio_nr));
    }
    assert!(checked > 40);
}

#[test]
fn lines_agree_with_the_crossing_machinery() {
    for seed in 0..10u64 {
        let s = Generator::Uniform.generate(14, seed);
        let t = k_edge_table(&s).unwrap();
        for k in [0usize, 3, 6, 12] {
            let g = KEdgeGraph::new(s.clone(), &t, k).unwrap();
            // vertical line x = x0 as the curve x - x0
            let x0 = rational(2 * seed as i64 + 1, 37);
            let f = Curve::from_terms([(1, 0, Rational::one()), (0, 0, -x0.clone())]);
            let rep = curve_graph_intersections(&f, &g).unwrap();
            let v = vertical_crossings(&g, &x0).unwrap();
            assert_eq!(rep.total, v);
            let bound = (k + 1).min(14 - k - 1);
            assert!(rep.total <= bound);

            // a generic line crosses each chain at most twice
            let (a, b) = (Point::from_ints(-3, -2), Point::from_ints(3, 1));
            let f = Curve::from_terms([(1, 0, rational(-3, 1)), (0, 1, rational(6, 1)), (0, 0, rational(3, 1))]);
            let rep = curve_graph_intersections(&f, &g).unwrap();
            assert_eq!(Ok(rep.total), segment_crossings(&g, &a, &b));
            assert!(rep.total <= 2 * bound);
        }
    }
}

#[test]
fn hessian_degree_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for r in 2..=6 {
        for _ in 0..5 {
            let f = CurveFamily::RandomCoefficients.generate(r, &mut rng);
            if let Hessian::Curve(h) = hessian_curve(&f) {
                assert!(h.degree().unwrap() <= 3 * r - 4);
            }
        }
    }
}

#[test]
fn cubic_inflection_at_origin() {
    let f = Curve::from_terms([(0, 1, Rational::one()), (3, 0, -Rational::one())]);
    let Hessian::Curve(h) = hessian_curve(&f) else { panic!() };
    let zero = rational(0, 1);
    assert_eq!(h.eval(&zero, &zero), zero);
    assert_eq!(f.eval(&zero, &zero), zero);
}
