//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; any failure makes the process exit
//! non-zero.

mod support;

use std::time::{Duration, Instant};

use kset_core::curves::*;
use kset_core::dist::DistributionSpec;
use kset_core::estimator::*;
use kset_core::generators::{convex_position, Generator};
use kset_core::geom::{Point2, PointSet};
use kset_core::kfacet::*;
use kset_core::poly::{sturm_root_count, RootCount};
use kset_core::scalar::{integer, rational};
use kset_core::tc::construct::*;
use kset_core::tc::scaling::*;
use kset_core::tc::*;
use kset_core::{Point, Points, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn choose2(n: usize) -> usize {
    n * (n - 1) / 2
}

fn oracle_equivalence() -> Outcome {
    for seed in 0..200u64 {
        let n = 3 + (seed as usize % 28);
        let g = Generator::ALL[seed as usize % 3];
        let s = g.generate(n, seed);
        let sweep = enumerate_k_edges_sweep(&s).map_err(|e| e.to_string())?;
        let naive = enumerate_k_edges_naive(&s).map_err(|e| e.to_string())?;
        ensure(sweep == naive, || format!("{} n={n} seed={seed}: sweep differs from naive", g.as_str()))?;
    }
    Ok("200 sets, n <= 30".into())
}

fn combinatorial_identities() -> Outcome {
    let mut instances = 0;
    for g in Generator::ALL {
        for n in 3..=30usize {
            for seed in 0..3u64 {
                let s = g.generate(n, 31 * n as u64 + seed);
                let t = k_edge_table(&s).map_err(|e| e.to_string())?;
                let sum: usize = t.per_k().iter().map(Vec::len).sum();
                ensure(sum == choose2(n), || format!("{} n={n}: sum |E_k| = {sum}", g.as_str()))?;
                let facets: usize = (0..=(n - 2) / 2).map(|k| count_k_facets(&t, k).unwrap()).sum();
                ensure(facets == choose2(n), || format!("{} n={n}: facet partition gives {facets}", g.as_str()))?;
                instances += 1;
            }
        }
    }
    for n in 4..=12usize {
        let s = convex_position(n, n as u64);
        let t = enumerate_k_edges_naive(&s).map_err(|e| e.to_string())?;
        ensure(t == k_edge_table(&s).unwrap(), || format!("convex n={n}: sweep differs"))?;
        for k in 0..=(n - 2) / 2 {
            let want = if n % 2 == 0 && k == (n - 2) / 2 { n / 2 } else { n };
            let got = count_k_facets(&t, k).unwrap();
            ensure(got == want, || format!("convex n={n} k={k}: {got} facets, expected {want}"))?;
        }
    }
    Ok(format!("{instances} corpus sets, convex n = 4..12"))
}

fn random_inner_x(xs: &[Rational], rng: &mut ChaCha8Rng) -> Rational {
    let lo = xs.iter().min().unwrap();
    let hi = xs.iter().max().unwrap();
    let span = hi - lo;
    loop {
        // reach slightly past the hull on both sides
        let u = rational(rng.random_range(-50..=1059), 1009);
        let x = lo + &span * u;
        if !xs.contains(&x) {
            return x;
        }
    }
}

fn chain_decompositions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lines = 0usize;
    for seed in 0..100u64 {
        let n = 5 + (seed as usize % 46);
        let s = Generator::ALL[seed as usize % 3].generate(n, 500 + seed);
        let t = k_edge_table(&s).map_err(|e| e.to_string())?;
        let xs: Vec<Rational> = s.points().iter().map(|p| p.x.clone()).collect();
        let probes: Vec<Rational> = (0..100).map(|_| random_inner_x(&xs, &mut rng)).collect();
        for k in 0..=n - 2 {
            let g = KEdgeGraph::new(s.clone(), &t, k).map_err(|e| e.to_string())?;
            for (kind, bound) in [(ChainKind::Convex, k + 1), (ChainKind::Concave, n - k - 1)] {
                let d = chain_decomposition(&g, kind).map_err(|e| format!("n={n} k={k}: {e}"))?;
                validate_decomposition(&g, &d).map_err(|e| format!("n={n} k={k}: {e}"))?;
                ensure(d.len() <= bound, || format!("n={n} k={k}: {} {} chains", d.len(), kind.as_str()))?;
            }
            let cap = (k + 1).min(n - k - 1);
            for x0 in &probes {
                let c = vertical_crossings(&g, x0).map_err(|e| e.to_string())?;
                ensure(c <= cap, || format!("n={n} k={k}: line x={x0} crosses {c} > {cap}"))?;
                lines += 1;
            }
        }
    }
    Ok(format!("100 sets, {lines} (line, k) probes"))
}

fn closed_form_specs() -> [DistributionSpec; 3] {
    [DistributionSpec::unit_square(), DistributionSpec::unit_disk(), DistributionSpec::standard_gaussian()]
}

fn cross_validation() -> Outcome {
    let mut worst: f64 = 0.0;
    for (si, spec) in closed_form_specs().iter().enumerate() {
        for (n, k) in [(10usize, 2usize), (20, 5), (30, 14)] {
            let seed = 1000 * si as u64 + n as u64;
            let d = direct_expected_k_edges(spec, n, k, 10_000, seed).map_err(|e| e.to_string())?;
            let f = formula_expected_k_edges(spec, n, k, 100_000, seed + 1).map_err(|e| e.to_string())?;
            let se = (d.stderr * d.stderr + f.stderr * f.stderr).sqrt();
            let z = (d.mean - f.mean).abs() / se;
            worst = worst.max(z);
            ensure(z <= 3.0, || {
                format!("{} n={n} k={k}: direct {:.4} formula {:.4} z={z:.2}", spec.id(), d.mean, f.mean)
            })?;
        }
    }
    Ok(format!("9 cells, max |z| = {worst:.2}"))
}

fn facet_bound() -> Outcome {
    let mut rows = 0;
    let mut max_ratio: f64 = 0.0;
    for (si, spec) in closed_form_specs().iter().enumerate() {
        for n in [50usize, 100, 200] {
            let ks = [0, n / 10, n / 4, (n - 2) / 2];
            let trials = if n == 200 { 200 } else { 500 };
            let recs = direct_expected_k_edges_multi(spec, n, &ks, trials, 77 + si as u64)
                .map_err(|e| e.to_string())?;
            for r in &recs {
                let b = bound_check_54(r);
                ensure(!b.violation, || format!("{} n={n} k={}: mean {} vs {}", spec.id(), r.k, r.mean, b.bound))?;
                max_ratio = max_ratio.max(r.mean / b.bound);
                rows += 1;
            }
        }
    }
    Ok(format!("{rows} cells, zero violations, max mean/bound = {max_ratio:.3}"))
}

fn curve_intersections() -> Outcome {
    let s = rotated_cross_example();
    let g = KEdgeGraph::build(s, 1).map_err(|e| e.to_string())?;
    let rep = curve_graph_intersections(&unit_circle(), &g).map_err(|e| e.to_string())?;
    ensure(rep.total == 4, || format!("circle example gives {}", rep.total))?;

    let mut trials = 0;
    let mut rows = 0;
    let mut worst: f64 = 0.0;
    for r in 1..=6usize {
        for n in [12usize, 24, 40] {
            let cfg = SearchConfig {
                n,
                r,
                generators: Generator::ALL.to_vec(),
                families: CurveFamily::ALL.to_vec(),
                seed: 10_000 * r as u64 + n as u64,
                budget: 36,
                k: None,
            };
            let res = question1_search(&cfg).map_err(|e| e.to_string())?;
            trials += cfg.budget;
            for row in &res.rows {
                ensure(row.total <= 13 * n * r * r && row.within_bound, || format!("trial {row:?} over 13nr^2"))?;
                ensure(row.per_edge_within_degree, || format!("trial {row:?}: an edge meets the curve > r times"))?;
                worst = worst.max(row.ratio_nr2);
                rows += 1;
            }
        }
    }
    ensure(rows >= 500, || format!("only {rows} finite trials"))?;
    for seed in 0..1000u64 {
        let deg = 1 + (seed as usize % 8);
        let (p, want) = support::known_root_poly(seed, deg, false);
        let oracle = support::bisection_count(&p);
        ensure(oracle == want, || format!("bisection oracle disagrees with construction at seed {seed}"))?;
        ensure(sturm_root_count(&p) == RootCount::Count(want), || format!("sturm mismatch at seed {seed}: {p}"))?;
    }
    Ok(format!("circle 4 crossings; {trials} trials ({rows} finite), max total/(n r^2) = {worst:.3}; 1000 Sturm counts"))
}

fn hessian_examples() -> Outcome {
    let one = Rational::one();
    let circle = Curve::from_terms([(2, 0, one.clone()), (0, 2, one.clone()), (0, 0, -one.clone())]);
    let want = Curve::from_terms([(2, 0, integer(8)), (0, 2, integer(8))]);
    ensure(hessian_curve(&circle) == Hessian::Curve(want), || "circle Hessian".into())?;
    let cubic = Curve::from_terms([(0, 1, one.clone()), (3, 0, -one)]);
    let want = Curve::from_terms([(1, 0, integer(-6))]);
    ensure(hessian_curve(&cubic) == Hessian::Curve(want), || "cubic Hessian".into())?;
    Ok("8x^2 + 8y^2 and -6x".into())
}

/// Random disk instances in general position relative to `C`.
fn random_disk_instance(n: usize, seed: u64, rho: &Rational) -> Points {
    let b = BodySpec::disk(rho.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let s = uniform_square_points(n, &integer(1), 10, &mut rng);
        if !matches!(tc_edge_table(&b, &s), Err(TcError::NotGeneralPositionRelativeToC(_))) {
            return s;
        }
    }
}

fn tc_exact_suite() -> Outcome {
    let b = BodySpec::unit_disk();
    let w = two_point_translations(&b, &Point::from_ints(0, 0), &Point::from_ints(1, 0)).map_err(|e| e.to_string())?;
    let half = rational(1, 2);
    ensure(w.len() == 2, || "two witnesses expected".into())?;
    for c in &w {
        let y = c.y();
        ensure(c.a.x == half && c.x().is_rational() && y.a.is_zero() && &y.b * &y.b * &y.d == rational(3, 4), || {
            format!("centre {c:?} is not (1/2, +-sqrt3/2)")
        })?;
    }
    let t = two_point_translations(&b, &Point::from_ints(0, 0), &Point::from_ints(2, 0)).unwrap();
    ensure(t.len() == 1 && t[0].a == Point::from_ints(1, 0) && t[0].is_rational(), || "tangent case".into())?;
    ensure(two_point_translations(&b, &Point::from_ints(0, 0), &Point::from_ints(3, 0)).unwrap().is_empty(), || {
        "far pair".into()
    })?;

    let rho = rational(1, 2);
    let disk = BodySpec::disk(rho.clone());
    let mut pair_checks = 0;
    for i in 0..100u64 {
        let n = 4 + (i as usize % 11);
        let s = random_disk_instance(n, 40_000 + i, &rho);
        let table = tc_edge_table(&disk, &s).map_err(|e| e.to_string())?;
        let mut ordered = 0;
        for p in 0..n {
            for q in 0..n {
                if p != q && !two_point_translations(&disk, s.point(p), s.point(q)).unwrap().is_empty() {
                    ordered += 1;
                }
            }
        }
        ensure(table.counts().iter().sum::<usize>() == ordered, || format!("instance {i}: sum e_k != |V|"))?;
        for r in shp_reports(&disk, &s).map_err(|e| e.to_string())? {
            ensure(r.holds, || format!("instance {i}: {r:?}"))?;
            pair_checks += 1;
        }
    }
    let mut grid_equal = 0;
    let instances = 60;
    for i in 0..instances {
        let n = 3 + (i as usize % 8);
        let s = random_disk_instance(n, 50_000 + i, &rho);
        let fam = induced_family(&disk, &s).map_err(|e| e.to_string())?;
        let exact = exact_family_oracle(&disk, &s).map_err(|e| e.to_string())?;
        ensure(fam.masks() == exact.masks(), || format!("instance {i}: candidate family differs from exact oracle"))?;
        let grid = grid_family_oracle(&disk, &s, 64).map_err(|e| e.to_string())?;
        ensure(grid.masks().is_subset(&fam.masks()), || format!("instance {i}: grid oracle found an extra subset"))?;
        grid_equal += (grid.masks() == fam.masks()) as usize;
    }
    Ok(format!(
        "{pair_checks} k-set vs k-edge checks; candidates == exact oracle on {instances} sets (grid 64x64 equal on {grid_equal}, subset on all)"
    ))
}

fn growth_and_vc() -> Outcome {
    let rho = rational(1, 2);
    let disk = BodySpec::disk(rho.clone());
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let n = 2 + (i as usize % 11);
        let s = random_disk_instance(n, 60_000 + i, &rho);
        let g = growth_count(&disk, &s).map_err(|e| e.to_string())?;
        ensure(g.within_bound && g.count <= n * n - n + 2, || format!("instance {i}: {g:?}"))?;
        worst = worst.max(g.count as f64 / g.bound as f64);
    }
    let two = PointSet::new(vec![Point::from_ints(0, 0), Point::from_ints(1, 0)]).unwrap();
    let g = growth_count(&BodySpec::unit_disk(), &two).map_err(|e| e.to_string())?;
    ensure(g.count == 4 && g.bound == 4, || format!("n=2 example: {g:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 10_000 {
        let q = uniform_square_points(4, &integer(1), 10, &mut rng);
        match vc_shatter_check(&disk, &q) {
            Ok(r) => {
                ensure(!r.shattered, || format!("shattered quadruple {:?}", q.points()))?;
                checked += 1;
            }
            Err(TcError::NotGeneralPositionRelativeToC(_)) => continue,
            Err(e) => return Err(e.to_string()),
        }
    }
    let line = PointSet::new((0..4).map(|i| Point::from_ints(i, 0)).collect()).unwrap();
    let r = vc_shatter_check(&BodySpec::disk(integer(3)), &line).map_err(|e| e.to_string())?;
    ensure(!r.shattered && r.missing == Some(vec![0, 2]), || format!("collinear certificate {:?}", r.missing))?;
    Ok(format!("growth max count/bound = {worst:.3}, n=2 equality, {checked} quadruples unshattered, collinear-4 misses {{0,2}}"))
}

fn constructions() -> Outcome {
    let s = cross_construction_square(8).map_err(|e| e.to_string())?;
    let h = rational(1, 2);
    let z = Rational::zero();
    let want: Vec<Point> = vec![
        Point2::new(integer(-1), z.clone()),
        Point2::new(-h.clone(), z.clone()),
        Point2::new(h.clone(), z.clone()),
        Point2::new(integer(1), z.clone()),
        Point2::new(z.clone(), integer(-1)),
        Point2::new(z.clone(), -h.clone()),
        Point2::new(z.clone(), h),
        Point2::new(z, integer(1)),
    ];
    ensure(s.points() == want.as_slice(), || "square construction differs".into())?;
    let mut rec = Vec::new();
    for n in [8usize, 16] {
        let s = cross_construction_square(n).map_err(|e| e.to_string())?;
        let (a, _) = tc_k_sets(&BodySpec::OpenUnitSquare, &s, n / 2 - 2).map_err(|e| e.to_string())?;
        ensure(a >= n * n / 16, || format!("square n={n}: a = {a} < {}", n * n / 16))?;
        rec.push(format!("square n={n} a_{}={a}", n / 2 - 2));
        let disk = BodySpec::unit_disk();
        let s = cross_construction_c2(&disk, n, &TParam::Auto).map_err(|e| e.to_string())?;
        let (a, _) = tc_k_sets(&disk, &s, n / 2).map_err(|e| e.to_string())?;
        ensure(a >= n * n / 16, || format!("disk n={n}: a = {a} < {}", n * n / 16))?;
        rec.push(format!("disk n={n} a_{}={a}", n / 2));
    }
    Ok(format!("verbatim n=8; {} (threshold n^2/16)", rec.join(", ")))
}

fn scaling() -> Outcome {
    let cfg = ScalingConfig::new(vec![16, 24, 32, 48, 64], 200, 2024, ScalingStatistic::Sets);
    let res = tc_scaling_experiment(&cfg).map_err(|e| e.to_string())?;
    let means: Vec<String> = res.records.iter().map(|r| format!("{}:{:.1}", r.n, r.max_mean)).collect();
    ensure((1.2..=1.8).contains(&res.slope), || format!("slope {:.3} outside [1.2, 1.8]", res.slope))?;
    ensure(res.records.iter().all(|r| r.within_window), || "argmax outside the pn window".into())?;
    Ok(format!("slope {:.3}, max means {}", res.slope, means.join(" ")))
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap().install(f)
}

fn experiment_csv() -> String {
    let mut out = String::new();
    let cfg = ScalingConfig::new(vec![12, 20], 16, 9, ScalingStatistic::Edges);
    out += &tc_scaling_experiment(&cfg).unwrap().to_csv();
    for r in direct_expected_k_edges_multi(&DistributionSpec::unit_disk(), 20, &[2, 5, 9], 300, 4).unwrap() {
        out += &r.csv_row();
        out.push('\n');
    }
    let f = formula_expected_k_edges(&DistributionSpec::standard_gaussian(), 20, 5, 20_000, 5).unwrap();
    out += &f.csv_row();
    out.push('\n');
    let cfg = SearchConfig {
        n: 16,
        r: 3,
        generators: Generator::ALL.to_vec(),
        families: CurveFamily::ALL.to_vec(),
        seed: 6,
        budget: 12,
        k: None,
    };
    for row in question1_search(&cfg).unwrap().rows {
        out += &row.csv_row();
        out.push('\n');
    }
    out
}

fn determinism() -> Outcome {
    let one = with_workers(1, experiment_csv);
    for w in [2usize, 4] {
        let other = with_workers(w, experiment_csv);
        ensure(one == other, || format!("CSV differs between 1 and {w} workers"))?;
    }
    Ok(format!("{} bytes identical across 1, 2, 4 workers", one.len()))
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "sweep equals naive oracle", limit: Some(Duration::from_secs(60)), run: oracle_equivalence },
        Criterion { id: 2, name: "combinatorial identities", limit: None, run: combinatorial_identities },
        Criterion { id: 3, name: "chain decomposition", limit: Some(Duration::from_secs(120)), run: chain_decompositions },
        Criterion { id: 4, name: "direct vs formula estimates", limit: Some(Duration::from_secs(600)), run: cross_validation },
        Criterion { id: 5, name: "10n(k+1)^(1/4) bound", limit: None, run: facet_bound },
        Criterion { id: 6, name: "curve intersections", limit: None, run: curve_intersections },
        Criterion { id: 7, name: "Hessian examples", limit: None, run: hessian_examples },
        Criterion { id: 8, name: "translation exact suite", limit: Some(Duration::from_secs(600)), run: tc_exact_suite },
        Criterion { id: 9, name: "growth and VC", limit: None, run: growth_and_vc },
        Criterion { id: 10, name: "constructions", limit: None, run: constructions },
        Criterion { id: 11, name: "scaling slope", limit: Some(Duration::from_secs(1800)), run: scaling },
        Criterion { id: 12, name: "determinism across workers", limit: None, run: determinism },
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in &criteria {
        if !only.is_empty() && !only.contains(&c.id) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.1?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} [{:>7.2?}] {}: {detail}", c.id, elapsed, c.name);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
