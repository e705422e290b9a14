//! Root isolation helpers shared by the curve tests, written independently
//! of the library's Sturm machinery.
#![allow(dead_code)]

use kset_core::poly::Poly;
use kset_core::scalar::rational;
use kset_core::Rational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coeffs(p: &Poly) -> Vec<Rational> {
    p.coeffs().to_vec()
}

fn sign_changes(c: &[Rational]) -> usize {
    let s: Vec<bool> = c.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `p(a + (b - a) x)` as coefficients.
fn affine(c: &[Rational], a: &Rational, w: &Rational) -> Vec<Rational> {
    // Horner with polynomials in x
    let mut out: Vec<Rational> = vec![Rational::zero()];
    for v in c.iter().rev() {
        // out = out * (a + w x) + v
        let mut next = vec![Rational::zero(); out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i] += o * a;
            next[i + 1] += o * w;
        }
        next[0] += v;
        out = next;
    }
    out
}

/// Descartes bound for roots of `c` in `(0, 1)`: variations of
/// `(1 + x)^d p(1 / (1 + x))`.
fn descartes01(c: &[Rational]) -> usize {
    let rev: Vec<Rational> = c.iter().rev().cloned().collect();
    let shifted = affine(&rev, &Rational::one(), &Rational::one());
    sign_changes(&shifted)
}

fn eval(c: &[Rational], t: &Rational) -> Rational {
    c.iter().rev().fold(Rational::zero(), |acc, v| acc * t + v)
}

/// Distinct roots of a square-free polynomial in `(lo, hi)` by exact
/// Descartes-rule bisection.
pub fn bisection_count(p: &Poly) -> usize {
    fn go(c: &[Rational], lo: &Rational, hi: &Rational, depth: usize) -> usize {
        let local = affine(c, lo, &(hi - lo));
        match descartes01(&local) {
            0 => 0,
            1 => 1,
            _ => {
                assert!(depth < 200, "bisection did not separate roots");
                let mid = (lo + hi) / rational(2, 1);
                let at_mid = eval(c, &mid).is_zero() as usize;
                go(c, lo, &mid, depth + 1) + at_mid + go(c, &mid, hi, depth + 1)
            }
        }
    }
    go(&coeffs(p), &Rational::zero(), &Rational::one(), 0)
}

/// A random polynomial with a known number of distinct roots in `(0, 1)`.
/// Factors are distinct unless `repeat` is set, in which case some are
/// squared; endpoints 0 and 1 may appear as roots but are not counted.
pub fn known_root_poly(seed: u64, max_degree: usize, repeat: bool) -> (Poly, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Poly::constant(rational(rng.random_range(1..=9), rng.random_range(1..=5)));
    let mut roots: Vec<Rational> = Vec::new();
    let mut inside = 0;
    let mut degree = 0;
    while degree < max_degree {
        let room = max_degree - degree;
        let kind = rng.random_range(0..4);
        if kind <= 1 {
            // linear factor t - a, a distinct from earlier roots
            let a = rational(rng.random_range(-20..=40), 20);
            if roots.contains(&a) {
                continue;
            }
            roots.push(a.clone());
            if a > Rational::zero() && a < Rational::one() {
                inside += 1;
            }
            let mult = if repeat && room >= 2 && rng.random_bool(0.3) { 2 } else { 1 };
            p = &p * &Poly::linear(-a, Rational::one()).pow(mult);
            degree += mult;
        } else if kind == 2 && room >= 2 {
            // t^2 + c with no real roots
            let c = rational(rng.random_range(1..=30), 10);
            p = &p * &Poly::new(vec![c, Rational::zero(), Rational::one()]);
            degree += 2;
        } else if room >= 2 {
            // (t - a)^2 - b with b = 2 m^2 / 100, roots a +- m sqrt 2 / 10
            let a = rational(rng.random_range(0..=20), 20);
            let m = rng.random_range(1..=6) as f64;
            let b = rational(2 * (m as i64) * (m as i64), 100);
            let af = a.numer().to_string().parse::<f64>().unwrap() / a.denom().to_string().parse::<f64>().unwrap();
            let r = m * std::f64::consts::SQRT_2 / 10.0;
            inside += [af - r, af + r].iter().filter(|&&x| x > 0.0 && x < 1.0).count();
            let lin = Poly::linear(-a, Rational::one());
            p = &p * &(&(&lin * &lin) - &Poly::constant(b));
            degree += 2;
        }
    }
    (p, inside)
}
