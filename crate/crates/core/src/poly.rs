//! Dense univariate polynomials, Sturm sequences and a modular
//! irreducibility test.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::{common_denominator, Scalar, Sign};

/// Coefficients from the constant term upward, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `a + b t`.
    pub fn linear(a: T, b: T) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut factor = T::zero();
        for c in self.coeffs.iter().skip(1) {
            factor = factor + T::one();
            out.push(c.clone() * factor.clone());
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Self::constant(T::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Quotient and remainder; the coefficient type must be a field.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (field coefficients).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&(T::one() / l)),
            None => a,
        }
    }

    pub fn sign_at(&self, t: &T) -> Sign {
        Sign::of(&self.eval(t))
    }
}

impl<T: Scalar> Add for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn add(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new(
            (0..len)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(T::zero);
                    let b = rhs.coeffs.get(i).cloned().unwrap_or_else(T::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl<T: Scalar> Neg for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn neg(self) -> UniPoly<T> {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Sub for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn sub(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn mul(self, rhs: &UniPoly<T>) -> UniPoly<T> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(out)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})t"),
                _ => format!("({c})t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

pub type Poly = UniPoly<BigRational>;

/// Scales `p` to a primitive integer polynomial with the same roots.
pub fn to_integer_poly(p: &Poly) -> Vec<BigInt> {
    let den = common_denominator(p.coeffs());
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &g).collect()
}

fn primitive(p: &Poly) -> Poly {
    Poly::new(to_integer_poly(p).into_iter().map(BigRational::from_integer).collect())
}

/// Sturm sequence of a square-free polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    /// Builds the chain `p0 = h, p1 = h', p_{i+1} = -rem(p_{i-1}, p_i)`.
    ///
    /// Members are kept primitive: positive rescaling does not change any
    /// sign and keeps coefficients small.
    pub fn new(h: &Poly) -> Self {
        let mut chain = vec![primitive(h)];
        let d = primitive(&h.derivative());
        if !d.is_zero() {
            chain.push(d);
            loop {
                let n = chain.len();
                let r = chain[n - 2].div_rem(&chain[n - 1]).1;
                if r.is_zero() {
                    break;
                }
                chain.push(primitive(&-&r));
            }
        }
        SturmChain { chain }
    }

    pub fn members(&self) -> &[Poly] {
        &self.chain
    }

    pub fn variations_at(&self, t: &BigRational) -> usize {
        let signs: Vec<Sign> = self.chain.iter().map(|p| p.sign_at(t)).filter(|s| !s.is_zero()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Outcome of counting roots on a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootCount {
    Count(usize),
    /// The polynomial vanishes identically.
    Contained,
}

/// Square-free part `g / gcd(g, g')`, monic.
pub fn square_free_part(g: &Poly) -> Poly {
    let d = g.derivative();
    if d.is_zero() {
        return g.clone();
    }
    let common = g.gcd(&d);
    g.div_rem(&common).0
}

/// Number of distinct real roots of `g` in the open interval `(0, 1)`.
pub fn sturm_root_count(g: &Poly) -> RootCount {
    if g.is_zero() {
        return RootCount::Contained;
    }
    let mut h = square_free_part(g);
    // remove roots at the endpoints, which the open interval excludes
    let zero = BigRational::zero();
    let one = BigRational::one();
    if h.eval(&zero).is_zero() {
        h = h.div_rem(&Poly::linear(zero.clone(), one.clone())).0;
    }
    if h.eval(&one).is_zero() {
        h = h.div_rem(&Poly::linear(-one.clone(), one.clone())).0;
    }
    if h.degree().unwrap_or(0) == 0 {
        return RootCount::Count(0);
    }
    let chain = SturmChain::new(&h);
    RootCount::Count(chain.variations_at(&zero) - chain.variations_at(&one))
}

/// Dense polynomial over `Z/p`, coefficients low to high.
type ModPoly = Vec<u64>;

fn trim(mut a: ModPoly) -> ModPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn mod_rem(a: &ModPoly, m: &ModPoly, p: u64) -> ModPoly {
    let mut r = a.clone();
    let dm = m.len() - 1;
    let inv = mod_inv(m[dm], p);
    while r.len() > dm && !r.is_empty() {
        let top = r.len() - 1;
        let c = r[top] * inv % p;
        if c != 0 {
            for (j, mc) in m.iter().enumerate() {
                let idx = top - dm + j;
                r[idx] = (r[idx] + p - c * mc % p) % p;
            }
        }
        r.pop();
        r = trim(r);
    }
    trim(r)
}

fn mod_mul(a: &ModPoly, b: &ModPoly, m: &ModPoly, p: u64) -> ModPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    mod_rem(&trim(out), m, p)
}

fn mod_gcd(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let r = mod_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_sub(a: &ModPoly, b: &ModPoly, p: u64) -> ModPoly {
    let len = a.len().max(b.len());
    trim((0..len).map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p).collect())
}

/// `x^(p^e) mod m`.
fn frobenius_power(m: &ModPoly, p: u64, e: usize) -> ModPoly {
    let mut x = mod_rem(&vec![0, 1], m, p);
    for _ in 0..e {
        // raise to the p-th power by square and multiply
        let mut result: ModPoly = vec![1];
        let mut base = x.clone();
        let mut k = p;
        while k > 0 {
            if k & 1 == 1 {
                result = mod_mul(&result, &base, m, p);
            }
            base = mod_mul(&base, &base, m, p);
            k >>= 1;
        }
        x = result;
    }
    x
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test over `Z/p` for a polynomial of full degree.
fn irreducible_mod_p(f: &ModPoly, p: u64) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x: ModPoly = vec![0, 1];
    for q in prime_factors(n) {
        let h = mod_sub(&frobenius_power(f, p, n / q), &x, p);
        if mod_gcd(f, &h, p).len() != 1 {
            return false;
        }
    }
    mod_sub(&frobenius_power(f, p, n), &x, p).is_empty()
}

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// True when `g` is certified irreducible over the rationals because it is
/// irreducible modulo a prime that preserves its degree. False means no
/// certificate was found, not that `g` factors.
pub fn certify_irreducible_over_q(g: &Poly) -> bool {
    let Some(deg) = g.degree() else { return false };
    if deg == 0 {
        return false;
    }
    let ints = to_integer_poly(g);
    let lead = ints.last().expect("nonzero").clone();
    for p in SMALL_PRIMES {
        let pb = BigInt::from(p);
        if (&lead % &pb).is_zero() {
            continue;
        }
        let reduced: ModPoly = ints
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits"))
            .collect();
        if irreducible_mod_p(&reduced, p) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};

    fn poly(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&v| integer(v)).collect())
    }

    #[test]
    fn circle_restriction_roots() {
        // (4t - 2)^2 - 1 = 16t^2 - 16t + 3
        assert_eq!(sturm_root_count(&poly(&[3, -16, 16])), RootCount::Count(2));
        assert_eq!(sturm_root_count(&Poly::zero()), RootCount::Contained);
        assert_eq!(sturm_root_count(&poly(&[1, 0, 1])), RootCount::Count(0));
    }

    #[test]
    fn endpoint_and_repeated_roots() {
        // t (t - 1) has no roots in the open interval
        assert_eq!(sturm_root_count(&poly(&[0, -1, 1])), RootCount::Count(0));
        // (2t - 1)^3 has the single root 1/2
        let cube = poly(&[-1, 2]).pow(3);
        assert_eq!(sturm_root_count(&cube), RootCount::Count(1));
        let c = Poly::constant(rational(3, 2));
        assert_eq!(sturm_root_count(&c), RootCount::Count(0));
    }

    #[test]
    fn division_identity() {
        let a = poly(&[5, -3, 0, 7, 2]);
        let b = poly(&[1, 4, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn irreducibility_certificates() {
        assert!(certify_irreducible_over_q(&poly(&[-2, 0, 1])));
        assert!(certify_irreducible_over_q(&poly(&[1, 1, 0, 0, 1])));
        assert!(!certify_irreducible_over_q(&poly(&[-1, 0, 1])));
        assert!(!certify_irreducible_over_q(&(&poly(&[1, 0, 1]) * &poly(&[2, 1, 1]))));
    }
}
