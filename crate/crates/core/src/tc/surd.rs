//! Numbers `a + b sqrt(d)` with rational `a`, `b` and `d >= 0`.

use std::cmp::Ordering;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::geom::Point2;
use crate::scalar::{sqrt_bounds, Scalar, Sign};
use crate::Rational;

/// Sign of `a + b sqrt(d)` for any exact scalar, `d >= 0`.
pub fn surd_sign<T: Scalar>(a: &T, b: &T, d: &T) -> Sign {
    let sa = Sign::of(a);
    let sb = if d.is_zero() { Sign::Zero } else { Sign::of(b) };
    if sb == Sign::Zero {
        return sa;
    }
    if sa == Sign::Zero || sa == sb {
        return if sa == Sign::Zero { sb } else { sa };
    }
    let diff = a.clone() * a.clone() - b.clone() * b.clone() * d.clone();
    Sign::of(&diff) * sa
}

#[derive(Clone, Debug, PartialEq)]
pub struct Surd {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

impl Surd {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Surd {
        assert!(!d.is_negative(), "negative radicand");
        if d.is_zero() || b.is_zero() {
            Surd { a, b: Rational::zero(), d: Rational::zero() }
        } else {
            Surd { a, b, d }
        }
    }

    pub fn rational(a: Rational) -> Surd {
        Surd { a, b: Rational::zero(), d: Rational::zero() }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn sign(&self) -> Sign {
        surd_sign(&self.a, &self.b, &self.d)
    }

    /// Exact comparison; the radicands may differ.
    pub fn cmp(&self, other: &Surd) -> Ordering {
        let alpha = &self.a - &other.a;
        if self.d == other.d || other.is_rational() || self.is_rational() {
            // one radicand suffices
            let (b, d) = if self.is_rational() {
                (-other.b.clone(), other.d.clone())
            } else if other.is_rational() {
                (self.b.clone(), self.d.clone())
            } else {
                (&self.b - &other.b, self.d.clone())
            };
            return ordering(surd_sign(&alpha, &b, &d));
        }
        // sign(P - Q) with P = alpha + b1 sqrt d1, Q = b2 sqrt d2
        let sp = surd_sign(&alpha, &self.b, &self.d);
        let sq = Sign::of(&other.b);
        if sp != sq {
            return ordering(if sp == Sign::Zero { -sq } else { sp });
        }
        let rest = &alpha * &alpha + &self.b * &self.b * &self.d - &other.b * &other.b * &other.d;
        let cross = &alpha * &self.b * Rational::from_integer(2.into());
        ordering(surd_sign(&rest, &cross, &self.d) * sp)
    }

    /// Rational enclosure `[lo, hi]`, tight to about `|b| 2^-bits`.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.a.clone(), self.a.clone());
        }
        let (lo, hi) = sqrt_bounds(&self.d, bits);
        let x = &self.a + &self.b * &lo;
        let y = &self.a + &self.b * &hi;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// A rational strictly between `self` and a larger surd.
    pub fn rational_between(&self, upper: &Surd) -> Rational {
        debug_assert_eq!(self.cmp(upper), Ordering::Less);
        let mut bits = 16;
        loop {
            let (_, hi) = self.bounds(bits);
            let (lo, _) = upper.bounds(bits);
            if hi < lo {
                return (hi + lo) / Rational::from_integer(2.into());
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

fn ordering(s: Sign) -> Ordering {
    match s {
        Sign::Negative => Ordering::Less,
        Sign::Zero => Ordering::Equal,
        Sign::Positive => Ordering::Greater,
    }
}

/// A point whose coordinates share one radicand: `a + b sqrt(d)` with
/// `a`, `b` rational points.
#[derive(Clone, Debug, PartialEq)]
pub struct SurdPoint {
    pub a: Point2<Rational>,
    pub b: Point2<Rational>,
    pub d: Rational,
}

impl SurdPoint {
    pub fn x(&self) -> Surd {
        Surd::new(self.a.x.clone(), self.b.x.clone(), self.d.clone())
    }

    pub fn y(&self) -> Surd {
        Surd::new(self.a.y.clone(), self.b.y.clone(), self.d.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_zero() || (self.b.x.is_zero() && self.b.y.is_zero())
    }

    /// Rational approximation with error about `|b| 2^-bits` per coordinate.
    pub fn approx(&self, bits: u32) -> Point2<Rational> {
        if self.is_rational() {
            return self.a.clone();
        }
        let (lo, hi) = sqrt_bounds(&self.d, bits);
        let r = (lo + hi) / Rational::from_integer(2.into());
        Point2::new(&self.a.x + &self.b.x * &r, &self.a.y + &self.b.y * &r)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x().to_f64(), self.y().to_f64())
    }

    /// Sign of `|s - self|^2 - r2`.
    pub fn side(&self, s: &Point2<Rational>, r2: &Rational) -> Sign {
        // s - c = (s - a) - b sqrt d
        let w = s.sub(&self.a);
        let alpha = w.norm2() + self.b.norm2() * &self.d - r2;
        let beta = -(w.dot(&self.b) * Rational::from_integer(2.into()));
        surd_sign(&alpha, &beta, &self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{integer, rational};

    #[test]
    fn signs_and_order() {
        // 1 - sqrt 2 < 0 and 3/2 - sqrt 2 > 0
        assert_eq!(Surd::new(integer(1), integer(-1), integer(2)).sign(), Sign::Negative);
        assert_eq!(Surd::new(rational(3, 2), integer(-1), integer(2)).sign(), Sign::Positive);
        let r2 = Surd::new(integer(0), integer(1), integer(2));
        let r3 = Surd::new(integer(0), integer(1), integer(3));
        assert_eq!(r2.cmp(&r3), Ordering::Less);
        // 1 + sqrt 2 vs sqrt 6
        let lhs = Surd::new(integer(1), integer(1), integer(2));
        let a = Surd::new(integer(0), integer(1), integer(6));
        assert_eq!(lhs.cmp(&a), Ordering::Less);
        // 2 sqrt 2 equals sqrt 8
        let b = Surd::new(integer(0), integer(2), integer(2));
        let c = Surd::new(integer(0), integer(1), integer(8));
        assert_eq!(b.cmp(&c), Ordering::Equal);
        let q = r2.rational_between(&r3);
        assert!(Surd::rational(q.clone()).cmp(&r2) == Ordering::Greater);
        assert!(Surd::rational(q).cmp(&r3) == Ordering::Less);
    }
}
