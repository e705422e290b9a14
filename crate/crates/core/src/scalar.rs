//! Scalar abstraction shared by the exact predicates, plus rational helpers.
//!
//! Algorithms are written against [`Scalar`]; the crate instantiates them with
//! [`BigRational`] for exact user-facing work and with `i128` on integer
//! lattices when a point set is known to fit (see `PointSet::to_lattice`).

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Numeric type usable by the geometric kernels.
///
/// Every predicate in the crate only needs ring operations and an ordering,
/// so integers (`i128`), exact rationals and floats all qualify. Only the
/// exact instantiations carry the determinism guarantees.
pub trait Scalar: Clone + PartialOrd + Debug + Num + Signed + Send + Sync {}

impl<T> Scalar for T where T: Clone + PartialOrd + Debug + Num + Signed + Send + Sync {}

/// Sign of an exact quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of<T: Scalar>(v: &T) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn from_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_ordering((self.as_i32() * rhs.as_i32()).cmp(&0))
    }
}

/// Total order for scalars that are known not to be NaN.
pub fn cmp_scalar<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("scalar comparison on unordered value")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}` as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

/// Parses an optionally signed integer, a decimal (optionally with an
/// exponent) or a `p/q` fraction into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    let s = text.trim();
    let err = || ParseRationalError { input: text.to_string() };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Exact rational image of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Rounds `x` to the dyadic grid `2^-bits`, exactly.
pub fn dyadic_round(x: f64, bits: i32) -> BigRational {
    let scaled = x * 2f64.powi(bits);
    let n = BigInt::from(scaled.round() as i128);
    if bits >= 0 {
        BigRational::new(n, BigInt::one() << bits as usize)
    } else {
        BigRational::from_integer(n << (-bits) as usize)
    }
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Lower and upper rational bounds on `sqrt(value)` with error at most `2^-bits`.
pub fn sqrt_bounds(value: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!value.is_negative(), "square root of a negative rational");
    // floor(sqrt(value * 4^bits)) / 2^bits
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (value.numer() * &scale).div_floor(value.denom());
    let root = scaled.sqrt();
    let den = BigInt::one() << bits as usize;
    let lo = BigRational::new(root.clone(), den.clone());
    let hi = BigRational::new(root + BigInt::one(), den);
    (lo, hi)
}

/// Serde adapter: rationals are written as `"p/q"` strings and read from
/// strings or JSON numbers (numbers go through their shortest decimal form,
/// so `0.1` reads as exactly `1/10`).
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Float(f64),
        Text(String),
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<BigRational, E> {
        let text = match r {
            Repr::Int(i) => i.to_string(),
            Repr::Float(f) if f.is_finite() => format!("{f}"),
            Repr::Float(f) => return Err(E::custom(format!("non-finite number {f}"))),
            Repr::Text(t) => t,
        };
        super::parse_rational(&text).map_err(E::custom)
    }

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    /// Same encoding for `[x, y]` points.
    pub mod point {
        use super::Repr;
        use crate::geom::Point2;
        use num_rational::BigRational;
        use serde::ser::SerializeTuple;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(p: &Point2<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            let mut t = s.serialize_tuple(2)?;
            t.serialize_element(&crate::scalar::format_rational(&p.x))?;
            t.serialize_element(&crate::scalar::format_rational(&p.y))?;
            t.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Point2<BigRational>, D::Error> {
            let [x, y] = <[Repr; 2]>::deserialize(d)?;
            Ok(Point2::new(super::from_repr(x)?, super::from_repr(y)?))
        }
    }

    pub mod points {
        use super::Repr;
        use crate::geom::Point2;
        use num_rational::BigRational;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Point2<BigRational>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for p in v {
                seq.serialize_element(&[
                    crate::scalar::format_rational(&p.x),
                    crate::scalar::format_rational(&p.y),
                ])?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Point2<BigRational>>, D::Error> {
            Vec::<[Repr; 2]>::deserialize(d)?
                .into_iter()
                .map(|[x, y]| Ok(Point2::new(super::from_repr(x)?, super::from_repr(y)?)))
                .collect()
        }
    }
}

/// Float with 17 significant digits, the CSV convention.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_supported_forms() {
        assert_eq!(parse_rational("3").unwrap(), integer(3));
        assert_eq!(parse_rational("-3/6").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rational(1, 4));
        assert_eq!(parse_rational("+.5").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-1.5e2").unwrap(), integer(-150));
        assert_eq!(parse_rational("25e-2").unwrap(), rational(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn dyadic_rounding_is_exact_on_grid() {
        assert_eq!(dyadic_round(0.75, 2), rational(3, 4));
        assert_eq!(dyadic_round(0.3, 1), rational(1, 2));
        assert_eq!(dyadic_round(3.0, -1), integer(4));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let two = integer(2);
        let (lo, hi) = sqrt_bounds(&two, 40);
        assert!(&lo * &lo <= two && &hi * &hi > two);
        assert!(&hi - &lo <= BigRational::new(BigInt::one(), BigInt::one() << 40usize));
    }

    #[test]
    fn sign_algebra() {
        assert_eq!(Sign::Negative * Sign::Negative, Sign::Positive);
        assert_eq!(-Sign::Positive, Sign::Negative);
        assert_eq!(Sign::of(&-3i128), Sign::Negative);
    }
}
