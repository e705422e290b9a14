//! Point sets with many T_C-k-sets.

use num_traits::{One, Signed, Zero};

use super::{BodySpec, TcError};
use crate::geom::{Point2, PointSet};
use crate::{Point, Points, Rational};

/// `x`- and `y`-axis points `i (4/n)`, `0 < |i| <= n/4`: `n` points forming
/// a cross, listed along the x-axis then along the y-axis.
pub fn cross_construction_square(n: usize) -> Result<Points, TcError> {
    if n == 0 || n % 4 != 0 {
        return Err(TcError::BadN(n));
    }
    let m = (n / 4) as i64;
    let lambda = Rational::new(4.into(), (n as i64).into());
    let steps: Vec<Rational> = (-m..=m).filter(|&i| i != 0).map(|i| &lambda * Rational::from_integer(i.into())).collect();
    let mut pts: Vec<Point> = steps.iter().map(|v| Point2::new(v.clone(), Rational::zero())).collect();
    pts.extend(steps.iter().map(|v| Point2::new(Rational::zero(), v.clone())));
    Ok(PointSet::new(pts)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum TParam {
    /// `min(t_M, 4 / (alpha n))` with `t_M = rho/2` and `alpha = 7/(13 rho)`.
    Auto,
    Value(Rational),
}

/// The half-length `t` the construction uses for a disk of radius `rho`.
///
/// `alpha` must bound the cap depth, `rho - sqrt(rho^2 - x^2) <= alpha x^2`
/// for `|x| <= t_M`. The osculating value `1/(2 rho)` is too small; the
/// tight value at `t_M = rho/2` is `2/((2 + sqrt 3) rho) < 7/(13 rho)`.
pub fn auto_t(rho: &Rational, n: usize) -> Rational {
    let t_m = rho / Rational::from_integer(2.into());
    let alpha = Rational::new(7.into(), 13.into()) / rho;
    let t_n = Rational::from_integer(4.into()) / (alpha * Rational::from_integer((n as i64).into()));
    t_m.min(t_n)
}

/// Four segments of `n/4` equally spaced points, centred at the boundary
/// points with outer normals `e1, e2, -e1, -e2` and running along those
/// normals with half-length `t`. Ellipses are handled by building the
/// construction for the unit disk and mapping it through `M`.
pub fn cross_construction_c2(body: &BodySpec, n: usize, t: &TParam) -> Result<Points, TcError> {
    if n == 0 || n % 8 != 0 {
        return Err(TcError::BadN(n));
    }
    body.validate()?;
    let (rho, matrix) = match body {
        BodySpec::Disk { radius } => (radius.clone(), None),
        BodySpec::Ellipse { matrix } => (Rational::one(), Some(matrix.clone())),
        BodySpec::OpenUnitSquare => return Err(TcError::StrictConvexityRequired),
    };
    let t = match t {
        TParam::Auto => auto_t(&rho, n),
        TParam::Value(v) if v.is_positive() => v.clone(),
        TParam::Value(v) => return Err(TcError::InvalidParameter(format!("t = {v} must be positive"))),
    };
    let g = (n / 4) as i64;
    let normals = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut pts = Vec::with_capacity(n);
    for (ux, uy) in normals {
        let u = Point::from_ints(ux, uy);
        for j in 0..g {
            // offset runs from -t to t in g - 1 equal steps
            let off = -&t + &t * Rational::new((2 * j).into(), (g - 1).into());
            let r = &rho + off;
            let p = Point2::new(&u.x * &r, &u.y * &r);
            pts.push(match &matrix {
                Some(m) => m.apply(&p),
                None => p,
            });
        }
    }
    Ok(PointSet::new(pts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    #[test]
    fn auto_t_for_unit_disk() {
        assert_eq!(auto_t(&Rational::one(), 8), rational(1, 2));
        assert_eq!(auto_t(&Rational::one(), 16), rational(13, 28));
        assert_eq!(auto_t(&rational(2, 1), 32), rational(13, 28));
    }

    #[test]
    fn auto_alpha_bounds_the_cap() {
        // rho - sqrt(rho^2 - x^2) <= alpha x^2  <=>  rho - alpha x^2 <= sqrt(rho^2 - x^2)
        let (rho, x) = (Rational::one(), rational(1, 2));
        let lhs = &rho - rational(7, 13) * &x * &x;
        assert!(&lhs * &lhs <= &rho * &rho - &x * &x);
    }
}
