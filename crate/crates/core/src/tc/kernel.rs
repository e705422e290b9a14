//! Integer predicates for translated disks of radius `R` around lattice
//! points. Used with `i128` when coordinates are small enough and with
//! `BigInt` otherwise.
//!
//! For a pair `p, q` with `v = q - p` and `|v| < 2R`, the two disks through
//! both points have centres `m + sigma sqrt(D) Jv`, where `m` is the
//! midpoint, `Jv = (-v.y, v.x)` and `D = R^2/|v|^2 - 1/4`.

use std::cmp::Ordering;

use crate::geom::Point2;
use crate::scalar::{cmp_scalar, Scalar, Sign};

use super::surd::surd_sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairKind {
    Crossing,
    Tangent,
    Apart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RegionTest {
    Inside,
    Boundary,
    Outside,
}

pub(crate) struct Lat<T> {
    pub pts: Vec<Point2<T>>,
    pub r2: T,
    four_r2: T,
}

fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

impl<T: Scalar> Lat<T> {
    pub fn new(pts: Vec<Point2<T>>, r: T) -> Self {
        let r2 = r.clone() * r;
        let four_r2 = r2.clone() * two::<T>() * two::<T>();
        Lat { pts, r2, four_r2 }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn pair(&self, i: usize, j: usize) -> PairKind {
        let v2 = self.pts[j].sub(&self.pts[i]).norm2();
        match cmp_scalar(&v2, &self.four_r2) {
            Ordering::Less => PairKind::Crossing,
            Ordering::Equal => PairKind::Tangent,
            Ordering::Greater => PairKind::Apart,
        }
    }

    /// Sign of `|s - c|^2 - R^2` for the centre `c` of pair `(i, j)` with
    /// orientation `sigma`: negative inside, zero on the circle.
    pub fn side(&self, i: usize, j: usize, sigma: i8, s: usize) -> Sign {
        let (p, q, s) = (&self.pts[i], &self.pts[j], &self.pts[s]);
        let v = q.sub(p);
        let v2 = v.norm2();
        let e = self.four_r2.clone() - v2.clone();
        let tw = Point2::new(
            two::<T>() * s.x.clone() - p.x.clone() - q.x.clone(),
            two::<T>() * s.y.clone() - p.y.clone() - q.y.clone(),
        );
        let a = tw.norm2() - v2.clone();
        let jv = Point2::new(-v.y.clone(), v.x.clone());
        let b = tw.dot(&jv) * two::<T>() * two::<T>();
        // value = a - sigma b sqrt(e) / (2 |v|)
        let sx = Sign::of(&a);
        let mut sy = if Sign::of(&e).is_zero() { Sign::Zero } else { Sign::of(&b) };
        if sigma < 0 {
            sy = -sy;
        }
        if sy == Sign::Zero {
            return sx;
        }
        if sx == Sign::Zero {
            return -sy;
        }
        if sx != sy {
            return sx;
        }
        let lhs = a.clone() * a * two::<T>() * two::<T>() * v2;
        let rhs = b.clone() * b * e;
        Sign::of(&(lhs - rhs)) * sx
    }

    /// Position of the centre of pair `(i, j)` relative to the closed square
    /// `[-h, h]^2`.
    pub fn centre_in_square(&self, i: usize, j: usize, sigma: i8, h: &T) -> RegionTest {
        let (p, q) = (&self.pts[i], &self.pts[j]);
        let v = q.sub(p);
        let v2 = v.norm2();
        let ev2 = (self.four_r2.clone() - v2.clone()) * v2.clone();
        let sg = |x: T| if sigma < 0 { -x } else { x };
        // 2c = (p + q) + sigma sqrt(e / v2) Jv
        let coords = [
            (p.x.clone() + q.x.clone(), sg(-v.y.clone())),
            (p.y.clone() + q.y.clone(), sg(v.x.clone())),
        ];
        let h2 = two::<T>() * h.clone();
        let mut on_boundary = false;
        for (base, coef) in coords {
            // base + coef sqrt(ev2) / v2 against +-2h, scaled by v2
            let upper = surd_sign(&((base.clone() - h2.clone()) * v2.clone()), &coef, &ev2);
            let lower = surd_sign(&((base + h2.clone()) * v2.clone()), &coef, &ev2);
            if upper == Sign::Positive || lower == Sign::Negative {
                return RegionTest::Outside;
            }
            on_boundary |= upper.is_zero() || lower.is_zero();
        }
        if on_boundary {
            RegionTest::Boundary
        } else {
            RegionTest::Inside
        }
    }

    /// Crossings of circle `i` with the four sides of `[-h, h]^2`, as lists
    /// of `(inside mask, on-boundary flag)` for the other points at each
    /// crossing. `Err` when a crossing hits a corner or the circle only
    /// touches a side.
    pub fn square_crossings(&self, i: usize, h: &T) -> Result<Vec<(u128, bool)>, ()> {
        let c = &self.pts[i];
        let mut out = Vec::new();
        for axis in 0..2 {
            for side in [h.clone(), -h.clone()] {
                // fixed coordinate `side` along `axis`; free coordinate y
                let (cf, cy) = if axis == 0 { (&c.x, &c.y) } else { (&c.y, &c.x) };
                let df = side.clone() - cf.clone();
                let e = self.r2.clone() - df.clone() * df;
                match Sign::of(&e) {
                    Sign::Negative => continue,
                    Sign::Zero => return Err(()),
                    Sign::Positive => {}
                }
                for sgn in [T::one(), -T::one()] {
                    // y = cy + sgn sqrt(e); need |y| < h
                    let hi = surd_sign(&(cy.clone() - h.clone()), &sgn, &e);
                    let lo = surd_sign(&(cy.clone() + h.clone()), &sgn, &e);
                    if hi.is_zero() || lo.is_zero() {
                        return Err(());
                    }
                    if hi == Sign::Positive || lo == Sign::Negative {
                        continue;
                    }
                    let mut mask = 0u128;
                    let mut touched = false;
                    for (j, s) in self.pts.iter().enumerate() {
                        if j == i {
                            continue;
                        }
                        let (sf, sy) = if axis == 0 { (&s.x, &s.y) } else { (&s.y, &s.x) };
                        let dx = side.clone() - sf.clone();
                        let dy = cy.clone() - sy.clone();
                        let alpha = dx.clone() * dx + dy.clone() * dy.clone() + e.clone() - self.r2.clone();
                        let beta = two::<T>() * dy * sgn.clone();
                        match surd_sign(&alpha, &beta, &e) {
                            Sign::Negative => mask |= 1 << j,
                            Sign::Zero => touched = true,
                            Sign::Positive => {}
                        }
                    }
                    out.push((mask, touched));
                }
            }
        }
        Ok(out)
    }

    /// Inside mask of the disk centred at the lattice point `x`, and whether
    /// any point lies on its circle.
    pub fn mask_at(&self, x: &Point2<T>) -> (u128, bool) {
        let mut mask = 0u128;
        let mut touched = false;
        for (j, s) in self.pts.iter().enumerate() {
            match Sign::of(&(s.sub(x).norm2() - self.r2.clone())) {
                Sign::Negative => mask |= 1 << j,
                Sign::Zero => touched = true,
                Sign::Positive => {}
            }
        }
        (mask, touched)
    }

    /// Whether `a, b, c` lie on one circle of radius `R`.
    pub fn concyclic(&self, a: usize, b: usize, c: usize) -> bool {
        let (pa, pb, pc) = (&self.pts[a], &self.pts[b], &self.pts[c]);
        let cr = pb.sub(pa).cross(&pc.sub(pa));
        if Sign::of(&cr).is_zero() {
            return false;
        }
        let l = pa.sub(pb).norm2() * pb.sub(pc).norm2() * pc.sub(pa).norm2();
        l == self.four_r2.clone() * cr.clone() * cr
    }

    /// A triple on one circle of radius `R`, if any.
    pub fn concyclic_triple(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                // three points on a circle of radius R are pairwise within 2R
                if self.pair(a, b) == PairKind::Apart {
                    continue;
                }
                for c in b + 1..n {
                    if self.concyclic(a, b, c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }
}
