//! 2x2 matrices over A = F_q[T] and over K = F_q(T).

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::poly::Poly;
use crate::ratfn::RationalFn;

/// `(a b; c d)` with polynomial entries.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2A {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl Mat2A {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Mat2A {
        Mat2A { a, b, c, d }
    }
    pub fn identity(f: Fq) -> Mat2A {
        Mat2A::new(Poly::one(f), Poly::zero(f), Poly::zero(f), Poly::one(f))
    }
    /// `(x 0; 0 y)`.
    pub fn diag(x: Poly, y: Poly) -> Mat2A {
        let f = x.field();
        Mat2A::new(x, Poly::zero(f), Poly::zero(f), y)
    }
    /// `(1 b; 0 1)`.
    pub fn translation(b: Poly) -> Mat2A {
        let f = b.field();
        Mat2A::new(Poly::one(f), b, Poly::zero(f), Poly::one(f))
    }
    /// `(0 1; 1 0)`.
    pub fn swap(f: Fq) -> Mat2A {
        Mat2A::new(Poly::zero(f), Poly::one(f), Poly::one(f), Poly::zero(f))
    }
    pub fn field(&self) -> Fq {
        self.a.field()
    }
    pub fn det(&self) -> Poly {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }
    pub fn mul(&self, o: &Mat2A) -> Mat2A {
        Mat2A::new(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }
    /// Inverse in GL₂(A); requires a unit determinant.
    pub fn inverse(&self) -> Result<Mat2A> {
        let det = self.det();
        if !det.is_unit() {
            return Err(Error::Domain("matrix is not invertible over A".into()));
        }
        let k = self.field().inv(det.lc());
        Ok(Mat2A::new(self.d.scale(k), (-&self.b).scale(k), (-&self.c).scale(k), self.a.scale(k)))
    }
    pub fn to_k(&self) -> Mat2K {
        Mat2K::new(
            self.a.clone().into(),
            self.b.clone().into(),
            self.c.clone().into(),
            self.d.clone().into(),
        )
    }
}

impl fmt::Display for Mat2A {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

/// `(a b; c d)` with entries in K.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat2K {
    pub a: RationalFn,
    pub b: RationalFn,
    pub c: RationalFn,
    pub d: RationalFn,
}

impl Mat2K {
    pub fn new(a: RationalFn, b: RationalFn, c: RationalFn, d: RationalFn) -> Mat2K {
        Mat2K { a, b, c, d }
    }
    pub fn identity(f: Fq) -> Mat2K {
        Mat2A::identity(f).to_k()
    }
    pub fn field(&self) -> Fq {
        self.a.field()
    }
    pub fn det(&self) -> RationalFn {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }
    pub fn mul(&self, o: &Mat2K) -> Mat2K {
        Mat2K::new(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }
    pub fn inverse(&self) -> Result<Mat2K> {
        let det = self.det();
        let inv = det.inv()?;
        Ok(Mat2K::new(
            &self.d * &inv,
            &(-&self.b) * &inv,
            &(-&self.c) * &inv,
            &self.a * &inv,
        ))
    }
    /// `(π^k u; 0 1)` with π = 1/T.
    pub fn iwasawa(k: i64, u: RationalFn) -> Mat2K {
        let f = u.field();
        Mat2K::new(RationalFn::t_pow(f, -k), u, RationalFn::zero(f), RationalFn::one(f))
    }
    /// `(0 1; π 0)`, which sends an edge to its reversal.
    pub fn flip(f: Fq) -> Mat2K {
        Mat2K::new(RationalFn::zero(f), RationalFn::one(f), RationalFn::pi(f), RationalFn::zero(f))
    }
    /// `diag(T^r, 1)`.
    pub fn diag_t(f: Fq, r: i64) -> Mat2K {
        Mat2K::new(RationalFn::t_pow(f, r), RationalFn::zero(f), RationalFn::zero(f), RationalFn::one(f))
    }
    /// Multiply by a common denominator so that every entry is a polynomial.
    /// Scalars act trivially on the tree, so the result names the same edge.
    pub fn clear_denominators(&self) -> Mat2A {
        let den = self.a.den().lcm(self.b.den()).lcm(self.c.den()).lcm(self.d.den());
        let lift = |x: &RationalFn| (x.num() * &den).quo(x.den());
        Mat2A::new(lift(&self.a), lift(&self.b), lift(&self.c), lift(&self.d))
    }
}

impl fmt::Display for Mat2K {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}
