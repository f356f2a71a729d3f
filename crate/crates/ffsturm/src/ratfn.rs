//! Rational functions in K = F_q(T) and the degree valuation at infinity.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::poly::Poly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> RationalFn {
        let f = num.field();
        if num.is_zero() {
            return RationalFn { num, den: Poly::one(f) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.quo(&g), den.quo(&g));
        let lc = d.lc();
        if lc != 1 {
            let inv = f.inv(lc);
            n = n.scale(inv);
            d = d.scale(inv);
        }
        RationalFn { num: n, den: d }
    }

    /// Parse `num` or `num / den`, each side a polynomial optionally in parentheses.
    pub fn parse(f: Fq, s: &str) -> Result<RationalFn> {
        let strip = |t: &str| -> String {
            let t = t.trim();
            match t.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                Some(inner) if !inner.contains(['(', ')']) => inner.to_string(),
                _ => t.to_string(),
            }
        };
        match s.split_once('/') {
            None => Ok(Self::from_poly(Poly::parse(f, &strip(s))?)),
            Some((n, d)) => Self::new(Poly::parse(f, &strip(n))?, Poly::parse(f, &strip(d))?),
        }
    }

    pub fn from_poly(p: Poly) -> RationalFn {
        let f = p.field();
        RationalFn { num: p, den: Poly::one(f) }
    }
    pub fn zero(f: Fq) -> RationalFn {
        Self::from_poly(Poly::zero(f))
    }
    pub fn one(f: Fq) -> RationalFn {
        Self::from_poly(Poly::one(f))
    }
    /// The uniformizer at infinity, 1/T.
    pub fn pi(f: Fq) -> RationalFn {
        RationalFn { num: Poly::one(f), den: Poly::t(f) }
    }
    /// `T^k` for any integer k.
    pub fn t_pow(f: Fq, k: i64) -> RationalFn {
        if k >= 0 {
            Self::from_poly(Poly::t_pow(f, k as usize))
        } else {
            RationalFn { num: Poly::one(f), den: Poly::t_pow(f, (-k) as usize) }
        }
    }

    pub fn field(&self) -> Fq {
        self.num.field()
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// ν_∞(a/b) = deg b − deg a; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.num.deg().map(|dn| self.den.deg_i() - dn as i64)
    }
    /// log_q |x|_∞ = −ν_∞(x); `None` for zero.
    pub fn log_abs(&self) -> Option<i64> {
        self.valuation().map(|v| -v)
    }

    pub fn inv(&self) -> Result<RationalFn> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    /// Polynomial part and proper remainder: `self = P + R` with ν_∞(R) ≥ 1.
    pub fn split(&self) -> (Poly, RationalFn) {
        let (q, r) = self.num.div_rem(&self.den);
        (q, Self::normalized(r, self.den.clone()))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<'a> Add<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<'a> Sub<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by zero; use [`RationalFn::inv`] for a checked inverse.
impl<'a> Div<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn div(self, rhs: &RationalFn) -> RationalFn {
        self * &rhs.inv().expect("division by zero rational function")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl From<Poly> for RationalFn {
    fn from(p: Poly) -> Self {
        RationalFn::from_poly(p)
    }
}
