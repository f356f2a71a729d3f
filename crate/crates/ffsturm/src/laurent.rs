//! Finite π-adic tails at infinity, where π = 1/T.

use crate::field::{Fq, FqElem};
use crate::poly::Poly;
use crate::ratfn::RationalFn;

/// `Σ coeffs[i] π^(start + i)`, stored without leading or trailing zeros.
/// The zero tail has no coefficients and `start = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentTail {
    field: Fq,
    start: i64,
    coeffs: Vec<FqElem>,
}

/// First `n` coefficients of the power series `1 / w`; requires `w[0] != 0`.
pub(crate) fn series_inv(f: Fq, w: &[FqElem], n: usize) -> Vec<FqElem> {
    let mut out = vec![0u8; n];
    if n == 0 {
        return out;
    }
    let inv0 = f.inv(w[0]);
    out[0] = inv0;
    for k in 1..n {
        let mut s = 0;
        for i in 1..=k.min(w.len() - 1) {
            s = f.add(s, f.mul(w[i], out[k - i]));
        }
        out[k] = f.neg(f.mul(s, inv0));
    }
    out
}

/// First `n` coefficients of the power series `a / b`; requires `b[0] != 0`.
pub(crate) fn series_div(f: Fq, a: &[FqElem], b: &[FqElem], n: usize) -> Vec<FqElem> {
    let binv = series_inv(f, b, n);
    let mut out = vec![0u8; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == 0 {
            continue;
        }
        for j in 0..n - i {
            out[i + j] = f.add(out[i + j], f.mul(ai, binv[j]));
        }
    }
    out
}

impl LaurentTail {
    pub fn new(field: Fq, start: i64, coeffs: Vec<FqElem>) -> LaurentTail {
        let mut t = LaurentTail { field, start, coeffs };
        t.normalize();
        t
    }

    pub fn zero(field: Fq) -> LaurentTail {
        LaurentTail { field, start: 0, coeffs: Vec::new() }
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            self.start = 0;
            self.coeffs.clear();
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
    }

    /// Terms of the expansion of `x` with exponent `< end`.
    pub fn from_ratfn(x: &RationalFn, end: i64) -> LaurentTail {
        let f = x.field();
        let v = match x.valuation() {
            None => return Self::zero(f),
            Some(v) => v,
        };
        if end <= v {
            return Self::zero(f);
        }
        let n = (end - v) as usize;
        let mut a: Vec<u8> = x.num().coeffs().to_vec();
        a.reverse();
        let mut b: Vec<u8> = x.den().coeffs().to_vec();
        b.reverse();
        LaurentTail::new(f, v, series_div(f, &a, &b, n))
    }

    /// `Σ c_i T^(-(start+i))` as an exact rational function.
    pub fn to_ratfn(&self) -> RationalFn {
        let f = self.field;
        if self.coeffs.is_empty() {
            return RationalFn::zero(f);
        }
        let top = self.start + self.coeffs.len() as i64 - 1;
        // π^e = T^(top - e) / T^top
        let mut num = vec![0u8; self.coeffs.len()];
        for (i, &c) in self.coeffs.iter().enumerate() {
            num[self.coeffs.len() - 1 - i] = c;
        }
        let p = Poly::new(f, &num);
        &RationalFn::from_poly(p) * &RationalFn::t_pow(f, -top)
    }

    pub fn field(&self) -> Fq {
        self.field
    }
    pub fn start(&self) -> i64 {
        self.start
    }
    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }
    /// Coefficient of π^e.
    pub fn coeff(&self, e: i64) -> FqElem {
        let i = e - self.start;
        if i < 0 {
            0
        } else {
            self.coeffs.get(i as usize).copied().unwrap_or(0)
        }
    }
    /// Drop the terms with exponent `>= end`.
    pub fn truncate(&self, end: i64) -> LaurentTail {
        let keep = (end - self.start).clamp(0, self.coeffs.len() as i64) as usize;
        LaurentTail::new(self.field, self.start, self.coeffs[..keep].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_simple_quotient() {
        // 1/(T - 1) = π + π² + π³ + ...
        let f = Fq::new(3).unwrap();
        let x = RationalFn::new(Poly::one(f), Poly::parse(f, "2 + T").unwrap()).unwrap();
        let t = LaurentTail::from_ratfn(&x, 5);
        assert_eq!(t.start(), 1);
        assert_eq!(t.coeffs(), &[1, 1, 1, 1]);
        let back = LaurentTail::from_ratfn(&t.to_ratfn(), 5);
        assert_eq!(back, t);
    }

    #[test]
    fn polynomial_round_trip() {
        let f = Fq::new(2).unwrap();
        let p = Poly::parse(f, "1 + T^3").unwrap();
        let t = LaurentTail::from_ratfn(&RationalFn::from_poly(p.clone()), 10);
        assert_eq!(t.start(), -3);
        assert_eq!(t.coeffs(), &[1, 0, 0, 1]);
        assert_eq!(t.to_ratfn(), RationalFn::from_poly(p));
    }
}
