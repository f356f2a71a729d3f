//! Polynomials in one variable over F_q.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::error::{input, Error, Result};
use crate::field::{Fq, FqElem};

pub(crate) type Coeffs = SmallVec<[FqElem; 16]>;

/// Degree of a polynomial; the zero polynomial has degree `NegInf`, which
/// compares below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    /// The degree as a signed integer, with -1 standing in for -inf.
    pub fn as_i64(self) -> i64 {
        match self {
            Degree::NegInf => -1,
            Degree::Finite(d) => d as i64,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in T over F_q, coefficients stored lowest degree first with
/// no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    f: Fq,
    c: Coeffs,
}

fn trim(c: &mut Coeffs) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

impl Poly {
    pub fn new(f: Fq, coeffs: &[FqElem]) -> Poly {
        assert!(coeffs.iter().all(|&x| (x as u32) < f.q()), "coefficient out of range");
        let mut c: Coeffs = coeffs.iter().copied().collect();
        trim(&mut c);
        Poly { f, c }
    }

    pub(crate) fn from_coeffs(f: Fq, mut c: Coeffs) -> Poly {
        trim(&mut c);
        Poly { f, c }
    }

    pub fn zero(f: Fq) -> Poly {
        Poly { f, c: Coeffs::new() }
    }
    pub fn one(f: Fq) -> Poly {
        Poly::constant(f, 1)
    }
    pub fn constant(f: Fq, a: FqElem) -> Poly {
        Poly::new(f, &[a])
    }
    /// `a * T^k`.
    pub fn monomial(f: Fq, a: FqElem, k: usize) -> Poly {
        if a == 0 {
            return Poly::zero(f);
        }
        let mut c = Coeffs::from_elem(0, k + 1);
        c[k] = a;
        Poly { f, c }
    }
    /// The variable T.
    pub fn t(f: Fq) -> Poly {
        Poly::monomial(f, 1, 1)
    }
    /// `T^k`.
    pub fn t_pow(f: Fq, k: usize) -> Poly {
        Poly::monomial(f, 1, k)
    }

    #[inline]
    pub fn field(&self) -> Fq {
        self.f
    }
    #[inline]
    pub fn coeffs(&self) -> &[FqElem] {
        &self.c
    }
    #[inline]
    pub fn coeff(&self, i: usize) -> FqElem {
        self.c.get(i).copied().unwrap_or(0)
    }
    /// Number of stored coefficients, i.e. degree + 1 (0 for the zero polynomial).
    #[inline]
    pub fn len(&self) -> usize {
        self.c.len()
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }
    /// True for nonzero constants.
    pub fn is_unit(&self) -> bool {
        self.c.len() == 1
    }
    pub fn degree(&self) -> Degree {
        match self.c.len() {
            0 => Degree::NegInf,
            n => Degree::Finite(n - 1),
        }
    }
    /// Degree of a nonzero polynomial; `None` for zero.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    /// Degree with -1 for the zero polynomial.
    pub fn deg_i(&self) -> i64 {
        self.c.len() as i64 - 1
    }
    /// |a| = q^deg a, and |0| = 0.
    pub fn norm(&self) -> u64 {
        match self.deg() {
            None => 0,
            Some(d) => (self.f.q() as u64).pow(d as u32),
        }
    }
    /// Leading coefficient (0 for the zero polynomial).
    pub fn lc(&self) -> FqElem {
        self.c.last().copied().unwrap_or(0)
    }
    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }
    pub fn monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.f.inv(self.lc()))
    }
    pub fn scale(&self, a: FqElem) -> Poly {
        if a == 0 {
            return Poly::zero(self.f);
        }
        let f = self.f;
        Poly { f, c: self.c.iter().map(|&x| f.mul(x, a)).collect() }
    }
    /// Multiply by T^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = Coeffs::from_elem(0, k);
        c.extend_from_slice(&self.c);
        Poly { f: self.f, c }
    }
    /// Keep the terms of degree < k.
    pub fn truncate(&self, k: usize) -> Poly {
        let mut c: Coeffs = self.c.iter().take(k).copied().collect();
        trim(&mut c);
        Poly { f: self.f, c }
    }

    /// Base-q integer code `sum c_i q^i`. Codes order polynomials by degree
    /// first and then lexicographically from the top coefficient down.
    pub fn index(&self) -> u64 {
        let q = self.f.q() as u64;
        self.c.iter().rev().fold(0, |acc, &x| acc * q + x as u64)
    }
    pub fn from_index(f: Fq, mut idx: u64) -> Poly {
        let q = f.q() as u64;
        let mut c = Coeffs::new();
        while idx > 0 {
            c.push((idx % q) as u8);
            idx /= q;
        }
        Poly { f, c }
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        let f = self.f;
        self.c.iter().rev().fold(0, |acc, &a| f.add(f.mul(acc, x), a))
    }
    pub fn derivative(&self) -> Poly {
        let f = self.f;
        let c: Coeffs = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| f.mul(a, f.from_int(i as i64)))
            .collect();
        Poly::from_coeffs(f, c)
    }
    /// `self(g(T))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(self.f);
        for &a in self.c.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(self.f, a);
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let f = self.f;
        if self.c.len() < d.c.len() {
            return (Poly::zero(f), self.clone());
        }
        let mut r = self.c.clone();
        let dl = d.c.len();
        let inv = f.inv(d.lc());
        let mut quo = Coeffs::from_elem(0, r.len() - dl + 1);
        for k in (dl - 1..r.len()).rev() {
            let c = f.mul(r[k], inv);
            if c == 0 {
                continue;
            }
            let s = k + 1 - dl;
            quo[s] = c;
            for (i, &di) in d.c.iter().enumerate() {
                r[s + i] = f.sub(r[s + i], f.mul(c, di));
            }
        }
        r.truncate(dl - 1);
        (Poly::from_coeffs(f, quo), Poly::from_coeffs(f, r))
    }
    pub fn rem(&self, d: &Poly) -> Poly {
        assert!(!d.is_zero(), "polynomial division by zero");
        if self.c.len() < d.c.len() {
            return self.clone();
        }
        let f = self.f;
        let mut r = self.c.clone();
        rem_in_place(f, &mut r, &d.c);
        Poly::from_coeffs(f, r)
    }
    pub fn quo(&self, d: &Poly) -> Poly {
        self.div_rem(d).0
    }
    pub fn divides(&self, other: &Poly) -> bool {
        !self.is_zero() && other.rem(self).is_zero()
    }
    pub fn checked_div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::Domain("polynomial division by zero".into()));
        }
        Ok(self.div_rem(d))
    }

    pub fn mul_mod(&self, other: &Poly, m: &Poly) -> Poly {
        (self * other).rem(m)
    }
    pub fn pow(&self, mut k: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.f);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }
    /// `self^k mod m` with an arbitrary-size exponent given as little-endian u64 limbs.
    pub fn pow_mod_limbs(&self, limbs: &[u64], m: &Poly) -> Poly {
        let mut acc = Poly::one(self.f).rem(m);
        let base = self.rem(m);
        for &limb in limbs.iter().rev() {
            for bit in (0..64).rev() {
                acc = acc.mul_mod(&acc, m);
                if (limb >> bit) & 1 == 1 {
                    acc = acc.mul_mod(&base, m);
                }
            }
        }
        acc
    }
    pub fn pow_mod(&self, k: u128, m: &Poly) -> Poly {
        self.pow_mod_limbs(&[k as u64, (k >> 64) as u64], m)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
    /// Monic `g = gcd(a, b)` with `s a + t b = g`.
    pub fn gcd_bezout(a: &Poly, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Domain("gcd of two zero polynomials".into()));
        }
        let f = a.f;
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1);
            let s = &s0 - &(&qt * &s1);
            let t = &t0 - &(&qt * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let k = f.inv(r0.lc());
        Ok((r0.scale(k), s0.scale(k), t0.scale(k)))
    }
    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.f);
        }
        (self * other).quo(&self.gcd(other)).monic()
    }
    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        if m.is_zero() {
            return None;
        }
        let (g, s, _) = Poly::gcd_bezout(&self.rem(m), m).ok()?;
        g.is_one().then(|| s.rem(m))
    }

    /// Parse the text format `c0 + c1*T + c2*T^2 + ...` (also `-`, `t`, `x`),
    /// where a coefficient is an integer (read mod p) or `g^k` for the fixed
    /// generator of F_q^x. A comma-separated coefficient list, lowest degree
    /// first, is accepted as well.
    pub fn parse(f: Fq, s: &str) -> Result<Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return input("empty polynomial");
        }
        if s.contains(',') || (!s.contains(|c: char| is_var(c)) && !s.contains(['+', '-'])) {
            if !s.contains(',') {
                return Ok(Poly::constant(f, parse_coeff(f, &s)?));
            }
            let mut c = Coeffs::new();
            for tok in s.trim_matches(|c| c == '[' || c == ']').split(',') {
                c.push(parse_coeff(f, tok)?);
            }
            return Ok(Poly::from_coeffs(f, c));
        }
        let mut acc = Poly::zero(f);
        let mut term = String::new();
        let mut sign = 1;
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        let flush = |term: &str, sign: i32, acc: &mut Poly| -> Result<()> {
            if term.is_empty() {
                return input(format!("empty term in '{s}'"));
            }
            let t = parse_term(f, term)?;
            *acc = if sign > 0 { &*acc + &t } else { &*acc - &t };
            Ok(())
        };
        while i < bytes.len() {
            let ch = bytes[i];
            if (ch == '+' || ch == '-') && !(i > 0 && bytes[i - 1] == '^') {
                if !term.is_empty() {
                    flush(&term, sign, &mut acc)?;
                    term.clear();
                } else if i > 0 {
                    return input(format!("malformed polynomial '{s}'"));
                }
                sign = if ch == '-' { -1 } else { 1 };
            } else {
                term.push(ch);
            }
            i += 1;
        }
        flush(&term, sign, &mut acc)?;
        Ok(acc)
    }

    fn fmt_coeff(&self, a: FqElem) -> String {
        if self.f.e() == 1 {
            a.to_string()
        } else {
            match self.f.log(a) {
                Some(0) => "1".into(),
                Some(1) => "g".into(),
                Some(k) => format!("g^{k}"),
                None => "0".into(),
            }
        }
    }
}

fn is_var(c: char) -> bool {
    matches!(c, 'T' | 't' | 'x' | 'X' | 'θ')
}

fn parse_coeff(f: Fq, tok: &str) -> Result<FqElem> {
    let tok = tok.trim_matches(|c| c == '(' || c == ')');
    if let Some(k) = tok.strip_prefix("g^") {
        let k: u64 = k.parse().map_err(|_| Error::Input(format!("bad exponent in '{tok}'")))?;
        return Ok(f.gen_pow(k));
    }
    if tok == "g" {
        return Ok(f.generator());
    }
    let (neg, digits) = match tok.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, tok),
    };
    let v: i64 = digits
        .parse()
        .map_err(|_| Error::Input(format!("bad coefficient '{tok}'")))?;
    if f.e() > 1 && v >= f.p() as i64 {
        // integers name prime-field elements; codes above p must use g^k
        return input(format!("coefficient '{tok}' is not in the prime field of F_{}", f.q()));
    }
    let a = f.from_int(v);
    Ok(if neg { f.neg(a) } else { a })
}

fn parse_term(f: Fq, term: &str) -> Result<Poly> {
    match term.find(is_var) {
        None => Ok(Poly::constant(f, parse_coeff(f, term)?)),
        Some(pos) => {
            let coeff = term[..pos].trim_end_matches('*');
            let var_len = term[pos..].chars().next().unwrap().len_utf8();
            let rest = &term[pos + var_len..];
            let k = if rest.is_empty() {
                1
            } else if let Some(e) = rest.strip_prefix('^') {
                e.parse::<usize>()
                    .map_err(|_| Error::Input(format!("bad exponent in '{term}'")))?
            } else {
                return input(format!("malformed term '{term}'"));
            };
            let a = if coeff.is_empty() { 1 } else { parse_coeff(f, coeff)? };
            Ok(Poly::monomial(f, a, k))
        }
    }
}

/// Reduce `r` modulo the monic-or-not polynomial `d` in place (trailing zeros allowed).
pub(crate) fn rem_in_place(f: Fq, r: &mut Coeffs, d: &[FqElem]) {
    let dl = d.len();
    if r.len() < dl {
        trim(r);
        return;
    }
    let lc = d[dl - 1];
    let inv = if lc == 1 { 1 } else { f.inv(lc) };
    for k in (dl - 1..r.len()).rev() {
        let c = if inv == 1 { r[k] } else { f.mul(r[k], inv) };
        if c == 0 {
            continue;
        }
        let s = k + 1 - dl;
        for (i, &di) in d.iter().enumerate() {
            r[s + i] = f.sub(r[s + i], f.mul(c, di));
        }
    }
    r.truncate(dl - 1);
    trim(r);
}

impl fmt::Display for Poly {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let cs = self.fmt_coeff(a);
            match (i, cs.as_str()) {
                (0, _) => write!(out, "{cs}")?,
                (1, "1") => write!(out, "T")?,
                (1, _) => write!(out, "{cs}*T")?,
                (_, "1") => write!(out, "T^{i}")?,
                _ => write!(out, "{cs}*T^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.c == other.c
    }
}
impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down (the order of `index`).
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let f = self.f;
        let (long, short) = if self.c.len() >= rhs.c.len() { (self, rhs) } else { (rhs, self) };
        let mut c = long.c.clone();
        for (x, &y) in c.iter_mut().zip(short.c.iter()) {
            *x = f.add(*x, y);
        }
        Poly::from_coeffs(f, c)
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let f = self.f;
        let n = self.c.len().max(rhs.c.len());
        let c: Coeffs = (0..n).map(|i| f.sub(self.coeff(i), rhs.coeff(i))).collect();
        Poly::from_coeffs(f, c)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let f = self.f;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(f);
        }
        let mut c = Coeffs::from_elem(0, self.c.len() + rhs.c.len() - 1);
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(f, c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let f = self.f;
        Poly { f, c: self.c.iter().map(|&x| f.neg(x)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// All polynomials of degree <= `max_deg` (only monic ones if `monic_only`),
/// each exactly once, in degree-lexicographic order. `max_deg = -1` yields
/// only the zero polynomial (or nothing when `monic_only`).
pub fn enumerate_polys(f: Fq, max_deg: i64, monic_only: bool) -> Box<dyn Iterator<Item = Poly>> {
    let q = f.q() as u64;
    if monic_only {
        if max_deg < 0 {
            return Box::new(std::iter::empty());
        }
        Box::new((0..=max_deg as u32).flat_map(move |d| monic_of_degree(f, d as usize)))
    } else {
        let count = if max_deg < 0 { 1 } else { q.pow(max_deg as u32 + 1) };
        Box::new((0..count).map(move |i| Poly::from_index(f, i)))
    }
}

/// Monic polynomials of degree exactly `d`, in index order.
pub fn monic_of_degree(f: Fq, d: usize) -> impl Iterator<Item = Poly> {
    let q = f.q() as u64;
    let base = q.pow(d as u32);
    (0..base).map(move |low| Poly::from_index(f, base + low))
}
