//! Small finite fields F_q, q = p^e <= 9.
//!
//! Elements are encoded as integers `0..q`: the base-p digits of the code are
//! the coefficients of the element as a polynomial over F_p modulo a fixed
//! irreducible polynomial (the least monic irreducible of degree e in the
//! order that compares coefficients from the top down).

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// An element of F_q, in the encoding described at module level.
pub type FqElem = u8;

/// Largest supported field size.
pub const MAX_Q: u32 = 9;

const N: usize = MAX_Q as usize;

pub(crate) struct Tables {
    q: u8,
    p: u8,
    e: u8,
    add: [[u8; N]; N],
    mul: [[u8; N]; N],
    neg: [u8; N],
    inv: [u8; N],
    trace: [u8; N],
    generator: u8,
    log: [u8; N],
    exp: [u8; N],
    modulus: Vec<u8>,
}

static FIELDS: [OnceLock<Tables>; N + 1] = [const { OnceLock::new() }; N + 1];

/// Handle to the tables of F_q. Cheap to copy.
#[derive(Clone, Copy)]
pub struct Fq {
    t: &'static Tables,
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.t.q == other.t.q
    }
}
impl Eq for Fq {}

impl std::hash::Hash for Fq {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.t.q.hash(state);
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.t.q)
    }
}

fn prime_power(q: u32) -> Option<(u8, u8)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    let mut e = 0;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p as u8, e as u8))
}

// Polynomials over F_p of degree < e are handled as digit vectors here; this
// is only used while building the tables.
fn digits(x: u32, p: u32, e: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(e);
    let mut x = x;
    for _ in 0..e {
        v.push(x % p);
        x /= p;
    }
    v
}

fn undigits(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn mulmod_fp(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate() {
                let idx = k - e + i;
                prod[idx] = (prod[idx] + (p - c) * m) % p;
            }
        }
    }
    prod.truncate(e);
    prod
}

fn is_irreducible_fp(modulus: &[u32], p: u32) -> bool {
    // trial division by every monic polynomial of degree <= e/2
    let e = modulus.len() - 1;
    for d in 1..=e / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut div = digits(code, p, d);
            div.push(1);
            if rem_fp(modulus, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn rem_fp(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lc = (1..p).find(|x| x * b[db] % p == 1).unwrap();
    while r.len() > db {
        let c = r[r.len() - 1] * inv_lc % p;
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * bi % p) % p;
        }
        r.pop();
    }
    r
}

fn build(q: u32) -> Tables {
    let (p8, e8) = prime_power(q).expect("validated");
    let (p, e) = (p8 as u32, e8 as usize);
    let modulus: Vec<u32> = if e == 1 {
        vec![0, 1]
    } else {
        (0..p.pow(e as u32))
            .map(|code| {
                let mut m = digits(code, p, e);
                m.push(1);
                m
            })
            .find(|m| is_irreducible_fp(m, p))
            .expect("an irreducible polynomial exists")
    };
    let mut add = [[0u8; N]; N];
    let mut mul = [[0u8; N]; N];
    for a in 0..q {
        for b in 0..q {
            let da = digits(a, p, e);
            let db = digits(b, p, e);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            add[a as usize][b as usize] = undigits(&s, p) as u8;
            mul[a as usize][b as usize] = if e == 1 {
                (a * b % p) as u8
            } else {
                undigits(&mulmod_fp(&da, &db, &modulus, p), p) as u8
            };
        }
    }
    let mut neg = [0u8; N];
    let mut inv = [0u8; N];
    for a in 0..q as usize {
        neg[a] = (0..q as usize).find(|&b| add[a][b] == 0).unwrap() as u8;
        if a != 0 {
            inv[a] = (1..q as usize).find(|&b| mul[a][b] == 1).unwrap() as u8;
        }
    }
    let order = |a: usize| {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = mul[x][a] as usize;
            k += 1;
        }
        k
    };
    let generator = (1..q as usize).find(|&a| order(a) == q as usize - 1).unwrap() as u8;
    let mut log = [0u8; N];
    let mut exp = [0u8; N];
    let mut x = 1usize;
    for k in 0..(q as usize - 1) {
        exp[k] = x as u8;
        log[x] = k as u8;
        x = mul[x][generator as usize] as usize;
    }
    let mut trace = [0u8; N];
    for a in 0..q as usize {
        // Tr(a) = a + a^p + ... + a^(p^(e-1))
        let mut s = 0usize;
        let mut y = a;
        for _ in 0..e {
            s = add[s][y] as usize;
            let mut z = 1usize;
            for _ in 0..p {
                z = mul[z][y] as usize;
            }
            y = z;
        }
        debug_assert!(s < p as usize);
        trace[a] = s as u8;
    }
    Tables {
        q: q as u8,
        p: p8,
        e: e8,
        add,
        mul,
        neg,
        inv,
        trace,
        generator,
        log,
        exp,
        modulus: modulus.into_iter().map(|c| c as u8).collect(),
    }
}

impl Fq {
    /// The field with `q` elements. Fails unless `q` is a prime power in `2..=9`.
    pub fn new(q: u32) -> Result<Fq> {
        if q > MAX_Q || prime_power(q).is_none() {
            return Err(Error::Input(format!(
                "q = {q} is not a supported prime power (2..={MAX_Q})"
            )));
        }
        let t = FIELDS[q as usize].get_or_init(|| build(q));
        Ok(Fq { t })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.t.q as u32
    }
    #[inline]
    pub fn p(self) -> u32 {
        self.t.p as u32
    }
    /// Degree of F_q over its prime field.
    #[inline]
    pub fn e(self) -> u32 {
        self.t.e as u32
    }
    /// Coefficients (over F_p, lowest first) of the polynomial defining F_q over F_p.
    pub fn modulus(self) -> &'static [u8] {
        &self.t.modulus
    }

    #[inline(always)]
    pub fn add(self, a: FqElem, b: FqElem) -> FqElem {
        self.t.add[a as usize][b as usize]
    }
    #[inline(always)]
    pub fn sub(self, a: FqElem, b: FqElem) -> FqElem {
        self.t.add[a as usize][self.t.neg[b as usize] as usize]
    }
    #[inline(always)]
    pub fn mul(self, a: FqElem, b: FqElem) -> FqElem {
        self.t.mul[a as usize][b as usize]
    }
    #[inline(always)]
    pub fn neg(self, a: FqElem) -> FqElem {
        self.t.neg[a as usize]
    }
    /// Multiplicative inverse; panics on zero.
    #[inline(always)]
    pub fn inv(self, a: FqElem) -> FqElem {
        assert!(a != 0, "inverse of zero in F_q");
        self.t.inv[a as usize]
    }
    #[inline]
    pub fn div(self, a: FqElem, b: FqElem) -> FqElem {
        self.mul(a, self.inv(b))
    }
    pub fn pow(self, a: FqElem, k: u64) -> FqElem {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let l = self.t.log[a as usize] as u64 * (k % (self.q() as u64 - 1));
        self.t.exp[(l % (self.q() as u64 - 1)) as usize]
    }
    /// Absolute trace to F_p, returned as an integer in `0..p`.
    #[inline]
    pub fn trace(self, a: FqElem) -> u8 {
        self.t.trace[a as usize]
    }
    /// The fixed generator of the multiplicative group (least code of order q-1).
    pub fn generator(self) -> FqElem {
        self.t.generator
    }
    /// `g^k` for the fixed generator.
    pub fn gen_pow(self, k: u64) -> FqElem {
        self.t.exp[(k % (self.q() as u64 - 1)) as usize]
    }
    /// Discrete logarithm to the fixed generator; `None` for zero.
    pub fn log(self, a: FqElem) -> Option<u32> {
        (a != 0).then(|| self.t.log[a as usize] as u32)
    }
    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(self, n: i64) -> FqElem {
        let p = self.p() as i64;
        n.rem_euclid(p) as u8
    }
    /// All elements in code order.
    pub fn elements(self) -> impl Iterator<Item = FqElem> {
        0..self.t.q
    }
    /// All nonzero elements in code order.
    pub fn units(self) -> impl Iterator<Item = FqElem> {
        1..self.t.q
    }
    /// A basis of F_q over F_p: the codes `p^i`.
    pub fn prime_basis(self) -> impl Iterator<Item = FqElem> {
        let p = self.t.p;
        (0..self.t.e).map(move |i| p.pow(i as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = Fq::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_linear_and_onto() {
        for q in [4, 8, 9] {
            let f = Fq::new(q).unwrap();
            let p = f.p() as u8;
            for a in f.elements() {
                assert!(f.trace(a) < p);
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % p);
                }
            }
            assert!(f.elements().any(|a| f.trace(a) != 0));
        }
    }

    #[test]
    fn defining_polynomials() {
        assert_eq!(Fq::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Fq::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Fq::new(9).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_bad_q() {
        for q in [0, 1, 6, 10, 12, 16] {
            assert!(Fq::new(q).is_err());
        }
    }

    #[test]
    fn generator_has_full_order() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = Fq::new(q).unwrap();
            let mut seen: Vec<u8> = (0..q - 1).map(|k| f.gen_pow(k as u64)).collect();
            seen.sort();
            assert_eq!(seen, (1..q as u8).collect::<Vec<_>>());
        }
    }
}
