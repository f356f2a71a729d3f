//! Traces of Frobenius a_p(E) for elliptic curves over F_q(T), and the
//! a_p comparison that decides isogeny for curves of the same conductor.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{is_irreducible, monic_irreducibles};
use crate::field::Fq;
use crate::level::Level;
use crate::poly::Poly;
use crate::ratfn::RationalFn;
use crate::sturm::ell_of_level;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Split,
    Nonsplit,
    Additive,
}

impl Reduction {
    pub fn ap(self) -> i64 {
        match self {
            Reduction::Split => 1,
            Reduction::Nonsplit => -1,
            Reduction::Additive => 0,
        }
    }
}

/// Long Weierstrass model y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6.
#[derive(Clone, Debug)]
pub struct CurveModel {
    pub a1: RationalFn,
    pub a2: RationalFn,
    pub a3: RationalFn,
    pub a4: RationalFn,
    pub a6: RationalFn,
    /// Finite part of the conductor, as declared by the user.
    pub conductor: Poly,
    pub bad: BTreeMap<Poly, Reduction>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CurveJson {
    pub q: u32,
    pub a: [String; 5],
    pub conductor: String,
    #[serde(default)]
    pub bad: Vec<BadEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct BadEntry {
    pub p: String,
    #[serde(rename = "type")]
    pub kind: Reduction,
}

impl CurveModel {
    pub fn from_json(c: &CurveJson) -> Result<CurveModel> {
        let f = Fq::new(c.q)?;
        let a: Vec<RationalFn> = c.a.iter().map(|s| RationalFn::parse(f, s)).collect::<Result<_>>()?;
        let mut bad = BTreeMap::new();
        for b in &c.bad {
            bad.insert(prime(f, &b.p)?, b.kind);
        }
        let conductor = Poly::parse(f, &c.conductor)?;
        if !conductor.is_monic() {
            return Err(Error::Input(format!("conductor {conductor} is not monic")));
        }
        let e = CurveModel {
            a1: a[0].clone(),
            a2: a[1].clone(),
            a3: a[2].clone(),
            a4: a[3].clone(),
            a6: a[4].clone(),
            conductor,
            bad,
        };
        if e.discriminant().is_zero() {
            return Err(Error::Input("singular model: discriminant is 0".into()));
        }
        Ok(e)
    }

    pub fn field(&self) -> Fq {
        self.conductor.field()
    }

    fn coeffs(&self) -> [&RationalFn; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn discriminant(&self) -> RationalFn {
        let f = self.field();
        let k = |n: i64| RationalFn::from_poly(Poly::constant(f, f.from_int(n)));
        let [a1, a2, a3, a4, a6] = self.coeffs();
        let b2 = &(a1 * a1) + &(&k(4) * a2);
        let b4 = &(&k(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&k(4) * a6);
        let b8 = &(&(&(&(a1 * a1) * a6) + &(&(&k(4) * a2) * a6)) - &(&(a1 * a3) * a4)) + &(&(&(a2 * a3) * a3) - &(a4 * a4));
        let t1 = &(&(&b2 * &b2) * &b8) * &k(-1);
        let t2 = &(&(&b4 * &b4) * &b4) * &k(-8);
        let t3 = &(&b6 * &b6) * &k(-27);
        let t4 = &(&(&b2 * &b4) * &b6) * &k(9);
        &(&t1 + &t2) + &(&t3 + &t4)
    }
}

fn prime(f: Fq, s: &str) -> Result<Poly> {
    let p = Poly::parse(f, s)?;
    if !p.is_monic() || !is_irreducible(&p) {
        return Err(Error::Input(format!("{p} is not a monic prime")));
    }
    Ok(p)
}

/// The residue field A/p, with elements as polynomials of degree < deg p.
struct Residue<'a> {
    p: &'a Poly,
    size: u128,
}

impl<'a> Residue<'a> {
    fn new(p: &'a Poly) -> Self {
        Residue { p, size: p.norm() as u128 }
    }
    fn reduce(&self, x: &RationalFn) -> Result<Poly> {
        let inv = x
            .den()
            .inv_mod(self.p)
            .ok_or_else(|| Error::Input(format!("model coefficient {x} is not {}-integral", self.p)))?;
        Ok(x.num().mul_mod(&inv, self.p))
    }
    fn elements(&self) -> impl Iterator<Item = Poly> + '_ {
        let f = self.p.field();
        (0..self.size as u64).map(move |i| Poly::from_index(f, i))
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul_mod(b, self.p)
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        (a + b).rem(self.p)
    }
    fn is_square_nonzero(&self, a: &Poly) -> bool {
        a.pow_mod((self.size - 1) / 2, self.p).is_one()
    }
    /// Absolute trace down to the prime field.
    fn trace(&self, a: &Poly) -> u8 {
        let f = self.p.field();
        let q = f.q() as u128;
        let mut acc = Poly::zero(f);
        let mut x = a.clone();
        for _ in 0..self.p.deg().unwrap() {
            acc = self.add(&acc, &x);
            x = x.pow_mod(q, self.p);
        }
        f.trace(acc.coeff(0))
    }
}

struct Reduced {
    a: [Poly; 5],
}

impl Reduced {
    fn rhs(&self, k: &Residue, x: &Poly) -> Poly {
        let [_, a2, _, a4, a6] = &self.a;
        let x2 = k.mul(x, x);
        let mut r = k.mul(&x2, x);
        r = k.add(&r, &k.mul(a2, &x2));
        r = k.add(&r, &k.mul(a4, x));
        k.add(&r, a6)
    }
    fn linear(&self, k: &Residue, x: &Poly) -> Poly {
        k.add(&k.mul(&self.a[0], x), &self.a[2])
    }
}

/// #Ē(A/p) by looping over x and solving the quadratic in y.
fn count_by_x(e: &Reduced, k: &Residue) -> u128 {
    let f = k.p.field();
    let mut n = 1;
    for x in k.elements() {
        let h = e.linear(k, &x);
        let g = e.rhs(k, &x);
        n += if f.p() == 2 {
            if h.is_zero() {
                1
            } else {
                // y = h z turns the equation into z² + z = g / h²
                let h2 = k.mul(&h, &h);
                let w = k.mul(&g, &h2.inv_mod(k.p).expect("nonzero in a field"));
                if k.trace(&w) == 0 {
                    2
                } else {
                    0
                }
            }
        } else {
            let four = Poly::constant(f, f.from_int(4));
            let disc = k.add(&k.mul(&h, &h), &k.mul(&four, &g));
            if disc.is_zero() {
                1
            } else if k.is_square_nonzero(&disc) {
                2
            } else {
                0
            }
        };
    }
    n
}

/// #Ē(A/p) by testing every (x, y).
fn count_naive(e: &Reduced, k: &Residue) -> u128 {
    let ys: Vec<Poly> = k.elements().collect();
    let mut n = 1;
    for x in k.elements() {
        let h = e.linear(k, &x);
        let g = e.rhs(k, &x);
        for y in &ys {
            let lhs = k.add(&k.mul(y, y), &k.mul(&h, y));
            if lhs == g {
                n += 1;
            }
        }
    }
    n
}

fn reduce(e: &CurveModel, k: &Residue) -> Result<Reduced> {
    let a = e.coeffs().map(|c| k.reduce(c));
    let [a1, a2, a3, a4, a6] = a;
    Ok(Reduced { a: [a1?, a2?, a3?, a4?, a6?] })
}

fn is_good(e: &CurveModel, k: &Residue) -> Result<bool> {
    Ok(!k.reduce(&e.discriminant())?.is_zero())
}

/// #Ē(A/p) at a prime of good reduction, counted both ways.
pub fn point_counts(e: &CurveModel, p: &Poly) -> Result<(u128, u128)> {
    let k = Residue::new(p);
    if !is_good(e, &k)? {
        return Err(Error::Domain(format!("bad reduction at {p}")));
    }
    let r = reduce(e, &k)?;
    Ok((count_by_x(&r, &k), count_naive(&r, &k)))
}

/// a_p(E) = |p| + 1 − #Ē(A/p) at good primes; 1, −1, 0 at split, non-split,
/// additive primes as supplied.
pub fn ap_at_prime(e: &CurveModel, p: &Poly) -> Result<i64> {
    let k = Residue::new(p);
    if !is_good(e, &k)? || e.conductor.rem(p).is_zero() {
        return match e.bad.get(p) {
            Some(r) => Ok(r.ap()),
            None => Err(Error::Input(format!("bad reduction at {p} but no reduction type was supplied"))),
        };
    }
    let r = reduce(e, &k)?;
    let count = count_by_x(&r, &k) as i128;
    let ap = k.size as i128 + 1 - count;
    if ap * ap > 4 * k.size as i128 {
        return Err(Error::Invariant(format!("Hasse bound violated at {p}: a_p = {ap}")));
    }
    Ok(ap as i64)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ApEntry {
    pub p: String,
    pub ap: i64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ApTable {
    pub q: u32,
    pub conductor: String,
    pub entries: Vec<ApEntry>,
    #[serde(default)]
    pub bad: Vec<BadEntry>,
}

/// a_p for every monic prime with deg p ≤ max_deg.
pub fn ap_table(e: &CurveModel, max_deg: usize) -> Result<ApTable> {
    let f = e.field();
    let mut entries = Vec::new();
    for d in 1..=max_deg {
        for p in monic_irreducibles(f, d) {
            entries.push(ApEntry { p: p.to_string(), ap: ap_at_prime(e, &p)? });
        }
    }
    Ok(ApTable {
        q: f.q(),
        conductor: e.conductor.to_string(),
        entries,
        bad: e.bad.iter().map(|(p, &kind)| BadEntry { p: p.to_string(), kind }).collect(),
    })
}

impl ApTable {
    fn parsed(&self) -> Result<(Poly, BTreeMap<Poly, i64>)> {
        let f = Fq::new(self.q)?;
        let mut map = BTreeMap::new();
        for b in &self.bad {
            map.insert(prime(f, &b.p)?, b.kind.ap());
        }
        for en in &self.entries {
            let p = prime(f, &en.p)?;
            if map.insert(p.clone(), en.ap).is_some_and(|old| old != en.ap) {
                return Err(Error::Input(format!("conflicting a_p values at {p}")));
            }
        }
        Ok((Poly::parse(f, &self.conductor)?, map))
    }

    /// Largest D such that a_p is known for every prime of degree ≤ D.
    pub fn coverage(&self) -> Result<i64> {
        let (n, map) = self.parsed()?;
        let f = n.field();
        let mut d = 0;
        while monic_irreducibles(f, d + 1).iter().all(|p| map.contains_key(p)) {
            d += 1;
            if d > 64 {
                break;
            }
        }
        Ok(d as i64)
    }
}

/// deg n − 2, plus ℓ(n) unless n is a prime power, square-free, or p²q with deg q = 1.
pub fn isogeny_bound(level: &Level) -> Result<i64> {
    let base = level.deg() as i64 - 2;
    if level.is_prime_power() || level.is_square_free() || level.is_p2q_linear() {
        Ok(base)
    } else {
        Ok(base + ell_of_level(level)? as i64)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Isogenous,
    NotIsogenous { p: String, ap1: i64, ap2: i64 },
    InsufficientData { required: i64, available: i64 },
}

/// Compare a_p over all primes of degree ≤ isogeny_bound(level).
pub fn check_isogenous(t1: &ApTable, t2: &ApTable, level: &Level) -> Result<Verdict> {
    let (n1, m1) = t1.parsed()?;
    let (n2, m2) = t2.parsed()?;
    if t1.q != level.q() || t2.q != level.q() || &n1 != level.n() || &n2 != level.n() {
        return Err(Error::Input(format!("conductor mismatch: {n1}, {n2}, level {}", level.n())));
    }
    let required = isogeny_bound(level)?;
    let available = t1.coverage()?.min(t2.coverage()?);
    if available < required {
        return Ok(Verdict::InsufficientData { required, available });
    }
    for d in 1..=required.max(0) as usize {
        for p in monic_irreducibles(level.field(), d) {
            let (a, b) = (m1[&p], m2[&p]);
            if a != b {
                return Ok(Verdict::NotIsogenous { p: p.to_string(), ap1: a, ap2: b });
            }
        }
    }
    Ok(Verdict::Isogenous)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(q: u32, a: [&str; 5], n: &str) -> CurveModel {
        let c = CurveJson { q, a: a.map(String::from), conductor: n.into(), bad: Vec::new() };
        CurveModel::from_json(&c).unwrap()
    }

    #[test]
    fn counts_agree_odd_and_even() {
        for (q, a) in [
            (3, ["0", "0", "0", "T", "1"]),
            (5, ["1", "T", "0", "2", "T^2 + 1"]),
            (2, ["1", "0", "0", "0", "T^3 + 1"]),
            (4, ["1", "g", "T", "0", "T + g"]),
        ] {
            let e = curve(q, a, "1");
            let f = e.field();
            for d in 1..=2 {
                for p in monic_irreducibles(f, d) {
                    if let Ok((x, naive)) = point_counts(&e, &p) {
                        assert_eq!(x, naive, "q={q} p={p}");
                        ap_at_prime(&e, &p).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn bad_primes_need_a_type() {
        let mut e = curve(3, ["0", "0", "0", "T", "0"], "T");
        let p = Poly::parse(e.field(), "T").unwrap();
        assert!(ap_at_prime(&e, &p).is_err());
        e.bad.insert(p.clone(), Reduction::Split);
        assert_eq!(ap_at_prime(&e, &p).unwrap(), 1);
        e.bad.insert(p.clone(), Reduction::Additive);
        assert_eq!(ap_at_prime(&e, &p).unwrap(), 0);
    }
}
