//! Levels n and the projective line P¹(A/n).
//!
//! Points are indexed through local coordinates at each prime power p^e ‖ n:
//! the local line P¹(A/p^e) has the points (x:1), x mod p^e, followed by the
//! points (1:p z), z mod p^(e-1). A global index is the mixed-radix number
//! formed by the local indices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::field::Fq;
use crate::mat2::Mat2A;
use crate::orbits::UnionFind;
use crate::poly::{enumerate_polys, Poly};

/// A point (c:d) of P¹(A/n), stored as its canonical representative with
/// both coordinates reduced mod n.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct ProjPoint {
    pub c: Poly,
    pub d: Poly,
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.c, self.d)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ProjPointJson {
    pub c: String,
    pub d: String,
}

impl ProjPoint {
    pub fn to_json(&self) -> ProjPointJson {
        ProjPointJson { c: self.c.to_string(), d: self.d.to_string() }
    }
}

#[derive(Clone, Debug)]
struct LocalLine {
    p: Poly,
    e: u32,
    /// p^e
    pe: Poly,
    /// p^(e-1)
    pe1: Poly,
    /// |p^e|
    affine: u64,
    /// |p^e| + |p^(e-1)|
    size: u64,
}

impl LocalLine {
    /// Local index of (c:d) mod p^e, or `None` if both are divisible by p.
    fn index(&self, c: &Poly, d: &Poly) -> Option<u64> {
        let d = d.rem(&self.pe);
        if !d.rem(&self.p).is_zero() {
            let x = c.mul_mod(&d.inv_mod(&self.pe)?, &self.pe);
            return Some(x.index());
        }
        let c = c.rem(&self.pe);
        if c.rem(&self.p).is_zero() {
            return None;
        }
        let y = d.mul_mod(&c.inv_mod(&self.pe)?, &self.pe);
        let z = y.quo(&self.p).rem(&self.pe1);
        Some(self.affine + z.index())
    }

    /// Local representative (c, d) of a local index.
    fn rep(&self, f: Fq, i: u64) -> (Poly, Poly) {
        if i < self.affine {
            (Poly::from_index(f, i), Poly::one(f))
        } else {
            (Poly::one(f), &self.p * &Poly::from_index(f, i - self.affine))
        }
    }

    /// Exponent of p in gcd(c², p^e) for the local point `i`.
    fn gcd_c2_exponent(&self, f: Fq, i: u64) -> u32 {
        if i >= self.affine {
            return 0;
        }
        let mut x = Poly::from_index(f, i);
        let mut v = 0;
        while v < self.e && !x.is_zero() && x.rem(&self.p).is_zero() {
            x = x.quo(&self.p);
            v += 1;
        }
        if x.is_zero() {
            self.e
        } else {
            (2 * v).min(self.e)
        }
    }

    fn act(&self, f: Fq, i: u64, m: &Mat2A) -> u64 {
        let (c, d) = self.rep(f, i);
        let c2 = &(&c * &m.a) + &(&d * &m.c);
        let d2 = &(&c * &m.b) + &(&d * &m.d);
        self.index(&c2, &d2).expect("action preserves unimodularity")
    }
}

/// A level n together with its factorization and the index structure of P¹(A/n).
#[derive(Clone, Debug)]
pub struct Level {
    f: Fq,
    n: Poly,
    factors: Vec<(Poly, u32)>,
    locals: Vec<LocalLine>,
    /// CRT idempotents: ≡ 1 mod p_i^e_i and ≡ 0 mod the other prime powers.
    idempotents: Vec<Poly>,
    /// Mixed-radix place values of the local indices.
    radix: Vec<u64>,
    kappa: u64,
}

impl Level {
    pub fn new(n: &Poly) -> Result<Level> {
        if n.is_zero() || !n.is_monic() {
            return Err(Error::Input(format!("level must be monic and nonzero, got {n}")));
        }
        let f = n.field();
        let factors = factorize(n)?;
        let mut locals = Vec::new();
        for (p, e) in &factors {
            let pe = p.pow(*e as u64);
            let pe1 = p.pow(*e as u64 - 1);
            let affine = pe.norm();
            locals.push(LocalLine { p: p.clone(), e: *e, pe, pe1: pe1.clone(), affine, size: affine + pe1.norm() });
        }
        let mut idempotents = Vec::new();
        for l in &locals {
            let other = n.quo(&l.pe);
            // other * inv(other mod p^e) is 1 mod p^e and 0 mod the rest
            let inv = other.inv_mod(&l.pe).unwrap_or_else(|| Poly::one(f));
            idempotents.push(other.mul_mod(&inv, n));
        }
        let mut radix = Vec::new();
        let mut kappa: u64 = 1;
        for l in &locals {
            radix.push(kappa);
            kappa = kappa
                .checked_mul(l.size)
                .ok_or_else(|| Error::Input(format!("level {n} is too large")))?;
        }
        Ok(Level { f, n: n.clone(), factors, locals, idempotents, radix, kappa })
    }

    pub fn parse(q: u32, s: &str) -> Result<Level> {
        let f = Fq::new(q)?;
        Level::new(&Poly::parse(f, s)?)
    }

    pub fn field(&self) -> Fq {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.f.q()
    }
    pub fn n(&self) -> &Poly {
        &self.n
    }
    pub fn deg(&self) -> usize {
        self.n.deg().unwrap_or(0)
    }
    pub fn factors(&self) -> &[(Poly, u32)] {
        &self.factors
    }
    /// Number of distinct prime divisors t(n).
    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }
    pub fn is_prime_power(&self) -> bool {
        self.factors.len() <= 1
    }
    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
    /// n = p² q with p ≠ q prime and deg q = 1.
    pub fn is_p2q_linear(&self) -> bool {
        if self.factors.len() != 2 {
            return false;
        }
        let (a, b) = (&self.factors[0], &self.factors[1]);
        (a.1 == 2 && b.1 == 1 && b.0.deg() == Some(1)) || (b.1 == 2 && a.1 == 1 && a.0.deg() == Some(1))
    }

    /// κ(n) = #P¹(A/n).
    pub fn kappa(&self) -> u64 {
        self.kappa
    }
    /// |n| ∏_{p|n} (1 + 1/|p|).
    pub fn kappa_formula(&self) -> u64 {
        self.factors
            .iter()
            .map(|(p, e)| {
                let np = p.norm();
                np.pow(*e) + np.pow(*e - 1)
            })
            .product()
    }

    pub(crate) fn local_sizes(&self) -> Vec<u64> {
        self.locals.iter().map(|l| l.size).collect()
    }

    fn digits(&self, idx: u64) -> Vec<u64> {
        self.locals.iter().zip(&self.radix).map(|(l, &r)| (idx / r) % l.size).collect()
    }

    /// Global index of a unimodular pair.
    pub fn index_of_pair(&self, c: &Poly, d: &Poly) -> Result<u64> {
        let mut idx = 0;
        for (l, &r) in self.locals.iter().zip(&self.radix) {
            let i = l
                .index(c, d)
                .ok_or_else(|| Error::Domain(format!("({c} : {d}) is not unimodular mod {}", self.n)))?;
            idx += i * r;
        }
        Ok(idx)
    }

    pub fn index_of(&self, pt: &ProjPoint) -> u64 {
        self.index_of_pair(&pt.c, &pt.d).expect("stored points are unimodular")
    }

    /// Canonical point with the given index.
    pub fn point(&self, idx: u64) -> ProjPoint {
        assert!(idx < self.kappa, "point index out of range");
        let f = self.f;
        if self.locals.is_empty() {
            return ProjPoint { c: Poly::zero(f), d: Poly::one(f) };
        }
        let mut c = Poly::zero(f);
        let mut d = Poly::zero(f);
        for ((l, e), i) in self.locals.iter().zip(&self.idempotents).zip(self.digits(idx)) {
            let (lc, ld) = l.rep(f, i);
            c = &c + &(&lc * e);
            d = &d + &(&ld * e);
        }
        ProjPoint { c: c.rem(&self.n), d: d.rem(&self.n) }
    }

    /// Canonical form of (c:d); fails unless gcd(c, d, n) = 1.
    pub fn canonicalize(&self, c: &Poly, d: &Poly) -> Result<ProjPoint> {
        Ok(self.point(self.index_of_pair(c, d)?))
    }

    pub fn enumerate_proj_line(&self) -> Vec<ProjPoint> {
        (0..self.kappa).map(|i| self.point(i)).collect()
    }

    /// Degree of the width n / gcd(c², n) of the point with index `idx`.
    pub fn width_deg(&self, idx: u64) -> usize {
        self.locals
            .iter()
            .zip(self.digits(idx))
            .map(|(l, i)| (l.e - l.gcd_c2_exponent(self.f, i)) as usize * l.p.deg().unwrap())
            .sum()
    }

    /// Width n / gcd(c², n).
    pub fn width(&self, pt: &ProjPoint) -> Poly {
        let idx = self.index_of(pt);
        let mut w = Poly::one(self.f);
        for (l, i) in self.locals.iter().zip(self.digits(idx)) {
            w = &w * &l.p.pow((l.e - l.gcd_c2_exponent(self.f, i)) as u64);
        }
        w
    }

    /// Right action (c, d)·m = (c a + d c', c b + d d') on indices, tabulated
    /// per local factor.
    pub(crate) fn local_action(&self, m: &Mat2A) -> Vec<Vec<u32>> {
        self.locals
            .iter()
            .map(|l| {
                let red = Mat2A::new(m.a.rem(&l.pe), m.b.rem(&l.pe), m.c.rem(&l.pe), m.d.rem(&l.pe));
                (0..l.size).map(|i| l.act(self.f, i, &red) as u32).collect()
            })
            .collect()
    }

    /// Apply a tabulated action to every point: returns the image index of each point.
    pub(crate) fn apply_all(&self, tables: &[Vec<u32>]) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.kappa as usize);
        let sizes = self.local_sizes();
        let mut digits = vec![0u64; sizes.len()];
        for _ in 0..self.kappa {
            let img: u64 = digits
                .iter()
                .zip(tables)
                .zip(&self.radix)
                .map(|((&d, t), &r)| t[d as usize] as u64 * r)
                .sum();
            out.push(img as u32);
            for (k, dk) in digits.iter_mut().enumerate() {
                *dk += 1;
                if *dk < sizes[k] {
                    break;
                }
                *dk = 0;
            }
        }
        out
    }

    pub fn act(&self, pt: &ProjPoint, m: &Mat2A) -> ProjPoint {
        let c2 = &(&pt.c * &m.a) + &(&pt.d * &m.c);
        let d2 = &(&pt.c * &m.b) + &(&pt.d * &m.d);
        self.canonicalize(&c2, &d2).expect("action preserves unimodularity")
    }

    /// A lift (c', d') of the point with gcd(c', d') = 1 in A, completed to a
    /// matrix (a b; c' d') of determinant 1.
    pub fn lift(&self, pt: &ProjPoint) -> Mat2A {
        let f = self.f;
        let c = pt.c.clone();
        let mut d = pt.d.clone();
        if c.is_zero() {
            d = Poly::one(f);
        } else if !c.gcd(&d).is_one() {
            let bound = c.deg_i() - 1;
            let k = enumerate_polys(f, bound.max(0), false)
                .find(|k| c.gcd(&(&d + &(k * &self.n))).is_one())
                .expect("a coprime lift exists for a unimodular pair");
            d = &d + &(&k * &self.n);
        }
        let (_, s, t) = Poly::gcd_bezout(&c, &d).expect("not both zero");
        Mat2A::new(t, -s, c, d)
    }

    /// Index of the distinguished point (0:1).
    pub fn zero_point(&self) -> u64 {
        0
    }
    /// Index of (1:0).
    pub fn infinity_point(&self) -> u64 {
        self.index_of_pair(&Poly::one(self.f), &Poly::zero(self.f)).expect("unimodular")
    }
}

/// A cusp: a Γ∞-orbit on P¹(A/n) with a lift to Γ.
#[derive(Clone, Debug)]
pub struct Cusp {
    pub rep: ProjPoint,
    pub rep_index: u64,
    pub lift: Mat2A,
    pub ell: usize,
    pub orbit_size: u64,
}

/// Γ∞-orbits of P¹(A/n), in order of their least point index (so (0:1) is first).
pub fn cusps(level: &Level) -> Vec<Cusp> {
    let mut uf = UnionFind::new(level.kappa() as usize);
    for m in gamma_inf_generators(level.field(), level.deg().saturating_sub(1)) {
        uf.union_all(&level.apply_all(&level.local_action(&m)));
    }
    let mut reps: Vec<(u32, u64)> = Vec::new();
    for i in 0..level.kappa() as u32 {
        if uf.find(i) == i {
            reps.push((i, uf.size_of(i) as u64));
        }
    }
    reps.into_iter()
        .map(|(i, size)| {
            let rep = level.point(i as u64);
            let lift = level.lift(&rep);
            let ell = level.width_deg(i as u64).saturating_sub(1);
            Cusp { rep, rep_index: i as u64, lift, ell, orbit_size: size }
        })
        .collect()
}

/// Generators of Γ∞^(r) = {(a b; 0 d) : a, d ∈ F_q^×, deg b ≤ r} modulo scalars.
pub fn gamma_inf_generators(f: Fq, r: usize) -> Vec<Mat2A> {
    let mut gens = vec![Mat2A::diag(Poly::constant(f, f.generator()), Poly::one(f))];
    for i in 0..=r {
        gens.extend(translations_at(f, i));
    }
    gens
}

/// `(1 εT^i; 0 1)` for ε in an F_p-basis of F_q.
pub fn translations_at(f: Fq, i: usize) -> Vec<Mat2A> {
    f.prime_basis().map(|eps| Mat2A::translation(Poly::monomial(f, eps, i))).collect()
}

/// Order of Γ∞^(r).
pub fn gamma_inf_order(q: u64, r: usize) -> u64 {
    (q - 1) * (q - 1) * q.pow(r as u32 + 1)
}

/// Order of GL₂(F_q).
pub fn gl2_order(q: u64) -> u64 {
    (q * q - 1) * (q * q - q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabKind {
    Vertex,
    Edge,
}

/// Order of the stabilizer in Γ₀(n) of γ·v_r (or γ·e_r), where γ lifts `pt`,
/// by enumerating the ambient stabilizer and testing membership of γβγ⁻¹.
pub fn stabilizer_order(pt: &ProjPoint, r: i64, level: &Level, kind: StabKind) -> Result<u64> {
    if r < 0 {
        return Err(Error::Domain("stratum r must be non-negative".into()));
    }
    let r = r as usize;
    let f = level.field();
    let g = level.lift(pt);
    let gi = g.inverse()?;
    let n = level.n();
    let member = |beta: &Mat2A| g.mul(beta).mul(&gi).c.rem(n).is_zero();
    let units: Vec<u8> = f.units().collect();
    let q = f.q() as u64;
    if kind == StabKind::Vertex && r == 0 {
        let mut count = 0;
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    for d in f.elements() {
                        let beta = Mat2A::new(
                            Poly::constant(f, a),
                            Poly::constant(f, b),
                            Poly::constant(f, c),
                            Poly::constant(f, d),
                        );
                        if beta.det().is_unit() && member(&beta) {
                            count += 1;
                        }
                    }
                }
            }
        }
        return Ok(count);
    }
    // membership depends on b mod n only
    let dn = level.deg();
    let (bdeg, mult) = if r + 1 > dn { (dn as i64 - 1, q.pow((r + 1 - dn) as u32)) } else { (r as i64, 1) };
    let mut count = 0;
    for &a in &units {
        for &d in &units {
            for b in enumerate_polys(f, bdeg, false) {
                let beta = Mat2A::new(Poly::constant(f, a), b, Poly::zero(f), Poly::constant(f, d));
                if member(&beta) {
                    count += mult;
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lvl(q: u32, s: &str) -> Level {
        Level::parse(q, s).unwrap()
    }

    /// Brute force: unimodular pairs mod n up to scaling by (A/n)^×.
    fn brute_points(level: &Level) -> usize {
        let f = level.field();
        let n = level.n();
        let dn = level.deg() as i64 - 1;
        let all: Vec<Poly> = enumerate_polys(f, dn, false).collect();
        let units: Vec<&Poly> = all.iter().filter(|u| u.gcd(n).is_one()).collect();
        let mut seen = std::collections::HashSet::new();
        let mut classes = 0;
        for c in &all {
            for d in &all {
                if !c.gcd(d).gcd(n).is_one() || seen.contains(&(c.clone(), d.clone())) {
                    continue;
                }
                classes += 1;
                for u in &units {
                    seen.insert((c.mul_mod(u, n), d.mul_mod(u, n)));
                }
            }
        }
        classes
    }

    #[test]
    fn point_counts() {
        assert_eq!(lvl(2, "1").kappa(), 1);
        assert_eq!(lvl(2, "T").kappa(), 3);
        assert_eq!(lvl(2, "T^2").kappa(), 6);
        for (q, s) in [(2, "T"), (2, "T^2"), (2, "T^3 + T"), (3, "T^2 + 1"), (3, "T^2"), (4, "T^2 + T")] {
            let l = lvl(q, s);
            assert_eq!(brute_points(&l) as u64, l.kappa(), "q={q} n={s}");
            assert_eq!(l.kappa(), l.kappa_formula());
        }
    }

    #[test]
    fn canonical_forms() {
        let l = lvl(2, "T^2");
        let f = l.field();
        let p = |s: &str| Poly::parse(f, s).unwrap();
        assert_eq!(l.canonicalize(&p("0"), &p("1")).unwrap(), ProjPoint { c: p("0"), d: p("1") });
        let a = l.canonicalize(&p("T"), &p("1 + T")).unwrap();
        let b = l.canonicalize(&p("T"), &p("1 + T + T^3")).unwrap();
        assert_eq!(a, b);
        assert!(l.canonicalize(&p("T"), &p("T")).is_err());
        let l3 = lvl(3, "T^2 + 1");
        let f3 = l3.field();
        let x = l3.canonicalize(&Poly::zero(f3), &Poly::constant(f3, 2)).unwrap();
        assert_eq!(x, l3.point(0));
        for i in 0..l3.kappa() {
            let pt = l3.point(i);
            assert_eq!(l3.index_of(&pt), i);
        }
    }

    #[test]
    fn widths() {
        let l = lvl(2, "T^3");
        let f = l.field();
        let p = |s: &str| Poly::parse(f, s).unwrap();
        assert!(l.width(&l.point(0)).is_one());
        assert_eq!(l.width(&l.canonicalize(&p("1"), &p("0")).unwrap()), p("T^3"));
        assert_eq!(l.width(&l.canonicalize(&p("T"), &p("1")).unwrap()), p("T"));
    }

    #[test]
    fn cusp_examples() {
        let c = cusps(&lvl(2, "1"));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].ell, 0);
        let l = lvl(2, "T");
        let c = cusps(&l);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].rep, l.point(0));
        // (1:1)·(1 1; 0 1) = (1:0), so the second orbit is that of (1:0)
        assert_eq!(l.act(&c[1].rep, &Mat2A::translation(Poly::one(l.field()))), l.point(l.infinity_point()));
        assert_eq!(c[0].orbit_size + c[1].orbit_size, 3);
        for cusp in &c {
            assert!(cusp.lift.det().is_one());
        }
    }

    #[test]
    fn stabilizer_examples() {
        let l = lvl(2, "1");
        let pt = l.point(0);
        assert_eq!(stabilizer_order(&pt, 1, &l, StabKind::Edge).unwrap(), 4);
        assert_eq!(stabilizer_order(&pt, 0, &l, StabKind::Vertex).unwrap(), 6);
        assert!(stabilizer_order(&pt, -1, &l, StabKind::Edge).is_err());
        let l3 = lvl(3, "1");
        assert_eq!(stabilizer_order(&l3.point(0), 1, &l3, StabKind::Edge).unwrap(), 4 * 9);
        assert_eq!(stabilizer_order(&l3.point(0), 0, &l3, StabKind::Vertex).unwrap(), 48);
    }
}
