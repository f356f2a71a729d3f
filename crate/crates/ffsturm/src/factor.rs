//! Factorization of polynomials over F_q: square-free decomposition,
//! distinct-degree splitting, and a deterministic equal-degree splitting.

use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::field::Fq;
use crate::poly::Poly;

/// Factor a nonzero polynomial into monic irreducibles with multiplicities,
/// sorted in index order. The leading coefficient is dropped.
pub fn factorize(n: &Poly) -> Result<Vec<(Poly, u32)>> {
    if n.is_zero() {
        return Err(Error::Domain("cannot factor the zero polynomial".into()));
    }
    let mut out: Vec<(Poly, u32)> = Vec::new();
    for (sqf, mult) in square_free(&n.monic()) {
        for (g, d) in distinct_degree(&sqf) {
            for p in equal_degree(&g, d) {
                out.push((p, mult));
            }
        }
    }
    out.sort();
    // merge repeats produced by the p-th root recursion
    let mut merged: Vec<(Poly, u32)> = Vec::with_capacity(out.len());
    for (p, m) in out {
        match merged.last_mut() {
            Some((last, lm)) if *last == p => *lm += m,
            _ => merged.push((p, m)),
        }
    }
    Ok(merged)
}

/// True iff `p` has positive degree and no nontrivial factorization.
pub fn is_irreducible(p: &Poly) -> bool {
    match p.deg() {
        None | Some(0) => false,
        Some(_) => factorize(p).map(|f| f.len() == 1 && f[0].1 == 1).unwrap_or(false),
    }
}

/// Distinct monic prime divisors.
pub fn prime_divisors(n: &Poly) -> Result<Vec<Poly>> {
    Ok(factorize(n)?.into_iter().map(|(p, _)| p).collect())
}

/// All monic divisors, sorted in index order.
pub fn divisors(n: &Poly) -> Result<Vec<Poly>> {
    let f = n.field();
    let mut out = vec![Poly::one(f)];
    for (p, e) in factorize(n)? {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for d in &out {
            let mut x = d.clone();
            next.push(x.clone());
            for _ in 0..e {
                x = &x * &p;
                next.push(x.clone());
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Monic irreducible polynomials of degree exactly `d`, in index order.
pub fn monic_irreducibles(f: Fq, d: usize) -> Vec<Poly> {
    crate::poly::monic_of_degree(f, d).filter(is_irreducible).collect()
}

fn pth_root(f: &Poly) -> Poly {
    let fq = f.field();
    let p = fq.p() as usize;
    // a^(1/p) = a^(q/p) in F_q
    let e = (fq.q() / fq.p()) as u64;
    let c: Vec<u8> = f.coeffs().iter().step_by(p).map(|&a| fq.pow(a, e)).collect();
    Poly::new(fq, &c)
}

/// Square-free decomposition of a monic polynomial as (factor, multiplicity)
/// pairs with pairwise coprime square-free factors.
fn square_free(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.deg().unwrap_or(0) == 0 {
        return out;
    }
    let p = f.field().p();
    let fd = f.derivative();
    if fd.is_zero() {
        for (g, m) in square_free(&pth_root(f)) {
            out.push((g, m * p));
        }
        return out;
    }
    let mut c = f.gcd(&fd);
    let mut w = f.quo(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.quo(&y);
        if !z.is_one() {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.quo(&w);
    }
    if !c.is_one() {
        for (g, m) in square_free(&pth_root(&c.monic())) {
            out.push((g, m * p));
        }
    }
    out
}

/// For square-free monic `f`, the products of its irreducible factors of each degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let fq = f.field();
    let q = fq.q() as u128;
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::t(fq);
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(q, &rest);
        let g = (&h - &x).gcd(&rest);
        if !g.is_one() {
            rest = rest.quo(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if let Some(k) = rest.deg() {
        if k > 0 {
            out.push((rest.monic(), k));
        }
    }
    out
}

/// Split a product of distinct monic irreducibles of degree `d`. Candidate
/// splitting polynomials are enumerated in index order, so the result is
/// deterministic.
fn equal_degree(g: &Poly, d: usize) -> Vec<Poly> {
    let k = g.deg().expect("nonzero");
    if k == d {
        return vec![g.monic()];
    }
    let fq = g.field();
    let qd: BigUint = Pow::pow(BigUint::from(fq.q()), d as u32);
    let half: Vec<u64> = ((&qd - BigUint::one()) >> 1u32).to_u64_digits();
    let total = (fq.q() as u64).saturating_pow(k as u32);
    for idx in fq.q() as u64..total {
        let a = Poly::from_index(fq, idx);
        let b = if fq.p() == 2 {
            trace_map(&a, g, d)
        } else {
            &a.pow_mod_limbs(&half, g) - &Poly::one(fq)
        };
        let h = b.gcd(g);
        if !h.is_one() && h.deg() != g.deg() && !h.is_zero() {
            let mut out = equal_degree(&h, d);
            out.extend(equal_degree(&g.quo(&h), d));
            return out;
        }
    }
    unreachable!("equal-degree splitting found no splitting element")
}

/// `a + a^2 + a^4 + ... + a^(2^(e d - 1)) mod g` in characteristic 2.
fn trace_map(a: &Poly, g: &Poly, d: usize) -> Poly {
    let bits = g.field().e() as usize * d;
    let mut term = a.rem(g);
    let mut acc = term.clone();
    for _ in 1..bits {
        term = term.mul_mod(&term, g);
        acc = &acc + &term;
    }
    acc
}
