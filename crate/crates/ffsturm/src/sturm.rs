//! Sturm-type bounds: δ, ε, ℓ(n), τ(n), the closed-form bounds and the
//! sharp bound b_true(n) read off pruned quotient graphs.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Location, QuotientGraph};
use crate::level::{cusps, Level};
use crate::poly::{enumerate_polys, Poly};
use crate::reduce::{reduce_iwasawa, Orient};
use crate::ttable::{t_mn, TValue};

/// (δ_n(c,d), ε_n(c,d)).
pub fn delta_eps(c: &Poly, d: &Poly, level: &Level) -> Result<(u32, u32)> {
    if !c.gcd(d).is_one() {
        return Err(Error::Input(format!("gcd({c}, {d}) is not 1")));
    }
    let n = level.n();
    let f = level.field();
    let ok = |x: &Poly, y: &Poly| (&(c * x) + &(d * y)).gcd(n).is_one();
    for delta in 0i64.. {
        let mut found = false;
        let mut eps0 = false;
        // pairs with max(deg x, deg y) = δ
        for x in enumerate_polys(f, delta, false) {
            for y in enumerate_polys(f, delta, false) {
                if x.deg_i().max(y.deg_i()) != delta || !ok(&x, &y) {
                    continue;
                }
                found = true;
                if y.deg_i() < x.deg_i() {
                    eps0 = true;
                    break;
                }
            }
            if eps0 {
                break;
            }
        }
        if found {
            return Ok((delta as u32, if eps0 { 0 } else { 1 }));
        }
        if delta > n.deg_i() {
            return Err(Error::Invariant(format!("no δ witness for ({c}, {d}) at level {n}")));
        }
    }
    unreachable!()
}

/// ℓ(n) = max of 2δ + ε over the bottom rows (c : d) ∈ P¹(A/n) of Γ₀(n)\Γ.
///
/// δ and ε depend only on (c : d) mod n, but not only on its cusp class, so
/// every point of the projective line is visited.
pub fn ell_of_level(level: &Level) -> Result<u32> {
    let mut best = 0;
    for pt in level.enumerate_proj_line() {
        let lift = level.lift(&pt);
        let (d, e) = delta_eps(&lift.c, &lift.d, level)?;
        best = best.max(2 * d + e);
    }
    Ok(best)
}

/// The same maximum taken over one coprime lift per cusp only.
pub fn ell_over_cusp_reps(level: &Level) -> Result<u32> {
    let mut best = 0;
    for cusp in cusps(level) {
        let (d, e) = delta_eps(&cusp.lift.c, &cusp.lift.d, level)?;
        best = best.max(2 * d + e);
    }
    Ok(best)
}

/// t(n): number of distinct prime factors.
pub fn t_of_level(level: &Level) -> u32 {
    level.num_primes() as u32
}

/// τ(n) = min{m ≥ 0 : t(n) < t(m, deg n)}.
pub fn tau(level: &Level) -> Result<u32> {
    let q = level.q() as u64;
    let t = t_of_level(level) as u64;
    let n = level.deg() as u32;
    let below = |m: u32| -> Result<bool> {
        Ok(match t_mn(level.q(), m, n)? {
            TValue::Infinite => true,
            TValue::Finite(v) => t < v,
        })
    };
    // t(0, n) = q + 1 for n ≥ 3, and t(1, n) ≥ 2q + 1 for n ≥ 4
    if t <= q || n < 3 {
        return Ok(0);
    }
    if t <= 2 * q || n < 4 {
        return Ok(1);
    }
    for m in 2.. {
        if below(m)? {
            return Ok(m);
        }
    }
    unreachable!()
}

/// b′(n) = deg n − 1 + 2⌊(t(n) − 1)/q⌋.
pub fn b_prime(level: &Level) -> i64 {
    let t = t_of_level(level) as i64;
    level.deg() as i64 - 1 + 2 * ((t - 1).max(0) / level.q() as i64)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub schema: String,
    pub level: String,
    pub q: u32,
    pub deg: usize,
    pub t_of_n: u32,
    pub tau: u32,
    pub ell: u32,
    pub coarse_cuspidal: i64,
    pub coarse_full: i64,
    pub thm03: i64,
    /// Bound for all of H₀(n).
    pub thm04: i64,
    /// Bound on the new subspace (square-free and p²q, deg q = 1, cases).
    pub thm04_new: i64,
    pub prop45: i64,
    pub prop414: i64,
    pub rem415: i64,
    pub b_prime: i64,
    pub b_true: Option<i64>,
    /// τ(n) ≤ ⌊(t(n) − 1)/q⌋, reported and never asserted.
    pub predicted_tau_holds: bool,
}

/// All closed-form bounds; b_true is left empty.
pub fn bounds(level: &Level) -> Result<BoundReport> {
    let deg = level.deg() as i64;
    let tau = tau(level)?;
    let ell = ell_of_level(level)?;
    let t = t_of_level(level);
    let prop45 = deg - 2 + ell as i64;
    let thm04 = if level.is_prime_power() { deg - 2 } else { prop45 };
    let thm04_new = if level.is_prime_power() || level.is_square_free() || level.is_p2q_linear() { deg - 2 } else { prop45 };
    let thm03 = deg - 1 + 2 * tau as i64;
    Ok(BoundReport {
        schema: crate::SCHEMA.into(),
        level: level.n().to_string(),
        q: level.q(),
        deg: level.deg(),
        t_of_n: t,
        tau,
        ell,
        coarse_cuspidal: 2 * deg - 4,
        coarse_full: (2 * deg - 3).max(deg - 1),
        thm03,
        thm04,
        thm04_new,
        prop45,
        prop414: thm03,
        rem415: prop45.max(deg - 1),
        b_prime: b_prime(level),
        b_true: None,
        predicted_tau_holds: (tau as i64) <= (t as i64 - 1).max(0) / level.q() as i64,
    })
}

/// An edge of the quotient including its ends: a finite directed edge, or
/// the end edge γ_s e_R (`Plus`) / its reversal (`Minus`) for R ≥ ℓ_s.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Sym {
    Fin(usize),
    End(usize, usize, bool),
}

impl Sym {
    fn of(loc: Location) -> Sym {
        match loc {
            Location::Finite(id) => Sym::Fin(id),
            Location::End { cusp, r, orient } => Sym::End(cusp, r, orient == Orient::Plus),
        }
    }
}

/// Vertex of the quotient including end vertices (s, R) for R > ℓ_s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Fin(usize),
    End(usize, usize),
}

struct Walker<'a> {
    g: &'a QuotientGraph,
    adj: Vec<Vec<usize>>,
    /// Ends attached at each finite vertex.
    attached: Vec<Vec<usize>>,
}

impl<'a> Walker<'a> {
    fn new(g: &'a QuotientGraph) -> Self {
        let mut attached = vec![Vec::new(); g.vertices.len()];
        for (s, e) in g.ends.iter().enumerate() {
            attached[e.attach].push(s);
        }
        Walker { g, adj: g.adjacency(), attached }
    }

    fn node(&self, r: usize, s: usize) -> Node {
        if r == self.g.ends[s].cusp.ell {
            Node::Fin(self.g.ends[s].attach)
        } else {
            Node::End(s, r)
        }
    }

    fn origin(&self, e: Sym) -> Node {
        match e {
            Sym::Fin(id) => Node::Fin(self.g.edges[id].origin),
            Sym::End(s, r, true) => self.node(r, s),
            Sym::End(s, r, false) => self.node(r + 1, s),
        }
    }

    fn rev(&self, e: Sym) -> Sym {
        match e {
            Sym::Fin(id) => Sym::Fin(self.g.edges[id].rev),
            Sym::End(s, r, p) => Sym::End(s, r, !p),
        }
    }

    fn out_edges(&self, v: Node) -> Vec<(Sym, u64)> {
        match v {
            Node::Fin(v) => {
                let mut out: Vec<(Sym, u64)> = self.adj[v].iter().map(|&id| (Sym::Fin(id), self.g.edges[id].weight)).collect();
                for &s in &self.attached[v] {
                    out.push((Sym::End(s, self.g.ends[s].cusp.ell, true), self.g.ends[s].weight));
                }
                out
            }
            Node::End(s, r) => vec![(Sym::End(s, r, true), 1), (Sym::End(s, r - 1, false), self.g.level().q() as u64)],
        }
    }

    /// Classes of the q tree edges whose terminus is the origin of a lift of `e`, other than ē.
    fn children(&self, e: Sym, out: &mut BTreeSet<Sym>) {
        for (x, w) in self.out_edges(self.origin(e)) {
            if x != e || w >= 2 {
                out.insert(self.rev(x));
            }
        }
    }
}

/// Classes [e(r − 2, u)] = [(π^r u; 0 1)·I] for r = 1..=max_r, by propagation
/// from (π 0; 0 1)·I.
fn horocycle_classes(g: &QuotientGraph, max_r: usize) -> Vec<BTreeSet<Sym>> {
    let w = Walker::new(g);
    let mut layers = vec![BTreeSet::new()];
    let first = g.locate(&reduce_iwasawa(g.level(), 1, &[]));
    layers.push(BTreeSet::from([Sym::of(first)]));
    for r in 2..=max_r {
        let mut next = BTreeSet::new();
        for &e in &layers[r - 1] {
            w.children(e, &mut next);
        }
        layers.push(next);
    }
    layers
}

/// Same sets by reducing every (π^r u; 0 1)·I directly.
fn horocycle_classes_direct(g: &QuotientGraph, max_r: usize) -> Vec<BTreeSet<Sym>> {
    let mut layers = vec![BTreeSet::new()];
    for r in 1..=max_r {
        layers.push(crate::harmonic::horocycle(g, r).into_iter().map(|(_, loc)| Sym::of(loc)).collect());
    }
    layers
}

/// Check that propagation and direct reduction agree up to `max_r`.
pub fn check_horocycles(g: &QuotientGraph, max_r: usize) -> Result<()> {
    let a = horocycle_classes(g, max_r);
    let b = horocycle_classes_direct(g, max_r);
    match (1..=max_r).find(|&r| a[r] != b[r]) {
        None => Ok(()),
        Some(r) => Err(Error::Invariant(format!("horocycle classes disagree at r = {r}"))),
    }
}

/// Cycle rank of the finite part with the undirected edges in `removed` deleted.
fn pruned_genus(g: &QuotientGraph, removed: &[bool]) -> usize {
    let mut uf = crate::orbits::UnionFind::new(g.vertices.len());
    let mut kept = 0;
    let mut comps = g.vertices.len();
    for (i, e) in g.plus_edges().enumerate() {
        if removed[i] {
            continue;
        }
        kept += 1;
        if uf.find(e.origin as u32) != uf.find(e.terminus as u32) {
            uf.union(e.origin as u32, e.terminus as u32);
            comps -= 1;
        }
    }
    kept + comps - g.vertices.len()
}

/// Genera g(G°_(ℓ)) for ℓ = 0, 1, ... up to the first zero (or `max_ell`).
pub fn pruned_genera(g: &QuotientGraph, max_ell: usize) -> Vec<usize> {
    let mut removed = vec![false; g.num_undirected()];
    let mut out = Vec::new();
    let layers = horocycle_classes(g, max_ell + 2);
    for ell in 0..=max_ell {
        for s in &layers[ell + 2] {
            if let Sym::Fin(id) = s {
                removed[id / 2] = true;
            }
        }
        let gen = pruned_genus(g, &removed);
        out.push(gen);
        if gen == 0 {
            break;
        }
    }
    out
}

/// b_true(n) = min{ℓ ≥ 0 : g(G°_(ℓ)) = 0}; 0 when the genus is already 0.
pub fn b_true(g: &QuotientGraph) -> i64 {
    if g.genus() == 0 {
        return 0;
    }
    let cap = 2 * g.level().deg();
    let gens = pruned_genera(g, cap);
    gens.iter().position(|&x| x == 0).map(|p| p as i64).expect("pruning reaches genus 0 by the coarse bound")
}
