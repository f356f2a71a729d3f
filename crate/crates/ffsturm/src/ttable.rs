//! t(c,d;m) and t(m,n): largest pairwise-coprime subsets of
//! S(c,d;m) = {xc + yd : deg x, deg y ≤ m}, minimized over coprime pairs.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique::{max_clique_bounded, Graph};
use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::poly::{monic_of_degree, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TValue {
    Finite(u64),
    Infinite,
}

impl fmt::Display for TValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TValue::Finite(v) => write!(f, "{v}"),
            TValue::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TCell {
    Value(TValue),
    Timeout,
}

impl fmt::Display for TCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TCell::Value(v) => v.fmt(f),
            TCell::Timeout => f.write_str("timeout"),
        }
    }
}

/// Distinct prime factors of every monic polynomial up to a degree, by index.
pub struct FactorTable {
    q: u64,
    max_deg: usize,
    offsets: Vec<u32>,
    primes: Vec<u32>,
    num_primes: usize,
}

impl FactorTable {
    pub fn new(f: Fq, max_deg: usize) -> Self {
        let q = f.q() as u64;
        let size = q.pow(max_deg as u32 + 1) as usize;
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); size];
        let mut next_id = 0u32;
        for d in 1..=max_deg {
            for p in monic_of_degree(f, d) {
                let idx = p.index() as usize;
                if !lists[idx].is_empty() {
                    continue;
                }
                // p has no factor of smaller degree
                let id = next_id;
                next_id += 1;
                for g in (0..=max_deg - d).flat_map(|k| monic_of_degree(f, k)) {
                    lists[(&p * &g).index() as usize].push(id);
                }
            }
        }
        let mut offsets = Vec::with_capacity(size + 1);
        let mut primes = Vec::new();
        offsets.push(0);
        for l in lists {
            primes.extend(l);
            offsets.push(primes.len() as u32);
        }
        FactorTable { q, max_deg, offsets, primes, num_primes: next_id as usize }
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    pub fn num_primes(&self) -> usize {
        self.num_primes
    }

    /// Prime ids of the monic polynomial with this index.
    #[inline]
    pub fn primes_of(&self, idx: u64) -> &[u32] {
        let i = idx as usize;
        &self.primes[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

fn table_cache() -> &'static Mutex<HashMap<(u32, usize), Arc<FactorTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), Arc<FactorTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn factor_table(f: Fq, max_deg: usize) -> Arc<FactorTable> {
    let mut cache = table_cache().lock().unwrap();
    if let Some(t) = cache.iter().find(|((q, d), _)| *q == f.q() && *d >= max_deg).map(|(_, t)| t.clone()) {
        return t;
    }
    let t = Arc::new(FactorTable::new(f, max_deg));
    cache.insert((f.q(), max_deg), t.clone());
    t
}

/// S(c,d;m) reduced for the clique search: the number of nonzero constants
/// (all mutually coprime and coprime to everything), and the distinct monic
/// non-constant elements by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanElements {
    pub units: u64,
    pub monic: Vec<u64>,
}

/// Coefficient vectors of all polynomials of degree ≤ m, in index order.
fn small_polys(f: Fq, m: usize) -> Vec<Vec<FqElem>> {
    let q = f.q() as u64;
    (0..q.pow(m as u32 + 1))
        .map(|mut i| {
            (0..=m)
                .map(|_| {
                    let d = (i % q) as u8;
                    i /= q;
                    d
                })
                .collect()
        })
        .collect()
}

fn mul_into(f: Fq, x: &[FqElem], c: &[FqElem], out: &mut [FqElem]) {
    out.iter_mut().for_each(|o| *o = 0);
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in c.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(a, b));
        }
    }
}

pub fn span_elements(c: &Poly, d: &Poly, m: usize) -> SpanElements {
    let f = c.field();
    let q = f.q() as u64;
    let len = c.len().max(d.len()) + m;
    let xs = small_polys(f, m);
    let prod = |p: &Poly| -> Vec<Vec<FqElem>> {
        xs.iter()
            .map(|x| {
                let mut v = vec![0; len];
                mul_into(f, x, p.coeffs(), &mut v);
                v
            })
            .collect()
    };
    let (xc, yd) = (prod(c), prod(d));
    let mut units = false;
    let mut monic = Vec::new();
    for a in &xc {
        for b in &yd {
            let mut top = None;
            for k in (0..len).rev() {
                if f.add(a[k], b[k]) != 0 {
                    top = Some(k);
                    break;
                }
            }
            let Some(top) = top else { continue };
            if f.add(a[top], b[top]) != 1 {
                continue;
            }
            if top == 0 {
                units = true;
                continue;
            }
            let mut idx = 0u64;
            for k in (0..=top).rev() {
                idx = idx * q + f.add(a[k], b[k]) as u64;
            }
            monic.push(idx);
        }
    }
    monic.sort_unstable();
    monic.dedup();
    SpanElements { units: if units { q - 1 } else { 0 }, monic }
}

/// Vertices for the clique search after removing dominated elements: among
/// elements with equal prime sets keep one, and a prime power p^k removes
/// every other element divisible by p.
fn reduced_vertices<'a>(elems: &[u64], table: &'a FactorTable) -> Vec<&'a [u32]> {
    let mut sets: Vec<&[u32]> = elems.iter().map(|&i| table.primes_of(i)).collect();
    sets.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    sets.dedup();
    let singletons: std::collections::HashSet<u32> = sets.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect();
    sets.retain(|s| s.len() == 1 || !s.iter().any(|p| singletons.contains(p)));
    sets
}

fn greedy_clique(sets: &[&[u32]], used: &mut [bool]) -> usize {
    let mut size = 0;
    let mut touched = Vec::new();
    for s in sets {
        if s.iter().all(|&p| !used[p as usize]) {
            size += 1;
            for &p in s.iter() {
                used[p as usize] = true;
                touched.push(p);
            }
        }
    }
    for p in touched {
        used[p as usize] = false;
    }
    size
}

fn coprimality_graph(sets: &[&[u32]], nprimes: usize) -> Graph {
    let n = sets.len();
    let mut by_prime: Vec<Vec<usize>> = vec![Vec::new(); nprimes];
    for (i, s) in sets.iter().enumerate() {
        for &p in s.iter() {
            by_prime[p as usize].push(i);
        }
    }
    let mut g = Graph::new(n);
    for i in 0..n {
        g.adj[i] = crate::clique::BitSet::full(n);
        g.adj[i].remove(i);
    }
    for list in &by_prime {
        for &a in list {
            for &b in list {
                g.adj[a].remove(b);
            }
        }
    }
    g
}

/// Outcome of deciding t(c,d;m) against a threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    /// t(c,d;m) ≥ the threshold.
    AtLeast,
    /// The exact value, which is below the threshold.
    Exact(u64),
    Aborted,
}

/// Decide whether t(c,d;m) ≥ `threshold`, and give the exact value if not.
pub fn decide_t_cdm(c: &Poly, d: &Poly, m: usize, threshold: u64, table: &FactorTable, abort: &dyn Fn() -> bool) -> Decision {
    let s = span_elements(c, d, m);
    let sets = reduced_vertices(&s.monic, table);
    let mut used = vec![false; table.num_primes()];
    let greedy = s.units + greedy_clique(&sets, &mut used) as u64;
    if greedy >= threshold {
        return Decision::AtLeast;
    }
    let g = coprimality_graph(&sets, table.num_primes());
    let target = (threshold - s.units) as usize;
    let r = max_clique_bounded(&g, target, abort);
    if r.aborted {
        return Decision::Aborted;
    }
    let v = s.units + r.clique.len() as u64;
    if v >= threshold {
        Decision::AtLeast
    } else {
        Decision::Exact(v)
    }
}

/// t(c,d;m) for coprime c, d.
pub fn t_cdm(c: &Poly, d: &Poly, m: usize) -> Result<u64> {
    if !c.gcd(d).is_one() {
        return Err(Error::Input(format!("gcd({c}, {d}) is not 1")));
    }
    let table = factor_table(c.field(), c.len().max(d.len()) - 1 + m);
    match decide_t_cdm(c, d, m, u64::MAX, &table, &|| false) {
        Decision::Exact(v) => Ok(v),
        _ => unreachable!(),
    }
}

/// Reduced basis of span{c, d}: c monic of the top degree D, d monic of
/// degree e < D, and the θ^e coefficient of c zero.
fn echelon(c: &Poly, d: &Poly) -> (Poly, Poly) {
    let (mut hi, mut lo) = if c.deg() >= d.deg() { (c.clone(), d.clone()) } else { (d.clone(), c.clone()) };
    if hi.deg() == lo.deg() {
        let k = hi.field().div(lo.lc(), hi.lc());
        lo = &lo - &hi.scale(k);
    }
    lo = lo.monic();
    hi = hi.monic();
    let e = lo.deg().unwrap();
    let k = hi.coeff(e);
    if k != 0 {
        hi = &hi - &lo.scale(k);
    }
    (hi, lo)
}

/// True iff (c, d) is the least echelon pair in its orbit under θ ↦ aθ + b.
fn is_affine_canonical(c: &Poly, d: &Poly) -> bool {
    let f = c.field();
    let key = (c.index(), d.index());
    for a in f.units() {
        for b in f.elements() {
            if a == 1 && b == 0 {
                continue;
            }
            let sub = Poly::new(f, &[b, a]);
            let (c2, d2) = echelon(&c.compose(&sub), &d.compose(&sub));
            if (c2.index(), d2.index()) < key {
                return false;
            }
        }
    }
    true
}

/// Echelon pairs with top degree exactly `dtop`, coprime and affine-canonical.
pub fn pairs_of_degree(f: Fq, dtop: usize) -> Vec<(Poly, Poly)> {
    let mut out = Vec::new();
    for e in 0..dtop {
        for d in monic_of_degree(f, e) {
            for c in monic_of_degree(f, dtop) {
                if c.coeff(e) != 0 || !c.gcd(&d).is_one() {
                    continue;
                }
                if is_affine_canonical(&c, &d) {
                    out.push((c, d.clone()));
                }
            }
        }
    }
    out
}

/// min t(c,d;m) over the pairs of one top degree, given the running minimum.
/// Returns None on timeout.
fn layer_min(f: Fq, m: usize, dtop: usize, current: u64, deadline: Option<Instant>, jobs: usize) -> Option<u64> {
    let table = factor_table(f, dtop + m);
    let pairs = pairs_of_degree(f, dtop);
    let best = AtomicU64::new(current);
    let timed_out = AtomicBool::new(false);
    let abort = || timed_out.load(Ordering::Relaxed) || deadline.is_some_and(|t| Instant::now() >= t);
    let work = |(c, d): &(Poly, Poly)| {
        if abort() {
            timed_out.store(true, Ordering::Relaxed);
            return;
        }
        let k = best.load(Ordering::Relaxed);
        match decide_t_cdm(c, d, m, k, &table, &abort) {
            Decision::Exact(v) => {
                best.fetch_min(v, Ordering::Relaxed);
            }
            Decision::Aborted => timed_out.store(true, Ordering::Relaxed),
            Decision::AtLeast => {}
        }
    };
    if jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| pairs.par_iter().for_each(work)),
            Err(_) => pairs.iter().for_each(work),
        }
    } else {
        pairs.iter().for_each(work);
    }
    if timed_out.load(Ordering::Relaxed) {
        None
    } else {
        Some(best.load(Ordering::Relaxed))
    }
}

/// Row t(m, n) for n = n_min..=n_max, with an optional time budget per cell.
pub fn t_row(q: u32, m: u32, n_min: u32, n_max: u32, cell_timeout: Option<Duration>, jobs: usize) -> Result<Vec<(u32, TCell)>> {
    let f = Fq::new(q)?;
    let m_us = m as usize;
    let mut out = Vec::new();
    let mut current = u64::MAX;
    let mut failed = false;
    // t(m, n) = min over top degrees D with m + 1 < D < n
    let mut done_through = m + 1;
    for n in n_min..=n_max {
        if n < m + 3 {
            out.push((n, TCell::Value(TValue::Infinite)));
            continue;
        }
        if !failed {
            let deadline = cell_timeout.map(|t| Instant::now() + t);
            while done_through < n - 1 {
                let dtop = done_through + 1;
                if let Some(v) = cached(q, m, dtop) {
                    current = current.min(v);
                } else {
                    match layer_min(f, m_us, dtop as usize, current, deadline, jobs) {
                        Some(v) => {
                            if v < current {
                                current = v;
                            }
                            store(q, m, dtop, current);
                        }
                        None => {
                            failed = true;
                            break;
                        }
                    }
                }
                done_through = dtop;
            }
        }
        out.push((n, if failed { TCell::Timeout } else { TCell::Value(TValue::Finite(current)) }));
    }
    Ok(out)
}

/// Running minima min_{m+1 < D ≤ dtop} t(c,d;m), memoized per process.
fn layer_cache() -> &'static Mutex<HashMap<(u32, u32, u32), u64>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), u64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(q: u32, m: u32, dtop: u32) -> Option<u64> {
    layer_cache().lock().unwrap().get(&(q, m, dtop)).copied()
}

fn store(q: u32, m: u32, dtop: u32, v: u64) {
    layer_cache().lock().unwrap().insert((q, m, dtop), v);
}

/// t(m, n) with no time limit.
pub fn t_mn(q: u32, m: u32, n: u32) -> Result<TValue> {
    match t_row(q, m, n, n, None, 1)?.pop() {
        Some((_, TCell::Value(v))) => Ok(v),
        _ => Err(Error::Timeout),
    }
}
