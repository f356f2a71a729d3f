//! Harmonic cochains on the quotient graph and their Fourier coefficients.
//!
//! A cochain is stored by its value on each `+` edge of the finite part and
//! by x_s = f(γ_s e_ℓ) for every cusp s. Harmonicity at the end vertices
//! forces f(γ_s e_R) = q^(R-ℓ) x_s for R ≥ ℓ.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FqElem;
use crate::graph::{Location, QuotientGraph};
use crate::linalg::{make_integral, Matrix, Scalar};
use crate::mat2::Mat2K;
use crate::poly::{monic_of_degree, Poly};
use crate::reduce::{reduce_edge, reduce_iwasawa, EdgeCoord};

static SELFCHECK: AtomicBool = AtomicBool::new(true);

/// Turn the runtime harmonicity checks on constructed cochains on or off.
pub fn set_selfcheck(on: bool) {
    SELFCHECK.store(on, Ordering::Relaxed);
}

pub fn selfcheck_enabled() -> bool {
    SELFCHECK.load(Ordering::Relaxed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicCochain<S> {
    /// Value on each undirected edge, i.e. on the `+` edge with id 2i.
    pub values: Vec<S>,
    /// x_s for every cusp, in the order of `graph.ends`.
    pub end_values: Vec<S>,
}

impl<S: Scalar> HarmonicCochain<S> {
    pub fn zero(g: &QuotientGraph) -> Self {
        HarmonicCochain { values: vec![S::zero(); g.num_undirected()], end_values: vec![S::zero(); g.ends.len()] }
    }

    pub fn from_vector(g: &QuotientGraph, v: &[S]) -> Self {
        let m = g.num_undirected();
        assert_eq!(v.len(), m + g.ends.len());
        HarmonicCochain { values: v[..m].to_vec(), end_values: v[m..].to_vec() }
    }

    /// Edge values followed by end values.
    pub fn to_vector(&self) -> Vec<S> {
        self.values.iter().chain(&self.end_values).cloned().collect()
    }

    pub fn is_cuspidal(&self) -> bool {
        self.end_values.iter().all(|x| x.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.is_cuspidal() && self.values.iter().all(|x| x.is_zero())
    }

    /// Value on a finite directed edge.
    pub fn edge_value(&self, edge_id: usize) -> S {
        let v = self.values[edge_id / 2].clone();
        if edge_id.is_multiple_of(2) {
            v
        } else {
            -v
        }
    }

    pub fn value_at(&self, g: &QuotientGraph, loc: Location) -> S {
        match loc {
            Location::Finite(id) => self.edge_value(id),
            Location::End { cusp, r, orient } => {
                let x = &self.end_values[cusp];
                if x.is_zero() {
                    return S::zero();
                }
                let ell = g.ends[cusp].cusp.ell;
                let scale = S::from_i64(g.level().q() as i64).pow_u((r - ell) as u32);
                let v = x.clone() * scale;
                if orient.sign() > 0 {
                    v
                } else {
                    -v
                }
            }
        }
    }

    pub fn value_at_coord(&self, g: &QuotientGraph, e: &EdgeCoord) -> S {
        self.value_at(g, g.locate(e))
    }

    /// f at the tree edge g·I.
    pub fn evaluate(&self, g: &QuotientGraph, m: &Mat2K) -> Result<S> {
        Ok(self.value_at_coord(g, &reduce_edge(m, g.level())?))
    }

    /// Exact check of weighted harmonicity at every vertex of the finite part.
    pub fn check_harmonic(&self, g: &QuotientGraph) -> Result<()> {
        let mut sums = vec![S::zero(); g.vertices.len()];
        for e in &g.edges {
            let v = self.edge_value(e.id);
            if self.edge_value(e.rev) != -v.clone() {
                return Err(Error::Invariant(format!("f(ē) ≠ −f(e) on edge {}", e.id)));
            }
            if !v.is_zero() {
                sums[e.origin] = sums[e.origin].clone() + S::from_i64(e.weight as i64) * v;
            }
        }
        for (s, end) in g.ends.iter().enumerate() {
            let x = &self.end_values[s];
            if !x.is_zero() {
                sums[end.attach] = sums[end.attach].clone() + S::from_i64(end.weight as i64) * x.clone();
            }
        }
        match sums.iter().position(|x| !x.is_zero()) {
            None => Ok(()),
            Some(v) => Err(Error::Invariant(format!("harmonicity fails at vertex {v}"))),
        }
    }
}

trait PowU {
    fn pow_u(self, k: u32) -> Self;
}

impl<S: Scalar> PowU for S {
    fn pow_u(self, k: u32) -> S {
        (0..k).fold(S::one(), |acc, _| acc * self.clone())
    }
}

/// The weighted harmonicity system: one row per vertex, one column per
/// undirected edge followed by one per cusp.
pub fn harmonic_system<S: Scalar>(g: &QuotientGraph) -> Matrix<S> {
    let m = g.num_undirected();
    let mut a: Matrix<S> = Matrix::zeros(g.vertices.len(), m + g.ends.len());
    for e in &g.edges {
        let col = e.id / 2;
        let w = S::from_i64(e.weight as i64);
        let w = if e.id % 2 == 0 { w } else { -w };
        let v = a.get(e.origin, col).clone() + w;
        a.set(e.origin, col, v);
    }
    for (s, end) in g.ends.iter().enumerate() {
        let v = a.get(end.attach, m + s).clone() + S::from_i64(end.weight as i64);
        a.set(end.attach, m + s, v);
    }
    a
}

fn finite_columns<S: Scalar>(full: &Matrix<S>, m: usize) -> Matrix<S> {
    let rows: Vec<Vec<S>> = (0..full.rows()).map(|i| full.row(i)[..m].to_vec()).collect();
    if rows.is_empty() {
        Matrix::zeros(0, m)
    } else {
        Matrix::from_rows(&rows)
    }
}

/// Basis of the cuspidal harmonic cochains, scaled to coprime integers.
pub fn cuspidal_basis<S: Scalar>(g: &QuotientGraph) -> Vec<HarmonicCochain<S>> {
    let m = g.num_undirected();
    let sys = finite_columns(&harmonic_system::<S>(g), m);
    sys.nullspace()
        .into_iter()
        .map(|mut v| {
            make_integral(&mut v);
            HarmonicCochain { values: v, end_values: vec![S::zero(); g.ends.len()] }
        })
        .collect()
}

/// Basis of all harmonic cochains: the cuspidal basis followed by cochains
/// completing it.
pub fn full_basis<S: Scalar>(g: &QuotientGraph) -> Vec<HarmonicCochain<S>> {
    let mut basis = cuspidal_basis::<S>(g);
    let mut span: Vec<Vec<S>> = basis.iter().map(|b| b.to_vector()).collect();
    let mut rank = span.len();
    for mut v in harmonic_system::<S>(g).nullspace() {
        span.push(v.clone());
        let r = crate::linalg::rank_of_vectors(&span);
        if r > rank {
            rank = r;
            make_integral(&mut v);
            basis.push(HarmonicCochain::from_vector(g, &v));
        } else {
            span.pop();
        }
    }
    basis
}

/// Coordinates of cochains in a basis; `None` if some cochain is outside its span.
pub fn coordinates<S: Scalar>(
    basis: &[HarmonicCochain<S>],
    targets: &[HarmonicCochain<S>],
) -> Option<Vec<Vec<S>>> {
    if basis.is_empty() {
        return targets.iter().all(|t| t.is_zero()).then(|| vec![Vec::new(); targets.len()]);
    }
    let len = basis[0].values.len() + basis[0].end_values.len();
    let a = Matrix::from_cols(&basis.iter().map(|b| b.to_vector()).collect::<Vec<_>>(), len);
    a.solve_many(&targets.iter().map(|t| t.to_vector()).collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoeffs<S> {
    pub c0: S,
    /// (m, c_m) for monic m in index order.
    pub cm: Vec<(Poly, S)>,
}

impl<S: Scalar> FourierCoeffs<S> {
    pub fn get(&self, m: &Poly) -> Option<&S> {
        self.cm.iter().find(|(p, _)| p == m).map(|(_, c)| c)
    }
}

/// u = u_1 π + ... + u_(r-1) π^(r-1), enumerated in base-q order.
fn tails(q: u32, r: usize) -> impl Iterator<Item = Vec<FqElem>> {
    let len = r.saturating_sub(1);
    let count = (q as u64).pow(len as u32);
    (0..count).map(move |mut i| {
        (0..len)
            .map(|_| {
                let d = (i % q as u64) as u8;
                i /= q as u64;
                d
            })
            .collect()
    })
}

/// Locations of the edges (π^r u; 0 1)·I for all u ∈ πO∞/π^r O∞.
pub fn horocycle(g: &QuotientGraph, r: usize) -> Vec<(Vec<FqElem>, Location)> {
    let level = g.level();
    tails(level.q(), r).map(|u| {
        let e = reduce_iwasawa(level, r, &u);
        (u, g.locate(&e))
    }).collect()
}

/// Ψ(m u) / 1 collapsed: q − 1 if the π¹ coefficient of m·u vanishes, else −1.
fn psi(g: &QuotientGraph, m: &Poly, u: &[FqElem]) -> i64 {
    let f = g.level().field();
    let a1 = m
        .coeffs()
        .iter()
        .enumerate()
        .fold(0u8, |acc, (j, &mj)| f.add(acc, f.mul(mj, u.get(j).copied().unwrap_or(0))));
    let q = f.q() as i64;
    if a1 == 0 {
        q - 1
    } else {
        -1
    }
}

/// Collapsed sum f*(r, m) = q^-(r-1) (q-1)^-1 Σ_u f((π^r u; 0 1)) Ψ(m u).
pub fn fstar<S: Scalar>(f: &HarmonicCochain<S>, g: &QuotientGraph, r: usize, m: &Poly) -> S {
    let q = g.level().q() as i64;
    let mut acc = S::zero();
    for (u, loc) in horocycle(g, r) {
        let v = f.value_at(g, loc);
        if !v.is_zero() {
            acc = acc + v * S::from_i64(psi(g, m, &u));
        }
    }
    acc / (S::from_i64(q).pow_u(r as u32 - 1) * S::from_i64(q - 1))
}

/// Fourier coefficients c₀ and c_m for all monic m of degree ≤ `max_deg`, for
/// several cochains at once.
pub fn fourier_many<S: Scalar>(fs: &[HarmonicCochain<S>], g: &QuotientGraph, max_deg: usize) -> Vec<FourierCoeffs<S>> {
    let q = g.level().q() as i64;
    let f = g.level().field();
    let mut out: Vec<FourierCoeffs<S>> = fs.iter().map(|_| FourierCoeffs { c0: S::zero(), cm: Vec::new() }).collect();
    let h2 = horocycle(g, 2);
    for (k, cochain) in fs.iter().enumerate() {
        let s = h2.iter().fold(S::zero(), |acc, (_, loc)| acc + cochain.value_at(g, *loc));
        out[k].c0 = s / S::from_i64(q);
    }
    let norm = S::from_i64(q * (q - 1));
    for d in 0..=max_deg {
        let h = horocycle(g, d + 2);
        let vals: Vec<Vec<S>> = fs.iter().map(|c| h.iter().map(|(_, loc)| c.value_at(g, *loc)).collect()).collect();
        // integral cochains take an exact machine-integer path
        let ints: Vec<Option<Vec<i64>>> = vals.iter().map(|vs| vs.iter().map(|v| v.to_i64()).collect()).collect();
        for m in monic_of_degree(f, d) {
            let w: Vec<i64> = h.iter().map(|(u, _)| psi(g, &m, u)).collect();
            for (k, vs) in vals.iter().enumerate() {
                let fast = ints[k].as_ref().and_then(|iv| {
                    let s: i128 = iv.iter().zip(&w).map(|(&v, &wi)| v as i128 * wi as i128).sum();
                    i64::try_from(s).ok()
                });
                let s = match fast {
                    Some(s) => S::from_i64(s),
                    None => vs
                        .iter()
                        .zip(&w)
                        .filter(|(v, _)| !v.is_zero())
                        .fold(S::zero(), |acc, (v, &wi)| acc + v.clone() * S::from_i64(wi)),
                };
                out[k].cm.push((m.clone(), s / norm.clone()));
            }
        }
    }
    out
}

pub fn fourier<S: Scalar>(f: &HarmonicCochain<S>, g: &QuotientGraph, max_deg: usize) -> FourierCoeffs<S> {
    fourier_many(std::slice::from_ref(f), g, max_deg).pop().unwrap()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct EdgeValueJson {
    pub edge: usize,
    pub value: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CochainJson {
    pub schema: String,
    pub level: String,
    pub basis_index: usize,
    pub edge_values: Vec<EdgeValueJson>,
    pub end_values: Vec<String>,
}

impl<S: Scalar> HarmonicCochain<S> {
    pub fn to_json(&self, g: &QuotientGraph, basis_index: usize) -> CochainJson {
        CochainJson {
            schema: crate::SCHEMA.into(),
            level: g.level().n().to_string(),
            basis_index,
            edge_values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| EdgeValueJson { edge: 2 * i, value: v.to_string() })
                .collect(),
            end_values: self.end_values.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CoefficientJson {
    pub m: String,
    pub value: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FourierJson {
    pub schema: String,
    pub level: String,
    pub basis_index: usize,
    pub upto: usize,
    pub c0: String,
    pub coefficients: Vec<CoefficientJson>,
}

impl<S: Scalar> FourierCoeffs<S> {
    pub fn to_json(&self, g: &QuotientGraph, basis_index: usize, upto: usize) -> FourierJson {
        FourierJson {
            schema: crate::SCHEMA.into(),
            level: g.level().n().to_string(),
            basis_index,
            upto,
            c0: self.c0.to_string(),
            coefficients: self.cm.iter().map(|(m, c)| CoefficientJson { m: m.to_string(), value: c.to_string() }).collect(),
        }
    }
}
