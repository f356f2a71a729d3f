//! Reduction of edges of the tree to quotient coordinates.
//!
//! Every edge of the tree is uniquely `(π^k u; 0 1)·I` (written `+`) or
//! `(π^k u; 0 1)(0 1; π 0)·I` (written `−`), with u ∈ K∞ mod π^k O∞. The
//! descent below rewrites such an edge as γ·e_r or γ·ē_r with γ ∈ GL₂(A),
//! alternating translations (1 P; 0 1) with the swap (0 1; 1 0).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fq, FqElem};
use crate::laurent::{series_div, series_inv};
use crate::level::Level;
use crate::mat2::{Mat2A, Mat2K};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orient {
    /// The class of γ e_r.
    Plus,
    /// The class of γ ē_r.
    Minus,
}

impl Orient {
    pub fn flip(self) -> Orient {
        match self {
            Orient::Plus => Orient::Minus,
            Orient::Minus => Orient::Plus,
        }
    }
    pub fn sign(self) -> i64 {
        match self {
            Orient::Plus => 1,
            Orient::Minus => -1,
        }
    }
}

/// Quotient coordinates of an edge: the point of P¹(A/n) (by index) given by
/// the bottom row of γ, the stratum r, and the orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeCoord {
    pub pt: u64,
    pub r: usize,
    pub orient: Orient,
}

impl EdgeCoord {
    pub fn reversed(self) -> EdgeCoord {
        EdgeCoord { orient: self.orient.flip(), ..self }
    }
}

trait Track {
    fn translate(&mut self, p: &Poly);
    fn swap(&mut self);
}

struct FullTrack(Mat2A);

impl Track for FullTrack {
    fn translate(&mut self, p: &Poly) {
        let g = &mut self.0;
        g.b = &(&g.a * p) + &g.b;
        g.d = &(&g.c * p) + &g.d;
    }
    fn swap(&mut self) {
        let g = &mut self.0;
        std::mem::swap(&mut g.a, &mut g.b);
        std::mem::swap(&mut g.c, &mut g.d);
    }
}

/// Bottom row of γ modulo n.
struct RowTrack<'a> {
    c: Poly,
    d: Poly,
    n: &'a Poly,
}

impl Track for RowTrack<'_> {
    fn translate(&mut self, p: &Poly) {
        self.d = (&(&self.c * p) + &self.d).rem(self.n);
    }
    fn swap(&mut self) {
        std::mem::swap(&mut self.c, &mut self.d);
    }
}

/// The normal form of an edge before descent: orientation, k, and the
/// polynomial part and the coefficients of π^1..π^(k-1) of u.
struct Normal {
    plus: bool,
    k: i64,
    poly: Poly,
    frac: Vec<FqElem>,
}

/// Polynomial part of u = num/den restricted to exponents < k, and the
/// coefficients of π^1..π^(k-1).
fn split_quotient(num: &Poly, den: &Poly, k: i64) -> (Poly, Vec<FqElem>) {
    let f = num.field();
    let (q, r) = num.div_rem(den);
    let poly = if k >= 1 {
        q
    } else {
        // π^(-i) = T^i is kept iff -i < k
        let drop = (1 - k) as usize;
        let c: Vec<FqElem> = q.coeffs().iter().enumerate().map(|(i, &x)| if i < drop { 0 } else { x }).collect();
        Poly::new(f, &c)
    };
    let nfrac = (k - 1).max(0) as usize;
    let frac = if nfrac == 0 || r.is_zero() {
        vec![0; nfrac]
    } else {
        let dd = den.deg().unwrap();
        let a: Vec<FqElem> = (0..dd).map(|t| r.coeff(dd - 1 - t)).collect();
        let b: Vec<FqElem> = (0..=dd).map(|t| den.coeff(dd - t)).collect();
        series_div(f, &a, &b, nfrac)
    };
    (poly, frac)
}

fn normal_form(g: &Mat2A) -> Result<Normal> {
    let det = g.det();
    let Some(ddet) = det.deg() else {
        return Err(Error::Domain("singular matrix".into()));
    };
    let ddet = ddet as i64;
    let plus = g.c.is_zero() || (!g.d.is_zero() && g.c.deg() < g.d.deg());
    let (k, num, den) = if plus {
        (2 * g.d.deg_i() - ddet, &g.b, &g.d)
    } else {
        (2 * g.c.deg_i() - ddet + 1, &g.a, &g.c)
    };
    let (poly, frac) = split_quotient(num, den, k);
    Ok(Normal { plus, k, poly, frac })
}

fn descend<T: Track>(f: Fq, mut st: Normal, track: &mut T) -> (usize, Orient) {
    loop {
        if !st.poly.is_zero() {
            track.translate(&st.poly);
        }
        let orient = if st.plus { Orient::Plus } else { Orient::Minus };
        if st.k <= 0 {
            return ((-st.k) as usize, orient);
        }
        track.swap();
        let Some(pos) = st.frac.iter().position(|&x| x != 0) else {
            return ((st.k - 1) as usize, orient.flip());
        };
        let j = pos as i64 + 1;
        let k2 = st.k - 2 * j;
        // 1/u with u = π^j w: coefficients of π^(-j) .. π^(k2-1)
        let v = series_inv(f, &st.frac[pos..], (st.k - j) as usize);
        let mut pc = Vec::new();
        let mut frac = vec![0; (k2 - 1).max(0) as usize];
        for (t, &x) in v.iter().enumerate() {
            let e = t as i64 - j;
            if e <= 0 && e < k2 {
                let deg = (-e) as usize;
                if pc.len() <= deg {
                    pc.resize(deg + 1, 0);
                }
                pc[deg] = x;
            } else if e >= 1 && e < k2 {
                frac[(e - 1) as usize] = x;
            }
        }
        st = Normal { plus: st.plus, k: k2, poly: Poly::new(f, &pc), frac };
    }
}

/// γ ∈ GL₂(A), r and orientation with g·I = γ e_r (Plus) or γ ē_r (Minus).
pub fn decompose_edge(g: &Mat2K) -> Result<(Mat2A, usize, Orient)> {
    let f = g.field();
    let ga = g.clear_denominators();
    let st = normal_form(&ga)?;
    let mut tr = FullTrack(Mat2A::identity(f));
    let (r, o) = descend(f, st, &mut tr);
    Ok((tr.0, r, o))
}

/// Weil decomposition: γ ∈ GL₂(A) with unit determinant and r ≥ 0 such that
/// g·v₀ = γ·diag(T^r, 1)·v₀.
pub fn weil_decompose(g: &Mat2K) -> Result<(Mat2A, usize)> {
    let (gamma, r, o) = decompose_edge(g)?;
    // e_g starts at g v₀; γ e_r starts at γ v_r and γ ē_r at γ v_(r+1)
    Ok((gamma, if o == Orient::Plus { r } else { r + 1 }))
}

/// Quotient coordinates of the edge g·I at the given level.
pub fn reduce_edge(g: &Mat2K, level: &Level) -> Result<EdgeCoord> {
    reduce_edge_a(&g.clear_denominators(), level)
}

/// As [`reduce_edge`], for a matrix with polynomial entries.
pub fn reduce_edge_a(g: &Mat2A, level: &Level) -> Result<EdgeCoord> {
    let f = level.field();
    let st = normal_form(g)?;
    let mut tr = RowTrack { c: Poly::zero(f), d: Poly::one(f), n: level.n() };
    let (r, orient) = descend(f, st, &mut tr);
    let pt = level.index_of_pair(&tr.c, &tr.d)?;
    Ok(EdgeCoord { pt, r, orient })
}

/// Quotient coordinates of `(π^k u; 0 1)·I` where `u = Σ u[i] π^(i+1)`.
pub fn reduce_iwasawa(level: &Level, k: usize, u: &[FqElem]) -> EdgeCoord {
    let f = level.field();
    let mut frac = vec![0; k.saturating_sub(1)];
    for (x, &y) in frac.iter_mut().zip(u) {
        *x = y;
    }
    let st = Normal { plus: true, k: k as i64, poly: Poly::zero(f), frac };
    let mut tr = RowTrack { c: Poly::zero(f), d: Poly::one(f), n: level.n() };
    let (r, orient) = descend(f, st, &mut tr);
    let pt = level.index_of_pair(&tr.c, &tr.d).expect("rows stay unimodular");
    EdgeCoord { pt, r, orient }
}

/// A matrix representing the edge: γ·diag(T^r, 1), followed by (0 1; π 0)
/// for the reversed orientation.
pub fn edge_rep(e: &EdgeCoord, level: &Level) -> Mat2K {
    let f = level.field();
    let gamma = level.lift(&level.point(e.pt));
    let m = gamma.to_k().mul(&Mat2K::diag_t(f, e.r as i64));
    match e.orient {
        Orient::Plus => m,
        Orient::Minus => m.mul(&Mat2K::flip(f)),
    }
}

/// Polynomial matrix for the edge representative: γ·diag(T^r, 1) for `+`,
/// and γ·(0 T^(r+1); 1 0) = T·γ·diag(T^r, 1)·(0 1; π 0) for `−`.
pub fn edge_rep_a(pt: u64, r: usize, orient: Orient, level: &Level) -> Mat2A {
    let f = level.field();
    let gamma = level.lift(&level.point(pt));
    let m = match orient {
        Orient::Plus => Mat2A::diag(Poly::t_pow(f, r), Poly::one(f)),
        Orient::Minus => Mat2A::new(Poly::zero(f), Poly::t_pow(f, r + 1), Poly::one(f), Poly::zero(f)),
    };
    gamma.mul(&m)
}

/// `reduce_edge(m · rep(e))`.
pub fn act_and_reduce(m: &Mat2K, e: &EdgeCoord, level: &Level) -> Result<EdgeCoord> {
    reduce_edge(&m.mul(&edge_rep(e, level)), level)
}
