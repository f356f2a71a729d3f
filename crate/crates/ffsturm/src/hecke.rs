//! Hecke operators, Atkin–Lehner involutions, degeneracy maps, the Petersson
//! product and the new subspace, as exact matrices on computed bases.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::divisors;
use crate::graph::QuotientGraph;
use crate::harmonic::{coordinates, cuspidal_basis, fourier_many, full_basis, selfcheck_enabled, HarmonicCochain};
use crate::level::Level;
use crate::linalg::{make_integral, Matrix, Scalar};
use crate::mat2::Mat2A;
use crate::poly::{enumerate_polys, Poly};
use crate::reduce::{edge_rep_a, reduce_edge_a, Orient};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Cuspidal,
    Full,
    New,
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Space> {
        match s {
            "cuspidal" => Ok(Space::Cuspidal),
            "full" => Ok(Space::Full),
            "new" => Ok(Space::New),
            _ => Err(Error::Input(format!("unknown space {s:?} (expected cuspidal, full or new)"))),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Cuspidal => "cuspidal",
            Space::Full => "full",
            Space::New => "new",
        })
    }
}

/// Basis of the requested space, each element checked for harmonicity when
/// self-checks are on.
pub fn space_basis<S: Scalar>(g: &QuotientGraph, space: Space) -> Result<Vec<HarmonicCochain<S>>> {
    let basis = match space {
        Space::Cuspidal => cuspidal_basis(g),
        Space::Full => full_basis(g),
        Space::New => new_subspace(g)?,
    };
    if selfcheck_enabled() {
        for f in &basis {
            f.check_harmonic(g)?;
        }
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorLabel {
    T(Poly),
    W(Poly),
    Degeneracy { src: Poly, m_prime: Poly },
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorLabel::T(m) => write!(f, "T_{{{m}}}"),
            OperatorLabel::W(m) => write!(f, "W_{{{m}}}"),
            OperatorLabel::Degeneracy { src, m_prime } => write!(f, "Degeneracy({src}, {m_prime})"),
        }
    }
}

/// Column j holds the coordinates of the image of basis vector j.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<S> {
    pub space: Space,
    pub label: OperatorLabel,
    pub matrix: Matrix<S>,
}

/// How images are re-expressed in the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImagePath {
    /// Values on every undirected edge of the finite part and at every cusp.
    AllEdges,
    /// Values on the edges γ e₀, γ ∈ Γ₀(n)\GL₂(A), which determine a cochain.
    DeterminingSet,
}

/// Coset matrices (a b; 0 d) with ad = m, a, d monic, gcd(a, n) = 1, deg b < deg d.
pub fn hecke_cosets(m: &Poly, level: &Level) -> Result<Vec<Mat2A>> {
    if m.is_zero() || !m.is_monic() {
        return Err(Error::Input(format!("Hecke index {m} must be monic")));
    }
    let f = m.field();
    let mut out = Vec::new();
    for d in divisors(m)? {
        let a = m.quo(&d);
        if !a.gcd(level.n()).is_one() {
            continue;
        }
        for b in enumerate_polys(f, d.deg_i() - 1, false) {
            out.push(Mat2A::new(a.clone(), b, Poly::zero(f), d.clone()));
        }
    }
    Ok(out)
}

/// True iff m is monic, divides n and is coprime to n/m.
pub fn is_exact_divisor(m: &Poly, n: &Poly) -> bool {
    !m.is_zero() && m.is_monic() && m.divides(n) && m.gcd(&n.quo(m)).is_one()
}

/// (sm t; un vm) with t = v = 1 and sm − u(n/m) = 1, shifted by `k` along
/// the Bézout family s ↦ s + k(n/m), u ↦ u + km.
pub fn atkin_lehner_matrix(m: &Poly, level: &Level, k: &Poly) -> Result<Mat2A> {
    let n = level.n();
    if !is_exact_divisor(m, n) {
        return Err(Error::Input(format!("{m} is not an exact divisor of {n}")));
    }
    let f = m.field();
    let co = n.quo(m);
    let (_, s, t) = Poly::gcd_bezout(m, &co)?;
    let s = &s + &(k * &co);
    let u = &(-&t) + &(k * m);
    Ok(Mat2A::new(m * &s, Poly::one(f), &u * n, m.clone()))
}

/// w_n = (0 −1; n 0).
pub fn fricke_matrix(level: &Level) -> Mat2A {
    let f = level.field();
    Mat2A::new(Poly::zero(f), -&Poly::one(f), level.n().clone(), Poly::zero(f))
}

/// Σ_M f(M·rep) evaluated on `src`, where `rep` is a polynomial edge matrix.
fn sum_over<S: Scalar>(f: &HarmonicCochain<S>, src: &QuotientGraph, mats: &[Mat2A], rep: &Mat2A) -> Result<S> {
    let mut acc = S::zero();
    for m in mats {
        let e = reduce_edge_a(&m.mul(rep), src.level())?;
        acc = acc + f.value_at_coord(src, &e);
    }
    Ok(acc)
}

/// The cochain e ↦ Σ_M f(M e) on `tgt`, given f on `src`. The result must be
/// Γ₀(n_tgt)-invariant for this to be meaningful; harmonicity is checked.
pub fn transform<S: Scalar>(
    f: &HarmonicCochain<S>,
    src: &QuotientGraph,
    mats: &[Mat2A],
    tgt: &QuotientGraph,
) -> Result<HarmonicCochain<S>> {
    let level = tgt.level();
    let mut values = Vec::with_capacity(tgt.num_undirected());
    for e in tgt.plus_edges() {
        values.push(sum_over(f, src, mats, &edge_rep_a(e.class as u64, e.r, Orient::Plus, level))?);
    }
    let mut end_values = Vec::with_capacity(tgt.ends.len());
    for end in &tgt.ends {
        let rep = end.cusp.lift.mul(&Mat2A::diag(Poly::t_pow(level.field(), end.cusp.ell), Poly::one(level.field())));
        end_values.push(sum_over(f, src, mats, &rep)?);
    }
    let out = HarmonicCochain { values, end_values };
    out.check_harmonic(tgt)?;
    Ok(out)
}

fn determining_values<S: Scalar>(
    f: &HarmonicCochain<S>,
    src: &QuotientGraph,
    mats: &[Mat2A],
    tgt: &QuotientGraph,
) -> Result<Vec<S>> {
    let level = tgt.level();
    (0..level.kappa()).map(|pt| sum_over(f, src, mats, &edge_rep_a(pt, 0, Orient::Plus, level))).collect()
}

/// Matrix of f ↦ Σ_M f(M·) on `basis`, which must be stable under it.
pub fn operator_matrix<S: Scalar>(
    g: &QuotientGraph,
    basis: &[HarmonicCochain<S>],
    mats: &[Mat2A],
    space: Space,
    label: OperatorLabel,
    path: ImagePath,
) -> Result<OperatorMatrix<S>> {
    let dim = basis.len();
    let unstable = || Error::Invariant(format!("{label} does not preserve the {space} space"));
    let cols: Vec<Vec<S>> = match path {
        ImagePath::AllEdges => {
            let images: Vec<HarmonicCochain<S>> =
                basis.iter().map(|f| transform(f, g, mats, g)).collect::<Result<_>>()?;
            coordinates(basis, &images).ok_or_else(unstable)?
        }
        ImagePath::DeterminingSet => {
            let id = [Mat2A::identity(g.level().field())];
            let b: Vec<Vec<S>> = basis.iter().map(|f| determining_values(f, g, &id, g)).collect::<Result<_>>()?;
            let t: Vec<Vec<S>> = basis.iter().map(|f| determining_values(f, g, mats, g)).collect::<Result<_>>()?;
            if dim == 0 {
                Vec::new()
            } else {
                let a = Matrix::from_cols(&b, g.level().kappa() as usize);
                if a.rank() < dim {
                    return Err(Error::Invariant("edges γe₀ do not determine the basis".into()));
                }
                a.solve_many(&t).ok_or_else(unstable)?
            }
        }
    };
    Ok(OperatorMatrix { space, label, matrix: Matrix::from_cols(&cols, dim) })
}

pub fn hecke_t<S: Scalar>(
    g: &QuotientGraph,
    basis: &[HarmonicCochain<S>],
    m: &Poly,
    space: Space,
    path: ImagePath,
) -> Result<OperatorMatrix<S>> {
    let mats = hecke_cosets(m, g.level())?;
    operator_matrix(g, basis, &mats, space, OperatorLabel::T(m.clone()), path)
}

pub fn atkin_lehner<S: Scalar>(
    g: &QuotientGraph,
    basis: &[HarmonicCochain<S>],
    m: &Poly,
    space: Space,
    path: ImagePath,
) -> Result<OperatorMatrix<S>> {
    let w = atkin_lehner_matrix(m, g.level(), &Poly::zero(m.field()))?;
    operator_matrix(g, basis, &[w], space, OperatorLabel::W(m.clone()), path)
}

/// Images f ↦ f((m′ 0; 0 1)·) of the cuspidal basis of H₀(m_src) on the graph
/// of level n. With Γ₀ defined by c ≡ 0 this is the invariant form of the map;
/// (1 0; 0 m′) conjugates Γ₀(n) out of GL₂(A).
pub fn degeneracy<S: Scalar>(
    src: &QuotientGraph,
    src_basis: &[HarmonicCochain<S>],
    m_prime: &Poly,
    tgt: &QuotientGraph,
) -> Result<Vec<HarmonicCochain<S>>> {
    let (ms, n) = (src.level().n(), tgt.level().n());
    if m_prime.is_zero() || !(ms * m_prime).divides(n) {
        return Err(Error::Input(format!("{ms}·{m_prime} does not divide {n}")));
    }
    if ms == n {
        return Err(Error::Input("degeneracy source level must differ from the target".into()));
    }
    let f = m_prime.field();
    let mat = [Mat2A::diag(m_prime.clone(), Poly::one(f))];
    src_basis.iter().map(|b| transform(b, src, &mat, tgt)).collect()
}

/// Σ over directed edges of the finite part of f₁ f₂ / #Stab.
pub fn petersson<S: Scalar>(g: &QuotientGraph, f1: &HarmonicCochain<S>, f2: &HarmonicCochain<S>) -> Result<S> {
    let m = g.num_undirected();
    if f1.values.len() != m || f2.values.len() != m {
        return Err(Error::Input("cochains live on a different graph".into()));
    }
    if !f1.is_cuspidal() || !f2.is_cuspidal() {
        return Err(Error::Input("the Petersson product needs cuspidal cochains".into()));
    }
    let mut acc = S::zero();
    for (e, (a, b)) in g.plus_edges().zip(f1.values.iter().zip(&f2.values)) {
        if !a.is_zero() && !b.is_zero() {
            acc = acc + a.clone() * b.clone() / S::from_i64(e.stab as i64);
        }
    }
    Ok(acc * S::from_i64(2))
}

/// Spanning set of the old subspace: degeneracy images from every proper
/// divisor m of n with deg m ≥ 3 and every m′ | n/m.
pub fn old_space<S: Scalar>(g: &QuotientGraph) -> Result<Vec<HarmonicCochain<S>>> {
    let n = g.level().n();
    let mut out = Vec::new();
    for m in divisors(n)? {
        if &m == n || m.deg().unwrap() < 3 {
            continue;
        }
        let src = QuotientGraph::build(&Level::new(&m)?)?;
        let basis = cuspidal_basis::<S>(&src);
        if basis.is_empty() {
            continue;
        }
        for mp in divisors(&n.quo(&m))? {
            out.extend(degeneracy(&src, &basis, &mp, g)?);
        }
    }
    Ok(out)
}

/// Petersson-orthogonal complement of the old subspace in H₀(n).
pub fn new_subspace<S: Scalar>(g: &QuotientGraph) -> Result<Vec<HarmonicCochain<S>>> {
    let basis = cuspidal_basis::<S>(g);
    let old = old_space::<S>(g)?;
    if old.is_empty() || basis.is_empty() {
        return Ok(basis);
    }
    let rows: Vec<Vec<S>> =
        old.iter().map(|o| basis.iter().map(|b| petersson(g, b, o)).collect::<Result<Vec<S>>>()).collect::<Result<_>>()?;
    let coeffs = Matrix::from_rows(&rows).nullspace();
    Ok(coeffs
        .into_iter()
        .map(|c| {
            let mut v = vec![S::zero(); g.num_undirected()];
            for (ci, b) in c.iter().zip(&basis) {
                if !ci.is_zero() {
                    for (x, y) in v.iter_mut().zip(&b.values) {
                        *x = x.clone() + ci.clone() * y.clone();
                    }
                }
            }
            make_integral(&mut v);
            HarmonicCochain { values: v, end_values: vec![S::zero(); g.ends.len()] }
        })
        .collect())
}

/// ranks[b] = rank of the coefficient matrix [c_m(f_i)] over monic m with
/// deg m ≤ b, preceded by the column c₀(f_i) when `with_c0` is set.
pub fn pairing_ranks<S: Scalar>(g: &QuotientGraph, basis: &[HarmonicCochain<S>], max_bound: usize, with_c0: bool) -> Vec<usize> {
    let dim = basis.len();
    if dim == 0 {
        return vec![0; max_bound + 1];
    }
    let fc = fourier_many(basis, g, max_bound);
    let mut echelon: Vec<(usize, Vec<S>)> = Vec::new();
    let push = |v: Vec<S>, echelon: &mut Vec<(usize, Vec<S>)>| {
        if echelon.len() == dim {
            return;
        }
        let mut v = v;
        for (p, e) in echelon.iter() {
            if !v[*p].is_zero() {
                let k = v[*p].clone() / e[*p].clone();
                for (x, y) in v.iter_mut().zip(e) {
                    *x = x.clone() - k.clone() * y.clone();
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            echelon.push((p, v));
        }
    };
    if with_c0 {
        push(fc.iter().map(|c| c.c0.clone()).collect(), &mut echelon);
    }
    let mut ranks = Vec::with_capacity(max_bound + 1);
    let ncols = fc[0].cm.len();
    let mut col = 0;
    for b in 0..=max_bound {
        while col < ncols && fc[0].cm[col].0.deg().unwrap() <= b {
            push(fc.iter().map(|c| c.cm[col].1.clone()).collect(), &mut echelon);
            col += 1;
        }
        ranks.push(echelon.len());
    }
    ranks
}

/// Rank at a single bound; a negative bound imposes no c_m (only c₀ if requested).
pub fn pairing_rank<S: Scalar>(g: &QuotientGraph, basis: &[HarmonicCochain<S>], bound: i64, with_c0: bool) -> usize {
    if bound < 0 {
        if !with_c0 || basis.is_empty() {
            return 0;
        }
        let fc = fourier_many(basis, g, 0);
        return usize::from(fc.iter().any(|c| !c.c0.is_zero()));
    }
    *pairing_ranks(g, basis, bound as usize, with_c0).last().unwrap()
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct OperatorJson {
    pub schema: String,
    pub level: String,
    pub space: Space,
    pub label: String,
    pub dim: usize,
    pub matrix: Vec<Vec<String>>,
}

impl<S: Scalar> OperatorMatrix<S> {
    pub fn to_json(&self, level: &Level) -> OperatorJson {
        OperatorJson {
            schema: crate::SCHEMA.into(),
            level: level.n().to_string(),
            space: self.space,
            label: self.label.to_string(),
            dim: self.matrix.rows(),
            matrix: self.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::fourier;
    use num_rational::BigRational as Q;

    fn graph(q: u32, s: &str) -> QuotientGraph {
        QuotientGraph::build(&Level::parse(q, s).unwrap()).unwrap()
    }

    #[test]
    fn hecke_matches_fourier() {
        let g = graph(2, "T^4 + T^3 + T^2 + T");
        let f = g.level().field();
        for space in [Space::Cuspidal, Space::Full] {
            let basis = space_basis::<Q>(&g, space).unwrap();
            let one = hecke_t(&g, &basis, &Poly::one(f), space, ImagePath::AllEdges).unwrap();
            assert_eq!(one.matrix, Matrix::identity(basis.len()));
            for m in enumerate_polys(f, 2, true) {
                let t = hecke_t(&g, &basis, &m, space, ImagePath::AllEdges).unwrap();
                let t2 = hecke_t(&g, &basis, &m, space, ImagePath::DeterminingSet).unwrap();
                assert_eq!(t, t2);
                for (j, b) in basis.iter().enumerate() {
                    let img = transform(b, &g, &hecke_cosets(&m, g.level()).unwrap(), &g).unwrap();
                    let c1 = fourier(&img, &g, 0).cm[0].1.clone();
                    assert_eq!(&c1, fourier(b, &g, 2).get(&m).unwrap(), "{space} {m} basis {j}");
                }
            }
        }
    }

    #[test]
    fn atkin_lehner_involutions() {
        let g = graph(2, "T^4 + T^3 + T^2 + T");
        let basis = full_basis::<Q>(&g);
        for m in divisors(g.level().n()).unwrap() {
            if !is_exact_divisor(&m, g.level().n()) {
                continue;
            }
            let w = atkin_lehner(&g, &basis, &m, Space::Full, ImagePath::AllEdges).unwrap();
            assert_eq!(w.matrix.mul(&w.matrix), Matrix::identity(basis.len()), "{m}");
            let alt = atkin_lehner_matrix(&m, g.level(), &Poly::t(m.field())).unwrap();
            let w2 = operator_matrix(&g, &basis, &[alt], Space::Full, w.label.clone(), ImagePath::AllEdges).unwrap();
            assert_eq!(w, w2);
        }
        let fr = operator_matrix(&g, &basis, &[fricke_matrix(g.level())], Space::Full, OperatorLabel::W(g.level().n().clone()), ImagePath::AllEdges).unwrap();
        let wn = atkin_lehner(&g, &basis, g.level().n(), Space::Full, ImagePath::AllEdges).unwrap();
        assert_eq!(fr.matrix, wn.matrix);
    }

    #[test]
    fn new_space_eigen_relation() {
        let g = graph(2, "T^4 + T");
        let new = new_subspace::<Q>(&g).unwrap();
        let cusp = cuspidal_basis::<Q>(&g);
        assert!(new.len() < cusp.len());
        for p in crate::factor::prime_divisors(g.level().n()).unwrap() {
            let t = hecke_t(&g, &new, &p, Space::New, ImagePath::AllEdges).unwrap();
            let w = atkin_lehner(&g, &new, &p, Space::New, ImagePath::AllEdges).unwrap();
            assert!(t.matrix.add(&w.matrix).is_zero(), "{p}");
        }
    }
}
