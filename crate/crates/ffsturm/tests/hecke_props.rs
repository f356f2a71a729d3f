mod common;

use common::{all_levels, level};
use ffsturm::factor::{divisors, prime_divisors};
use ffsturm::graph::QuotientGraph;
use ffsturm::harmonic::{fourier_many, horocycle};
use ffsturm::hecke::{atkin_lehner, atkin_lehner_matrix, hecke_t, is_exact_divisor, new_subspace, space_basis, transform, ImagePath, Space};
use ffsturm::linalg::{Matrix, Scalar};
use ffsturm::poly::monic_of_degree;
use ffsturm::{enumerate_polys, Level, Poly, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn pi1_coeff(l: &Level, m: &Poly, u: &[u8]) -> u8 {
    let f = l.field();
    m.coeffs().iter().zip(u).fold(0, |acc, (&mj, &uj)| f.add(acc, f.mul(mj, uj)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coprime_operators_commute(l in level(&[2, 3], 1..=3), i in any::<usize>(), j in any::<usize>()) {
        let g = QuotientGraph::build(&l).unwrap();
        let f = l.field();
        let basis = space_basis::<Rational>(&g, Space::Full).unwrap();
        let ms: Vec<Poly> = enumerate_polys(f, 2, true).filter(|m| !m.is_one()).collect();
        let (a, b) = (&ms[i % ms.len()], &ms[j % ms.len()]);
        prop_assume!(a.gcd(b).is_one());
        let ta = hecke_t(&g, &basis, a, Space::Full, ImagePath::AllEdges).unwrap().matrix;
        let tb = hecke_t(&g, &basis, b, Space::Full, ImagePath::AllEdges).unwrap().matrix;
        prop_assert_eq!(ta.mul(&tb), tb.mul(&ta));
        let tab = hecke_t(&g, &basis, &(a * b), Space::Full, ImagePath::AllEdges).unwrap().matrix;
        prop_assert_eq!(ta.mul(&tb), tab);
    }

    /// Both image paths agree and keep H₀ stable.
    #[test]
    fn cuspidal_space_is_stable(l in level(&[2, 3], 3..=4), i in any::<usize>()) {
        let g = QuotientGraph::build(&l).unwrap();
        let basis = space_basis::<Rational>(&g, Space::Cuspidal).unwrap();
        let ms: Vec<Poly> = enumerate_polys(l.field(), 2, true).collect();
        let m = &ms[i % ms.len()];
        let a = hecke_t(&g, &basis, m, Space::Cuspidal, ImagePath::AllEdges).unwrap();
        let b = hecke_t(&g, &basis, m, Space::Cuspidal, ImagePath::DeterminingSet).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn atkin_lehner_squares_to_one(l in level(&[3, 4], 1..=3)) {
        let g = QuotientGraph::build(&l).unwrap();
        let basis = space_basis::<Rational>(&g, Space::Full).unwrap();
        for m in divisors(l.n()).unwrap() {
            if is_exact_divisor(&m, l.n()) {
                let w = atkin_lehner(&g, &basis, &m, Space::Full, ImagePath::AllEdges).unwrap().matrix;
                prop_assert_eq!(w.mul(&w), Matrix::identity(basis.len()));
            }
        }
    }
}

#[test]
fn new_space_eigen_relation_at_exact_primes() {
    for q in [2, 3] {
        for l in all_levels(q, 3).into_iter().chain(all_levels(2, 4).into_iter().filter(|l| l.deg() == 4)) {
            if l.deg() < 3 {
                continue;
            }
            let g = QuotientGraph::build(&l).unwrap();
            let new = new_subspace::<Rational>(&g).unwrap();
            for p in prime_divisors(l.n()).unwrap() {
                if !is_exact_divisor(&p, l.n()) {
                    continue;
                }
                let t = hecke_t(&g, &new, &p, Space::New, ImagePath::AllEdges).unwrap().matrix;
                let w = atkin_lehner(&g, &new, &p, Space::New, ImagePath::AllEdges).unwrap().matrix;
                assert!(t.add(&w).is_zero(), "q={} {}: p={}", l.q(), l.n(), p);
            }
        }
    }
}

/// (f|W_n₀)((π^deg n₀′ u; 0 1)) = (−1)^t(n₀) q^(2 − deg n₀′) Σ_{deg m + 2 ≤ deg n₀′} c_(n₀m)(f) Ψ(m u).
#[test]
fn fricke_values_on_horocycles() {
    let mut checked = 0;
    for q in [2, 3] {
        for l in all_levels(q, 4) {
            if !(3..=4).contains(&l.deg()) || !l.is_square_free() || (q == 3 && l.deg() == 4) {
                continue;
            }
            let g = QuotientGraph::build(&l).unwrap();
            let f = l.field();
            let new = new_subspace::<Rational>(&g).unwrap();
            if new.is_empty() {
                continue;
            }
            let coeffs = fourier_many(&new, &g, l.deg());
            for n0 in divisors(l.n()).unwrap() {
                let r = l.deg() - n0.deg().unwrap();
                let sign = if prime_divisors(&n0).unwrap().len().is_multiple_of(2) { 1 } else { -1 };
                let w = atkin_lehner_matrix(&n0, &l, &Poly::zero(f)).unwrap();
                let scale = Rational::from_i64(q as i64).pow(2 - r as i32) * Rational::from_i64(sign);
                for (h, c) in new.iter().zip(&coeffs) {
                    let image = transform(h, &g, std::slice::from_ref(&w), &g).unwrap();
                    for (u, loc) in horocycle(&g, r) {
                        let mut s = Rational::zero();
                        for dm in 0..=r.saturating_sub(2) {
                            if dm + 2 > r {
                                continue;
                            }
                            for m in monic_of_degree(f, dm) {
                                let psi = if pi1_coeff(&l, &m, &u) == 0 { q as i64 - 1 } else { -1 };
                                s += c.get(&(&n0 * &m)).unwrap().clone() * Rational::from_i64(psi);
                            }
                        }
                        assert_eq!(image.value_at(&g, loc), s * scale.clone(), "q={q} {} n0={n0} u={u:?}", l.n());
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}
