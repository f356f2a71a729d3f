mod common;

use common::level;
use ffsturm::graph::QuotientGraph;
use ffsturm::harmonic::{fourier, full_basis, horocycle, HarmonicCochain};
use ffsturm::linalg::Scalar;
use ffsturm::poly::monic_of_degree;
use ffsturm::sturm::bounds;
use ffsturm::{Fq, FqElem, Poly, Rational};
use num_traits::Zero;
use proptest::prelude::*;

/// π¹ coefficient of m·u, for u = Σ u[i] π^(i+1).
fn pi1_coeff(f: Fq, m: &Poly, u: &[FqElem]) -> FqElem {
    m.coeffs().iter().zip(u).fold(0, |acc, (&mj, &uj)| f.add(acc, f.mul(mj, uj)))
}

fn q_pow(q: u32, e: usize) -> Rational {
    Rational::from_i64(q as i64).pow(e as i32)
}

/// q^(r−1) f*(r, m) as a class in Z[ζ_p] / (1 + ζ + ... + ζ^(p−1)): entry k is
/// Σ f over u with Tr(π¹ coefficient of −m u) = k, shifted so entry 0 is zero.
fn raw_fstar(f_: &HarmonicCochain<Rational>, g: &QuotientGraph, r: usize, m: &Poly) -> Vec<Rational> {
    let f = g.level().field();
    let mut sums = vec![Rational::zero(); f.p() as usize];
    for (u, loc) in horocycle(g, r) {
        let k = f.trace(f.neg(pi1_coeff(f, m, &u))) as usize;
        sums[k] = sums[k].clone() + f_.value_at(g, loc);
    }
    let base = sums[0].clone();
    sums.into_iter().map(|s| (s - base.clone()) / q_pow(f.q(), r - 1)).collect()
}

fn setup(l: &ffsturm::Level) -> (QuotientGraph, Vec<HarmonicCochain<Rational>>) {
    let g = QuotientGraph::build(l).unwrap();
    let basis = full_basis::<Rational>(&g);
    (g, basis)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_cochains_are_harmonic(l in level(&[2, 3, 4], 1..=4)) {
        let (g, basis) = setup(&l);
        for f in &basis {
            prop_assert!(f.check_harmonic(&g).is_ok());
        }
    }

    /// f((π^r u; 0 1)) = q^(2−r) (c₀ + Σ_{deg m ≤ r−2} c_m Ψ(m u)), m monic.
    #[test]
    fn fourier_expansion_reconstructs(l in level(&[2, 3], 1..=3)) {
        let (g, basis) = setup(&l);
        let f = l.field();
        let q = f.q();
        let top = l.deg() + 4;
        for h in &basis {
            let fc = fourier(h, &g, top - 2);
            for r in 2..=top {
                for (u, loc) in horocycle(&g, r) {
                    let mut s = fc.c0.clone();
                    for (m, c) in &fc.cm {
                        if m.deg().unwrap() + 2 <= r {
                            let psi = if pi1_coeff(f, m, &u) == 0 { q as i64 - 1 } else { -1 };
                            s += c.clone() * Rational::from_i64(psi);
                        }
                    }
                    prop_assert_eq!(s / q_pow(q, r - 2), h.value_at(&g, loc), "r={} u={:?}", r, u);
                }
            }
        }
    }

    #[test]
    fn unit_twist_identity(l in level(&[2, 3, 4, 5], 1..=3), dm in 0usize..=2) {
        let (g, basis) = setup(&l);
        let f = l.field();
        for h in basis.iter().take(3) {
            for m in monic_of_degree(f, dm).take(4) {
                let base = raw_fstar(h, &g, dm + 2, &m);
                for ell in 0..=1usize {
                    for eps in f.units() {
                        let twisted = raw_fstar(h, &g, dm + 2 + ell, &m.scale(eps));
                        let scaled: Vec<Rational> = base.iter().map(|x| x.clone() / q_pow(f.q(), ell)).collect();
                        prop_assert_eq!(&twisted, &scaled, "m={} ell={} eps={}", m, ell, eps);
                    }
                }
            }
        }
    }

    #[test]
    fn coarse_vanishing_criterion(l in level(&[2, 3], 1..=4), weights in prop::collection::vec(-3i64..=3, 12)) {
        let (g, basis) = setup(&l);
        let b = bounds(&l).unwrap().coarse_full.max(0) as usize;
        let zero = HarmonicCochain::<Rational>::zero(&g);
        let zc = fourier(&zero, &g, b);
        prop_assert!(zc.c0.is_zero() && zc.cm.iter().all(|(_, c)| c.is_zero()));
        let mut combo = zero.to_vector();
        for (h, &w) in basis.iter().zip(&weights) {
            for (x, y) in combo.iter_mut().zip(h.to_vector()) {
                *x = x.clone() + y * Rational::from_i64(w);
            }
        }
        let combo = HarmonicCochain::from_vector(&g, &combo);
        for h in basis.iter().chain(std::iter::once(&combo)).filter(|h| !h.is_zero()) {
            let fc = fourier(h, &g, b);
            prop_assert!(!fc.c0.is_zero() || fc.cm.iter().any(|(_, c)| !c.is_zero()));
        }
    }
}
