mod common;

use std::collections::{BTreeSet, VecDeque};

use common::{all_levels, level, poly_in};
use ffsturm::graph::QuotientGraph;
use ffsturm::hecke::fricke_matrix;
use ffsturm::level::{cusps, gamma_inf_generators, gamma_inf_order, gl2_order, stabilizer_order, StabKind};
use ffsturm::mat2::{Mat2A, Mat2K};
use ffsturm::ratfn::RationalFn;
use ffsturm::reduce::{act_and_reduce, reduce_edge, reduce_edge_a, reduce_iwasawa, weil_decompose, EdgeCoord, Orient};
use ffsturm::{enumerate_polys, Fq, Level, Poly};
use proptest::prelude::*;

/// γ ∈ GL₂(A) with bottom row (c, d), randomized by a translation on the left.
fn gamma(c: &Poly, d: &Poly, shift: &Poly) -> Mat2A {
    let (_, s, t) = Poly::gcd_bezout(d, c).unwrap();
    let g = Mat2A::new(s, -&t, c.clone(), d.clone());
    Mat2A::translation(shift.clone()).mul(&g)
}

fn coprime_pair(f: Fq) -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (poly_in(f, 4), poly_in(f, 4), poly_in(f, 3)).prop_filter("coprime", |(c, d, _)| c.gcd(d).is_one())
}

fn level_and_gamma(qs: &'static [u32]) -> impl Strategy<Value = (Level, Mat2A)> {
    level(qs, 1..=3).prop_flat_map(|l| {
        let f = l.field();
        (Just(l), coprime_pair(f).prop_map(|(c, d, s)| gamma(&c, &d, &s)))
    })
}

/// Orbit count of P¹(A/n) under Γ∞, by breadth-first search with the action of
/// [`Level::act`].
fn orbit_count(l: &Level) -> usize {
    let points = l.enumerate_proj_line();
    let gens = gamma_inf_generators(l.field(), l.deg());
    let mut seen = BTreeSet::new();
    let mut orbits = 0;
    for p in &points {
        if !seen.insert(l.index_of(p)) {
            continue;
        }
        orbits += 1;
        let mut queue = VecDeque::from([p.clone()]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = l.act(&x, g);
                if seen.insert(l.index_of(&y)) {
                    queue.push_back(y);
                }
            }
        }
    }
    orbits
}

#[test]
fn point_and_cusp_counts() {
    for q in [2, 3, 4] {
        for l in all_levels(q, if q == 2 { 5 } else { 3 }) {
            let points = l.enumerate_proj_line();
            assert_eq!(points.len() as u64, l.kappa());
            assert_eq!(points.len() as u64, l.kappa_formula());
            assert_eq!(points, l.enumerate_proj_line());
            assert_eq!(cusps(&l).len(), orbit_count(&l), "q={q} {}", l.n());
        }
    }
}

#[test]
fn level_one_stabilizers_are_ambient() {
    for q in [2, 3, 4, 5] {
        let l = Level::parse(q, "1").unwrap();
        let pt = l.point(0);
        let q64 = q as u64;
        assert_eq!(stabilizer_order(&pt, 0, &l, StabKind::Vertex).unwrap(), gl2_order(q64));
        for r in 0..4 {
            assert_eq!(stabilizer_order(&pt, r, &l, StabKind::Edge).unwrap(), gamma_inf_order(q64, r as usize));
            if r > 0 {
                assert_eq!(stabilizer_order(&pt, r, &l, StabKind::Vertex).unwrap(), gamma_inf_order(q64, r as usize));
            }
        }
    }
}

#[test]
fn graph_structure() {
    for q in [2, 3] {
        for l in all_levels(q, if q == 2 { 5 } else { 3 }) {
            let g = QuotientGraph::build(&l).unwrap();
            let name = format!("q={q} {}", l.n());
            assert_eq!(g.edges.len(), 2 * g.num_undirected(), "{name}");
            assert_eq!(g.plus_edges().count(), g.num_undirected(), "{name}");
            let mut degree = vec![0u64; g.vertices.len()];
            for e in &g.edges {
                let r = &g.edges[e.rev];
                assert_ne!(e.rev, e.id, "{name}");
                assert_eq!(r.rev, e.id, "{name}");
                assert_eq!((r.origin, r.terminus), (e.terminus, e.origin), "{name}");
                assert_eq!(g.vertices[e.origin].stab, e.weight * e.stab, "{name}");
                degree[e.origin] += e.weight;
            }
            for end in &g.ends {
                degree[end.attach] += end.weight;
            }
            assert!(degree.iter().all(|&d| d == q as u64 + 1), "{name}: weighted degrees {degree:?}");
            assert_eq!(g.ends.len(), cusps(&l).len(), "{name}");
            let keys: Vec<(usize, u32)> = g.vertices.iter().map(|v| (v.r, v.class)).collect();
            assert!(keys.windows(2).all(|w| w[0] < w[1]), "{name}: vertex ids not in key order");
            let again = QuotientGraph::build(&l).unwrap();
            assert_eq!(serde_json::to_string(&g.to_json()).unwrap(), serde_json::to_string(&again.to_json()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn width_is_constant_on_orbits((l, picks) in level(&[2, 3, 4], 1..=4).prop_flat_map(|l| {
        (Just(l), prop::collection::vec(any::<(u64, Vec<usize>)>(), 20))
    })) {
        let gens = gamma_inf_generators(l.field(), l.deg());
        for (pick, word) in picks {
            let pt = l.point(pick % l.kappa());
            let beta = word.iter().take(6).fold(Mat2A::identity(l.field()), |acc, &i| acc.mul(&gens[i % gens.len()]));
            prop_assert_eq!(l.width(&l.act(&pt, &beta)), l.width(&pt));
        }
    }

    #[test]
    fn stabilizers_divide_ambient((l, pick, r) in (level(&[2, 3], 1..=3), any::<u64>(), 0i64..5)) {
        let pt = l.point(pick % l.kappa());
        let q = l.q() as u64;
        let v = stabilizer_order(&pt, r, &l, StabKind::Vertex).unwrap();
        let e = stabilizer_order(&pt, r, &l, StabKind::Edge).unwrap();
        let ambient_v = if r == 0 { gl2_order(q) } else { gamma_inf_order(q, r as usize) };
        prop_assert_eq!(ambient_v % v, 0);
        prop_assert_eq!(gamma_inf_order(q, r as usize) % e, 0);
    }

    /// γ e₀ = (π^(2ℓ+ε) u; 0 1)(0 1; π 0)^ε e₀ with ℓ = max(deg c, deg d).
    #[test]
    fn edge_of_gamma_matches_iwasawa_form((l, g) in level_and_gamma(&[2, 3, 4])) {
        let f = l.field();
        let (c, d) = (&g.c, &g.d);
        let eps = (c.deg_i() >= d.deg_i()) as i64;
        let ell = c.deg_i().max(d.deg_i());
        let u = if eps == 1 { RationalFn::new(g.a.clone(), c.clone()) } else { RationalFn::new(g.b.clone(), d.clone()) }.unwrap();
        let mut rep = Mat2K::iwasawa(2 * ell + eps, u);
        if eps == 1 {
            rep = rep.mul(&Mat2K::flip(f));
        }
        let got = reduce_edge_a(&g, &l).unwrap();
        prop_assert_eq!(got, reduce_edge(&rep, &l).unwrap());
        prop_assert_eq!((got.r, got.orient), (0, Orient::Plus));
        let graph = QuotientGraph::build(&l).unwrap();
        let named = EdgeCoord { pt: l.index_of_pair(c, d).unwrap(), r: 0, orient: Orient::Plus };
        prop_assert_eq!(graph.locate(&got), graph.locate(&named));
    }

    /// [γ e₀] = [w_n (π^(deg n + 2δ + ε) u; 0 1)(0 1; π 0)^ε e₀] for some u ∈ πO∞.
    #[test]
    fn fricke_form_of_gamma_edge((l, g) in level_and_gamma(&[2, 3])) {
        let f = l.field();
        let graph = QuotientGraph::build(&l).unwrap();
        let n = l.n();
        let (x, y) = enumerate_polys(f, 2, false)
            .flat_map(|x| enumerate_polys(f, 2, false).map(move |y| (x.clone(), y)))
            .find(|(x, y)| x.gcd(y).is_one() && n.gcd(&(&(&g.c * x) + &(&g.d * y))).is_one())
            .unwrap();
        let delta = x.deg_i().max(y.deg_i());
        let eps = (x.deg_i() <= y.deg_i()) as i64;
        let k = l.deg() as i64 + 2 * delta + eps;
        let target = graph.locate(&reduce_edge_a(&g, &l).unwrap());
        let w = fricke_matrix(&l).to_k();
        let count = (f.q() as u64).pow((k - 1) as u32);
        let hit = (0..count).any(|mut i| {
            let mut u = RationalFn::zero(f);
            for e in 1..k {
                let digit = (i % f.q() as u64) as u8;
                i /= f.q() as u64;
                u = &u + &(&RationalFn::from_poly(Poly::constant(f, digit)) * &RationalFn::t_pow(f, -e));
            }
            let mut m = w.mul(&Mat2K::iwasawa(k, u));
            if eps == 1 {
                m = m.mul(&Mat2K::flip(f));
            }
            graph.locate(&reduce_edge(&m, &l).unwrap()) == target
        });
        prop_assert!(hit, "no u reaches the class of the edge for k = {}", k);
    }

    /// Reduction is Γ₀(n)-invariant on every stratum, and reversal flips orientation.
    #[test]
    fn reduction_is_invariant((l, g, s, c0) in level_and_gamma(&[2, 3]).prop_flat_map(|(l, g)| {
        let f = l.field();
        (Just(l), Just(g), 0i64..5, coprime_pair(f))
    })) {
        let f = l.field();
        let graph = QuotientGraph::build(&l).unwrap();
        let (c, d, shift) = c0;
        let h = gamma(&(&c * l.n()), &d, &shift);
        prop_assume!(h.c.gcd(&h.d).is_one());
        let e = g.to_k().mul(&Mat2K::diag_t(f, s));
        let here = graph.locate(&reduce_edge(&e, &l).unwrap());
        prop_assert_eq!(graph.locate(&reduce_edge(&h.to_k().mul(&e), &l).unwrap()), here);
        let flipped = reduce_edge(&e.mul(&Mat2K::flip(f)), &l).unwrap();
        prop_assert_eq!(graph.locate(&flipped.reversed()), here);
        let coord = reduce_edge(&e, &l).unwrap();
        prop_assert_eq!(graph.locate(&act_and_reduce(&Mat2K::identity(f), &coord, &l).unwrap()), here);
    }

    /// γ diag(T^s, 1) v₀ has Weil height s, and the returned γ′ names the same vertex.
    #[test]
    fn weil_height((l, g, s) in level_and_gamma(&[2, 3, 4]).prop_flat_map(|(l, g)| (Just(l), Just(g), 0i64..6))) {
        let f = l.field();
        let m = g.to_k().mul(&Mat2K::diag_t(f, s));
        let (g2, r) = weil_decompose(&m).unwrap();
        prop_assert_eq!(r as i64, s);
        let k = Mat2K::diag_t(f, -s).mul(&g2.to_k().inverse().unwrap()).mul(&m);
        let min_v = [&k.a, &k.b, &k.c, &k.d].iter().filter_map(|x| x.valuation()).min().unwrap();
        prop_assert_eq!(2 * min_v, k.det().valuation().unwrap());
    }

    #[test]
    fn iwasawa_edges_reduce_consistently((l, k, u) in level(&[2, 3], 1..=3).prop_flat_map(|l| {
        let q = l.q() as u8;
        (Just(l), 1usize..7, prop::collection::vec(0..q, 6))
    })) {
        let f = l.field();
        let mut x = RationalFn::zero(f);
        for (i, &c) in u.iter().take(k.saturating_sub(1)).enumerate() {
            x = &x + &(&RationalFn::from_poly(Poly::constant(f, c)) * &RationalFn::t_pow(f, -(i as i64 + 1)));
        }
        let direct = reduce_edge(&Mat2K::iwasawa(k as i64, x), &l).unwrap();
        prop_assert_eq!(reduce_iwasawa(&l, k, &u), direct);
        prop_assert_eq!(direct.reversed().reversed(), direct);
    }
}
