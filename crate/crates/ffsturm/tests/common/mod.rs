#![allow(dead_code)]

use ffsturm::level::Level;
use ffsturm::poly::monic_of_degree;
use ffsturm::{Fq, Poly};
use proptest::prelude::*;

pub const FIELDS: [u32; 7] = [2, 3, 4, 5, 7, 8, 9];

pub fn field() -> impl Strategy<Value = Fq> {
    prop::sample::select(FIELDS.to_vec()).prop_map(|q| Fq::new(q).unwrap())
}

pub fn poly_in(f: Fq, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..f.q() as u8, 0..=max_len).prop_map(move |c| Poly::new(f, &c))
}

pub fn nonzero_in(f: Fq, max_len: usize) -> impl Strategy<Value = Poly> {
    poly_in(f, max_len).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn monic_in(f: Fq, max_deg: usize) -> impl Strategy<Value = Poly> {
    (prop::collection::vec(0..f.q() as u8, 0..=max_deg)).prop_map(move |mut c| {
        c.push(1);
        Poly::new(f, &c)
    })
}

/// A random monic level of degree in `degs` over one of `qs`.
pub fn level(qs: &'static [u32], degs: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Level> {
    (prop::sample::select(qs.to_vec()), degs, any::<u64>()).prop_map(|(q, d, pick)| {
        let f = Fq::new(q).unwrap();
        let count = (q as u64).pow(d as u32);
        let n = monic_of_degree(f, d).nth((pick % count) as usize).unwrap();
        Level::new(&n).unwrap()
    })
}

pub fn all_levels(q: u32, max_deg: usize) -> Vec<Level> {
    let f = Fq::new(q).unwrap();
    (0..=max_deg).flat_map(|d| monic_of_degree(f, d)).map(|n| Level::new(&n).unwrap()).collect()
}
