//! Batch drivers: degree-wise maxima of b_true and b′, and per-level reports.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::error::Result;
use crate::field::Fq;
use crate::graph::QuotientGraph;
use crate::hecke::{pairing_rank, space_basis, Space};
use crate::level::Level;
use crate::poly::{monic_of_degree, Poly};
use crate::sturm::{b_prime, b_true, bounds, BoundReport};

/// Image of n under θ ↦ aθ + b, made monic.
pub fn affine_image(n: &Poly, a: u8, b: u8) -> Poly {
    let f = n.field();
    n.compose(&Poly::new(f, &[b, a])).monic()
}

/// True iff n has the least index in its orbit under θ ↦ aθ + b.
pub fn is_affine_canonical(n: &Poly) -> bool {
    let f = n.field();
    let idx = n.index();
    f.units().all(|a| f.elements().all(|b| affine_image(n, a, b).index() >= idx))
}

/// Affine-canonical monic levels of one degree, in index order.
pub fn canonical_levels(f: Fq, deg: usize) -> Vec<Poly> {
    monic_of_degree(f, deg).filter(is_affine_canonical).collect()
}

/// b_true of one level, through the cache.
pub fn level_b_true(level: &Level, cache: &Cache) -> Result<i64> {
    cache.get_or_compute(level.q(), &level.n().to_string(), "b_true", || {
        let g = QuotientGraph::build(level)?;
        Ok(b_true(&g))
    })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DegreeRow {
    pub deg: usize,
    pub b_true: i64,
    pub b_prime: i64,
    /// Least level attaining the b_true maximum.
    pub witness: String,
    /// Number of affine classes of levels visited.
    pub levels: usize,
}

/// Map `work` over `items`, on a pool of `jobs` threads when jobs > 1.
pub fn par_map<I: Sync, T: Send>(items: &[I], jobs: usize, work: impl Fn(&I) -> T + Sync + Send) -> Vec<T> {
    if jobs > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| items.par_iter().map(&work).collect());
        }
    }
    items.iter().map(work).collect()
}

/// Degree-wise maxima over all monic levels of degree n_min..=n_max.
///
/// θ ↦ aθ + b permutes the levels of a degree and preserves both b_true and
/// b′, so one level per orbit is visited.
pub fn compare_bounds(q: u32, n_min: usize, n_max: usize, jobs: usize, cache: &Cache) -> Result<Vec<DegreeRow>> {
    let f = Fq::new(q)?;
    let mut rows = Vec::new();
    for deg in n_min..=n_max {
        let levels = canonical_levels(f, deg);
        let values = par_map(&levels, jobs, |n| -> Result<(i64, i64)> {
            let level = Level::new(n)?;
            Ok((level_b_true(&level, cache)?, b_prime(&level)))
        });
        let mut row = DegreeRow { deg, b_true: i64::MIN, b_prime: i64::MIN, witness: String::new(), levels: levels.len() };
        for (n, v) in levels.iter().zip(values) {
            let (bt, bp) = v?;
            if bt > row.b_true {
                row.b_true = bt;
                row.witness = n.to_string();
            }
            row.b_prime = row.b_prime.max(bp);
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Dims {
    pub cuspidal: usize,
    pub full: usize,
    pub new: usize,
}

/// Ranks of the Fourier coefficient map at one bound (c₀ included for the full space).
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RankEntry {
    pub name: String,
    pub bound: i64,
    pub cuspidal: usize,
    pub full: usize,
    pub new: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct LevelReport {
    pub schema: String,
    pub level: String,
    pub q: u32,
    /// Set when deg n < 3, where H₀(n) = 0 and no bound is needed.
    pub trivial: bool,
    pub dims: Dims,
    pub cusps: usize,
    pub genus: usize,
    pub bounds: BoundReport,
    pub pairing_rank: Vec<RankEntry>,
}

pub fn report(level: &Level) -> Result<LevelReport> {
    let g = QuotientGraph::build(level)?;
    let mut rep = bounds(level)?;
    let trivial = level.deg() < 3;
    if !trivial {
        rep.b_true = Some(b_true(&g));
    }
    let cusp = space_basis::<BigRational>(&g, Space::Cuspidal)?;
    let full = space_basis::<BigRational>(&g, Space::Full)?;
    let new = space_basis::<BigRational>(&g, Space::New)?;
    let mut named = vec![
        ("coarse_cuspidal", rep.coarse_cuspidal),
        ("coarse_full", rep.coarse_full),
        ("thm03", rep.thm03),
        ("thm04", rep.thm04),
        ("thm04_new", rep.thm04_new),
        ("prop45", rep.prop45),
        ("rem415", rep.rem415),
        ("b_prime", rep.b_prime),
    ];
    if let Some(bt) = rep.b_true {
        named.push(("b_true", bt));
        named.push(("b_true_minus_1", bt - 1));
    }
    let pairing_rank = named
        .into_iter()
        .map(|(name, bound)| RankEntry {
            name: name.into(),
            bound,
            cuspidal: pairing_rank(&g, &cusp, bound, false),
            full: pairing_rank(&g, &full, bound, true),
            new: pairing_rank(&g, &new, bound, false),
        })
        .collect();
    Ok(LevelReport {
        schema: crate::SCHEMA.into(),
        level: level.n().to_string(),
        q: level.q(),
        trivial,
        dims: Dims { cuspidal: cusp.len(), full: full.len(), new: new.len() },
        cusps: g.ends.len(),
        genus: g.genus(),
        bounds: rep,
        pairing_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_orbits_cover_all_levels() {
        for q in [2, 3, 4] {
            let f = Fq::new(q).unwrap();
            for deg in 1..=4 {
                let reps = canonical_levels(f, deg);
                let mut seen = std::collections::BTreeSet::new();
                for n in &reps {
                    for a in f.units() {
                        for b in f.elements() {
                            seen.insert(affine_image(n, a, b).index());
                        }
                    }
                }
                assert_eq!(seen.len(), monic_of_degree(f, deg).count(), "q={q} deg={deg}");
            }
        }
    }

    #[test]
    fn small_degree_rows() {
        let rows = compare_bounds(2, 3, 5, 1, &Cache::disabled()).unwrap();
        let got: Vec<(i64, i64)> = rows.iter().map(|r| (r.b_true, r.b_prime)).collect();
        assert_eq!(got, vec![(1, 2), (3, 5), (5, 6)]);
    }

    #[test]
    fn trivial_report_below_degree_three() {
        let r = report(&Level::parse(2, "T^2 + T").unwrap()).unwrap();
        assert!(r.trivial);
        assert_eq!(r.dims.cuspidal, 0);
        assert_eq!(r.bounds.b_true, None);
    }
}
