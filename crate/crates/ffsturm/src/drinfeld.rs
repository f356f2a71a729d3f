//! Coefficient cutoff for ℓ-cuspidal Drinfeld modular forms of weight k and
//! type m on Γ₀(n), and the index κ(n) = [Γ : Γ₀(n)].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::level::Level;

/// κ(n) by enumerating P¹(A/n).
pub fn index_kappa(level: &Level) -> u64 {
    level.enumerate_proj_line().len() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrinfeldQuery {
    pub k: u64,
    pub m: u64,
    pub ell: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrinfeldBound {
    pub b: BigRational,
    pub j_max: BigInt,
    pub kappa: u64,
    pub warning: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct DrinfeldJson {
    pub schema: String,
    pub level: String,
    pub q: u32,
    #[serde(rename = "B")]
    pub b: String,
    pub j_max: String,
    pub kappa: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// B = κ(k/(q²−1) − ℓ/((q−1)|n|)) + (ℓ − m|n|)/((q−1)|n|); b_j = 0 for all
/// 0 ≤ j ≤ B forces the form to vanish.
pub fn drinfeld_sturm(level: &Level, query: DrinfeldQuery) -> Result<DrinfeldBound> {
    let q = level.q() as u64;
    if query.m > q - 2 {
        return domain(format!("type m = {} is outside 0..={}", query.m, q - 2));
    }
    let kappa = index_kappa(level);
    let r = |n: BigInt, d: BigInt| BigRational::new(n, d);
    let int = |x: u64| BigInt::from(x);
    let norm = int(q).pow(level.deg() as u32);
    let qm1 = int(q - 1);
    let b = r(int(kappa), int(1))
        * (r(int(query.k), int(q * q - 1)) - r(int(query.ell), &qm1 * &norm))
        + r(int(query.ell) - int(query.m) * &norm, &qm1 * &norm);
    let j_max = b.numer().div_floor(b.denom());
    let warning = (query.k % (q - 1) != (2 * query.m) % (q - 1))
        .then(|| format!("M_{{k,m}}(n) = 0 unless k ≡ 2m mod {}", q - 1));
    Ok(DrinfeldBound { b, j_max, kappa, warning })
}

impl DrinfeldBound {
    pub fn to_json(&self, level: &Level) -> DrinfeldJson {
        DrinfeldJson {
            schema: crate::SCHEMA.into(),
            level: level.n().to_string(),
            q: level.q(),
            b: format!("{}/{}", self.b.numer(), self.b.denom()),
            j_max: self.j_max.to_string(),
            kappa: self.kappa,
            warning: self.warning.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_weight_eight() {
        let l = Level::parse(3, "1").unwrap();
        let b = drinfeld_sturm(&l, DrinfeldQuery { k: 8, m: 0, ell: 0 }).unwrap();
        assert_eq!(b.b, BigRational::from_integer(1.into()));
        assert_eq!(b.j_max, BigInt::from(1));
        assert!(b.warning.is_none());
        assert!(drinfeld_sturm(&l, DrinfeldQuery { k: 8, m: 2, ell: 0 }).is_err());
        assert!(drinfeld_sturm(&l, DrinfeldQuery { k: 7, m: 0, ell: 0 }).unwrap().warning.is_some());
    }
}
