pub mod cache;
pub mod clique;
pub mod drinfeld;
pub mod elliptic;
pub mod error;
pub mod factor;
pub mod field;
pub mod graph;
pub mod harmonic;
pub mod hecke;
pub mod laurent;
pub mod level;
pub mod linalg;
pub mod mat2;
pub mod orbits;
pub mod poly;
pub mod ratfn;
pub mod reduce;
pub mod sturm;
pub mod tables;
pub mod ttable;

pub use error::{Error, Result};
pub use field::{Fq, FqElem};
pub use level::{Level, ProjPoint};
pub use linalg::Rational;
pub use poly::{enumerate_polys, Degree, Poly};

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "ffsturm/1";
