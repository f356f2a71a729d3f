//! Exact dense linear algebra over a rational scalar type.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rationals, the default scalar.
pub type Rational = num_rational::BigRational;

/// A field of exact rationals. Implemented for `Ratio<T>` over any signed
/// integer type that converts from `i64` (`BigInt`, `i128`, `i64`).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    type Int: Integer + Signed + Clone + Display + Debug;

    fn from_i64(v: i64) -> Self;
    fn from_frac(num: i64, den: i64) -> Self;
    fn from_int(v: Self::Int) -> Self;
    fn numer_int(&self) -> Self::Int;
    fn denom_int(&self) -> Self::Int;
    fn is_negative(&self) -> bool {
        self.numer_int().is_negative()
    }
    /// The value as an `i64`, if it is an integer in range.
    fn to_i64(&self) -> Option<i64>;
}

impl<T> Scalar for Ratio<T>
where
    T: Integer + Signed + Clone + Display + Debug + From<i64> + ToPrimitive + Send + Sync + 'static,
{
    type Int = T;

    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(T::from(v))
    }
    fn from_frac(num: i64, den: i64) -> Self {
        Ratio::new(T::from(num), T::from(den))
    }
    fn from_int(v: T) -> Self {
        Ratio::from_integer(v)
    }
    fn numer_int(&self) -> T {
        self.numer().clone()
    }
    fn denom_int(&self) -> T {
        self.denom().clone()
    }
    fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.iter().flatten().cloned().collect() }
    }
    /// Matrix whose columns are the given vectors (all of length `len`).
    pub fn from_cols(cols: &[Vec<S>], len: usize) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), len);
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }
    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }
    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
    pub fn scale(&self, k: &S) -> Self {
        let data = self.data.iter().map(|a| a.clone() * k.clone()).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Reduce to reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = S::one() / self.get(r, c).clone();
            for j in c..self.cols {
                let v = self.get(r, j).clone() * inv.clone();
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let k = self.get(i, c).clone();
                for j in c..self.cols {
                    let rj = self.get(r, j);
                    if rj.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j).clone() - k.clone() * rj.clone();
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(i, free).clone();
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `A x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        let sols = self.solve_many(std::slice::from_ref(&b.to_vec()))?;
        sols.into_iter().next()
    }

    /// Solve `A x = b` for several right-hand sides at once.
    pub fn solve_many(&self, bs: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
        let n = self.cols;
        let mut aug = Self::zeros(self.rows, n + bs.len());
        for i in 0..self.rows {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            for (k, b) in bs.iter().enumerate() {
                assert_eq!(b.len(), self.rows);
                aug.set(i, n + k, b[i].clone());
            }
        }
        let pivots = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let sols = (0..bs.len())
            .map(|k| {
                let mut x = vec![S::zero(); n];
                for (i, &p) in pivots.iter().enumerate() {
                    x[p] = aug.get(i, n + k).clone();
                }
                x
            })
            .collect();
        Some(sols)
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Rank of a list of vectors of equal length.
pub fn rank_of_vectors<S: Scalar>(vs: &[Vec<S>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    Matrix::from_rows(vs).rank()
}

/// Scale a vector to coprime integer entries with a positive first nonzero entry.
pub fn make_integral<S: Scalar>(v: &mut [S]) {
    let mut den = S::Int::one();
    let mut num = S::Int::zero();
    for x in v.iter().filter(|x| !x.is_zero()) {
        den = den.lcm(&x.denom_int());
        num = num.gcd(&x.numer_int());
    }
    if num.is_zero() {
        return;
    }
    let sign_neg = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let mut k = S::from_int(den) / S::from_int(num);
    if sign_neg {
        k = -k;
    }
    for x in v.iter_mut() {
        *x = x.clone() * k.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn nullspace_and_solve() {
        let a = Matrix::from_rows(&[vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(1), q(0), q(1)]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
        let b = vec![q(6), q(12), q(2)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(a.solve(&[q(1), q(1), q(1)]).is_none());
    }

    #[test]
    fn integral_rescaling() {
        let mut v = vec![Q::from_frac(-1, 2), q(0), Q::from_frac(3, 4)];
        make_integral(&mut v);
        assert_eq!(v, vec![q(2), q(0), q(-3)]);
    }

    #[test]
    fn small_integer_scalars_agree() {
        let rows = [vec![1i64, 2, 0, 1], vec![0, 1, 1, 1], vec![1, 3, 1, 2]];
        let big = Matrix::<Q>::from_rows(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>());
        let small = Matrix::<Ratio<i128>>::from_rows(
            &rows.iter().map(|r| r.iter().map(|&x| Ratio::from_i64(x)).collect()).collect::<Vec<_>>(),
        );
        assert_eq!(big.rank(), small.rank());
        assert_eq!(big.nullspace().len(), small.nullspace().len());
    }
}
