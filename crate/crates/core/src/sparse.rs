//! Compressed-row matrices and a direct sparse LU wrapper.

use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;
use std::ops::{Add, AddAssign, Mul, Sub};

pub trait Scalar:
    faer::traits::ComplexField
    + Copy
    + Send
    + Sync
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + AddAssign
    + std::fmt::Debug
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Debug)]
pub struct Csr<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<T>,
}

impl<T: Scalar> Csr<T> {
    /// Builds from per-row entries; duplicate columns within a row are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in r {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.row(i).find(|e| e.0 == j).map_or(T::from(0.0), |e| e.1)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let mut s = T::from(0.0);
                for (j, v) in self.row(i) {
                    s += v * x[j];
                }
                s
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                rows[j].push((i, v));
            }
        }
        Self::from_rows(rows)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).map(|e| e.1.modulus()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Csr<U> {
        Csr { n: self.n, row_ptr: self.row_ptr.clone(), cols: self.cols.clone(), vals: self.vals.iter().map(|&v| f(v)).collect() }
    }

    /// Sum of scaled matrices sharing the dimension.
    pub fn combine(terms: &[(T, &Csr<T>)], diag: T) -> Csr<T> {
        let n = terms[0].1.n;
        let rows = (0..n)
            .map(|i| {
                let mut r: Vec<(usize, T)> = vec![(i, diag)];
                for (s, m) in terms {
                    r.extend(m.row(i).map(|(j, v)| (j, *s * v)));
                }
                r
            })
            .collect();
        Csr::from_rows(rows)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::from(0.0); self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        d
    }
}

impl Csr<f64> {
    pub fn to_complex(&self) -> Csr<Complex64> {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

/// Factorisation of a square sparse matrix with residual-checked solves.
pub struct SparseLu<T: Scalar> {
    lu: faer::sparse::linalg::solvers::Lu<usize, T>,
    a: Csr<T>,
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.modulus().powi(2)).sum::<f64>().sqrt()
}

impl<T: Scalar> SparseLu<T> {
    pub fn new(a: &Csr<T>) -> Result<Self> {
        if a.n == 0 {
            return Err(Error::EmptyInterior);
        }
        let mut trip = Vec::with_capacity(a.vals.len());
        for i in 0..a.n {
            for (j, v) in a.row(i) {
                trip.push(Triplet::new(i, j, v));
            }
        }
        let m = SparseColMat::<usize, T>::try_new_from_triplets(a.n, a.n, &trip)
            .map_err(|e| Error::SolverFailure(format!("assembly: {e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::SolverFailure(format!("factorisation: {e:?}")))?;
        Ok(Self { lu, a: a.clone() })
    }

    fn raw_solve(&self, b: &[T]) -> Vec<T> {
        let mut m = Mat::<T>::from_fn(b.len(), 1, |i, _| b[i]);
        self.lu.solve_in_place(m.as_mut());
        (0..b.len()).map(|i| m[(i, 0)]).collect()
    }

    /// Solve with up to three rounds of iterative refinement; returns the solution and
    /// its relative residual.
    pub fn solve(&self, b: &[T]) -> Result<(Vec<T>, f64)> {
        let bn = norm2(b).max(f64::MIN_POSITIVE);
        let mut x = self.raw_solve(b);
        let mut rel = f64::INFINITY;
        for _ in 0..4 {
            let ax = self.a.matvec(&x);
            let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
            rel = norm2(&r) / bn;
            if !rel.is_finite() {
                return Err(Error::SolverFailure("non-finite solution".into()));
            }
            if rel <= 1e-12 {
                break;
            }
            let dx = self.raw_solve(&r);
            for (xi, di) in x.iter_mut().zip(dx) {
                *xi += di;
            }
        }
        if rel > 1e-10 {
            return Err(Error::SolverFailure(format!("relative residual {rel:.2e}")));
        }
        Ok((x, rel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        let n = 50;
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![(i, 2.0)];
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        let a = Csr::from_rows(rows);
        let b = vec![1.0; n];
        let (x, res) = SparseLu::new(&a).unwrap().solve(&b).unwrap();
        assert!(res < 1e-12);
        // exact: x_i = (i+1)(n-i)/2
        for (i, xi) in x.iter().enumerate() {
            let e = (i + 1) as f64 * (n - i) as f64 / 2.0;
            assert!((xi - e).abs() < 1e-9 * e);
        }
    }

    #[test]
    fn duplicates_summed_and_transpose() {
        let a = Csr::from_rows(vec![vec![(0, 1.0), (1, 2.0), (1, 3.0)], vec![(0, 4.0)]]);
        assert_eq!(a.get(0, 1), 5.0);
        assert_eq!(a.transpose().get(1, 0), 5.0);
        assert_eq!(a.norm_inf(), 6.0);
    }

    #[test]
    fn singular_matrix_fails() {
        let a = Csr::from_rows(vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 1.0), (1, 1.0)]]);
        let r = SparseLu::new(&a).and_then(|lu| lu.solve(&[1.0, 0.0]));
        assert!(r.is_err());
    }
}
