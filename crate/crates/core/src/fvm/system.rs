//! Sparse symmetric positive definite systems and their Jacobi-preconditioned
//! conjugate gradient solver.

use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

/// Relative residual at which CG stops.
pub const CG_TOLERANCE: f64 = 1e-12;
/// Relative asymmetry accepted before a solve.
pub const SYMMETRY_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct SparseSpdSystem {
    pub matrix: CsrMatrix<f64>,
    pub rhs: Vec<f64>,
}

impl SparseSpdSystem {
    /// Duplicate triplets are summed, in insertion order per entry.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)], rhs: Vec<f64>) -> Self {
        let mut coo = CooMatrix::new(n, n);
        for &(i, j, v) in triplets {
            coo.push(i, j, v);
        }
        Self {
            matrix: CsrMatrix::from(&coo),
            rhs,
        }
    }

    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        csr_diagonal(&self.matrix)
    }

    /// Checks `|a_ij − a_ji| ≤ tol · max|a|` for every stored entry.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        check_symmetric(&self.matrix, tol)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.size();
        let mut d = nalgebra::DMatrix::zeros(n, n);
        for (i, j, v) in self.matrix.triplet_iter() {
            d[(i, j)] += *v;
        }
        d
    }
}

pub(crate) fn csr_diagonal(m: &CsrMatrix<f64>) -> Vec<f64> {
    let mut d = vec![0.0; m.nrows()];
    for (i, row) in m.row_iter().enumerate() {
        if let Some(pos) = row.col_indices().iter().position(|&j| j == i) {
            d[i] = row.values()[pos];
        }
    }
    d
}

fn entry(m: &CsrMatrix<f64>, i: usize, j: usize) -> f64 {
    let row = m.row(i);
    match row.col_indices().binary_search(&j) {
        Ok(pos) => row.values()[pos],
        Err(_) => 0.0,
    }
}

pub(crate) fn check_symmetric(m: &CsrMatrix<f64>, tol: f64) -> Result<()> {
    let scale = m.values().iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for (i, j, &v) in m.triplet_iter() {
        if j > i {
            let diff = (v - entry(m, j, i)).abs();
            if diff > tol * scale {
                return Err(Error::Asymmetric { row: i, col: j, diff });
            }
        }
    }
    Ok(())
}

/// `y = A x`.
pub fn csr_mul(m: &CsrMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let offsets = m.row_offsets();
    let cols = m.col_indices();
    let vals = m.values();
    for (i, yi) in y.iter_mut().enumerate() {
        let mut s = 0.0;
        for p in offsets[i]..offsets[i + 1] {
            s += vals[p] * x[cols[p]];
        }
        *yi = s;
    }
}

/// `xᵀ A y`.
pub fn csr_form(m: &CsrMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut ay = vec![0.0; y.len()];
    csr_mul(m, y, &mut ay);
    dot(x, &ay)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` by conjugate gradients with diagonal preconditioning,
/// starting from zero. Stops at relative residual [`CG_TOLERANCE`], fails after
/// `10 n` iterations.
pub fn solve_spd(system: &SparseSpdSystem) -> Result<Vec<f64>> {
    let n = system.size();
    system.check_symmetric(SYMMETRY_TOLERANCE)?;
    let diag = system.diagonal();
    if let Some(row) = diag.iter().position(|&d| d.is_nan() || d <= 0.0) {
        return Err(Error::NonPositiveDiagonal { row, value: diag[row] });
    }
    let inv_diag: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();

    let b = &system.rhs;
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(x);
    }

    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = 10 * n.max(1);
    let mut residual = 1.0;

    for _ in 0..max_iter {
        csr_mul(&system.matrix, &p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        if residual <= CG_TOLERANCE {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let s = SparseSpdSystem::from_triplets(1, &[(0, 0, 2.0)], vec![4.0]);
        assert_eq!(solve_spd(&s).unwrap(), vec![2.0]);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let s = SparseSpdSystem::from_triplets(2, &[(0, 0, 2.0), (1, 1, 3.0), (0, 1, -1.0), (1, 0, -1.0)], vec![0.0; 2]);
        assert_eq!(solve_spd(&s).unwrap(), vec![0.0; 2]);
    }

    #[test]
    fn rejects_asymmetric_and_indefinite_diagonal() {
        let s = SparseSpdSystem::from_triplets(2, &[(0, 0, 2.0), (1, 1, 3.0), (0, 1, -1.0)], vec![1.0; 2]);
        assert!(matches!(solve_spd(&s), Err(Error::Asymmetric { .. })));
        let s = SparseSpdSystem::from_triplets(2, &[(0, 0, 2.0), (1, 1, -3.0)], vec![1.0; 2]);
        assert!(matches!(solve_spd(&s), Err(Error::NonPositiveDiagonal { row: 1, .. })));
    }

    #[test]
    fn duplicate_triplets_are_summed() {
        let s = SparseSpdSystem::from_triplets(1, &[(0, 0, 1.0), (0, 0, 1.5)], vec![5.0]);
        assert_eq!(s.diagonal(), vec![2.5]);
    }

    #[test]
    fn tridiagonal_solution() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let s0 = SparseSpdSystem::from_triplets(n, &t, vec![0.0; n]);
        let mut b = vec![0.0; n];
        csr_mul(&s0.matrix, &x_true, &mut b);
        let x = solve_spd(&SparseSpdSystem { rhs: b, ..s0 }).unwrap();
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-9);
        }
    }
}
