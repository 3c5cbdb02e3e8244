//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::matrix::IntMatrix;

pub type QMatrix = Vec<Vec<BigRational>>;

pub fn from_int(m: &IntMatrix) -> QMatrix {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_rational()).collect()).collect()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(a: &mut QMatrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (src, dst) = if i < r {
                    let (x, y) = a.split_at_mut(r);
                    (&y[0], &mut x[i])
                } else {
                    let (x, y) = a.split_at_mut(i);
                    (&x[r], &mut y[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_zero() {
                        *d -= &f * s;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &QMatrix, cols: usize) -> usize {
    let mut m = a.clone();
    rref(&mut m, cols).len()
}

pub fn int_rank(m: &IntMatrix) -> usize {
    rank(&from_int(m), m.cols())
}

/// Some solution of `A x = b`, free variables set to zero.
pub fn solve(a: &QMatrix, cols: usize, b: &[BigRational]) -> Option<Vec<BigRational>> {
    assert_eq!(a.len(), b.len());
    let mut aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug, cols + 1);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

/// Least-norm solution of `A x = b`, or `None` if inconsistent.
pub fn least_norm_solve(a: &QMatrix, cols: usize, b: &[BigRational]) -> Option<Vec<BigRational>> {
    // x = A_r^T y with (A_r A_r^T) y = b_r over an independent row subset,
    // then check the remaining equations.
    let indep = independent_rows(a, cols);
    let ar: QMatrix = indep.iter().map(|&i| a[i].clone()).collect();
    let br: Vec<BigRational> = indep.iter().map(|&i| b[i].clone()).collect();
    let gram: QMatrix = ar
        .iter()
        .map(|x| ar.iter().map(|y| x.iter().zip(y).fold(BigRational::zero(), |acc, (p, q)| acc + p * q)).collect())
        .collect();
    let y = solve(&gram, ar.len(), &br)?;
    let mut x = vec![BigRational::zero(); cols];
    for (row, yi) in ar.iter().zip(&y) {
        for (xj, aij) in x.iter_mut().zip(row) {
            if !aij.is_zero() {
                *xj += aij * yi;
            }
        }
    }
    for (row, bi) in a.iter().zip(b) {
        let v = row.iter().zip(&x).fold(BigRational::zero(), |acc, (p, q)| acc + p * q);
        if &v != bi {
            return None;
        }
    }
    Some(x)
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut aug: QMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug, n);
    if piv.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Indices of a maximal linearly independent subset of the rows, in order.
pub fn independent_rows(a: &QMatrix, cols: usize) -> Vec<usize> {
    let rows = a.len();
    let mut t: QMatrix = (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect();
    rref(&mut t, rows)
}
