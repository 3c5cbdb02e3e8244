//! Sparse row echelon forms and integer lattices.
//!
//! A `Lattice` is a subgroup of `Z^n` stored by its canonical row Hermite
//! normal form: pivots positive, entries above each pivot reduced into
//! `[0, pivot)`. Two lattices are equal iff their bases are equal.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::int::Int;
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec {
    pub idx: Vec<usize>,
    pub val: Vec<Int>,
}

impl SparseVec {
    pub fn from_dense(v: &[Int]) -> SparseVec {
        let mut s = SparseVec::default();
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                s.idx.push(i);
                s.val.push(x.clone());
            }
        }
        s
    }

    /// From (index, value) pairs; indices must be increasing.
    pub fn from_pairs(pairs: Vec<(usize, Int)>) -> SparseVec {
        let mut s = SparseVec::default();
        for (i, v) in pairs {
            debug_assert!(s.idx.last().is_none_or(|&l| l < i));
            if !v.is_zero() {
                s.idx.push(i);
                s.val.push(v);
            }
        }
        s
    }

    pub fn to_dense(&self, n: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); n];
        for (i, x) in self.idx.iter().zip(&self.val) {
            v[*i] = x.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn lead(&self) -> Option<usize> {
        self.idx.first().copied()
    }

    pub fn lead_val(&self) -> &Int {
        &self.val[0]
    }

    pub fn get(&self, col: usize) -> Option<&Int> {
        self.idx.binary_search(&col).ok().map(|p| &self.val[p])
    }

    pub fn negate(&mut self) {
        for v in &mut self.val {
            *v = -&*v;
        }
    }

    /// self -= q * other
    pub fn sub_scaled(&mut self, q: &Int, other: &SparseVec) {
        if q.is_zero() || other.is_zero() {
            return;
        }
        let mut idx = Vec::with_capacity(self.idx.len() + other.idx.len());
        let mut val = Vec::with_capacity(self.idx.len() + other.idx.len());
        let (mut a, mut b) = (0, 0);
        while a < self.idx.len() || b < other.idx.len() {
            let ia = self.idx.get(a).copied().unwrap_or(usize::MAX);
            let ib = other.idx.get(b).copied().unwrap_or(usize::MAX);
            if ia < ib {
                idx.push(ia);
                val.push(std::mem::take(&mut self.val[a]));
                a += 1;
            } else if ib < ia {
                idx.push(ib);
                val.push(-(q * &other.val[b]));
                b += 1;
            } else {
                let v = &self.val[a] - &(q * &other.val[b]);
                if !v.is_zero() {
                    idx.push(ia);
                    val.push(v);
                }
                a += 1;
                b += 1;
            }
        }
        self.idx = idx;
        self.val = val;
    }

    /// Restricts to indices in `[lo, hi)`, shifted down by `lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> SparseVec {
        let mut s = SparseVec::default();
        for (i, v) in self.idx.iter().zip(&self.val) {
            if *i >= lo && *i < hi {
                s.idx.push(i - lo);
                s.val.push(v.clone());
            }
        }
        s
    }

    pub fn dot_dense(&self, v: &[Int]) -> Int {
        let mut acc = Int::zero();
        for (i, x) in self.idx.iter().zip(&self.val) {
            if !v[*i].is_zero() {
                acc += &(x * &v[*i]);
            }
        }
        acc
    }
}

/// Row echelon form of the lattice spanned by `rows`. Rows come back sorted
/// by pivot column with positive pivots. With `reduce`, entries above each
/// pivot are reduced into `[0, pivot)`, giving the canonical HNF.
pub fn echelon(rows: Vec<SparseVec>, reduce: bool) -> Vec<SparseVec> {
    let mut buckets: BTreeMap<usize, Vec<SparseVec>> = BTreeMap::new();
    for r in rows {
        if let Some(l) = r.lead() {
            buckets.entry(l).or_default().push(r);
        }
    }
    let mut out: Vec<SparseVec> = Vec::new();
    while let Some((col, mut group)) = buckets.pop_first() {
        while group.len() > 1 {
            let p = (0..group.len())
                .min_by(|&a, &b| {
                    group[a]
                        .lead_val()
                        .cmp_abs(group[b].lead_val())
                        .then(group[a].nnz().cmp(&group[b].nnz()))
                })
                .unwrap();
            let piv = group.swap_remove(p);
            let mut rest = Vec::new();
            for mut r in group.drain(..) {
                let q = r.lead_val().div_floor(piv.lead_val());
                r.sub_scaled(&q, &piv);
                match r.lead() {
                    Some(l) if l == col => rest.push(r),
                    Some(l) => buckets.entry(l).or_default().push(r),
                    None => {}
                }
            }
            rest.push(piv);
            group = rest;
        }
        let mut piv = group.pop().unwrap();
        if piv.lead_val().is_negative() {
            piv.negate();
        }
        out.push(piv);
    }
    if reduce {
        for t in 0..out.len() {
            let (head, tail) = out.split_at_mut(t);
            let row_t = &tail[0];
            let pc = row_t.lead().unwrap();
            let pv = row_t.lead_val();
            for s in head.iter_mut() {
                if let Some(v) = s.get(pc) {
                    let q = v.div_floor(pv);
                    if !q.is_zero() {
                        s.sub_scaled(&q, row_t);
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<SparseVec>,
}

impl Lattice {
    pub fn zero(dim: usize) -> Lattice {
        Lattice { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice::scaled_full(dim, &Int::one())
    }

    /// `m Z^dim`
    pub fn scaled_full(dim: usize, m: &Int) -> Lattice {
        if m.is_zero() {
            return Lattice::zero(dim);
        }
        let m = m.abs();
        Lattice {
            dim,
            basis: (0..dim).map(|i| SparseVec { idx: vec![i], val: vec![m.clone()] }).collect(),
        }
    }

    pub fn from_sparse_rows(dim: usize, rows: Vec<SparseVec>) -> Lattice {
        debug_assert!(rows.iter().all(|r| r.idx.last().is_none_or(|&l| l < dim)));
        Lattice { dim, basis: echelon(rows, true) }
    }

    pub fn from_rows(dim: usize, rows: &[Vec<Int>]) -> Lattice {
        Lattice::from_sparse_rows(dim, rows.iter().map(|r| SparseVec::from_dense(r)).collect())
    }

    /// Lattice spanned by the columns of `m`.
    pub fn from_columns(m: &IntMatrix) -> Lattice {
        let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); m.cols()];
        for i in 0..m.rows() {
            for (j, v) in m.row(i).iter().enumerate() {
                if !v.is_zero() {
                    cols[j].push((i, v.clone()));
                }
            }
        }
        Lattice::from_sparse_rows(m.rows(), cols.into_iter().map(SparseVec::from_pairs).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn basis_dense(&self) -> Vec<Vec<Int>> {
        self.basis.iter().map(|b| b.to_dense(self.dim)).collect()
    }

    /// Basis vectors as the columns of a `dim x rank` matrix.
    pub fn basis_columns(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.dim, self.rank());
        for (j, b) in self.basis.iter().enumerate() {
            for (i, v) in b.idx.iter().zip(&b.val) {
                m[(*i, j)] = v.clone();
            }
        }
        m
    }

    pub fn pivots(&self) -> Vec<(usize, Int)> {
        self.basis.iter().map(|b| (b.lead().unwrap(), b.lead_val().clone())).collect()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// Index `[Z^dim : L]`, or `None` if infinite.
    pub fn index(&self) -> Option<Int> {
        if !self.is_full_rank() {
            return None;
        }
        Some(self.basis.iter().fold(Int::one(), |a, b| a * b.lead_val()))
    }

    /// Coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.dim);
        let mut rem = SparseVec::from_dense(v);
        let mut c = Vec::with_capacity(self.rank());
        for b in &self.basis {
            let pc = b.lead().unwrap();
            let x = match rem.get(pc) {
                Some(x) => x.clone(),
                None => {
                    c.push(Int::zero());
                    continue;
                }
            };
            if rem.lead() != Some(pc) {
                // an entry before this pivot survived: not in the lattice
                return None;
            }
            if !x.is_multiple_of(b.lead_val()) {
                return None;
            }
            let q = x.div_exact(b.lead_val());
            rem.sub_scaled(&q, b);
            c.push(q);
        }
        if rem.is_zero() {
            Some(c)
        } else {
            None
        }
    }

    /// Rational coordinates of a rational vector in the rational span.
    pub fn rational_coordinates(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(v.len(), self.dim);
        let mut rem = v.to_vec();
        let mut c = Vec::with_capacity(self.rank());
        for b in &self.basis {
            let pc = b.lead().unwrap();
            if rem[..pc].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let q = &rem[pc] / b.lead_val().to_rational();
            for (i, x) in b.idx.iter().zip(&b.val) {
                rem[*i] -= &q * x.to_rational();
            }
            c.push(q);
        }
        if rem.iter().all(|x| x.is_zero()) {
            Some(c)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(&b.to_dense(other.dim)))
    }

    pub fn combine(&self, c: &[Int]) -> Vec<Int> {
        assert_eq!(c.len(), self.rank());
        let mut v = vec![Int::zero(); self.dim];
        for (b, x) in self.basis.iter().zip(c) {
            if x.is_zero() {
                continue;
            }
            for (i, y) in b.idx.iter().zip(&b.val) {
                v[*i] += &(x * y);
            }
        }
        v
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let rows = self.basis.iter().chain(&other.basis).cloned().collect();
        Lattice::from_sparse_rows(self.dim, rows)
    }

    pub fn intersection(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut rows = Vec::new();
        for b in &self.basis {
            let mut r = b.clone();
            r.idx.extend(b.idx.iter().map(|i| i + n));
            r.val.extend(b.val.iter().cloned());
            rows.push(r);
        }
        rows.extend(other.basis.iter().cloned());
        let e = echelon(rows, false);
        let kept = e.into_iter().filter(|r| r.lead().unwrap() >= n).map(|r| r.slice(n, 2 * n)).collect();
        Lattice::from_sparse_rows(n, kept)
    }

    /// Direct sum, blocks in the given order.
    pub fn direct_sum(parts: &[&Lattice]) -> Lattice {
        let mut basis = Vec::new();
        let mut off = 0;
        for p in parts {
            for b in &p.basis {
                basis.push(SparseVec { idx: b.idx.iter().map(|i| i + off).collect(), val: b.val.clone() });
            }
            off += p.dim;
        }
        Lattice { dim: off, basis }
    }

    /// `{ x in Z^cols : m x in target }`
    pub fn preimage(m: &IntMatrix, target: &Lattice) -> Lattice {
        assert_eq!(m.rows(), target.dim);
        let (r, c) = (m.rows(), m.cols());
        let mut cols: Vec<Vec<(usize, Int)>> = vec![Vec::new(); c];
        for i in 0..r {
            for (j, v) in m.row(i).iter().enumerate() {
                if !v.is_zero() {
                    cols[j].push((i, v.clone()));
                }
            }
        }
        let mut rows: Vec<SparseVec> = cols
            .into_iter()
            .enumerate()
            .map(|(j, mut p)| {
                p.push((r + j, Int::one()));
                SparseVec::from_pairs(p)
            })
            .collect();
        rows.extend(target.basis.iter().cloned());
        let e = echelon(rows, false);
        let kept = e.into_iter().filter(|x| x.lead().unwrap() >= r).map(|x| x.slice(r, r + c)).collect();
        Lattice::from_sparse_rows(c, kept)
    }

    /// Right kernel of `m` over the integers.
    pub fn kernel(m: &IntMatrix) -> Lattice {
        Lattice::preimage(m, &Lattice::zero(m.rows()))
    }

    /// `m L`
    pub fn image(m: &IntMatrix, source: &Lattice) -> Lattice {
        assert_eq!(m.cols(), source.dim);
        let rows = source.basis.iter().map(|b| SparseVec::from_dense(&sparse_apply(m, b))).collect();
        Lattice::from_sparse_rows(m.rows(), rows)
    }
}

/// `m v` for sparse `v`.
pub fn sparse_apply(m: &IntMatrix, v: &SparseVec) -> Vec<Int> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let mut acc = Int::zero();
            for (j, x) in v.idx.iter().zip(&v.val) {
                if !row[*j].is_zero() {
                    acc += &(&row[*j] * x);
                }
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: &[i64]) -> Vec<Int> {
        x.iter().map(|&a| Int::from(a)).collect()
    }

    #[test]
    fn canonical_form() {
        let l = Lattice::from_rows(2, &[v(&[2, 3]), v(&[4, 5])]);
        // row lattice: (2,3),(0,-1) -> (2,0),(0,1)
        assert_eq!(l.basis_dense(), vec![v(&[2, 0]), v(&[0, 1])]);
        assert_eq!(l.index(), Some(Int::from(2)));
    }

    #[test]
    fn kernel_of_row() {
        let m = IntMatrix::from_i64(&[&[2, 3]]);
        let k = Lattice::kernel(&m);
        assert_eq!(k.basis_dense(), vec![v(&[3, -2])]);
    }

    #[test]
    fn intersection_of_multiples() {
        let a = Lattice::scaled_full(1, &Int::from(4));
        let b = Lattice::scaled_full(1, &Int::from(6));
        assert_eq!(a.intersection(&b), Lattice::scaled_full(1, &Int::from(12)));
        assert_eq!(a.sum(&b), Lattice::scaled_full(1, &Int::from(2)));
    }

    fn small_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..7, n), 0..6))
    }

    proptest! {
        #[test]
        fn coordinates_roundtrip(rows in small_rows(), coeffs in prop::collection::vec(-5i64..6, 6)) {
            let n = rows.first().map_or(1, |r| r.len());
            let dense: Vec<Vec<Int>> = rows.iter().map(|r| v(r)).collect();
            let l = Lattice::from_rows(n, &dense);
            let mut x = vec![Int::zero(); n];
            for (r, c) in dense.iter().zip(&coeffs) {
                for (a, b) in x.iter_mut().zip(r) {
                    *a += &(b * &Int::from(*c));
                }
            }
            let c = l.coordinates(&x).expect("combination must lie in the lattice");
            prop_assert_eq!(l.combine(&c), x);
            for r in &dense {
                prop_assert!(l.contains(r));
            }
            // canonical: rebuilding from the basis is a fixed point
            prop_assert_eq!(Lattice::from_rows(n, &l.basis_dense()), l);
        }

        #[test]
        fn kernel_is_annihilated(rows in small_rows()) {
            let n = rows.first().map_or(1, |r| r.len());
            if rows.is_empty() { return Ok(()); }
            let m = IntMatrix::from_rows(rows.iter().map(|r| v(r)).collect());
            let k = Lattice::kernel(&m);
            for b in k.basis_dense() {
                prop_assert!(m.mul_vec(&b).iter().all(|x| x.is_zero()));
            }
            // rank-nullity over Q
            let img = Lattice::from_rows(n, &m.row_vecs());
            prop_assert_eq!(k.rank() + img.rank(), n);
        }
    }
}
