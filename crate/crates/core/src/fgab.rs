//! Finitely generated abelian groups: Smith normal form, presentations,
//! homomorphisms and the exact constructions built on them.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::int::Int;
use crate::lattice::Lattice;
use crate::matrix::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FgabError {
    #[error("matrix shape {found:?} does not match expected {expected:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("homomorphism does not respect relations")]
    NotWellDefined,
    #[error("maps are not composable")]
    NotComposable,
    #[error("composition of the two maps is not zero")]
    CompositionNotZero,
    #[error("element is not in the kernel")]
    NotInKernel,
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... | d_r` positive and zeros after.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub d: IntMatrix,
}

impl SnfResult {
    /// The full diagonal (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct SnfWork {
    a: Vec<Vec<Int>>,
    u: Vec<Vec<Int>>,
    u_inv: Vec<Vec<Int>>,
    v: Vec<Vec<Int>>,
    v_inv: Vec<Vec<Int>>,
    track: bool,
}

fn ident(n: usize) -> Vec<Vec<Int>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect()).collect()
}

fn row_axpy(m: &mut [Vec<Int>], dst: usize, q: &Int, src: usize) {
    // m[dst] -= q * m[src]
    let (a, b) = if dst < src {
        let (x, y) = m.split_at_mut(src);
        (&mut x[dst], &y[0])
    } else {
        let (x, y) = m.split_at_mut(dst);
        (&mut y[0], &x[src])
    };
    for (p, s) in a.iter_mut().zip(b.iter()) {
        if !s.is_zero() {
            *p -= &(q * s);
        }
    }
}

fn col_axpy(m: &mut [Vec<Int>], dst: usize, q: &Int, src: usize) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= &t;
        }
    }
}

impl SnfWork {
    // row_i -= q row_j
    fn row_op(&mut self, i: usize, q: &Int, j: usize) {
        row_axpy(&mut self.a, i, q, j);
        if self.track {
            row_axpy(&mut self.u, i, q, j);
            // inverse: col_j += q col_i
            col_axpy(&mut self.u_inv, j, &-q, i);
        }
    }

    // col_i -= q col_j
    fn col_op(&mut self, i: usize, q: &Int, j: usize) {
        col_axpy(&mut self.a, i, q, j);
        if self.track {
            col_axpy(&mut self.v, i, q, j);
            row_axpy(&mut self.v_inv, j, &-q, i);
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            for r in self.u_inv.iter_mut() {
                r.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        if self.track {
            for r in self.v.iter_mut() {
                r.swap(i, j);
            }
            self.v_inv.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = -&*x;
            }
            for r in self.u_inv.iter_mut() {
                r[i] = -&r[i];
            }
        }
    }
}

fn to_matrix(rows: Vec<Vec<Int>>, cols: usize) -> IntMatrix {
    IntMatrix::from_rows_with_cols(rows, cols)
}

/// Smith normal form with transforms and their inverses.
pub fn snf(a: &IntMatrix) -> SnfResult {
    snf_impl(a, true)
}

/// Diagonal of the Smith normal form only.
pub fn snf_diagonal(a: &IntMatrix) -> Vec<Int> {
    snf_impl(a, false).diagonal()
}

fn snf_impl(a: &IntMatrix, track: bool) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut w = SnfWork {
        a: a.row_vecs(),
        u: if track { ident(r) } else { Vec::new() },
        u_inv: if track { ident(r) } else { Vec::new() },
        v: if track { ident(c) } else { Vec::new() },
        v_inv: if track { ident(c) } else { Vec::new() },
        track,
    };
    for t in 0..r.min(c) {
        loop {
            // minimal nonzero |entry| in the trailing block, first in row-major order
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &w.a[i][j];
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if w.a[bi][bj].cmp_abs(x).is_le() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(w, r, c);
            };
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..r {
                if !w.a[i][t].is_zero() {
                    let q = w.a[i][t].div_floor(&w.a[t][t]);
                    w.row_op(i, &q, t);
                    if !w.a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..c {
                if !w.a[t][j].is_zero() {
                    let q = w.a[t][j].div_floor(&w.a[t][t]);
                    w.col_op(j, &q, t);
                    if !w.a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let p = w.a[t][t].clone();
            let mut bad = None;
            'scan: for i in t + 1..r {
                for j in t + 1..c {
                    if !w.a[i][j].is_multiple_of(&p) {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    // row_t += row_i
                    w.row_op(t, &Int::from(-1), i);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    finish(w, r, c)
}

fn finish(w: SnfWork, r: usize, c: usize) -> SnfResult {
    let d = to_matrix(w.a, c);
    if w.track {
        SnfResult {
            u: to_matrix(w.u, r),
            v: to_matrix(w.v, c),
            u_inv: to_matrix(w.u_inv, r),
            v_inv: to_matrix(w.v_inv, c),
            d,
        }
    } else {
        SnfResult {
            u: IntMatrix::zeros(0, 0),
            v: IntMatrix::zeros(0, 0),
            u_inv: IntMatrix::zeros(0, 0),
            v_inv: IntMatrix::zeros(0, 0),
            d,
        }
    }
}

/// `Z^n_gens / (column span of relations)`. When `dual` is set the group
/// stands for its Pontryagin dual; free factors then print as `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedGroup {
    n_gens: usize,
    relations: IntMatrix,
    invariant_factors: Vec<Int>,
    dual: bool,
}

impl PresentedGroup {
    pub fn new(n_gens: usize, relations: IntMatrix) -> Result<PresentedGroup, FgabError> {
        if relations.rows() != n_gens {
            return Err(FgabError::ShapeMismatch {
                expected: (n_gens, relations.cols()),
                found: (relations.rows(), relations.cols()),
            });
        }
        let invariant_factors = invariant_factors_of(n_gens, &relations);
        Ok(PresentedGroup { n_gens, relations, invariant_factors, dual: false })
    }

    /// Group with the given invariant factors (0 = free cyclic factor).
    pub fn from_factors(factors: &[Int]) -> PresentedGroup {
        let n = factors.len();
        let cols: Vec<Vec<Int>> = factors
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| {
                let mut c = vec![Int::zero(); n];
                c[i] = d.abs();
                c
            })
            .collect();
        PresentedGroup::new(n, IntMatrix::from_columns(n, &cols)).unwrap()
    }

    pub fn free(rank: usize) -> PresentedGroup {
        PresentedGroup::new(rank, IntMatrix::zeros(rank, 0)).unwrap()
    }

    pub fn trivial() -> PresentedGroup {
        PresentedGroup::free(0)
    }

    pub fn with_dual(mut self, dual: bool) -> PresentedGroup {
        self.dual = dual;
        self
    }

    pub fn n_gens(&self) -> usize {
        self.n_gens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn is_dual(&self) -> bool {
        self.dual
    }

    /// Nonunit invariant factors, torsion first, zeros (free) last.
    pub fn invariant_factors(&self) -> &[Int] {
        &self.invariant_factors
    }

    pub fn torsion(&self) -> Vec<Int> {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    /// Order, or `None` when infinite.
    pub fn order(&self) -> Option<Int> {
        if !self.is_finite() {
            return None;
        }
        Some(self.invariant_factors.iter().fold(Int::one(), |a, d| a * d))
    }

    pub fn relation_lattice(&self) -> Lattice {
        Lattice::from_columns(&self.relations)
    }

    pub fn direct_sum(groups: &[PresentedGroup]) -> PresentedGroup {
        let n = groups.iter().map(|g| g.n_gens).sum();
        let rel = IntMatrix::block_diag(&groups.iter().map(|g| g.relations.clone()).collect::<Vec<_>>());
        let dual = groups.first().is_some_and(|g| g.dual);
        PresentedGroup::new(n, rel).unwrap().with_dual(dual)
    }

    /// Flips between a group and its dual. Exact for finite groups, where
    /// the dual is non-canonically isomorphic to the group.
    pub fn dual(&self) -> PresentedGroup {
        self.clone().with_dual(!self.dual)
    }

    /// Same invariant factors and dual flag.
    pub fn is_isomorphic(&self, other: &PresentedGroup) -> bool {
        self.invariant_factors == other.invariant_factors && (self.dual == other.dual || self.is_finite())
    }
}

fn invariant_factors_of(n_gens: usize, relations: &IntMatrix) -> Vec<Int> {
    let lat = Lattice::from_columns(relations);
    let basis = lat.basis_columns();
    let diag = snf_diagonal(&basis);
    let mut out: Vec<Int> = diag.into_iter().filter(|d| !d.is_one()).collect();
    out.extend(std::iter::repeat_n(Int::zero(), n_gens - lat.rank()));
    out
}

impl fmt::Display for PresentedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| {
                if d.is_zero() {
                    if self.dual { "T" } else { "Z" }.to_string()
                } else {
                    format!("Z/{d}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homomorphism given by an integer matrix on generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PresentedGroup,
    target: PresentedGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: PresentedGroup, target: PresentedGroup, matrix: IntMatrix) -> Result<GroupHom, FgabError> {
        if matrix.rows() != target.n_gens || matrix.cols() != source.n_gens {
            return Err(FgabError::ShapeMismatch {
                expected: (target.n_gens, source.n_gens),
                found: (matrix.rows(), matrix.cols()),
            });
        }
        let tl = target.relation_lattice();
        let moved = matrix.mul(&source.relations);
        if !(0..moved.cols()).all(|j| tl.contains(&moved.column(j))) {
            return Err(FgabError::NotWellDefined);
        }
        Ok(GroupHom { source, target, matrix })
    }

    /// Skips the relation check; callers guarantee well-definedness.
    pub fn new_unchecked(source: PresentedGroup, target: PresentedGroup, matrix: IntMatrix) -> GroupHom {
        debug_assert_eq!((matrix.rows(), matrix.cols()), (target.n_gens, source.n_gens));
        GroupHom { source, target, matrix }
    }

    pub fn zero(source: PresentedGroup, target: PresentedGroup) -> GroupHom {
        let m = IntMatrix::zeros(target.n_gens, source.n_gens);
        GroupHom { source, target, matrix: m }
    }

    pub fn source(&self) -> &PresentedGroup {
        &self.source
    }

    pub fn target(&self) -> &PresentedGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(x)
    }
}

/// A subquotient `K / I` of `Z^n` brought to Smith form, with the data
/// needed to map elements of `K` to coordinates in the cyclic
/// decomposition and back.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub group: PresentedGroup,
    pub kernel: Lattice,
    /// Cyclic orders of the retained generators (0 = free).
    pub orders: Vec<Int>,
    /// Rows: linear functionals on `K`-coordinates giving each retained coordinate.
    pub coordinate_map: IntMatrix,
    /// Columns: `K`-coordinates of each retained generator.
    pub generator_coords: IntMatrix,
}

impl Subquotient {
    /// `K / I` for lattices `I <= K`.
    pub fn new(kernel: Lattice, image: &Lattice) -> Subquotient {
        let s = kernel.rank();
        let cols: Vec<Vec<Int>> = image
            .basis_dense()
            .iter()
            .map(|b| kernel.coordinates(b).expect("image must lie in the kernel"))
            .collect();
        let y = IntMatrix::from_columns(s, &cols);
        let res = snf(&y);
        let diag = res.diagonal();
        let mut orders = Vec::new();
        let mut keep = Vec::new();
        for i in 0..s {
            let d = diag.get(i).cloned().unwrap_or_else(Int::zero);
            if !d.is_one() {
                orders.push(d);
                keep.push(i);
            }
        }
        let coordinate_map = res.u.select_rows(&keep);
        let generator_coords = res.u_inv.select_columns(&keep);
        let group = PresentedGroup::from_factors(&orders);
        Subquotient { group, kernel, orders, coordinate_map, generator_coords }
    }

    /// Class of `x` (which must lie in `K`): integer coordinates, reduced
    /// modulo each finite order.
    pub fn class_of(&self, x: &[Int]) -> Result<Vec<Int>, FgabError> {
        let c = self.kernel.coordinates(x).ok_or(FgabError::NotInKernel)?;
        let y = self.coordinate_map.mul_vec(&c);
        Ok(y.into_iter()
            .zip(&self.orders)
            .map(|(v, d)| if d.is_zero() { v } else { v.mod_floor(d) })
            .collect())
    }

    /// Representative in `Z^n` of the j-th retained generator.
    pub fn generator(&self, j: usize) -> Vec<Int> {
        self.kernel.combine(&self.generator_coords.column(j))
    }

    /// Rational coordinates for a rational vector in `K (x) Q`; only the
    /// free coordinates are meaningful.
    pub fn rational_class_of(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        let c = self.kernel.rational_coordinates(x)?;
        Some(
            (0..self.coordinate_map.rows())
                .map(|i| {
                    let mut acc = BigRational::zero();
                    for (a, b) in self.coordinate_map.row(i).iter().zip(&c) {
                        acc += a.to_rational() * b;
                    }
                    acc
                })
                .collect(),
        )
    }
}

/// Kernel of `h` with its embedding into the source.
pub fn kernel(h: &GroupHom) -> (PresentedGroup, GroupHom) {
    let k = Lattice::preimage(&h.matrix, &h.target.relation_lattice());
    let sq = Subquotient::new(k, &h.source.relation_lattice());
    let emb = sq.kernel.basis_columns().mul(&sq.generator_coords);
    let g = sq.group.clone().with_dual(h.source.dual);
    (g.clone(), GroupHom::new_unchecked(g, h.source.clone(), emb))
}

/// Image of `h` with its embedding into the target.
pub fn image(h: &GroupHom) -> (PresentedGroup, GroupHom) {
    let rt = h.target.relation_lattice();
    let i = Lattice::from_columns(&h.matrix).sum(&rt);
    let sq = Subquotient::new(i, &rt);
    let emb = sq.kernel.basis_columns().mul(&sq.generator_coords);
    let g = sq.group.clone().with_dual(h.target.dual);
    (g.clone(), GroupHom::new_unchecked(g, h.target.clone(), emb))
}

/// Cokernel of `h` with the projection from the target.
pub fn cokernel(h: &GroupHom) -> (PresentedGroup, GroupHom) {
    let n = h.target.n_gens;
    let i = Lattice::from_columns(&h.matrix).sum(&h.target.relation_lattice());
    let sq = Subquotient::new(Lattice::full(n), &i);
    // full lattice has the identity basis, so K-coordinates are plain coordinates
    let g = sq.group.clone().with_dual(h.target.dual);
    (g.clone(), GroupHom::new_unchecked(h.target.clone(), g, sq.coordinate_map.clone()))
}

/// Homology `ker g / im f` for `f: A -> B`, `g: B -> C`.
pub fn homology(f: &GroupHom, g: &GroupHom) -> Result<(PresentedGroup, Subquotient), FgabError> {
    if f.target.n_gens != g.source.n_gens {
        return Err(FgabError::NotComposable);
    }
    let rc = g.target.relation_lattice();
    let gf = g.matrix.mul(&f.matrix);
    if !(0..gf.cols()).all(|j| rc.contains(&gf.column(j))) {
        return Err(FgabError::CompositionNotZero);
    }
    Ok(homology_unchecked(&f.matrix, &f.target.relation_lattice(), &g.matrix, &rc, f.target.dual))
}

/// Homology from raw data: `ker(G mod rel_c) / (im F + rel_b)`.
pub fn homology_unchecked(
    f: &IntMatrix,
    rel_b: &Lattice,
    g: &IntMatrix,
    rel_c: &Lattice,
    dual: bool,
) -> (PresentedGroup, Subquotient) {
    let k = Lattice::preimage(g, rel_c);
    let i = Lattice::from_columns(f).sum(rel_b);
    let sq = Subquotient::new(k, &i);
    (sq.group.clone().with_dual(dual), sq)
}

/// Solves `A x = b` over `Z` (modulus 0) or over `Z/m`.
pub fn solve(a: &IntMatrix, b: &[Int], modulus: &Int) -> Option<Vec<Int>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    // augmented: [A | -b] with modulus rows; kernel element with last coordinate 1
    let mut aug = IntMatrix::zeros(m, n + 1);
    for i in 0..m {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = -&b[i];
    }
    let target = Lattice::scaled_full(m, modulus);
    // put the t variable first so its pivot comes first in the kernel echelon form
    let mut perm = IntMatrix::zeros(m, n + 1);
    for i in 0..m {
        perm[(i, 0)] = aug[(i, n)].clone();
        for j in 0..n {
            perm[(i, j + 1)] = aug[(i, j)].clone();
        }
    }
    let k = Lattice::preimage(&perm, &target);
    let first = k.basis().first()?;
    if first.lead() != Some(0) || !first.lead_val().is_one() {
        return None;
    }
    let dense = first.to_dense(n + 1);
    let x: Vec<Int> = dense[1..]
        .iter()
        .map(|v| if modulus.is_zero() { v.clone() } else { v.mod_floor(modulus) })
        .collect();
    Some(x)
}

/// Solves `A x = b (mod 1)` for `x` in `(Q/Z)^n`, entries reduced into `[0, 1)`.
pub fn solve_torus(a: &IntMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    let res = snf(a);
    let diag = res.diagonal();
    let pb: Vec<BigRational> = (0..m)
        .map(|i| {
            let mut acc = BigRational::zero();
            for (u, v) in res.u.row(i).iter().zip(b) {
                if !u.is_zero() {
                    acc += u.to_rational() * v;
                }
            }
            acc
        })
        .collect();
    let mut y = vec![BigRational::zero(); n];
    for i in 0..m {
        let d = diag.get(i).cloned().unwrap_or_else(Int::zero);
        if d.is_zero() {
            if !pb[i].is_integer() {
                return None;
            }
        } else {
            y[i] = &pb[i] / d.to_rational();
        }
    }
    let x: Vec<BigRational> = (0..n)
        .map(|i| {
            let mut acc = BigRational::zero();
            for (q, v) in res.v.row(i).iter().zip(&y) {
                if !q.is_zero() {
                    acc += q.to_rational() * v;
                }
            }
            frac(&acc)
        })
        .collect();
    Some(x)
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Reflects a homomorphism to the dual groups (transposed matrix,
/// reversed direction, flags flipped).
pub fn dual_hom(h: &GroupHom) -> GroupHom {
    GroupHom::new_unchecked(h.target.dual(), h.source.dual(), h.matrix.transpose())
}
