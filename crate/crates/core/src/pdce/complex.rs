use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::fgab::{homology_unchecked, PresentedGroup, Subquotient};
use crate::funcspace::Target;
use crate::int::Int;
use crate::lattice::{Lattice, SparseVec};
use crate::matrix::IntMatrix;

use super::module::{solution_module, zero_sum_module, ModuleRep};
use super::{Instance, PdceError, Subset};

static BOUNDARY_CHECKS: AtomicUsize = AtomicUsize::new(0);

/// Number of `d o d = 0` checks that have passed in this process.
pub fn boundary_checks() -> usize {
    BOUNDARY_CHECKS.load(Ordering::Relaxed)
}

/// A family of modules indexed by subsets, with structure maps for `a <= b`.
pub trait ModuleFamily: Sync {
    fn target(&self) -> &Target;
    fn module(&self, a: Subset) -> Result<Arc<ModuleRep>, PdceError>;
    /// Image of an ambient vector of `M_a` in the ambient coordinates of `M_b`.
    fn include(&self, a: Subset, b: Subset, v: &SparseVec) -> SparseVec;
}

impl ModuleFamily for Instance {
    fn target(&self) -> &Target {
        Instance::target(self)
    }

    fn module(&self, a: Subset) -> Result<Arc<ModuleRep>, PdceError> {
        solution_module(self, a)
    }

    fn include(&self, _a: Subset, _b: Subset, v: &SparseVec) -> SparseVec {
        v.clone()
    }
}

/// The zero-sum family `N_e`.
pub struct ZeroSumFamily<'a> {
    inst: &'a Instance,
    cache: Vec<OnceLock<Arc<ModuleRep>>>,
}

impl<'a> ZeroSumFamily<'a> {
    pub fn new(inst: &'a Instance) -> ZeroSumFamily<'a> {
        ZeroSumFamily { inst, cache: (0..(1usize << inst.k())).map(|_| OnceLock::new()).collect() }
    }
}

impl ModuleFamily for ZeroSumFamily<'_> {
    fn target(&self) -> &Target {
        self.inst.target()
    }

    fn module(&self, a: Subset) -> Result<Arc<ModuleRep>, PdceError> {
        self.inst.check_subset(a)?;
        if let Some(m) = self.cache[a.0 as usize].get() {
            return Ok(m.clone());
        }
        let m = Arc::new(zero_sum_module(self.inst, a)?);
        Ok(self.cache[a.0 as usize].get_or_init(|| m).clone())
    }

    fn include(&self, a: Subset, b: Subset, v: &SparseVec) -> SparseVec {
        let n = self.inst.group().size();
        let bel = b.elements();
        let map: Vec<usize> = a.elements().iter().map(|i| bel.iter().position(|j| j == i).unwrap()).collect();
        let mut pairs: Vec<(usize, Int)> =
            v.idx.iter().zip(&v.val).map(|(&c, x)| (map[c / n] * n + c % n, x.clone())).collect();
        pairs.sort_by_key(|p| p.0);
        SparseVec::from_pairs(pairs)
    }
}

/// The family `a -> M_{a & c}`.
pub(crate) struct Reduced<'a, F: ModuleFamily> {
    pub inner: &'a F,
    pub c: Subset,
}

impl<F: ModuleFamily> ModuleFamily for Reduced<'_, F> {
    fn target(&self) -> &Target {
        self.inner.target()
    }

    fn module(&self, a: Subset) -> Result<Arc<ModuleRep>, PdceError> {
        self.inner.module(a.intersect(self.c))
    }

    fn include(&self, a: Subset, b: Subset, v: &SparseVec) -> SparseVec {
        self.inner.include(a.intersect(self.c), b.intersect(self.c), v)
    }
}

/// The complex `0 -> X_0 -> X_1 -> ... -> X_|e| -> 0` with
/// `X_l = sum over |a| = l of M_a` and its homology at every position.
#[derive(Clone, Debug)]
pub struct StructureComplex {
    pub e: Subset,
    pub target: Target,
    /// Index sets of the blocks at each position, lexicographic.
    pub blocks: Vec<Vec<Subset>>,
    /// `boundaries[l]` maps position `l - 1` to `l` in ambient coordinates,
    /// for `l = 0..=|e| + 1` (the outer two touch the zero module).
    pub boundaries: Vec<IntMatrix>,
    pub homology: Vec<PresentedGroup>,
}

impl StructureComplex {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

fn blocks_of(e: Subset) -> Vec<Vec<Subset>> {
    (0..=e.len()).map(|l| e.subsets_of_size(l)).collect()
}

fn block_at(blocks: &[Vec<Subset>], l: isize) -> &[Subset] {
    if l < 0 || l as usize >= blocks.len() {
        &[]
    } else {
        &blocks[l as usize]
    }
}

/// `d_l` in ambient coordinates, from `src` blocks to `dst` blocks.
fn ambient_boundary<F: ModuleFamily>(fam: &F, src: &[Subset], dst: &[Subset]) -> Result<IntMatrix, PdceError> {
    let sdims: Vec<usize> = src.iter().map(|&a| fam.module(a).map(|m| m.dim)).collect::<Result<_, _>>()?;
    let ddims: Vec<usize> = dst.iter().map(|&b| fam.module(b).map(|m| m.dim)).collect::<Result<_, _>>()?;
    let mut m = IntMatrix::zeros(ddims.iter().sum(), sdims.iter().sum());
    let mut c0 = 0;
    for (a, &da) in src.iter().zip(&sdims) {
        let mut r0 = 0;
        for (b, &db) in dst.iter().zip(&ddims) {
            if a.is_subset_of(*b) {
                let s = Int::from(Subset::sign(*b, *a));
                for j in 0..da {
                    let unit = SparseVec { idx: vec![j], val: vec![Int::one()] };
                    let w = fam.include(*a, *b, &unit);
                    for (i, v) in w.idx.iter().zip(&w.val) {
                        m[(r0 + i, c0 + j)] = v * &s;
                    }
                }
            }
            r0 += db;
        }
        c0 += da;
    }
    Ok(m)
}

/// `d_l` in lattice coordinates (discrete targets).
fn coordinate_boundary<F: ModuleFamily>(fam: &F, src: &[Subset], dst: &[Subset]) -> Result<IntMatrix, PdceError> {
    let smods: Vec<Arc<ModuleRep>> = src.iter().map(|&a| fam.module(a)).collect::<Result<_, _>>()?;
    let dmods: Vec<Arc<ModuleRep>> = dst.iter().map(|&b| fam.module(b)).collect::<Result<_, _>>()?;
    let srank: Vec<usize> = smods.iter().map(|m| m.lattice().rank()).collect();
    let drank: Vec<usize> = dmods.iter().map(|m| m.lattice().rank()).collect();
    let mut out = IntMatrix::zeros(drank.iter().sum(), srank.iter().sum());
    let mut c0 = 0;
    for ((a, ma), &sa) in src.iter().zip(&smods).zip(&srank) {
        let mut r0 = 0;
        for ((b, mb), &sb) in dst.iter().zip(&dmods).zip(&drank) {
            if a.is_subset_of(*b) {
                let s = Int::from(Subset::sign(*b, *a));
                for (j, v) in ma.lattice().basis().iter().enumerate() {
                    let w = fam.include(*a, *b, v).to_dense(mb.dim);
                    let c = mb.lattice().coordinates(&w).expect("structure map must land in the target module");
                    for (i, x) in c.iter().enumerate() {
                        if !x.is_zero() {
                            out[(r0 + i, c0 + j)] = x * &s;
                        }
                    }
                }
            }
            r0 += sb;
        }
        c0 += sa;
    }
    Ok(out)
}

fn relation_lattice<F: ModuleFamily>(fam: &F, blocks: &[Subset]) -> Result<Lattice, PdceError> {
    let mods: Vec<Arc<ModuleRep>> = blocks.iter().map(|&a| fam.module(a)).collect::<Result<_, _>>()?;
    let lats: Vec<Lattice> = mods
        .iter()
        .map(|m| match &m.target {
            Target::Torus => m.annihilator().clone(),
            _ => Lattice::from_columns(&m.relations_in_basis()),
        })
        .collect();
    Ok(Lattice::direct_sum(&lats.iter().collect::<Vec<_>>()))
}

fn check_composition(second: &IntMatrix, first: &IntMatrix, pos: usize) -> Result<(), PdceError> {
    if second.cols() != first.rows() || !second.mul(first).is_zero() {
        return Err(PdceError::BoundaryNotZero(pos));
    }
    BOUNDARY_CHECKS.fetch_add(1, Ordering::Relaxed);
    Ok(())
}

/// Homology at position `l` together with the subquotient data (for the
/// torus, of the dual complex).
pub(crate) fn family_homology_at<F: ModuleFamily>(
    fam: &F,
    e: Subset,
    l: usize,
) -> Result<(PresentedGroup, Subquotient), PdceError> {
    if l > e.len() {
        return Err(PdceError::InvalidPosition(l, e.len()));
    }
    let blocks = blocks_of(e);
    let li = l as isize;
    let (prev, here, next) = (block_at(&blocks, li - 1), block_at(&blocks, li), block_at(&blocks, li + 1));
    match fam.target() {
        Target::Torus => {
            let d_in = ambient_boundary(fam, prev, here)?;
            let d_out = ambient_boundary(fam, here, next)?;
            check_composition(&d_out, &d_in, l)?;
            let rel_here = relation_lattice(fam, here)?;
            let rel_prev = relation_lattice(fam, prev)?;
            Ok(homology_unchecked(&d_out.transpose(), &rel_here, &d_in.transpose(), &rel_prev, true))
        }
        Target::Rational => {
            let int = IntFamily(fam);
            let d_in = coordinate_boundary(&int, prev, here)?;
            let d_out = coordinate_boundary(&int, here, next)?;
            let s = d_in.rows();
            let r_in = Lattice::from_columns(&d_in).rank();
            let r_out = Lattice::from_columns(&d_out.transpose()).rank();
            let rank = s - r_in - r_out;
            let (_, sq) = homology_unchecked(&d_in, &Lattice::zero(s), &d_out, &Lattice::zero(d_out.rows()), false);
            Ok((PresentedGroup::free(rank), sq))
        }
        _ => {
            let d_in = coordinate_boundary(fam, prev, here)?;
            let d_out = coordinate_boundary(fam, here, next)?;
            let rel_here = relation_lattice(fam, here)?;
            let rel_next = relation_lattice(fam, next)?;
            Ok(homology_unchecked(&d_in, &rel_here, &d_out, &rel_next, false))
        }
    }
}

/// Presents a rational family through the integer lattices of its modules.
struct IntFamily<'a, F: ModuleFamily>(&'a F);

impl<F: ModuleFamily> ModuleFamily for IntFamily<'_, F> {
    fn target(&self) -> &Target {
        &Target::Int
    }

    fn module(&self, a: Subset) -> Result<Arc<ModuleRep>, PdceError> {
        self.0.module(a)
    }

    fn include(&self, a: Subset, b: Subset, v: &SparseVec) -> SparseVec {
        self.0.include(a, b, v)
    }
}

pub(crate) fn family_complex<F: ModuleFamily>(fam: &F, e: Subset) -> Result<StructureComplex, PdceError> {
    let blocks = blocks_of(e);
    let top = e.len() as isize;
    let boundaries: Vec<IntMatrix> = (0..=top + 1)
        .map(|l| ambient_boundary(fam, block_at(&blocks, l - 1), block_at(&blocks, l)))
        .collect::<Result<_, _>>()?;
    for l in 0..boundaries.len() - 1 {
        check_composition(&boundaries[l + 1], &boundaries[l], l)?;
    }
    let homology: Vec<PresentedGroup> = (0..=e.len())
        .into_par_iter()
        .map(|l| family_homology_at(fam, e, l).map(|(g, _)| g))
        .collect::<Result<_, _>>()?;
    Ok(StructureComplex { e, target: fam.target().clone(), blocks, boundaries, homology })
}

/// Structure complex of the solution modules at `e`.
pub fn structure_complex(inst: &Instance, e: Subset) -> Result<StructureComplex, PdceError> {
    inst.check_subset(e)?;
    family_complex(inst, e)
}

/// Homology of the structure complex at `e`, position `l` only.
pub fn homology_at(inst: &Instance, e: Subset, l: usize) -> Result<PresentedGroup, PdceError> {
    inst.check_subset(e)?;
    Ok(family_homology_at(inst, e, l)?.0)
}

pub fn zero_sum_complex(inst: &Instance, e: Subset) -> Result<StructureComplex, PdceError> {
    inst.check_subset(e)?;
    family_complex(&ZeroSumFamily::new(inst), e)
}

pub fn zero_sum_homology_at(inst: &Instance, e: Subset, l: usize) -> Result<PresentedGroup, PdceError> {
    inst.check_subset(e)?;
    Ok(family_homology_at(&ZeroSumFamily::new(inst), e, l)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, Subgroup};

    fn inst(orders: Vec<u64>, gens: &[&[i64]], target: Target) -> Instance {
        let g = FiniteGroup::new(orders).unwrap();
        let subs = gens.iter().map(|x| Subgroup::generated(&g, &[x.to_vec()]).unwrap()).collect();
        Instance::new(g, subs, target).unwrap()
    }

    #[test]
    fn affine_torus_complex() {
        // Z/N with U1 = U2 = Z: top homology is affine / constants = Z/N
        let i = inst(vec![5], &[&[1], &[1]], Target::Torus);
        let c = structure_complex(&i, i.full()).unwrap();
        assert_eq!(c.homology[2].invariant_factors(), &[Int::from(5)]);
        // position 1: ker of (c1, c2) -> c2 - c1 is the diagonal torus
        assert_eq!(c.homology[1].to_string(), "T");
        assert!(c.homology[0].is_trivial());
    }

    #[test]
    fn square_with_diagonal() {
        for (target, expect) in [
            (Target::Mod(2), vec![Int::from(2)]),
            (Target::Mod(3), vec![]),
            (Target::Torus, vec![]),
            (Target::Int, vec![Int::from(4)]),
        ] {
            let i = inst(vec![4, 4], &[&[1, 0], &[0, 1], &[1, 1]], target.clone());
            let h = homology_at(&i, i.full(), 3).unwrap();
            let want: Vec<Int> = if let Target::Mod(m) = target {
                let g = Int::from(4u64).gcd(&Int::from(m));
                if g.is_one() { vec![] } else { vec![g] }
            } else {
                expect
            };
            assert_eq!(h.invariant_factors(), &want[..], "target {target}");
        }
    }

    #[test]
    fn zero_sum_two_subgroups() {
        // N_[2] is isomorphic to the U1 + U2 invariant functions
        let i = inst(vec![2, 2], &[&[1, 0], &[0, 1]], Target::Mod(2));
        let m = zero_sum_module(&i, i.full()).unwrap();
        assert_eq!(m.presentation().order(), Some(Int::from(2)));
        let c = zero_sum_complex(&i, i.full()).unwrap();
        assert!(c.homology.iter().take(2).all(|g| g.is_trivial()));
    }
}
