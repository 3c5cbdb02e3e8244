//! Partial difference equations `d_{h_1} ... d_{h_k} f = 0` with `h_i`
//! ranging over subgroups `U_1, ..., U_k`, their solution modules, structure
//! complexes and homology.

mod complex;
mod degeneracy;
mod module;

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::fgab::FgabError;
use crate::funcspace::{FuncError, FunctionVector, Target};
use crate::group::{coset_representatives, subgroup_sum, FiniteGroup, GroupError, Subgroup};

pub use complex::{
    boundary_checks, homology_at, structure_complex, zero_sum_complex, zero_sum_homology_at, ModuleFamily,
    StructureComplex, ZeroSumFamily,
};
pub use degeneracy::{class_of, is_degenerate, rational_exactness, reduce_check, restrict, Class, ComplexKind};
pub use module::{solution_module, zero_sum_module, ModuleRep};

/// Largest number of subgroups accepted.
pub const MAX_SUBGROUPS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdceError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Fgab(#[from] FgabError),
    #[error("at most {MAX_SUBGROUPS} subgroups are supported, got {0}")]
    TooManySubgroups(usize),
    #[error("subgroup {0} lives in a different group")]
    SubgroupMismatch(usize),
    #[error("index set {0} is not contained in [k] with k = {1}")]
    InvalidSubset(Subset, usize),
    #[error("position {0} is outside 0..={1}")]
    InvalidPosition(usize, usize),
    #[error("function is not a solution of the equation (coset {0})")]
    NotASolution(usize),
    #[error("function target {found} does not match instance target {expected}")]
    TargetMismatch { expected: Target, found: Target },
    #[error("boundary maps do not compose to zero at position {0}")]
    BoundaryNotZero(usize),
    #[error("{0}")]
    InvalidArgument(String),
}

/// A subset of `{0, ..., k-1}` as a bit mask. Displayed 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub fn empty() -> Subset {
        Subset(0)
    }

    pub fn full(k: usize) -> Subset {
        Subset(((1u64 << k) - 1) as u32)
    }

    pub fn from_indices(idx: &[usize]) -> Subset {
        Subset(idx.iter().fold(0u32, |m, &i| m | (1 << i)))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(&self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(&self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn remove(&self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..32).filter(|&i| self.contains(i)).collect()
    }

    pub fn max_element(&self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Subsets of `self` of size `l`, in lexicographic order of their
    /// sorted element lists.
    pub fn subsets_of_size(&self, l: usize) -> Vec<Subset> {
        fn rec(el: &[usize], start: usize, l: usize, cur: &mut Vec<usize>, out: &mut Vec<Subset>) {
            if cur.len() == l {
                out.push(Subset::from_indices(cur));
                return;
            }
            for i in start..el.len() {
                cur.push(el[i]);
                rec(el, i + 1, l, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(&self.elements(), 0, l, &mut Vec::new(), &mut out);
        out
    }

    /// `sgn(b : a) = (-1)^(j-1)` where `a = b \ {i_j}`, `b = {i_1 < ... < i_s}`.
    pub fn sign(b: Subset, a: Subset) -> i64 {
        debug_assert!(a.is_subset_of(b) && b.len() == a.len() + 1);
        let removed = Subset(b.0 & !a.0);
        let i = removed.elements()[0];
        let j = b.elements().iter().position(|&x| x == i).unwrap();
        if j % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.elements().iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", p.join(","))
    }
}

/// An equation on `Z` given by subgroups `U_1..U_k` and a target module.
///
/// On construction the group is replaced by `U_1 + ... + U_k` (every
/// difference operator preserves its cosets); functions on the original
/// group are handled coset by coset.
#[derive(Debug)]
pub struct Instance {
    ambient: FiniteGroup,
    ambient_subgroups: Vec<Subgroup>,
    group: FiniteGroup,
    subgroups: Vec<Subgroup>,
    target: Target,
    /// For each coset of `U_[k]`, ambient indices of `rep + embed(j)`.
    coset_points: Vec<Vec<usize>>,
    modules: Vec<OnceLock<Arc<ModuleRep>>>,
}

impl Instance {
    pub fn new(group: FiniteGroup, subgroups: Vec<Subgroup>, target: Target) -> Result<Instance, PdceError> {
        if subgroups.len() > MAX_SUBGROUPS {
            return Err(PdceError::TooManySubgroups(subgroups.len()));
        }
        if let Target::Mod(m) = target {
            if m < 2 {
                return Err(FuncError::BadModulus.into());
            }
        }
        for (i, u) in subgroups.iter().enumerate() {
            if u.group() != &group {
                return Err(PdceError::SubgroupMismatch(i));
            }
        }
        let k = subgroups.len();
        let sum = if k == 0 { Subgroup::trivial(&group) } else { subgroup_sum(&subgroups)? };
        let (norm, norm_subs, embed) = if sum.order() == group.size() {
            (group.clone(), subgroups.clone(), (0..group.size()).collect::<Vec<_>>())
        } else {
            let chart = sum.as_group();
            let ng = chart.group.clone();
            let subs = subgroups
                .iter()
                .map(|u| {
                    let gens: Vec<Vec<i64>> = u
                        .canonical_generators()
                        .iter()
                        .map(|g| chart.project(g).unwrap().into_iter().map(|x| x as i64).collect())
                        .collect();
                    Subgroup::generated(&ng, &gens)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let embed = ng.elements().map(|x| group.index(&chart.embed(&x))).collect();
            (ng, subs, embed)
        };
        let coset_points = coset_representatives(&sum)
            .into_iter()
            .map(|r| embed.iter().map(|&e| group.add_idx(r, e)).collect())
            .collect();
        Ok(Instance {
            ambient: group,
            ambient_subgroups: subgroups,
            group: norm,
            subgroups: norm_subs,
            target,
            coset_points,
            modules: (0..(1usize << k)).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Same subgroups, different target.
    pub fn with_target(&self, target: Target) -> Result<Instance, PdceError> {
        Instance::new(self.ambient.clone(), self.ambient_subgroups.clone(), target)
    }

    pub fn k(&self) -> usize {
        self.subgroups.len()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.k())
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn ambient(&self) -> &FiniteGroup {
        &self.ambient
    }

    pub fn ambient_subgroups(&self) -> &[Subgroup] {
        &self.ambient_subgroups
    }

    /// The normalized group `U_1 + ... + U_k`.
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// The subgroups inside the normalized group.
    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn coset_count(&self) -> usize {
        self.coset_points.len()
    }

    pub fn coset_points(&self, c: usize) -> &[usize] {
        &self.coset_points[c]
    }

    pub fn check_subset(&self, e: Subset) -> Result<(), PdceError> {
        if !e.is_subset_of(self.full()) {
            return Err(PdceError::InvalidSubset(e, self.k()));
        }
        Ok(())
    }

    pub fn check_function(&self, f: &FunctionVector) -> Result<(), PdceError> {
        if f.target != self.target {
            return Err(PdceError::TargetMismatch { expected: self.target.clone(), found: f.target.clone() });
        }
        f.check_len(self.ambient.size())?;
        Ok(())
    }

    /// Restriction of an ambient function to one coset, as a function on the
    /// normalized group.
    pub fn slice(&self, f: &FunctionVector, c: usize) -> FunctionVector {
        FunctionVector {
            target: f.target.clone(),
            values: self.coset_points[c].iter().map(|&i| f.values[i].clone()).collect(),
        }
    }

    /// Inverse of `slice` over all cosets.
    pub fn assemble(&self, parts: &[FunctionVector]) -> FunctionVector {
        let mut out = FunctionVector::zero(self.target.clone(), self.ambient.size());
        for (c, p) in parts.iter().enumerate() {
            for (j, &i) in self.coset_points[c].iter().enumerate() {
                out.values[i] = p.values[j].clone();
            }
        }
        out
    }

    /// A random solution of the full equation on the ambient group, sampled
    /// independently on each coset.
    pub fn random_solution<R: rand::Rng>(&self, rng: &mut R) -> Result<FunctionVector, PdceError> {
        let m = solution_module(self, self.full())?;
        let parts: Vec<FunctionVector> = (0..self.coset_count())
            .map(|_| FunctionVector { target: self.target.clone(), values: m.random_element(rng) })
            .collect();
        Ok(self.assemble(&parts))
    }

    pub(crate) fn module_cache(&self, a: Subset) -> &OnceLock<Arc<ModuleRep>> {
        &self.modules[a.0 as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_lex_order() {
        let e = Subset::full(4);
        let s2: Vec<String> = e.subsets_of_size(2).iter().map(|s| s.to_string()).collect();
        assert_eq!(s2, ["{1,2}", "{1,3}", "{1,4}", "{2,3}", "{2,4}", "{3,4}"]);
        assert_eq!(e.subsets_of_size(0), vec![Subset::empty()]);
        assert_eq!(e.subsets_of_size(4), vec![e]);
        assert!(e.subsets_of_size(5).is_empty());
        let odd = Subset::from_indices(&[1, 3]);
        assert_eq!(odd.subsets_of_size(1), vec![Subset::from_indices(&[1]), Subset::from_indices(&[3])]);
    }

    #[test]
    fn sign_rule() {
        let b = Subset::from_indices(&[0, 2, 3]);
        assert_eq!(Subset::sign(b, Subset::from_indices(&[2, 3])), 1);
        assert_eq!(Subset::sign(b, Subset::from_indices(&[0, 3])), -1);
        assert_eq!(Subset::sign(b, Subset::from_indices(&[0, 2])), 1);
    }

    #[test]
    fn normalization_splits_cosets() {
        let g = FiniteGroup::new(vec![4]).unwrap();
        let u = Subgroup::generated(&g, &[vec![2]]).unwrap();
        let inst = Instance::new(g, vec![u.clone(), u], Target::Torus).unwrap();
        assert_eq!(inst.group().size(), 2);
        assert_eq!(inst.coset_count(), 2);
        assert_eq!(inst.coset_points(0), &[0, 2]);
        assert_eq!(inst.coset_points(1), &[1, 3]);
    }
}
