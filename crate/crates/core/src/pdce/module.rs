use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::fgab::{frac, snf, PresentedGroup};
use crate::funcspace::{diff_tuple_rows, Target};
use crate::group::FiniteGroup;
use crate::int::Int;
use crate::lattice::{Lattice, SparseVec};
use crate::matrix::IntMatrix;

use super::{Instance, PdceError, Subset};

/// A submodule of `A^dim` cut out by integer linear constraints.
///
/// For discrete targets the module is `L / R` with `L` the integer
/// solutions (modulo `m` for `Z/m`) and `R = m Z^dim` (or `0`). For the
/// torus the module is the kernel of the constraints on `T^dim`, handled
/// through its dual `Z^dim / Ann` where `Ann` is the row lattice of the
/// constraints.
#[derive(Clone, Debug)]
pub struct ModuleRep {
    pub dim: usize,
    pub target: Target,
    constraints: Vec<SparseVec>,
    annihilator: Lattice,
    lattice: Option<Lattice>,
    torus_chart: OnceLock<(Vec<Int>, IntMatrix)>,
}

impl ModuleRep {
    pub fn new(dim: usize, target: Target, constraints: Vec<SparseVec>) -> ModuleRep {
        let annihilator = Lattice::from_sparse_rows(dim, constraints.clone());
        let lattice = match &target {
            Target::Torus => None,
            Target::Mod(m) => {
                let h = IntMatrix::from_rows_with_cols(annihilator.basis_dense(), dim);
                Some(Lattice::preimage(&h, &Lattice::scaled_full(h.rows(), &Int::from(*m))))
            }
            Target::Int | Target::Rational => {
                let h = IntMatrix::from_rows_with_cols(annihilator.basis_dense(), dim);
                Some(Lattice::kernel(&h))
            }
        };
        ModuleRep { dim, target, constraints, annihilator, lattice, torus_chart: OnceLock::new() }
    }

    /// The stacked constraint matrix as built (duplicates removed).
    pub fn constraint_matrix(&self) -> IntMatrix {
        let mut rows: Vec<Vec<Int>> = self.constraints.iter().map(|r| r.to_dense(self.dim)).collect();
        rows.sort();
        rows.dedup();
        IntMatrix::from_rows_with_cols(rows, self.dim)
    }

    /// Row lattice of the constraints; for the torus this is the
    /// annihilator of the module.
    pub fn annihilator(&self) -> &Lattice {
        &self.annihilator
    }

    /// `L` for discrete targets.
    pub fn lattice(&self) -> &Lattice {
        self.lattice.as_ref().expect("torus modules have no integer lattice")
    }

    /// Integer generators (columns) of the module, discrete targets only.
    pub fn generators(&self) -> IntMatrix {
        self.lattice().basis_columns()
    }

    /// Relations among the lattice basis: coordinates of `m e_j`.
    pub fn relations_in_basis(&self) -> IntMatrix {
        let l = self.lattice();
        match &self.target {
            Target::Mod(m) => {
                let cols: Vec<Vec<Int>> = (0..self.dim)
                    .map(|j| {
                        let mut v = vec![Int::zero(); self.dim];
                        v[j] = Int::from(*m);
                        l.coordinates(&v).expect("m Z^n lies in L")
                    })
                    .collect();
                IntMatrix::from_columns(l.rank(), &cols)
            }
            _ => IntMatrix::zeros(l.rank(), 0),
        }
    }

    /// The module as an abstract group. For the torus this is the discrete
    /// dual `Z^dim / Ann`, flagged as dual.
    pub fn presentation(&self) -> PresentedGroup {
        match &self.target {
            Target::Torus => {
                PresentedGroup::new(self.dim, self.annihilator.basis_columns()).unwrap().with_dual(true)
            }
            _ => PresentedGroup::new(self.lattice().rank(), self.relations_in_basis()).unwrap(),
        }
    }

    /// A random element. For the torus, free directions get values with
    /// denominator 1024 and torsion directions are uniform.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Vec<BigRational> {
        match &self.target {
            Target::Torus => {
                let (diag, v) = self.torus_chart.get_or_init(|| {
                    let h = IntMatrix::from_rows_with_cols(self.annihilator.basis_dense(), self.dim);
                    let r = snf(&h);
                    (r.diagonal(), r.v)
                });
                let y: Vec<BigRational> = (0..self.dim)
                    .map(|i| match diag.get(i) {
                        Some(d) if !d.is_zero() => {
                            let d = d.to_i64().expect("small invariant factor");
                            BigRational::new(BigInt::from(rng.gen_range(0..d)), BigInt::from(d))
                        }
                        _ => BigRational::new(BigInt::from(rng.gen_range(0..1024)), BigInt::from(1024)),
                    })
                    .collect();
                (0..self.dim)
                    .map(|i| {
                        let mut acc = BigRational::zero();
                        for (q, yv) in v.row(i).iter().zip(&y) {
                            if !q.is_zero() {
                                acc += q.to_rational() * yv;
                            }
                        }
                        frac(&acc)
                    })
                    .collect()
            }
            t => {
                let l = self.lattice();
                let coeffs: Vec<BigRational> = (0..l.rank())
                    .map(|_| match t {
                        Target::Mod(m) => BigRational::from_integer(BigInt::from(rng.gen_range(0..*m))),
                        Target::Int => BigRational::from_integer(BigInt::from(rng.gen_range(-3i64..=3))),
                        _ => BigRational::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(4)),
                    })
                    .collect();
                let mut x = vec![BigRational::zero(); self.dim];
                for (b, c) in l.basis().iter().zip(&coeffs) {
                    for (i, v) in b.idx.iter().zip(&b.val) {
                        x[*i] += v.to_rational() * c;
                    }
                }
                x.into_iter().map(|v| t.normalize(&v).unwrap()).collect()
            }
        }
    }

    pub fn contains(&self, f: &[BigRational]) -> bool {
        assert_eq!(f.len(), self.dim);
        self.annihilator.basis().iter().all(|row| {
            let mut acc = BigRational::zero();
            for (i, v) in row.idx.iter().zip(&row.val) {
                acc += v.to_rational() * &f[*i];
            }
            match &self.target {
                Target::Torus => acc.is_integer(),
                Target::Mod(m) => acc.is_integer() && Int::from(acc.to_integer()).is_multiple_of(&Int::from(*m)),
                Target::Int | Target::Rational => acc.is_zero(),
            }
        })
    }
}

fn cartesian(lists: &[&[Vec<u64>]]) -> Vec<Vec<Vec<u64>>> {
    let mut out: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::new();
        for prefix in &out {
            for g in l.iter() {
                let mut p = prefix.clone();
                p.push(g.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn build_solution_module(group: &FiniteGroup, gens: &[&[Vec<u64>]], target: &Target) -> ModuleRep {
    let mut rows = Vec::new();
    for tuple in cartesian(gens) {
        rows.extend(diff_tuple_rows(group, &tuple));
    }
    ModuleRep::new(group.size(), target.clone(), rows)
}

/// `M_e`: functions killed by `d_{g_1} ... d_{g_l}` for every tuple of
/// canonical generators, one from each `U_i`, `i` in `e`.
pub fn solution_module(inst: &Instance, e: Subset) -> Result<Arc<ModuleRep>, PdceError> {
    inst.check_subset(e)?;
    Ok(inst
        .module_cache(e)
        .get_or_init(|| {
            let gens: Vec<&[Vec<u64>]> =
                e.elements().iter().map(|&i| inst.subgroups()[i].canonical_generators()).collect();
            Arc::new(build_solution_module(inst.group(), &gens, inst.target()))
        })
        .clone())
}

/// `N_e`: tuples `(f_i)_{i in e}` with each `f_i` invariant under `U_i`
/// and `sum f_i = 0`, in concatenated coordinates.
pub fn zero_sum_module(inst: &Instance, e: Subset) -> Result<ModuleRep, PdceError> {
    inst.check_subset(e)?;
    let g = inst.group();
    let n = g.size();
    let idx = e.elements();
    let dim = idx.len() * n;
    let mut rows = Vec::new();
    for (p, &i) in idx.iter().enumerate() {
        for gen in inst.subgroups()[i].canonical_generators() {
            for r in diff_tuple_rows(g, std::slice::from_ref(gen)) {
                rows.push(SparseVec {
                    idx: r.idx.iter().map(|c| c + p * n).collect(),
                    val: r.val,
                });
            }
        }
    }
    if !idx.is_empty() {
        for z in 0..n {
            rows.push(SparseVec {
                idx: (0..idx.len()).map(|p| p * n + z).collect(),
                val: vec![Int::one(); idx.len()],
            });
        }
    }
    Ok(ModuleRep::new(dim, inst.target().clone(), rows))
}
