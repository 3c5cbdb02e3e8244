//! Finite abelian groups `Z/n_1 x ... x Z/n_d` and their subgroups.

use std::fmt;

use thiserror::Error;

use crate::fgab::Subquotient;
use crate::int::Int;
use crate::lattice::Lattice;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("cyclic order must be positive, got {0}")]
    InvalidOrder(u64),
    #[error("element has {found} coordinates, group has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subgroups live in different groups")]
    GroupMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    orders: Vec<u64>,
    size: usize,
}

impl FiniteGroup {
    pub fn new(orders: Vec<u64>) -> Result<FiniteGroup, GroupError> {
        if let Some(&bad) = orders.iter().find(|&&n| n == 0) {
            return Err(GroupError::InvalidOrder(bad));
        }
        let size = orders.iter().map(|&n| n as usize).product();
        Ok(FiniteGroup { orders, size })
    }

    pub fn cyclic(n: u64) -> FiniteGroup {
        FiniteGroup::new(vec![n]).unwrap()
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check(&self, x: &[i64]) -> Result<(), GroupError> {
        if x.len() != self.rank() {
            return Err(GroupError::DimensionMismatch { expected: self.rank(), found: x.len() });
        }
        Ok(())
    }

    /// Reduces integer coordinates into `[0, n_i)`.
    pub fn reduce(&self, x: &[i64]) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(&v, &n)| v.rem_euclid(n as i64) as u64).collect()
    }

    /// Lexicographic index (first coordinate most significant).
    pub fn index(&self, x: &[u64]) -> usize {
        debug_assert_eq!(x.len(), self.rank());
        let mut i = 0usize;
        for (v, n) in x.iter().zip(&self.orders) {
            i = i * (*n as usize) + (*v % *n) as usize;
        }
        i
    }

    pub fn element(&self, mut i: usize) -> Vec<u64> {
        let mut x = vec![0u64; self.rank()];
        for (k, n) in self.orders.iter().enumerate().rev() {
            x[k] = (i % *n as usize) as u64;
            i /= *n as usize;
        }
        x
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.size).map(|i| self.element(i))
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), n)| (a + b) % n).collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), n)| (a + n - b % n) % n).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.orders).map(|(a, n)| (n - a % n) % n).collect()
    }

    pub fn scale(&self, x: &[u64], k: i64) -> Vec<u64> {
        x.iter()
            .zip(&self.orders)
            .map(|(a, n)| ((*a as i128 * k as i128).rem_euclid(*n as i128)) as u64)
            .collect()
    }

    pub fn add_idx(&self, i: usize, j: usize) -> usize {
        self.index(&self.add(&self.element(i), &self.element(j)))
    }

    pub fn sub_idx(&self, i: usize, j: usize) -> usize {
        self.index(&self.sub(&self.element(i), &self.element(j)))
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    fn modulus_rows(&self) -> Vec<Vec<Int>> {
        let d = self.rank();
        (0..d)
            .map(|i| {
                let mut r = vec![Int::zero(); d];
                r[i] = Int::from(self.orders[i]);
                r
            })
            .collect()
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let p: Vec<String> = self.orders.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", p.join(" x "))
    }
}

/// A subgroup, kept as its preimage lattice in `Z^d` (which contains the
/// moduli) in canonical Hermite form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    group: FiniteGroup,
    lattice: Lattice,
    generators: Vec<Vec<u64>>,
    order: usize,
}

impl Subgroup {
    pub fn generated(group: &FiniteGroup, gens: &[Vec<i64>]) -> Result<Subgroup, GroupError> {
        for g in gens {
            group.check(g)?;
        }
        let mut rows = group.modulus_rows();
        rows.extend(gens.iter().map(|g| group.reduce(g).into_iter().map(Int::from).collect()));
        Ok(Subgroup::from_lattice(group, Lattice::from_rows(group.rank(), &rows)))
    }

    fn from_lattice(group: &FiniteGroup, lattice: Lattice) -> Subgroup {
        let index: usize = lattice.pivots().iter().map(|(_, p)| p.to_i64().unwrap() as usize).product();
        let order = group.size() / index;
        let generators = lattice
            .basis_dense()
            .iter()
            .map(|r| r.iter().zip(group.orders()).map(|(v, n)| v.mod_floor(&Int::from(*n)).to_i64().unwrap() as u64).collect::<Vec<u64>>())
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        Subgroup { group: group.clone(), lattice, generators, order }
    }

    pub fn trivial(group: &FiniteGroup) -> Subgroup {
        Subgroup::generated(group, &[]).unwrap()
    }

    pub fn whole(group: &FiniteGroup) -> Subgroup {
        let gens: Vec<Vec<i64>> = (0..group.rank())
            .map(|i| (0..group.rank()).map(|j| i64::from(i == j)).collect())
            .collect();
        Subgroup::generated(group, &gens).unwrap()
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Canonical generators: the nonzero Hermite basis rows reduced modulo the orders.
    pub fn canonical_generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        let v: Vec<Int> = x.iter().map(|&a| Int::from(a)).collect();
        self.lattice.contains(&v)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Indices of all elements, increasing.
    pub fn elements(&self) -> Vec<usize> {
        let g = &self.group;
        let mut seen = vec![false; g.size()];
        let zero = g.index(&g.zero());
        seen[zero] = true;
        let mut stack = vec![g.zero()];
        while let Some(x) = stack.pop() {
            for gen in &self.generators {
                let y = g.add(&x, gen);
                let iy = g.index(&y);
                if !seen[iy] {
                    seen[iy] = true;
                    stack.push(y);
                }
            }
        }
        (0..g.size()).filter(|&i| seen[i]).collect()
    }

    /// The subgroup as an abstract group `Z/m_1 x ... x Z/m_r`, with maps
    /// between its coordinates and those of the ambient group.
    pub fn as_group(&self) -> SubgroupChart {
        let moduli = Lattice::from_rows(self.group.rank(), &self.group.modulus_rows());
        let sq = Subquotient::new(self.lattice.clone(), &moduli);
        let orders: Vec<u64> = sq.orders.iter().map(|d| d.to_i64().unwrap() as u64).collect();
        let generators: Vec<Vec<u64>> = (0..orders.len())
            .map(|j| {
                let v = sq.generator(j);
                self.group.reduce(&v.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>())
            })
            .collect();
        SubgroupChart { ambient: self.group.clone(), group: FiniteGroup::new(orders).unwrap(), generators, sq }
    }
}

/// Identification of a subgroup with an abstract product of cyclic groups.
#[derive(Clone, Debug)]
pub struct SubgroupChart {
    pub ambient: FiniteGroup,
    pub group: FiniteGroup,
    /// Ambient images of the standard generators.
    pub generators: Vec<Vec<u64>>,
    sq: Subquotient,
}

impl SubgroupChart {
    pub fn embed(&self, x: &[u64]) -> Vec<u64> {
        let mut acc = self.ambient.zero();
        for (c, g) in x.iter().zip(&self.generators) {
            acc = self.ambient.add(&acc, &self.ambient.scale(g, *c as i64));
        }
        acc
    }

    /// Coordinates of an ambient element lying in the subgroup.
    pub fn project(&self, x: &[u64]) -> Option<Vec<u64>> {
        let v: Vec<Int> = x.iter().map(|&a| Int::from(a)).collect();
        let c = self.sq.class_of(&v).ok()?;
        Some(c.iter().map(|a| a.to_i64().unwrap() as u64).collect())
    }
}

pub fn subgroup_sum(subgroups: &[Subgroup]) -> Result<Subgroup, GroupError> {
    let Some(first) = subgroups.first() else {
        return Err(GroupError::GroupMismatch);
    };
    let g = &first.group;
    let mut lat = first.lattice.clone();
    for s in &subgroups[1..] {
        if &s.group != g {
            return Err(GroupError::GroupMismatch);
        }
        lat = lat.sum(&s.lattice);
    }
    Ok(Subgroup::from_lattice(g, lat))
}

/// `|U_1 + ... + U_k| = |U_1| ... |U_k|`
pub fn is_linearly_independent(subgroups: &[Subgroup]) -> Result<bool, GroupError> {
    if subgroups.is_empty() {
        return Ok(true);
    }
    let s = subgroup_sum(subgroups)?;
    let prod: u128 = subgroups.iter().map(|u| u.order() as u128).product();
    Ok(s.order() as u128 == prod)
}

/// Smallest-index representative of each coset, in increasing order.
pub fn coset_representatives(sub: &Subgroup) -> Vec<usize> {
    let g = &sub.group;
    let elems: Vec<Vec<u64>> = sub.elements().into_iter().map(|i| g.element(i)).collect();
    let mut covered = vec![false; g.size()];
    let mut reps = Vec::new();
    for i in 0..g.size() {
        if covered[i] {
            continue;
        }
        reps.push(i);
        let x = g.element(i);
        for u in &elems {
            covered[g.index(&g.add(&x, u))] = true;
        }
    }
    reps
}
