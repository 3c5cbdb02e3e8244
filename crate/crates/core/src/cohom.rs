//! Cohomology of finite abelian groups `W` with coefficients in finitely
//! generated modules, through the inhomogeneous bar complex, plus the
//! closed form for cyclic groups.

use thiserror::Error;

use crate::fgab::{homology_unchecked, PresentedGroup};
use crate::group::FiniteGroup;
use crate::int::Int;
use crate::lattice::Lattice;
use crate::matrix::IntMatrix;

/// Default cap on the number of rows of a coboundary matrix.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomError {
    #[error("coboundary needs {needed} rows, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("expected {expected} action matrices, got {found}")]
    ActionCount { expected: usize, found: usize },
    #[error("action of generator {0} is not a square matrix on the module generators")]
    ActionShape(usize),
    #[error("action of generator {0} does not preserve the relations")]
    ActionNotWellDefined(usize),
    #[error("action of generator {0} does not have order dividing {1}")]
    ActionOrder(usize, u64),
    #[error("actions of generators {0} and {1} do not commute")]
    ActionNotCommuting(usize, usize),
    #[error("coboundaries do not compose to zero in degree {0}")]
    NotAComplex(usize),
}

/// A `W`-module given by a presented group and one matrix per generator
/// of `W` acting on the module generators.
///
/// For a dual-flagged group (a compact module such as `T`) the matrices
/// describe the action on the compact module; its dual carries the
/// transposed action.
#[derive(Clone, Debug)]
pub struct CoefModule {
    group: PresentedGroup,
    w: FiniteGroup,
    action: Vec<IntMatrix>,
}

fn in_relations(rel: &Lattice, m: &IntMatrix) -> bool {
    (0..m.cols()).all(|j| rel.contains(&m.column(j)))
}

fn power(a: &IntMatrix, k: u64) -> IntMatrix {
    let mut out = IntMatrix::identity(a.rows());
    for _ in 0..k {
        out = out.mul(a);
    }
    out
}

impl CoefModule {
    pub fn new(w: &FiniteGroup, group: PresentedGroup, action: Vec<IntMatrix>) -> Result<CoefModule, CohomError> {
        if action.len() != w.rank() {
            return Err(CohomError::ActionCount { expected: w.rank(), found: action.len() });
        }
        let n = group.n_gens();
        let rel = group.relation_lattice();
        let dual_side: Vec<IntMatrix> =
            action.iter().map(|a| if group.is_dual() { a.transpose() } else { a.clone() }).collect();
        for (j, a) in dual_side.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(CohomError::ActionShape(j));
            }
            if !in_relations(&rel, &a.mul(group.relations())) {
                return Err(CohomError::ActionNotWellDefined(j));
            }
            let ord = w.orders()[j];
            if !in_relations(&rel, &power(a, ord).sub(&IntMatrix::identity(n))) {
                return Err(CohomError::ActionOrder(j, ord));
            }
        }
        for i in 0..dual_side.len() {
            for j in i + 1..dual_side.len() {
                let c = dual_side[i].mul(&dual_side[j]).sub(&dual_side[j].mul(&dual_side[i]));
                if !in_relations(&rel, &c) {
                    return Err(CohomError::ActionNotCommuting(i, j));
                }
            }
        }
        Ok(CoefModule { group, w: w.clone(), action })
    }

    /// `W` acting trivially.
    pub fn trivial(w: &FiniteGroup, group: PresentedGroup) -> CoefModule {
        let n = group.n_gens();
        CoefModule { group, w: w.clone(), action: vec![IntMatrix::identity(n); w.rank()] }
    }

    /// All functions `W -> M0` with `(w f)(x) = f(x - w)`, `M0` a trivial module.
    pub fn coinduced(w: &FiniteGroup, base: &PresentedGroup) -> CoefModule {
        let size = w.size();
        let n0 = base.n_gens();
        let group = PresentedGroup::direct_sum(&vec![base.clone(); size]);
        let action = (0..w.rank())
            .map(|j| {
                let mut g = vec![0u64; w.rank()];
                g[j] = 1;
                let mut a = IntMatrix::zeros(size * n0, size * n0);
                for x in 0..size {
                    // value at x moves to x + g
                    let y = w.index(&w.add(&w.element(x), &g));
                    for t in 0..n0 {
                        a[(y * n0 + t, x * n0 + t)] = Int::one();
                    }
                }
                a
            })
            .collect();
        CoefModule { group, w: w.clone(), action }
    }

    pub fn group(&self) -> &PresentedGroup {
        &self.group
    }

    pub fn action(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn acting_group(&self) -> &FiniteGroup {
        &self.w
    }

    fn element_action(&self, w: &[u64]) -> IntMatrix {
        let mut out = IntMatrix::identity(self.group.n_gens());
        for (j, &c) in w.iter().enumerate() {
            out = out.mul(&power(&self.action[j], c));
        }
        out
    }
}

fn budget_check(rows: usize, budget: usize) -> Result<(), CohomError> {
    if rows > budget {
        return Err(CohomError::BudgetExceeded { needed: rows, budget });
    }
    Ok(())
}

fn checked_pow(b: usize, e: usize) -> usize {
    (0..e).fold(1usize, |acc, _| acc.saturating_mul(b))
}

/// Matrix of `d: C^p -> C^{p+1}` on `M^{W^p}`, in module-generator
/// coordinates with tuples indexed lexicographically.
///
/// `df(z_1..z_{p+1}) = z_1 f(z_2..) + sum_{i=1}^{p} (-1)^i f(.., z_i + z_{i+1}, ..)
/// + (-1)^{p+1} f(z_1..z_p)`.
pub fn bar_coboundary(p: usize, module: &CoefModule, budget: usize) -> Result<IntMatrix, CohomError> {
    let w = &module.w;
    let size = w.size();
    let n = module.group.n_gens();
    let rows = checked_pow(size, p + 1).saturating_mul(n);
    budget_check(rows, budget)?;
    let cols = checked_pow(size, p) * n;
    let acts: Vec<IntMatrix> = w.elements().map(|z| module.element_action(&z)).collect();
    let mut d = IntMatrix::zeros(rows, cols);
    let mut tuple = vec![0usize; p + 1];
    let encode = |t: &[usize]| t.iter().fold(0usize, |acc, &x| acc * size + x);
    for r in 0..checked_pow(size, p + 1) {
        let mut x = r;
        for slot in tuple.iter_mut().rev() {
            *slot = x % size;
            x /= size;
        }
        let mut add_block = |src: usize, block: &IntMatrix| {
            for a in 0..n {
                for b in 0..n {
                    let v = &block[(a, b)];
                    if !v.is_zero() {
                        let cell = &mut d[(r * n + a, src * n + b)];
                        *cell = &*cell + v;
                    }
                }
            }
        };
        let id = IntMatrix::identity(n);
        let neg = id.scale(&Int::from(-1));
        add_block(encode(&tuple[1..]), &acts[tuple[0]]);
        for i in 0..p {
            let mut s: Vec<usize> = Vec::with_capacity(p);
            s.extend_from_slice(&tuple[..i]);
            s.push(w.add_idx(tuple[i], tuple[i + 1]));
            s.extend_from_slice(&tuple[i + 2..]);
            add_block(encode(&s), if i % 2 == 0 { &neg } else { &id });
        }
        add_block(encode(&tuple[..p]), if p.is_multiple_of(2) { &neg } else { &id });
    }
    Ok(d)
}

fn power_relations(module: &CoefModule, p: usize) -> Lattice {
    let rel = module.group.relation_lattice();
    let parts = vec![&rel; checked_pow(module.w.size(), p)];
    Lattice::direct_sum(&parts)
}

fn check_complex(d_prev: &IntMatrix, d: &IntMatrix, rel: &Lattice, p: usize) -> Result<(), CohomError> {
    if d_prev.cols() == 0 || in_relations(rel, &d.mul(d_prev)) {
        Ok(())
    } else {
        Err(CohomError::NotAComplex(p))
    }
}

/// `H^p(W, M)` from the bar complex. For dual-flagged coefficients the
/// result is the dual of the cohomology group, flagged as such.
pub fn cohomology_bar(module: &CoefModule, p: usize, budget: usize) -> Result<PresentedGroup, CohomError> {
    let n = module.group.n_gens();
    let d = bar_coboundary(p, module, budget)?;
    let d_prev = if p == 0 { IntMatrix::zeros(n, 0) } else { bar_coboundary(p - 1, module, budget)? };
    let rel_p = power_relations(module, p);
    let rel_next = power_relations(module, p + 1);
    if module.group.is_dual() {
        // the compact complex is exact on coordinates; check it there via the
        // transposes acting on the dual, which preserve the relations
        let dt = d.transpose();
        let dpt = d_prev.transpose();
        let rel_prev = if p == 0 { Lattice::zero(0) } else { power_relations(module, p - 1) };
        check_complex(&dt, &dpt, &rel_prev, p)?;
        Ok(homology_unchecked(&dt, &rel_p, &dpt, &rel_prev, true).0)
    } else {
        check_complex(&d_prev, &d, &rel_next, p)?;
        Ok(homology_unchecked(&d_prev, &rel_p, &d, &rel_next, false).0)
    }
}

/// `H^0..H^{p_max}` for `W = Z/N` from the closed form with
/// `T = 1 + A + ... + A^{N-1}`:
/// `H^0 = ker(A - 1)`, odd degrees `ker T / im(A - 1)`, even degrees
/// `ker(A - 1) / im T`.
pub fn cohomology_cyclic(module: &CoefModule, p_max: usize) -> Result<Vec<PresentedGroup>, CohomError> {
    let w = &module.w;
    if w.rank() != 1 {
        return Err(CohomError::ActionCount { expected: 1, found: w.rank() });
    }
    let nn = w.orders()[0];
    let n = module.group.n_gens();
    let rel = module.group.relation_lattice();
    let dual = module.group.is_dual();
    let a = if dual { module.action[0].transpose() } else { module.action[0].clone() };
    let a1 = a.sub(&IntMatrix::identity(n));
    let mut t = IntMatrix::zeros(n, n);
    let mut pw = IntMatrix::identity(n);
    for _ in 0..nn {
        t = t.add(&pw);
        pw = pw.mul(&a);
    }
    let zero_in = IntMatrix::zeros(n, 0);
    let zero_out = IntMatrix::zeros(0, n);
    let none = Lattice::zero(0);
    Ok((0..=p_max)
        .map(|p| {
            let (f, rf, g, rg) = match (dual, p) {
                (false, 0) => (&zero_in, &rel, &a1, &rel),
                (false, p) if p % 2 == 1 => (&a1, &rel, &t, &rel),
                (false, _) => (&t, &rel, &a1, &rel),
                (true, 0) => (&a1, &rel, &zero_out, &none),
                (true, p) if p % 2 == 1 => (&t, &rel, &a1, &rel),
                (true, _) => (&a1, &rel, &t, &rel),
            };
            homology_unchecked(f, rf, g, rg, dual).0
        })
        .collect())
}
