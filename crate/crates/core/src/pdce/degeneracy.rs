use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::fgab::{frac, solve, solve_torus, Subquotient};
use crate::funcspace::{FunctionVector, Target};
use crate::int::Int;
use crate::matrix::IntMatrix;
use crate::qlinalg;

use super::complex::{family_complex, family_homology_at, Reduced, ZeroSumFamily};
use super::module::solution_module;
use super::{Instance, PdceError, Subset};

/// Class of a solution in the top homology, one coordinate vector per coset.
///
/// Each coordinate corresponds to a cyclic factor of the homology: an
/// integer in `[0, d)` for a factor of order `d`, and for free factors an
/// integer (discrete targets) or a rational in `[0, 1)` (torus).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub orders: Vec<Int>,
    pub cosets: Vec<Vec<BigRational>>,
}

impl Class {
    pub fn is_zero(&self) -> bool {
        self.cosets.iter().all(|c| c.iter().all(|x| x.is_zero()))
    }

    /// Additive order of the class, if finite.
    pub fn order(&self) -> Option<Int> {
        let mut acc = Int::one();
        for c in &self.cosets {
            for (x, d) in c.iter().zip(&self.orders) {
                if x.is_zero() {
                    continue;
                }
                if d.is_zero() {
                    // free factor: finite order only for torus-valued rationals
                    let den = Int::from(x.denom().clone());
                    acc = acc.lcm(&den);
                } else {
                    let xi = Int::from(x.to_integer());
                    acc = acc.lcm(&d.div_exact(&xi.gcd(d)));
                }
            }
        }
        Some(acc)
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .cosets
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn top_subquotient(inst: &Instance) -> Result<Subquotient, PdceError> {
    Ok(family_homology_at(inst, inst.full(), inst.k())?.1)
}

fn check_solution(inst: &Instance, f: &FunctionVector) -> Result<Vec<FunctionVector>, PdceError> {
    inst.check_function(f)?;
    let m = solution_module(inst, inst.full())?;
    (0..inst.coset_count())
        .map(|c| {
            let s = inst.slice(f, c);
            if m.contains(&s.values) {
                Ok(s)
            } else {
                Err(PdceError::NotASolution(c))
            }
        })
        .collect()
}

/// Class of a solution `f` in `M_[k] / sum_i M_[k]\i` (top homology of the
/// structure complex). Zero exactly when `f` is degenerate.
pub fn class_of(inst: &Instance, f: &FunctionVector) -> Result<Class, PdceError> {
    let slices = check_solution(inst, f)?;
    let sq = top_subquotient(inst)?;
    let orders = sq.orders.clone();
    let m = solution_module(inst, inst.full())?;
    let cosets = slices
        .iter()
        .map(|s| -> Result<Vec<BigRational>, PdceError> {
            match inst.target() {
                Target::Torus => Ok((0..orders.len())
                    .map(|j| {
                        let chi = sq.generator(j);
                        let mut pairing = BigRational::zero();
                        for (c, v) in chi.iter().zip(&s.values) {
                            if !c.is_zero() {
                                pairing += c.to_rational() * v;
                            }
                        }
                        let d = &orders[j];
                        if d.is_zero() {
                            frac(&pairing)
                        } else {
                            let t = frac(&pairing) * d.to_rational();
                            debug_assert!(t.is_integer());
                            t
                        }
                    })
                    .collect()),
                Target::Rational => {
                    let coords = m.lattice().rational_coordinates(&s.values).ok_or(PdceError::NotASolution(0))?;
                    let y = sq.rational_class_of(&coords).unwrap_or_default();
                    Ok(y.into_iter()
                        .zip(&orders)
                        .map(|(v, d)| if d.is_zero() { v } else { BigRational::zero() })
                        .collect())
                }
                _ => {
                    let ints = s.integer_values().expect("discrete values are integers");
                    let coords = m.lattice().coordinates(&ints).ok_or(PdceError::NotASolution(0))?;
                    let y = sq.class_of(&coords)?;
                    Ok(y.into_iter().map(|v| BigRational::from_integer(v.to_bigint())).collect())
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Class { orders, cosets })
}

/// Decomposes a degenerate solution: `f = sum_i f_i` with `f_i` in
/// `M_[k]\i`. Returns `None` when `f` is not degenerate.
pub fn is_degenerate(inst: &Instance, f: &FunctionVector) -> Result<Option<Vec<FunctionVector>>, PdceError> {
    let slices = check_solution(inst, f)?;
    let k = inst.k();
    let n = inst.group().size();
    let faces: Vec<_> = (0..k)
        .map(|i| solution_module(inst, inst.full().remove(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut parts: Vec<Vec<FunctionVector>> = vec![Vec::new(); k];
    for s in &slices {
        let local: Option<Vec<Vec<BigRational>>> = match inst.target() {
            Target::Torus => {
                let anns: Vec<IntMatrix> =
                    faces.iter().map(|m| IntMatrix::from_rows_with_cols(m.annihilator().basis_dense(), n)).collect();
                let rows: usize = anns.iter().map(|a| a.rows()).sum::<usize>() + n;
                let mut a = IntMatrix::zeros(rows, k * n);
                let mut r0 = 0;
                for (i, ann) in anns.iter().enumerate() {
                    a.set_block(r0, i * n, ann);
                    r0 += ann.rows();
                }
                for i in 0..k {
                    a.set_block(r0, i * n, &IntMatrix::identity(n));
                }
                let mut b = vec![BigRational::zero(); r0];
                b.extend(s.values.iter().cloned());
                solve_torus(&a, &b).map(|x| x.chunks(n).map(|c| c.to_vec()).collect())
            }
            Target::Rational => {
                let gens: Vec<IntMatrix> = faces.iter().map(|m| m.generators()).collect();
                let big = gens.iter().skip(1).fold(gens.first().cloned().unwrap_or(IntMatrix::zeros(n, 0)), |acc, g| acc.hcat(g));
                let q = qlinalg::from_int(&big);
                qlinalg::solve(&q, big.cols(), &s.values).map(|y| split_apply(&gens, &y))
            }
            Target::Mod(_) | Target::Int => {
                let modulus = match inst.target() {
                    Target::Mod(m) => Int::from(*m),
                    _ => Int::zero(),
                };
                let gens: Vec<IntMatrix> = faces.iter().map(|m| m.generators()).collect();
                let big = gens.iter().skip(1).fold(gens.first().cloned().unwrap_or(IntMatrix::zeros(n, 0)), |acc, g| acc.hcat(g));
                let b = s.integer_values().unwrap();
                solve(&big, &b, &modulus).map(|y| {
                    let yq: Vec<BigRational> = y.iter().map(|v| BigRational::from_integer(v.to_bigint())).collect();
                    split_apply(&gens, &yq)
                })
            }
        };
        let Some(local) = local else {
            return Ok(None);
        };
        for (i, v) in local.into_iter().enumerate() {
            parts[i].push(FunctionVector::new(inst.target().clone(), v)?);
        }
    }
    if k == 0 {
        return Ok(if slices.iter().all(|s| s.is_zero()) { Some(Vec::new()) } else { None });
    }
    Ok(Some(parts.iter().map(|p| inst.assemble(p)).collect()))
}

fn split_apply(gens: &[IntMatrix], y: &[BigRational]) -> Vec<Vec<BigRational>> {
    let mut off = 0;
    gens.iter()
        .map(|g| {
            let part = &y[off..off + g.cols()];
            off += g.cols();
            crate::funcspace::apply_rational(g, part)
        })
        .collect()
}

/// Which family a rational exactness check runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Solutions,
    ZeroSum,
}

/// True iff, with rational coefficients, the structure complex at `[k]`
/// has vanishing homology at positions `>= 2` (solutions) or `>= 3`
/// (zero-sum).
pub fn rational_exactness(inst: &Instance, kind: ComplexKind) -> Result<bool, PdceError> {
    let q = inst.with_target(Target::Rational)?;
    let e = q.full();
    let start = match kind {
        ComplexKind::Solutions => 2,
        ComplexKind::ZeroSum => 3,
    };
    for l in start..=e.len() {
        let g = match kind {
            ComplexKind::Solutions => family_homology_at(&q, e, l)?.0,
            ComplexKind::ZeroSum => family_homology_at(&ZeroSumFamily::new(&q), e, l)?.0,
        };
        if !g.is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The equation with only the subgroups indexed by `c`.
pub fn restrict(inst: &Instance, c: Subset) -> Result<Instance, PdceError> {
    inst.check_subset(c)?;
    let subs = c.elements().iter().map(|&i| inst.ambient_subgroups()[i].clone()).collect();
    Instance::new(inst.ambient().clone(), subs, inst.target().clone())
}

/// Checks that the family `a -> M_{a & c}` has a structure complex at `e`
/// (with `e` not inside `c`) with trivial homology at every position `>= 1`.
pub fn reduce_check(inst: &Instance, c: Subset, e: Subset) -> Result<bool, PdceError> {
    inst.check_subset(c)?;
    inst.check_subset(e)?;
    if e.is_subset_of(c) {
        return Err(PdceError::InvalidArgument(format!("{e} must not be contained in {c}")));
    }
    let fam = Reduced { inner: inst, c };
    let cx = family_complex(&fam, e)?;
    Ok(cx.homology.iter().skip(1).all(|g| g.is_trivial()))
}
