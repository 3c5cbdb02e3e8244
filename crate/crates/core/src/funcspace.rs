//! Functions on a finite abelian group with values in `Z/m`, `Z`, `Q` or
//! `T = Q/Z`, and the difference operators acting on them.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fgab::frac;
use crate::group::{coset_representatives, FiniteGroup, Subgroup};
use crate::int::Int;
use crate::lattice::SparseVec;
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    Mod(u64),
    Int,
    Rational,
    Torus,
}

impl Target {
    pub fn is_discrete(&self) -> bool {
        !matches!(self, Target::Torus)
    }

    /// Canonical representative of `v` in the target, or `None` if `v` is
    /// not an element (a non-integer for `Z` or `Z/m`).
    pub fn normalize(&self, v: &BigRational) -> Option<BigRational> {
        match self {
            Target::Mod(m) => {
                if !v.is_integer() {
                    return None;
                }
                let m = BigInt::from(*m);
                let r = ((v.to_integer() % &m) + &m) % &m;
                Some(BigRational::from_integer(r))
            }
            Target::Int => v.is_integer().then(|| v.clone()),
            Target::Rational => Some(v.clone()),
            Target::Torus => Some(frac(v)),
        }
    }

    /// Distance between two target values: circle distance for `T` and
    /// `Z/m` (after dividing by `m`), `min(|a - b|, 1)` for `Z` and `Q`.
    pub fn distance(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let one = BigRational::one();
        match self {
            Target::Torus | Target::Mod(_) => {
                let scale = match self {
                    Target::Mod(m) => BigRational::from_integer(BigInt::from(*m)),
                    _ => one.clone(),
                };
                let t = frac(&((a - b) / scale));
                let s = &one - &t;
                if t < s {
                    t
                } else {
                    s
                }
            }
            Target::Int | Target::Rational => {
                let d = (a - b).abs();
                if d < one {
                    d
                } else {
                    one
                }
            }
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Mod(m) => write!(f, "Z/{m}"),
            Target::Int => write!(f, "Z"),
            Target::Rational => write!(f, "Q"),
            Target::Torus => write!(f, "T"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncError {
    #[error("value at position {index} is not an element of {target}")]
    NotInTarget { index: usize, target: String },
    #[error("function has {found} values, group has {expected} elements")]
    LengthMismatch { expected: usize, found: usize },
    #[error("modulus must be at least 2")]
    BadModulus,
}

/// Values indexed by the lexicographic element order of the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionVector {
    pub target: Target,
    pub values: Vec<BigRational>,
}

impl FunctionVector {
    pub fn new(target: Target, values: Vec<BigRational>) -> Result<FunctionVector, FuncError> {
        if let Target::Mod(m) = target {
            if m < 2 {
                return Err(FuncError::BadModulus);
            }
        }
        let values = values
            .iter()
            .enumerate()
            .map(|(index, v)| target.normalize(v).ok_or(FuncError::NotInTarget { index, target: target.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FunctionVector { target, values })
    }

    pub fn zero(target: Target, n: usize) -> FunctionVector {
        FunctionVector { target, values: vec![BigRational::zero(); n] }
    }

    pub fn from_fn(target: Target, group: &FiniteGroup, f: impl Fn(&[u64]) -> BigRational) -> FunctionVector {
        let values = group.elements().map(|x| f(&x)).collect();
        FunctionVector::new(target, values).expect("generated values must lie in the target")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_len(&self, n: usize) -> Result<(), FuncError> {
        if self.values.len() != n {
            return Err(FuncError::LengthMismatch { expected: n, found: self.values.len() });
        }
        Ok(())
    }

    /// Integer lifts of the values (discrete targets only).
    pub fn integer_values(&self) -> Option<Vec<Int>> {
        self.values.iter().map(|v| v.is_integer().then(|| Int::from(v.to_integer()))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Applies an integer operator and reduces into the target.
    pub fn apply(&self, op: &IntMatrix) -> FunctionVector {
        let vals = apply_rational(op, &self.values);
        FunctionVector::new(self.target.clone(), vals).unwrap()
    }

    pub fn add(&self, other: &FunctionVector) -> FunctionVector {
        let vals = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        FunctionVector::new(self.target.clone(), vals).unwrap()
    }

    pub fn sub(&self, other: &FunctionVector) -> FunctionVector {
        let vals = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        FunctionVector::new(self.target.clone(), vals).unwrap()
    }
}

pub fn apply_rational(op: &IntMatrix, v: &[BigRational]) -> Vec<BigRational> {
    assert_eq!(op.cols(), v.len());
    (0..op.rows())
        .map(|i| {
            let mut acc = BigRational::zero();
            for (a, b) in op.row(i).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a.to_rational() * b;
                }
            }
            acc
        })
        .collect()
}

/// `(R_u f)(z) = f(z - u)` as a permutation matrix.
pub fn translate(group: &FiniteGroup, u: &[u64]) -> IntMatrix {
    let n = group.size();
    let mut m = IntMatrix::zeros(n, n);
    for z in 0..n {
        let src = group.index(&group.sub(&group.element(z), u));
        m[(z, src)] = Int::one();
    }
    m
}

/// `d_u = R_u - I`
pub fn diff(group: &FiniteGroup, u: &[u64]) -> IntMatrix {
    translate(group, u).sub(&IntMatrix::identity(group.size()))
}

/// Rows of `d_{g_1} ... d_{g_l}` as sparse vectors, expanded as a signed
/// sum of translations.
pub fn diff_tuple_rows(group: &FiniteGroup, gs: &[Vec<u64>]) -> Vec<SparseVec> {
    let l = gs.len();
    // shifts: (sum over subset, sign)
    let mut shifts: Vec<(Vec<u64>, i64)> = Vec::with_capacity(1 << l);
    for mask in 0u32..(1u32 << l) {
        let mut s = group.zero();
        for (i, g) in gs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = group.add(&s, g);
            }
        }
        let sign = if (l - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
        shifts.push((s, sign));
    }
    (0..group.size())
        .map(|z| {
            let x = group.element(z);
            let mut acc: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
            for (s, sign) in &shifts {
                *acc.entry(group.index(&group.sub(&x, s))).or_insert(0) += sign;
            }
            SparseVec::from_pairs(acc.into_iter().map(|(i, v)| (i, Int::from(v))).collect())
        })
        .collect()
}

pub fn diff_tuple(group: &FiniteGroup, gs: &[Vec<u64>]) -> IntMatrix {
    let n = group.size();
    IntMatrix::from_rows_with_cols(diff_tuple_rows(group, gs).iter().map(|r| r.to_dense(n)).collect(), n)
}

/// Indicator functions of the cosets of `u`: a basis of the `u`-invariant functions.
pub fn invariant_subspace(u: &Subgroup) -> Vec<Vec<Int>> {
    let g = u.group();
    let elems: Vec<Vec<u64>> = u.elements().into_iter().map(|i| g.element(i)).collect();
    coset_representatives(u)
        .into_iter()
        .map(|r| {
            let mut v = vec![Int::zero(); g.size()];
            let x = g.element(r);
            for e in &elems {
                v[g.index(&g.add(&x, e))] = Int::one();
            }
            v
        })
        .collect()
}

/// `d_0(f, g) = inf { eps > 0 : #{ z : rho(f(z), g(z)) > eps } / n < eps }`.
pub fn d0(f: &FunctionVector, g: &FunctionVector) -> BigRational {
    assert_eq!(f.len(), g.len());
    let dist: Vec<BigRational> = f.values.iter().zip(&g.values).map(|(a, b)| f.target.distance(a, b)).collect();
    d0_from_distances(dist)
}

/// The infimum above for a list of distances. It is attained at a value in
/// `{0} U {rho values} U {j / n}`.
pub fn d0_from_distances(mut dist: Vec<BigRational>) -> BigRational {
    let n = dist.len();
    if n == 0 {
        return BigRational::zero();
    }
    dist.sort();
    let nr = BigRational::from_integer(BigInt::from(n));
    // count of entries strictly greater than c
    let count_above = |c: &BigRational| -> usize { n - dist.partition_point(|x| x <= c) };
    let mut candidates: Vec<BigRational> = dist.clone();
    candidates.extend((0..=n).map(|j| BigRational::new(BigInt::from(j), BigInt::from(n))));
    candidates.sort();
    candidates.dedup();
    // F(c) = count/n is right-continuous and non-increasing; the infimum of
    // {eps : F(eps) < eps} equals the least candidate c with F(c) <= c.
    for c in candidates {
        let fc = BigRational::from_integer(BigInt::from(count_above(&c))) / &nr;
        if fc <= c {
            return c;
        }
    }
    BigRational::one()
}
