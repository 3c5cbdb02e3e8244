//! Directional Gowers norms, residuals of approximate torus-valued
//! solutions, and their repair onto exact solutions.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::fgab::{frac, snf, SnfResult};
use crate::funcspace::{d0, d0_from_distances, FunctionVector, Target};
use crate::group::{FiniteGroup, Subgroup};
use crate::int::Int;
use crate::matrix::IntMatrix;
use crate::pdce::{solution_module, Instance, PdceError};
use crate::qlinalg::{self, QMatrix};

/// Slack allowed on `|f(z)| <= 1`.
pub const DISK_TOLERANCE: f64 = 1e-12;
/// Default cap on the size of the product group in `residual`.
pub const DEFAULT_PRODUCT_BUDGET: usize = 1_000_000;
/// Default modulus threshold for phase extraction.
pub const DEFAULT_TAU: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GowersError {
    #[error("|f(z)| exceeds 1 at index {0}")]
    NotBounded(usize),
    #[error("function has {found} values, group has {expected} elements")]
    LengthMismatch { expected: usize, found: usize },
    #[error("subgroup {0} lives in a different group")]
    SubgroupMismatch(usize),
    #[error("at least one subgroup is required")]
    NoSubgroups,
    #[error("norm average has imaginary part {0}")]
    NotReal(f64),
    #[error("product group has {needed} elements, budget is {budget}")]
    ProductTooLarge { needed: usize, budget: usize },
    #[error("target must be T, got {0}")]
    WrongTarget(Target),
    #[error("constraint row {0} is within 1e-9 of a half-integer")]
    RoundingAmbiguous(usize),
    #[error("threshold must lie in [0, 1], got {0}")]
    BadThreshold(f64),
    #[error(transparent)]
    Pdce(#[from] PdceError),
}

/// Values in the closed unit disk, indexed like the group elements.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFunction {
    pub values: Vec<Complex64>,
}

impl ComplexFunction {
    pub fn new(values: Vec<Complex64>) -> Result<ComplexFunction, GowersError> {
        if let Some(i) = values.iter().position(|v| v.norm() > 1.0 + DISK_TOLERANCE) {
            return Err(GowersError::NotBounded(i));
        }
        Ok(ComplexFunction { values })
    }

    /// `z -> e(f(z))` for a torus-valued `f`.
    pub fn from_phases(f: &FunctionVector) -> ComplexFunction {
        ComplexFunction { values: f.values.iter().map(phase).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn phase(v: &BigRational) -> Complex64 {
    Complex64::from_polar(1.0, TAU * v.to_f64().unwrap_or(0.0))
}

fn check_subgroups(group: &FiniteGroup, subgroups: &[Subgroup]) -> Result<(), GowersError> {
    if subgroups.is_empty() {
        return Err(GowersError::NoSubgroups);
    }
    match subgroups.iter().position(|u| u.group() != group) {
        Some(i) => Err(GowersError::SubgroupMismatch(i)),
        None => Ok(()),
    }
}

fn check_len(group: &FiniteGroup, n: usize) -> Result<(), GowersError> {
    if n != group.size() {
        return Err(GowersError::LengthMismatch { expected: group.size(), found: n });
    }
    Ok(())
}

/// `||f||` along `U_1..U_k`: the `2^k`-th root of the average over `u` in
/// `U_1 x .. x U_k` and `z` of the multiplicative differences, computed by
/// differencing along `U_k` first and recursing.
pub fn gowers_norm(group: &FiniteGroup, subgroups: &[Subgroup], f: &ComplexFunction) -> Result<f64, GowersError> {
    check_subgroups(group, subgroups)?;
    check_len(group, f.len())?;
    let elems: Vec<Vec<usize>> = subgroups.iter().map(|u| u.elements()).collect();
    fn rec(g: &FiniteGroup, elems: &[Vec<usize>], f: &[Complex64]) -> Complex64 {
        let Some((us, rest)) = elems.split_last() else {
            return f.iter().sum::<Complex64>() / f.len() as f64;
        };
        let mut acc = Complex64::zero();
        let mut df = vec![Complex64::zero(); f.len()];
        for &u in us {
            for (z, slot) in df.iter_mut().enumerate() {
                *slot = f[g.sub_idx(z, u)] * f[z].conj();
            }
            acc += rec(g, rest, &df);
        }
        acc / us.len() as f64
    }
    let v = rec(group, &elems, &f.values);
    if v.im.abs() > 1e-9 {
        return Err(GowersError::NotReal(v.im));
    }
    let k = subgroups.len() as i32;
    Ok(v.re.max(0.0).powf(0.5f64.powi(k)))
}

fn common_denominator(values: &[BigRational]) -> Int {
    values.iter().fold(Int::one(), |acc, v| acc.lcm(&Int::from(v.denom().clone())))
}

/// `d_0(0, d_{u_1}..d_{u_k} f)` on the product group `U_1 x .. x U_k x Z`.
pub fn residual(
    group: &FiniteGroup,
    subgroups: &[Subgroup],
    f: &FunctionVector,
    budget: usize,
) -> Result<BigRational, GowersError> {
    if f.target != Target::Torus {
        return Err(GowersError::WrongTarget(f.target.clone()));
    }
    check_subgroups(group, subgroups)?;
    check_len(group, f.len())?;
    let needed = subgroups.iter().fold(group.size(), |acc, u| acc.saturating_mul(u.order()));
    if needed > budget {
        return Err(GowersError::ProductTooLarge { needed, budget });
    }
    let den = common_denominator(&f.values);
    let lift: Vec<Int> = f
        .values
        .iter()
        .map(|v| Int::from(v.numer().clone()) * den.div_exact(&Int::from(v.denom().clone())))
        .collect();
    let elems: Vec<Vec<usize>> = subgroups.iter().map(|u| u.elements()).collect();
    let mut dist: Vec<Int> = Vec::with_capacity(needed);
    fn rec(g: &FiniteGroup, elems: &[Vec<usize>], f: &[Int], den: &Int, out: &mut Vec<Int>) {
        let Some((us, rest)) = elems.split_first() else {
            for v in f {
                let r = v.mod_floor(den);
                let s = den - &r;
                out.push(if r < s { r } else { s });
            }
            return;
        };
        let mut df = vec![Int::zero(); f.len()];
        for &u in us {
            for (z, slot) in df.iter_mut().enumerate() {
                *slot = (&f[g.sub_idx(z, u)] - &f[z]).mod_floor(den);
            }
            rec(g, rest, &df, den, out);
        }
    }
    rec(group, &elems, &lift, &den, &mut dist);
    let d = den.to_bigint();
    Ok(d0_from_distances(dist.into_iter().map(|r| BigRational::new(r.to_bigint(), d.clone())).collect()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepairMethod {
    /// Constraint values rounded and corrected by a least-norm solve.
    Rounding,
    /// Rounding was inconsistent on some coset; Smith coordinates were
    /// rounded instead.
    Fallback,
}

#[derive(Clone, Debug)]
pub struct Repair {
    pub g: FunctionVector,
    pub method: RepairMethod,
    /// Largest circle distance `|f(z) - g(z)|`.
    pub correction_inf: BigRational,
    pub distance: BigRational,
}

/// Repairs torus-valued functions onto `M_[k]` of a fixed instance, with
/// the linear algebra shared across calls.
pub struct Repairer<'a> {
    inst: &'a Instance,
    c: IntMatrix,
    c_q: QMatrix,
    indep: Vec<usize>,
    gram_inv: QMatrix,
    margin: BigRational,
    smith: OnceLock<SnfResult>,
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn round_half_up(x: &BigRational) -> BigRational {
    (x + BigRational::new(BigInt::one(), BigInt::from(2))).floor()
}

impl<'a> Repairer<'a> {
    pub fn new(inst: &'a Instance) -> Result<Repairer<'a>, GowersError> {
        if inst.target() != &Target::Torus {
            return Err(GowersError::WrongTarget(inst.target().clone()));
        }
        let m = solution_module(inst, inst.full())?;
        let c = m.constraint_matrix();
        let c_q = qlinalg::from_int(&c);
        let indep = qlinalg::independent_rows(&c_q, c.cols());
        let ar: Vec<&Vec<BigRational>> = indep.iter().map(|&i| &c_q[i]).collect();
        let gram: QMatrix = ar.iter().map(|x| ar.iter().map(|y| dot(x, y)).collect()).collect();
        let gram_inv = qlinalg::inverse(&gram).expect("independent rows have an invertible Gram matrix");
        let row_sum = (0..c.rows())
            .map(|i| c.row(i).iter().fold(Int::zero(), |acc, v| acc + v.abs()))
            .max()
            .unwrap_or_else(Int::zero);
        let margin = if row_sum.is_zero() {
            BigRational::new(BigInt::one(), BigInt::from(2))
        } else {
            BigRational::new(BigInt::one(), (row_sum * Int::from(2)).to_bigint())
        };
        Ok(Repairer { inst, c, c_q, indep, gram_inv, margin, smith: OnceLock::new() })
    }

    /// `1 / (2 max_i sum_j |C_ij|)`: below this, coordinatewise noise cannot
    /// move any constraint value across a half-integer.
    pub fn margin(&self) -> &BigRational {
        &self.margin
    }

    pub fn constraint_matrix(&self) -> &IntMatrix {
        &self.c
    }

    fn round_coset(&self, s: &[BigRational]) -> Result<Option<Vec<BigRational>>, GowersError> {
        let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000_000));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut b = Vec::with_capacity(self.c_q.len());
        for (i, row) in self.c_q.iter().enumerate() {
            let r = dot(row, s);
            if (frac(&r) - &half).abs() < tol {
                return Err(GowersError::RoundingAmbiguous(i));
            }
            let n = round_half_up(&r);
            b.push(r - n);
        }
        let br: Vec<BigRational> = self.indep.iter().map(|&i| b[i].clone()).collect();
        let y: Vec<BigRational> = self.gram_inv.iter().map(|row| dot(row, &br)).collect();
        let mut delta = vec![BigRational::zero(); s.len()];
        for (&i, yi) in self.indep.iter().zip(&y) {
            for (dj, cij) in delta.iter_mut().zip(&self.c_q[i]) {
                if !cij.is_zero() {
                    *dj += cij * yi;
                }
            }
        }
        if self.c_q.iter().zip(&b).any(|(row, bi)| &dot(row, &delta) != bi) {
            return Ok(None);
        }
        Ok(Some(s.iter().zip(&delta).map(|(x, d)| frac(&(x - d))).collect()))
    }

    fn snap_coset(&self, s: &[BigRational]) -> Vec<BigRational> {
        let res = self.smith.get_or_init(|| snf(&self.c));
        let diag = res.diagonal();
        let mut y: Vec<BigRational> =
            (0..s.len()).map(|i| dot(&res.v_inv.row(i).iter().map(|v| v.to_rational()).collect::<Vec<_>>(), s)).collect();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_zero() {
                let dq = d.to_rational();
                y[i] = round_half_up(&(&y[i] * &dq)) / dq;
            }
        }
        (0..s.len())
            .map(|i| frac(&dot(&res.v.row(i).iter().map(|v| v.to_rational()).collect::<Vec<_>>(), &y)))
            .collect()
    }

    /// Some `g` in `M_[k]` obtained by constraint rounding; always an exact
    /// solution, and close to `f` when `f` is within the margin of one.
    pub fn repair(&self, f: &FunctionVector) -> Result<Repair, GowersError> {
        self.inst.check_function(f)?;
        let mut method = RepairMethod::Rounding;
        let mut parts = Vec::with_capacity(self.inst.coset_count());
        for c in 0..self.inst.coset_count() {
            let s = self.inst.slice(f, c);
            let g = match self.round_coset(&s.values)? {
                Some(g) => g,
                None => {
                    method = RepairMethod::Fallback;
                    self.snap_coset(&s.values)
                }
            };
            parts.push(FunctionVector { target: Target::Torus, values: g });
        }
        let g = self.inst.assemble(&parts);
        let correction_inf = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(a, b)| Target::Torus.distance(a, b))
            .max()
            .unwrap_or_else(BigRational::zero);
        let distance = d0(f, &g);
        Ok(Repair { g, method, correction_inf, distance })
    }
}

pub fn repair(inst: &Instance, f: &FunctionVector) -> Result<Repair, GowersError> {
    Repairer::new(inst)?.repair(f)
}

#[derive(Clone, Debug)]
pub struct DiskRepair {
    pub phases: FunctionVector,
    pub repair: Repair,
    pub g: ComplexFunction,
    /// `avg_z |f(z) - g(z)|`.
    pub l1: f64,
}

/// Phase of each value with modulus at least `tau` (phase 0 below it), as
/// an exact rational with denominator `2^32`.
pub fn extract_phases(f: &ComplexFunction, tau: f64) -> Result<FunctionVector, GowersError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(GowersError::BadThreshold(tau));
    }
    let scale = 1u64 << 32;
    let values = f
        .values
        .iter()
        .map(|v| {
            if v.norm() < tau {
                return BigRational::zero();
            }
            let t = (v.arg() / TAU).rem_euclid(1.0);
            let k = ((t * scale as f64).round() as u64) % scale;
            BigRational::new(BigInt::from(k), BigInt::from(scale))
        })
        .collect();
    Ok(FunctionVector { target: Target::Torus, values })
}

/// Disk-valued version: extract phases, repair them, compare in `L^1`.
pub fn repair_disk(inst: &Instance, f: &ComplexFunction, tau: f64) -> Result<DiskRepair, GowersError> {
    check_len(inst.ambient(), f.len())?;
    let phases = extract_phases(f, tau)?;
    let repair = repair(inst, &phases)?;
    let g = ComplexFunction::from_phases(&repair.g);
    let l1 = f.values.iter().zip(&g.values).map(|(a, b)| (a - b).norm()).sum::<f64>() / f.len().max(1) as f64;
    Ok(DiskRepair { phases, repair, g, l1 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub delta: BigRational,
    pub sample: usize,
    pub residual: BigRational,
    /// `None` when rounding was ambiguous.
    pub repair_d0: Option<BigRational>,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub margin: BigRational,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV with header `delta,sample,residual,repair_d0,success`; numbers
    /// with 12 decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,sample,residual,repair_d0,success\n");
        let dec = |x: &BigRational| format!("{:.12}", x.to_f64().unwrap_or(f64::NAN));
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                dec(&r.delta),
                r.sample,
                dec(&r.residual),
                r.repair_d0.as_ref().map(dec).unwrap_or_default(),
                r.success
            ));
        }
        out
    }
}

const NOISE_BITS: u32 = 20;

/// Uniform noise in `[-delta, delta]` on the grid of step `2 delta / 2^20`.
pub fn perturb<R: Rng>(f: &FunctionVector, delta: &BigRational, rng: &mut R) -> FunctionVector {
    let full = 1i64 << NOISE_BITS;
    let values = f
        .values
        .iter()
        .map(|v| {
            let k = rng.gen_range(0..=full);
            let noise = delta * BigRational::new(BigInt::from(2 * k - full), BigInt::from(full));
            frac(&(v + noise))
        })
        .collect();
    FunctionVector { target: Target::Torus, values }
}

/// Random rng stream for one sample: same `seed`, stream `(delta index, sample)`.
pub fn sample_rng(seed: u64, delta_index: usize, sample: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((delta_index as u64) << 32) | sample as u64);
    rng
}

/// For each `delta` (sorted ascending) and sample: a random exact solution,
/// perturbed by uniform noise of size `delta`, its residual, and the `d_0`
/// distance of its repair. A sample succeeds when the rounding path was
/// taken and `d_0(f, g) <= 2 delta`.
pub fn stability_sweep(
    inst: &Instance,
    deltas: &[BigRational],
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<SweepReport, GowersError> {
    let repairer = Repairer::new(inst)?;
    let mut grid = deltas.to_vec();
    grid.sort();
    let jobs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|d| (0..samples).map(move |s| (d, s))).collect();
    let two = BigRational::from_integer(BigInt::from(2));
    let rows = jobs
        .par_iter()
        .map(|&(di, s)| -> Result<SweepRow, GowersError> {
            let mut rng = sample_rng(seed, di, s);
            let delta = &grid[di];
            let exact = inst.random_solution(&mut rng)?;
            let f = perturb(&exact, delta, &mut rng);
            let res = residual(inst.ambient(), inst.ambient_subgroups(), &f, budget)?;
            let (repair_d0, success) = match repairer.repair(&f) {
                Ok(r) => {
                    let ok = r.method == RepairMethod::Rounding && r.distance <= &two * delta;
                    (Some(r.distance), ok)
                }
                Err(GowersError::RoundingAmbiguous(_)) => (None, false),
                Err(e) => return Err(e),
            };
            Ok(SweepRow { delta: delta.clone(), sample: s, residual: res, repair_d0, success })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport { margin: repairer.margin.clone(), seed, rows })
}
