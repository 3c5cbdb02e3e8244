//! Acceptance suite: one line per criterion, nonzero exit on any failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pdce_core::catalog::{self, EXAMPLES};
use pdce_core::cohom::{cohomology_bar, cohomology_cyclic, CoefModule, DEFAULT_BUDGET};
use pdce_core::fgab::{snf, PresentedGroup};
use pdce_core::funcspace::{d0, diff_tuple_rows, FunctionVector, Target};
use pdce_core::gowers::{gowers_norm, perturb, sample_rng, ComplexFunction, GowersError, Repairer};
use pdce_core::group::{is_linearly_independent, subgroup_sum, FiniteGroup, Subgroup};
use pdce_core::pdce::{
    boundary_checks, class_of, is_degenerate, rational_exactness, solution_module, structure_complex,
    zero_sum_complex, ComplexKind, Instance, ModuleRep, StructureComplex, Subset,
};
use pdce_core::{Int, IntMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

static COMPLEXES: AtomicUsize = AtomicUsize::new(0);
static COMPOSITIONS: AtomicUsize = AtomicUsize::new(0);

/// Every complex built here goes through this check; criterion 2 reports
/// the totals.
fn checked(cx: StructureComplex) -> Result<StructureComplex, String> {
    for l in 0..cx.boundaries.len() - 1 {
        let (a, b) = (&cx.boundaries[l], &cx.boundaries[l + 1]);
        if b.cols() != a.rows() || !b.mul(a).is_zero() {
            return Err(format!("d o d != 0 at position {l} of the complex at {}", cx.e));
        }
        COMPOSITIONS.fetch_add(1, Ordering::Relaxed);
    }
    COMPLEXES.fetch_add(1, Ordering::Relaxed);
    Ok(cx)
}

fn solutions_cx(inst: &Instance) -> Result<StructureComplex, String> {
    checked(structure_complex(inst, inst.full()).map_err(|e| e.to_string())?)
}

fn zero_sum_cx(inst: &Instance) -> Result<StructureComplex, String> {
    checked(zero_sum_complex(inst, inst.full()).map_err(|e| e.to_string())?)
}

fn instance(orders: &[u64], gens: &[Vec<Vec<i64>>], target: Target) -> Instance {
    let g = FiniteGroup::new(orders.to_vec()).unwrap();
    let subs = gens.iter().map(|gs| Subgroup::generated(&g, gs).unwrap()).collect();
    Instance::new(g, subs, target).unwrap()
}

fn cyc(v: &[i64]) -> Vec<Vec<i64>> {
    vec![v.to_vec()]
}

fn square_diag(n: u64, target: Target) -> Instance {
    instance(&[n, n], &[cyc(&[1, 0]), cyc(&[0, 1]), cyc(&[1, 1])], target)
}

fn cube_four(n: u64, target: Target) -> Instance {
    instance(&[n, n, n], &[cyc(&[1, 0, 0]), cyc(&[0, 1, 0]), cyc(&[0, 0, 1]), cyc(&[1, 1, 1])], target)
}

fn zmod(m: i64) -> PresentedGroup {
    PresentedGroup::from_factors(&[Int::from(m)])
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn random_element(rng: &mut ChaCha8Rng, orders: &[u64]) -> Vec<i64> {
    orders.iter().map(|&n| rng.gen_range(0..n as i64)).collect()
}

// 1
fn snf_suite() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for t in 0..1000 {
        let (r, c) = (rng.gen_range(1..=30), rng.gen_range(1..=30));
        let rows: Vec<Vec<Int>> = (0..r).map(|_| (0..c).map(|_| Int::from(rng.gen_range(-9i64..=9))).collect()).collect();
        let a = IntMatrix::from_rows_with_cols(rows, c);
        let s = snf(&a);
        ensure!(s.u.mul(&a).mul(&s.v) == s.d, "matrix {t}: U M V != D");
        ensure!(s.u.mul(&s.u_inv) == IntMatrix::identity(r), "matrix {t}: U not unimodular");
        ensure!(s.v.mul(&s.v_inv) == IntMatrix::identity(c), "matrix {t}: V not unimodular");
        for i in 0..r {
            for j in 0..c {
                ensure!(i == j || s.d[(i, j)].is_zero(), "matrix {t}: D not diagonal");
            }
        }
        let diag = s.diagonal();
        ensure!(diag.iter().all(|x| x >= &Int::zero()), "matrix {t}: negative invariant factor");
        for w in diag.windows(2) {
            let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            ensure!(ok, "matrix {t}: divisibility chain broken at {} | {}", w[0], w[1]);
        }
    }
    let el = start.elapsed();
    ensure!(el < Duration::from_secs(60), "took {el:?}");
    Ok(format!("1000 matrices in {el:.2?}"))
}

// 2 (run last)
fn boundary_suite(before: usize) -> Check {
    let cx = COMPLEXES.load(Ordering::Relaxed);
    let comp = COMPOSITIONS.load(Ordering::Relaxed);
    ensure!(cx > 0, "no complexes were built");
    let internal = boundary_checks() - before;
    ensure!(internal >= comp, "library recorded {internal} checks, expected at least {comp}");
    Ok(format!("{cx} complexes, {comp} compositions recomputed, {internal} library checks"))
}

// 3
fn all_subgroups(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Vec<Subgroup> {
    let elems: Vec<Vec<i64>> = g.elements().map(|x| x.iter().map(|&v| v as i64).collect()).collect();
    let mut seen: Vec<Subgroup> = Vec::new();
    let add = |s: Subgroup, seen: &mut Vec<Subgroup>| {
        if !seen.iter().any(|t| t.lattice().contains_lattice(s.lattice()) && s.lattice().contains_lattice(t.lattice())) {
            seen.push(s);
        }
    };
    for a in &elems {
        for b in &elems {
            add(Subgroup::generated(g, &[a.clone(), b.clone()]).unwrap(), &mut seen);
        }
        add(Subgroup::generated(g, std::slice::from_ref(a)).unwrap(), &mut seen);
    }
    if g.rank() > 2 {
        for _ in 0..200 {
            let gens: Vec<Vec<i64>> = (0..g.rank()).map(|_| elems[rng.gen_range(0..elems.len())].clone()).collect();
            add(Subgroup::generated(g, &gens).unwrap(), &mut seen);
        }
    }
    seen
}

fn exhaustive_module(inst: &Instance) -> ModuleRep {
    let g = inst.group();
    let elems: Vec<Vec<Vec<u64>>> =
        inst.subgroups().iter().map(|u| u.elements().into_iter().map(|i| g.element(i)).collect()).collect();
    let mut rows = HashSet::new();
    let mut idx = vec![0usize; elems.len()];
    loop {
        let tuple: Vec<Vec<u64>> = idx.iter().zip(&elems).map(|(&i, e)| e[i].clone()).collect();
        for r in diff_tuple_rows(g, &tuple) {
            if !r.is_zero() {
                rows.insert(r);
            }
        }
        let mut i = 0;
        while i < idx.len() {
            idx[i] += 1;
            if idx[i] < elems[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
    }
    ModuleRep::new(g.size(), inst.target().clone(), rows.into_iter().collect())
}

fn generator_sufficiency() -> Check {
    let shapes: Vec<Vec<u64>> = (1..=16u64)
        .map(|n| vec![n])
        .chain([vec![2, 2], vec![2, 4], vec![2, 6], vec![3, 3], vec![2, 8], vec![4, 4], vec![2, 2, 2], vec![2, 2, 4], vec![2, 2, 2, 2]])
        .collect();
    let targets = [Target::Mod(2), Target::Mod(3), Target::Mod(4), Target::Int, Target::Torus];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for shape in &shapes {
        let g = FiniteGroup::new(shape.clone()).unwrap();
        let subs = all_subgroups(&g, &mut rng);
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        for k in 1..=3usize {
            let total = subs.len().pow(k as u32);
            if total <= 60 {
                for t in 0..total {
                    tuples.push((0..k).map(|i| (t / subs.len().pow(i as u32)) % subs.len()).collect());
                }
            } else {
                for _ in 0..60 {
                    tuples.push((0..k).map(|_| rng.gen_range(0..subs.len())).collect());
                }
            }
        }
        for (j, t) in tuples.iter().enumerate() {
            let target = targets[(j + count) % targets.len()].clone();
            let inst = Instance::new(g.clone(), t.iter().map(|&i| subs[i].clone()).collect(), target.clone()).unwrap();
            let m = solution_module(&inst, inst.full()).map_err(|e| e.to_string())?;
            let ex = exhaustive_module(&inst);
            let same = match target {
                Target::Torus => {
                    m.annihilator().contains_lattice(ex.annihilator()) && ex.annihilator().contains_lattice(m.annihilator())
                }
                _ => m.lattice().contains_lattice(ex.lattice()) && ex.lattice().contains_lattice(m.lattice()),
            };
            ensure!(same, "group {shape:?}, subgroups {t:?}, target {target}: modules differ");
        }
        count += tuples.len();
    }
    Ok(format!("{count} instances over {} groups of order <= 16", shapes.len()))
}

// 4
fn linear_independence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut found = 0;
    let mut attempts = 0;
    while found < 50 {
        attempts += 1;
        ensure!(attempts < 100_000, "could not generate 50 instances");
        let n = rng.gen_range(2..=5u64);
        let d = rng.gen_range(1..=3usize);
        let k = rng.gen_range(2..=3usize);
        let g = FiniteGroup::new(vec![n; d]).unwrap();
        let subs: Vec<Subgroup> = (0..k)
            .map(|_| {
                let ngen = rng.gen_range(1..=2);
                let gens: Vec<Vec<i64>> = (0..ngen).map(|_| random_element(&mut rng, g.orders())).collect();
                Subgroup::generated(&g, &gens).unwrap()
            })
            .collect();
        if subs.iter().any(|s| s.is_trivial()) || !is_linearly_independent(&subs).unwrap() {
            continue;
        }
        let target = match found % 4 {
            0 => Target::Mod(rng.gen_range(2..=4)),
            1 => Target::Int,
            2 => Target::Rational,
            _ => Target::Torus,
        };
        let inst = Instance::new(g, subs, target.clone()).unwrap();
        let cx = solutions_cx(&inst)?;
        ensure!(cx.homology[k].is_trivial(), "instance {found} ({target}): top homology {}", cx.homology[k]);
        let zs = zero_sum_cx(&inst)?;
        for l in 3..=k {
            ensure!(zs.homology[l].is_trivial(), "instance {found} ({target}): zero-sum homology at {l} is {}", zs.homology[l]);
        }
        found += 1;
    }
    Ok(format!("50 instances ({attempts} draws)"))
}

// 5
fn quotient_law() -> Check {
    let three = Subset::full(3);
    for n in 2..=4u64 {
        for m in 2..=4u64 {
            let inst = square_diag(n, Target::Mod(m));
            let h = solutions_cx(&inst)?.homology[3].clone();
            let expect = zmod(num_integer::gcd(n, m) as i64);
            ensure!(h.is_isomorphic(&expect), "N = {n}, m = {m}: got {h}, expected {expect}");
        }
        let t = solutions_cx(&square_diag(n, Target::Torus))?;
        ensure!(t.e == three && t.homology[3].is_trivial(), "N = {n}, torus: got {}", t.homology[3]);
    }
    let mut times = Vec::new();
    for n in 2..=3u64 {
        let start = Instant::now();
        let h = solutions_cx(&cube_four(n, Target::Torus))?.homology[4].clone();
        ensure!(h.is_isomorphic(&zmod(n as i64)), "(Z/{n})^3, four subgroups: got {h}");
        let el = start.elapsed();
        ensure!(el < Duration::from_secs(300), "(Z/{n})^3 took {el:?}");
        times.push(format!("{el:.2?}"));
    }
    Ok(format!("9 discrete cases, 3 torus cases, cube cases in {}", times.join(" / ")))
}

// 6
fn anchor() -> Check {
    let inst = square_diag(2, Target::Mod(2));
    let full = inst.full();
    let all: Vec<Vec<u8>> = (0..16u32).map(|mask| (0..4).map(|i| ((mask >> i) & 1) as u8).collect()).collect();
    let as_q = |f: &[u8]| f.iter().map(|&v| q(v as i64)).collect::<Vec<_>>();
    // solutions by direct evaluation of d_u d_v d_w on all points
    let g = inst.ambient();
    let gens = [vec![1u64, 0], vec![0, 1], vec![1, 1]];
    let solves = |f: &[u8], idx: &[usize]| -> bool {
        (0..4).all(|z| {
            let mut acc = 0i64;
            for s in 0..(1usize << idx.len()) {
                let mut p = g.element(z);
                for (b, &i) in idx.iter().enumerate() {
                    if s & (1 << b) != 0 {
                        p = g.sub(&p, &gens[i]);
                    }
                }
                let sign = if (idx.len() - s.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
                acc += sign * f[g.index(&p)] as i64;
            }
            acc % 2 == 0
        })
    };
    let top: Vec<&Vec<u8>> = all.iter().filter(|f| solves(f, &[0, 1, 2])).collect();
    ensure!(top.len() == 16, "{} solutions by enumeration", top.len());
    let m = solution_module(&inst, full).map_err(|e| e.to_string())?;
    ensure!(m.presentation().order() == Some(Int::from(16)), "module order {:?}", m.presentation().order());
    for f in &all {
        ensure!(m.contains(&as_q(f)) == solves(f, &[0, 1, 2]), "membership differs for {f:?}");
    }
    let faces: Vec<Vec<&Vec<u8>>> = [[1, 2], [0, 2], [0, 1]].iter().map(|idx| all.iter().filter(|f| solves(f, idx)).collect()).collect();
    let mut deg = HashSet::new();
    for a in &faces[0] {
        for b in &faces[1] {
            for c in &faces[2] {
                deg.insert((0..4).map(|i| (a[i] + b[i] + c[i]) % 2).collect::<Vec<u8>>());
            }
        }
    }
    ensure!(deg.len() == 8, "degenerate submodule of order {}", deg.len());
    let h = solutions_cx(&inst)?.homology[3].clone();
    ensure!(h.is_isomorphic(&zmod(2)), "quotient {h}");
    for f in &all {
        let fv = FunctionVector::new(Target::Mod(2), as_q(f)).unwrap();
        let zero = class_of(&inst, &fv).map_err(|e| e.to_string())?.is_zero();
        ensure!(zero == deg.contains(f), "class of {f:?} disagrees with enumeration");
        ensure!(is_degenerate(&inst, &fv).map_err(|e| e.to_string())?.is_some() == zero, "witness for {f:?}");
    }
    let delta = FunctionVector::new(Target::Mod(2), vec![q(1), q(0), q(0), q(0)]).unwrap();
    ensure!(!class_of(&inst, &delta).unwrap().is_zero(), "indicator of (0,0) has zero class");
    Ok("16 solutions, 8 degenerate, quotient Z/2, indicator class nonzero".into())
}

// 7
fn cyclic_modules(n: u64) -> Vec<(String, CoefModule)> {
    let w = FiniteGroup::cyclic(n);
    let mut out = Vec::new();
    let specs: Vec<(&str, PresentedGroup, Vec<Vec<i64>>)> = vec![
        ("Z/2", zmod(2), vec![vec![1]]),
        ("Z/4", zmod(4), vec![vec![1]]),
        ("Z/4 (-1)", zmod(4), vec![vec![-1]]),
        ("Z/6", zmod(6), vec![vec![1]]),
        ("Z/6 (-1)", zmod(6), vec![vec![-1]]),
        ("Z/6 (5)", zmod(6), vec![vec![5]]),
        ("Z", PresentedGroup::free(1), vec![vec![1]]),
        ("Z (-1)", PresentedGroup::free(1), vec![vec![-1]]),
        ("Z^2", PresentedGroup::free(2), vec![vec![1, 0], vec![0, 1]]),
        ("Z^2 swap", PresentedGroup::free(2), vec![vec![0, 1], vec![1, 0]]),
        ("Z^2 rot3", PresentedGroup::free(2), vec![vec![0, -1], vec![1, -1]]),
        ("Z^2 rot4", PresentedGroup::free(2), vec![vec![0, -1], vec![1, 0]]),
        ("Z^2 rot6", PresentedGroup::free(2), vec![vec![1, -1], vec![1, 0]]),
        ("T", PresentedGroup::free(1).with_dual(true), vec![vec![1]]),
        ("T (-1)", PresentedGroup::free(1).with_dual(true), vec![vec![-1]]),
    ];
    for (name, g, a) in specs {
        let rows: Vec<&[i64]> = a.iter().map(|r| r.as_slice()).collect();
        if let Ok(m) = CoefModule::new(&w, g, vec![IntMatrix::from_i64(&rows)]) {
            out.push((name.to_string(), m));
        }
    }
    out
}

fn cohomology_oracle() -> Check {
    let mut checked = 0;
    let mut nontrivial = 0;
    for n in 1..=6u64 {
        for (name, m) in cyclic_modules(n) {
            if !m.action().iter().all(|a| a == &IntMatrix::identity(a.rows())) {
                nontrivial += 1;
            }
            let closed = cohomology_cyclic(&m, 3).map_err(|e| e.to_string())?;
            for (p, c) in closed.iter().enumerate() {
                let bar = cohomology_bar(&m, p, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                ensure!(bar.is_isomorphic(c) && bar.is_dual() == c.is_dual(), "Z/{n}, {name}, p = {p}: bar {bar}, closed form {c}");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} groups agree ({nontrivial} module/group pairs with nontrivial action)"))
}

// 8, 9
fn torus_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in 2..=5 {
        out.push(square_diag(n, Target::Torus));
        out.push(instance(&[n, n], &[cyc(&[1, 0]), cyc(&[0, 1])], Target::Torus));
        out.push(instance(&[n], &[cyc(&[1]), cyc(&[1]), cyc(&[1])], Target::Torus));
    }
    for n in 2..=3 {
        out.push(cube_four(n, Target::Torus));
    }
    out.push(instance(&[9, 9], &[cyc(&[1, 0]), cyc(&[0, 1]), cyc(&[1, 1]), cyc(&[1, 2])], Target::Torus));
    out.push(instance(&[4, 4], &[cyc(&[1, 0]), cyc(&[0, 1]), cyc(&[1, 1]), cyc(&[1, 3])], Target::Torus));
    out.push(instance(&[6], &[cyc(&[2]), cyc(&[3])], Target::Torus));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let shapes: [&[u64]; 7] = [&[6], &[8], &[2, 4], &[3, 3], &[2, 2, 2], &[4, 4], &[3, 9]];
    while out.len() < 40 {
        let shape = shapes[rng.gen_range(0..shapes.len())];
        let g = FiniteGroup::new(shape.to_vec()).unwrap();
        let k = rng.gen_range(2..=4usize);
        let subs: Vec<Subgroup> = (0..k)
            .map(|_| Subgroup::generated(&g, &[random_element(&mut rng, shape)]).unwrap())
            .collect();
        if subs.iter().any(|s| s.is_trivial()) || subgroup_sum(&subs).unwrap().order() != g.size() {
            continue;
        }
        out.push(Instance::new(g, subs, Target::Torus).unwrap());
    }
    out
}

fn shape(inst: &Instance) -> String {
    format!("{:?} with {} subgroups", inst.ambient().orders(), inst.k())
}

fn finiteness(corpus: &[Instance]) -> Check {
    for inst in corpus {
        ensure!(inst.coset_count() == 1 && inst.k() <= 4 && inst.ambient().size() <= 81, "corpus instance out of range");
        let cx = solutions_cx(inst)?;
        for l in 2..cx.homology.len() {
            ensure!(cx.homology[l].free_rank() == 0, "{}: solutions at {l} have free rank", shape(inst));
        }
        let zs = zero_sum_cx(inst)?;
        for l in 3..zs.homology.len() {
            ensure!(zs.homology[l].free_rank() == 0, "{}: zero-sum at {l} has free rank", shape(inst));
        }
    }
    Ok(format!("{} torus instances", corpus.len()))
}

fn rational_exact(corpus: &[Instance]) -> Check {
    for inst in corpus {
        let r = inst.with_target(Target::Rational).unwrap();
        for kind in [ComplexKind::Solutions, ComplexKind::ZeroSum] {
            ensure!(rational_exactness(&r, kind).map_err(|e| e.to_string())?, "{}: {kind:?} not exact", shape(inst));
        }
    }
    Ok(format!("{} rational instances, both complexes", corpus.len()))
}

// 10
fn extremality(corpus: &[Instance]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0f64;
    for i in 0..20 {
        let inst = &corpus[(i * 7) % corpus.len()];
        let f = inst.random_solution(&mut rng).map_err(|e| e.to_string())?;
        let n = gowers_norm(inst.ambient(), inst.ambient_subgroups(), &ComplexFunction::from_phases(&f)).map_err(|e| e.to_string())?;
        worst = worst.max((n - 1.0).abs());
        ensure!((n - 1.0).abs() < 1e-10, "{}: norm {n}", shape(inst));
    }
    for n in 1..=16u64 {
        let g = FiniteGroup::cyclic(n);
        let mut v = vec![Complex64::zero(); n as usize];
        v[0] = Complex64::one();
        let norm = gowers_norm(&g, &[Subgroup::whole(&g)], &ComplexFunction::new(v).unwrap()).map_err(|e| e.to_string())?;
        ensure!((norm - 1.0 / n as f64).abs() < 1e-12, "delta on Z/{n}: {norm}");
    }
    Ok(format!("20 solutions (max |norm - 1| = {worst:.1e}), delta on Z/N for N <= 16"))
}

// 11
fn repair_suite(corpus: &[Instance]) -> Check {
    let fracs = [(1i64, 2i64), (1, 4), (1, 16), (3, 4), (99, 100)];
    let per_frac = 24;
    let mut total = 0;
    let picks: Vec<&Instance> = corpus.iter().step_by(4).collect();
    for (ii, inst) in picks.iter().enumerate() {
        let rep = Repairer::new(inst).map_err(|e| e.to_string())?;
        let m = solution_module(inst, inst.full()).map_err(|e| e.to_string())?;
        for (di, &(a, b)) in fracs.iter().enumerate() {
            let delta = rep.margin() * BigRational::new(a.into(), b.into());
            for s in 0..per_frac {
                let mut rng = sample_rng(ii as u64, di, s);
                let exact = inst.random_solution(&mut rng).map_err(|e| e.to_string())?;
                let f = perturb(&exact, &delta, &mut rng);
                let r = match rep.repair(&f) {
                    Ok(r) => r,
                    Err(GowersError::RoundingAmbiguous(row)) => {
                        return Err(format!("{}: ambiguous rounding (row {row}) at {a}/{b} of the margin", shape(inst)))
                    }
                    Err(e) => return Err(e.to_string()),
                };
                ensure!((0..inst.coset_count()).all(|c| m.contains(&inst.slice(&r.g, c).values)), "{}: g not a solution", shape(inst));
                ensure!(d0(&f, &r.g) == r.distance, "{}: reported distance differs from d0", shape(inst));
                ensure!(r.distance <= &delta * q(2), "{}: d0 = {} > 2 delta at {a}/{b} of the margin", shape(inst), r.distance);
                total += 1;
            }
        }
    }
    Ok(format!("{} instances, {} samples each, {total} repairs", picks.len(), fracs.len() * per_frac))
}

// 12
fn catalog_suite() -> Check {
    let mut lines = Vec::new();
    for name in EXAMPLES {
        let n = catalog::default_n(name);
        let start = Instant::now();
        let r = catalog::verify(name, n).map_err(|e| e.to_string())?;
        let el = start.elapsed();
        ensure!(r.passed(), "{name} (N = {n}) failed:\n{r}");
        ensure!(el < Duration::from_secs(30), "{name} took {el:?}");
        lines.push(format!("{name} {el:.1?}"));
    }
    Ok(lines.join(", "))
}

fn run(f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    (r, start.elapsed())
}

fn main() {
    let before = boundary_checks();
    let corpus = torus_corpus();
    let mut results: Vec<(usize, &str, Check, Duration)> = Vec::new();
    let mut record = |n: usize, title: &'static str, f: &dyn Fn() -> Check| {
        let (r, el) = run(f);
        eprintln!("criterion {n} done in {el:.2?}");
        results.push((n, title, r, el));
    };
    record(1, "SNF on random matrices", &snf_suite);
    record(3, "generator tuples suffice", &generator_sufficiency);
    record(4, "linearly independent subgroups", &linear_independence);
    record(5, "quotient law", &quotient_law);
    record(6, "brute-force anchor", &anchor);
    record(7, "cohomology oracle", &cohomology_oracle);
    record(8, "no free homology on the torus corpus", &|| finiteness(&corpus));
    record(9, "rational exactness", &|| rational_exact(&corpus));
    record(10, "Gowers extremality", &|| extremality(&corpus));
    record(11, "repair below the margin", &|| repair_suite(&corpus));
    record(12, "example catalog", &catalog_suite);
    record(2, "boundary maps compose to zero", &|| boundary_suite(before));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, title, r, el) in &results {
        match r {
            Ok(detail) => println!("[PASS] criterion {n}: {title} ({detail}; {el:.2?})"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {title}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
