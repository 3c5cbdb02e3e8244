use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use pdce_core::fgab::{cokernel, homology, image, kernel, GroupHom, PresentedGroup};
use pdce_core::funcspace::{d0, diff, translate, FunctionVector, Target};
use pdce_core::group::{coset_representatives, subgroup_sum, FiniteGroup, Subgroup};
use pdce_core::pdce::{class_of, is_degenerate, reduce_check, solution_module, Instance, Subset};
use pdce_core::{Int, IntMatrix, Lattice};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mat(rows: usize, cols: usize, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> IntMatrix {
    let r: Vec<Vec<Int>> = (0..rows).map(|_| (0..cols).map(|_| Int::from(rng.gen_range(lo..hi))).collect()).collect();
    IntMatrix::from_rows_with_cols(r, cols)
}

fn power(m: i64, n: usize) -> PresentedGroup {
    PresentedGroup::new(n, IntMatrix::identity(n).scale(&Int::from(m))).unwrap()
}

/// All vectors of `(Z/m)^n`.
fn vectors(m: i64, n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..m).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn apply_mod(a: &IntMatrix, x: &[i64], m: i64) -> Vec<i64> {
    let xi: Vec<Int> = x.iter().map(|&v| Int::from(v)).collect();
    a.mul_vec(&xi).iter().map(|v| v.to_i64().unwrap().rem_euclid(m)).collect()
}

/// Number of elements killed by `d` in a finite group with the given invariant factors.
fn killed_by(g: &PresentedGroup, d: i64) -> i64 {
    g.invariant_factors().iter().map(|f| f.to_i64().unwrap().gcd(&d)).product()
}

fn columns_in(m: &IntMatrix, l: &Lattice) -> bool {
    (0..m.cols()).all(|j| l.contains(&m.column(j)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_image_cokernel_are_functorial(seed in any::<u64>(), m in 2i64..5, a in 1usize..4, b in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = GroupHom::new(power(m, a), power(m, b), mat(b, a, &mut rng, 0, m)).unwrap();
        let (kg, kemb) = kernel(&h);
        let (ig, iemb) = image(&h);
        let (cg, cproj) = cokernel(&h);
        prop_assert!(columns_in(&h.matrix().mul(kemb.matrix()), &h.target().relation_lattice()));
        prop_assert!(columns_in(&cproj.matrix().mul(h.matrix()), &cg.relation_lattice()));
        // the image embedding lands in the image of h
        let img = Lattice::from_columns(h.matrix()).sum(&h.target().relation_lattice());
        prop_assert!(columns_in(iemb.matrix(), &img));
        let brute_ker = vectors(m, a).iter().filter(|x| apply_mod(h.matrix(), x, m).iter().all(|&v| v == 0)).count() as i64;
        let brute_img: HashSet<Vec<i64>> = vectors(m, a).iter().map(|x| apply_mod(h.matrix(), x, m)).collect();
        prop_assert_eq!(kg.order().unwrap(), Int::from(brute_ker));
        prop_assert_eq!(ig.order().unwrap(), Int::from(brute_img.len() as i64));
        prop_assert_eq!(cg.order().unwrap() * Int::from(brute_img.len() as i64), Int::from(m.pow(b as u32)));
    }

    #[test]
    fn homology_matches_enumeration(seed in any::<u64>(), m in 2i64..5, a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = mat(c, b, &mut rng, 0, m);
        let ker: Vec<Vec<i64>> = vectors(m, b).into_iter().filter(|x| apply_mod(&g, x, m).iter().all(|&v| v == 0)).collect();
        let cols: Vec<Vec<Int>> = (0..a).map(|_| ker[rng.gen_range(0..ker.len())].iter().map(|&v| Int::from(v)).collect()).collect();
        let f = IntMatrix::from_columns(b, &cols);
        let fh = GroupHom::new(power(m, a), power(m, b), f.clone()).unwrap();
        let gh = GroupHom::new(power(m, b), power(m, c), g).unwrap();
        let (h, _) = homology(&fh, &gh).unwrap();
        let img: HashSet<Vec<i64>> = vectors(m, a).iter().map(|x| apply_mod(&f, x, m)).collect();
        for d in 1..=m {
            let count = ker.iter().filter(|x| img.contains(&x.iter().map(|v| (v * d).rem_euclid(m)).collect::<Vec<_>>())).count();
            prop_assert_eq!(count as i64, killed_by(&h, d) * img.len() as i64, "d = {}", d);
        }
    }

    #[test]
    fn invariant_factors_ignore_presentation(seed in any::<u64>(), n in 1usize..5, r in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rel = mat(n, r, &mut rng, -5, 6);
        let g = PresentedGroup::new(n, rel.clone()).unwrap();
        // random unimodular changes of generators and of relators
        let mut p = IntMatrix::identity(n);
        let mut q = IntMatrix::identity(r);
        for _ in 0..8 {
            if n > 1 {
                let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if i != j {
                    let mut e = IntMatrix::identity(n);
                    e[(i, j)] = Int::from(rng.gen_range(-3i64..4));
                    p = e.mul(&p);
                }
            }
            if r > 1 {
                let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
                if i != j {
                    let mut e = IntMatrix::identity(r);
                    e[(i, j)] = Int::from(rng.gen_range(-3i64..4));
                    q = q.mul(&e);
                }
            }
        }
        let h = PresentedGroup::new(n, p.mul(&rel).mul(&q)).unwrap();
        prop_assert_eq!(g.invariant_factors(), h.invariant_factors());
        prop_assert!(g.is_isomorphic(&h));
    }
}

fn small_group(rng: &mut ChaCha8Rng) -> FiniteGroup {
    let shapes: [&[u64]; 12] = [&[2], &[5], &[6], &[8], &[12], &[2, 2], &[2, 4], &[3, 3], &[2, 6], &[4, 4], &[2, 2, 2], &[2, 2, 4]];
    FiniteGroup::new(shapes[rng.gen_range(0..shapes.len())].to_vec()).unwrap()
}

fn random_subgroup(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Subgroup {
    let n = rng.gen_range(0..=2);
    let gens: Vec<Vec<i64>> = (0..n).map(|_| g.orders().iter().map(|&o| rng.gen_range(0..o as i64)).collect()).collect();
    Subgroup::generated(g, &gens).unwrap()
}

fn random_element(g: &FiniteGroup, rng: &mut ChaCha8Rng) -> Vec<u64> {
    g.orders().iter().map(|&o| rng.gen_range(0..o)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_generators_are_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = small_group(&mut rng);
        let a = random_subgroup(&g, &mut rng);
        let gens: Vec<Vec<i64>> = a.canonical_generators().iter().map(|x| x.iter().map(|&v| v as i64).collect()).collect();
        let b = Subgroup::generated(&g, &gens).unwrap();
        prop_assert_eq!(b.canonical_generators(), a.canonical_generators());
        prop_assert_eq!(&b, &a);
        prop_assert_eq!(g.size() % a.order(), 0);
    }

    #[test]
    fn sum_and_intersection_orders(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = small_group(&mut rng);
        let a = random_subgroup(&g, &mut rng);
        let b = random_subgroup(&g, &mut rng);
        let sa: HashSet<usize> = a.elements().into_iter().collect();
        let meet = b.elements().into_iter().filter(|x| sa.contains(x)).count();
        let sum = subgroup_sum(&[a.clone(), b.clone()]).unwrap();
        prop_assert_eq!(sum.order() * meet, a.order() * b.order());
        prop_assert_eq!(a.elements().len(), a.order());
    }

    #[test]
    fn coset_representatives_partition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = small_group(&mut rng);
        let a = random_subgroup(&g, &mut rng);
        let reps = coset_representatives(&a);
        prop_assert_eq!(reps.len() * a.order(), g.size());
        for z in 0..g.size() {
            let hits = reps.iter().filter(|&&r| a.contains(&g.element(g.sub_idx(z, r)))).count();
            prop_assert_eq!(hits, 1);
        }
    }

    #[test]
    fn difference_cocycle_and_commutation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = small_group(&mut rng);
        let (u, v) = (random_element(&g, &mut rng), random_element(&g, &mut rng));
        let lhs = diff(&g, &g.add(&u, &v));
        let rhs = diff(&g, &u).add(&translate(&g, &u).mul(&diff(&g, &v)));
        prop_assert_eq!(lhs, rhs);
        let (tu, tv, du, dv) = (translate(&g, &u), translate(&g, &v), diff(&g, &u), diff(&g, &v));
        prop_assert_eq!(tu.mul(&tv), tv.mul(&tu));
        prop_assert_eq!(du.mul(&dv), dv.mul(&du));
        prop_assert_eq!(tu.mul(&dv), dv.mul(&tu));
        // translations are permutations, differences have zero column sums
        for j in 0..g.size() {
            let col = tu.column(j);
            prop_assert_eq!(col.iter().filter(|x| !x.is_zero()).count(), 1);
            prop_assert!(du.column(j).iter().fold(Int::zero(), |s, x| s + x.clone()).is_zero());
        }
    }
}

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn all_functions(target: &Target, values: &[BigRational], n: usize) -> Vec<FunctionVector> {
    let mut out: Vec<Vec<BigRational>> = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| values.iter().map(move |x| [v.clone(), vec![x.clone()]].concat())).collect();
    }
    out.into_iter().map(|v| FunctionVector::new(target.clone(), v).unwrap()).collect()
}

#[test]
fn d0_is_a_metric() {
    let cases = [
        (Target::Torus, vec![r(0, 1), r(1, 4), r(1, 2), r(3, 4)], 2),
        (Target::Torus, vec![r(0, 1), r(1, 3), r(1, 2)], 3),
        (Target::Mod(3), vec![r(0, 1), r(1, 1), r(2, 1)], 3),
        (Target::Int, vec![r(-1, 1), r(0, 1), r(2, 1)], 3),
        (Target::Rational, vec![r(0, 1), r(1, 3), r(5, 2)], 2),
        (Target::Mod(2), vec![r(0, 1), r(1, 1)], 4),
    ];
    for (t, vals, n) in cases {
        let fs = all_functions(&t, &vals, n);
        let d: Vec<Vec<BigRational>> = fs.iter().map(|f| fs.iter().map(|g| d0(f, g)).collect()).collect();
        for i in 0..fs.len() {
            for j in 0..fs.len() {
                assert_eq!(d[i][j], d[j][i], "{t}: symmetry");
                assert_eq!(d[i][j] == r(0, 1), i == j, "{t}: identity of indiscernibles");
                for k in 0..fs.len() {
                    assert!(d[i][k] <= &d[i][j] + &d[j][k], "{t}: triangle inequality");
                }
            }
        }
    }
}

fn pdce_instance(rng: &mut ChaCha8Rng) -> Instance {
    let shapes: [&[u64]; 10] = [&[4], &[6], &[9], &[2, 2], &[2, 3], &[3, 3], &[2, 4], &[2, 2, 2], &[3, 9], &[3, 3, 3]];
    let g = FiniteGroup::new(shapes[rng.gen_range(0..shapes.len())].to_vec()).unwrap();
    let k = rng.gen_range(1..=3);
    let subs = (0..k)
        .map(|_| {
            let gens: Vec<Vec<i64>> = (0..rng.gen_range(1..=2))
                .map(|_| g.orders().iter().map(|&o| rng.gen_range(0..o as i64)).collect())
                .collect();
            Subgroup::generated(&g, &gens).unwrap()
        })
        .collect();
    let target = match rng.gen_range(0..5) {
        0 => Target::Mod(2),
        1 => Target::Mod(3),
        2 => Target::Int,
        3 => Target::Rational,
        _ => Target::Torus,
    };
    Instance::new(g, subs, target).unwrap()
}

fn random_subset(e: Subset, rng: &mut ChaCha8Rng) -> Subset {
    Subset(e.0 & rng.gen::<u32>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solution_modules_grow_with_the_index_set(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = pdce_instance(&mut rng);
        let e = random_subset(inst.full(), &mut rng);
        let a = random_subset(e, &mut rng);
        let (ma, me) = (solution_module(&inst, a).unwrap(), solution_module(&inst, e).unwrap());
        match inst.target() {
            Target::Torus => prop_assert!(ma.annihilator().contains_lattice(me.annihilator())),
            _ => {
                for col in ma.generators().column_vecs() {
                    let v: Vec<BigRational> = col.iter().map(|x| BigRational::from_integer(x.to_bigint())).collect();
                    prop_assert!(me.contains(&v));
                }
            }
        }
    }

    #[test]
    fn reduction_splits(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = pdce_instance(&mut rng);
        let full = inst.full();
        let out = rng.gen_range(0..inst.k());
        let c = random_subset(full.remove(out), &mut rng);
        let e = Subset(random_subset(full, &mut rng).0 | (1 << out));
        prop_assert!(reduce_check(&inst, c, e).unwrap());
    }

    #[test]
    fn witness_iff_zero_class(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = pdce_instance(&mut rng);
        let full = inst.full();
        // a random solution, sometimes forced degenerate by summing face solutions
        let f = if rng.gen_bool(0.5) {
            inst.random_solution(&mut rng).unwrap()
        } else {
            let mut acc = FunctionVector::zero(inst.target().clone(), inst.ambient().size());
            for i in 0..inst.k() {
                let m = solution_module(&inst, full.remove(i)).unwrap();
                let parts: Vec<FunctionVector> = (0..inst.coset_count())
                    .map(|_| FunctionVector { target: inst.target().clone(), values: m.random_element(&mut rng) })
                    .collect();
                acc = acc.add(&inst.assemble(&parts));
            }
            acc
        };
        let zero = class_of(&inst, &f).unwrap().is_zero();
        let w = is_degenerate(&inst, &f).unwrap();
        prop_assert_eq!(zero, w.is_some());
        if let Some(parts) = w {
            prop_assert_eq!(parts.len(), inst.k());
            let mut sum = FunctionVector::zero(inst.target().clone(), inst.ambient().size());
            for (i, p) in parts.iter().enumerate() {
                let m = solution_module(&inst, full.remove(i)).unwrap();
                for c in 0..inst.coset_count() {
                    prop_assert!(m.contains(&inst.slice(p, c).values));
                }
                sum = sum.add(p);
            }
            prop_assert_eq!(sum, f);
        }
    }
}
