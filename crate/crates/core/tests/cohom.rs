use std::time::Instant;

use pdce_core::cohom::*;
use pdce_core::fgab::PresentedGroup;
use pdce_core::group::FiniteGroup;
use pdce_core::{Int, IntMatrix};

fn zmod(m: i64) -> PresentedGroup {
    PresentedGroup::from_factors(&[Int::from(m)])
}

/// Coefficient modules for `Z/N` with every action we know to be valid.
fn cyclic_modules(n: u64) -> Vec<(String, CoefModule)> {
    let w = FiniteGroup::cyclic(n);
    let mut out = Vec::new();
    let mut push = |name: &str, g: PresentedGroup, a: &[&[i64]]| {
        if let Ok(m) = CoefModule::new(&w, g, vec![IntMatrix::from_i64(a)]) {
            out.push((name.to_string(), m));
        }
    };
    push("Z/2", zmod(2), &[&[1]]);
    push("Z/4", zmod(4), &[&[1]]);
    push("Z/4 (-1)", zmod(4), &[&[-1]]);
    push("Z/6", zmod(6), &[&[1]]);
    push("Z/6 (-1)", zmod(6), &[&[-1]]);
    push("Z", PresentedGroup::free(1), &[&[1]]);
    push("Z (-1)", PresentedGroup::free(1), &[&[-1]]);
    push("Z^2", PresentedGroup::free(2), &[&[1, 0], &[0, 1]]);
    push("Z^2 swap", PresentedGroup::free(2), &[&[0, 1], &[1, 0]]);
    push("Z^2 rot3", PresentedGroup::free(2), &[&[0, -1], &[1, -1]]);
    push("Z^2 rot4", PresentedGroup::free(2), &[&[0, -1], &[1, 0]]);
    push("Z^2 rot6", PresentedGroup::free(2), &[&[1, -1], &[1, 0]]);
    push("T", PresentedGroup::free(1).with_dual(true), &[&[1]]);
    push("T (-1)", PresentedGroup::free(1).with_dual(true), &[&[-1]]);
    push("T^2 rot3", PresentedGroup::free(2).with_dual(true), &[&[0, -1], &[1, -1]]);
    out
}

#[test]
fn bar_matches_cyclic_closed_form() {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=6u64 {
        for (name, m) in cyclic_modules(n) {
            let closed = cohomology_cyclic(&m, 3).unwrap();
            for (p, c) in closed.iter().enumerate() {
                let bar = cohomology_bar(&m, p, DEFAULT_BUDGET).unwrap();
                assert!(bar.is_isomorphic(c), "Z/{n}, {name}, p = {p}: bar {bar}, closed {c}");
                checked += 1;
            }
        }
    }
    assert!(checked > 200);
    eprintln!("{checked} groups in {:?}", start.elapsed());
}

#[test]
fn known_values() {
    for n in 2..=6u64 {
        let w = FiniteGroup::cyclic(n);
        let t = CoefModule::trivial(&w, PresentedGroup::free(1).with_dual(true));
        let h1 = cohomology_bar(&t, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(h1.invariant_factors(), &[Int::from(n)]);
        assert!(h1.is_dual());
        let z = CoefModule::trivial(&w, PresentedGroup::free(1));
        assert_eq!(cohomology_bar(&z, 2, DEFAULT_BUDGET).unwrap().invariant_factors(), &[Int::from(n)]);
        assert_eq!(cohomology_bar(&z, 0, DEFAULT_BUDGET).unwrap().to_string(), "Z");
    }
}

#[test]
fn coinduced_modules_are_acyclic() {
    let groups = [vec![2], vec![3], vec![4], vec![2, 2]];
    for orders in groups {
        let w = FiniteGroup::new(orders.clone()).unwrap();
        for base in [PresentedGroup::free(1), zmod(2), zmod(3)] {
            let m = CoefModule::coinduced(&w, &base);
            for p in 1..=2 {
                let h = cohomology_bar(&m, p, DEFAULT_BUDGET).unwrap();
                assert!(h.is_trivial(), "W = {orders:?}, M0 = {base}, p = {p}: {h}");
            }
            // H^0 is the diagonal copy of M0
            assert!(cohomology_bar(&m, 0, DEFAULT_BUDGET).unwrap().is_isomorphic(&base));
        }
    }
}

#[test]
fn noncyclic_group() {
    // H^1((Z/2)^2, Z/2) = Hom((Z/2)^2, Z/2)
    let w = FiniteGroup::new(vec![2, 2]).unwrap();
    let m = CoefModule::trivial(&w, zmod(2));
    let h = cohomology_bar(&m, 1, DEFAULT_BUDGET).unwrap();
    assert_eq!(h.invariant_factors(), &[Int::from(2), Int::from(2)]);
    let h2 = cohomology_bar(&m, 2, DEFAULT_BUDGET).unwrap();
    assert_eq!(h2.order(), Some(Int::from(8)));
}
