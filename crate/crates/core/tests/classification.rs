use std::collections::BTreeMap;

use enriques_core::cases::bundled_case;
use enriques_core::classify::{
    candidate_pools, enumerate_admissible, eval_formula, is_admissible, label_symmetries,
    remaining_vertices, verify_case,
};
use enriques_core::pair::{compute_delta, proper_transform_self_intersection, solve_pair};
use enriques_core::symmetry::automorphisms;
use enriques_core::{rat, CandidateSet, CaseRecord, Pool};

fn set(v: &[u32]) -> CandidateSet {
    CandidateSet::new(v.iter().copied())
}

fn admissible(case: &CaseRecord, t: &[u32]) -> bool {
    is_admissible(&case.figure, &set(t)).unwrap().admissible
}

fn accepted(case: &CaseRecord, t: &[u32]) -> bool {
    let pools = candidate_pools(&case.figure, case.genus_class).unwrap();
    let sym = label_symmetries(&case.figure, case.symmetry);
    eval_formula(&case.formula, &set(t), &pools, &sym).accepted
}

#[test]
fn pools_of_6_2() {
    let case = bundled_case("6-2-ell").unwrap();
    let pools = candidate_pools(&case.figure, case.genus_class).unwrap();
    let expect: BTreeMap<u32, Pool> = (1..=9)
        .map(|l| (l, if l <= 3 { Pool::T1 } else { Pool::T2 }))
        .collect();
    assert_eq!(pools, expect);
}

#[test]
fn pools_of_56_0_follow_the_branches() {
    let case = bundled_case("56-0").unwrap();
    let pools = candidate_pools(&case.figure, case.genus_class).unwrap();
    assert_eq!(
        pools,
        BTreeMap::from([(1, Pool::T1), (2, Pool::T1), (3, Pool::T3)])
    );
}

#[test]
fn involution_of_6_2() {
    let g = bundled_case("6-2-ell").unwrap().figure;
    let maps: Vec<_> = automorphisms(&g).iter().map(|a| a.label_map(&g)).collect();
    let swap = BTreeMap::from([
        (1, 1),
        (2, 2),
        (3, 3),
        (4, 9),
        (5, 8),
        (6, 7),
        (7, 6),
        (8, 5),
        (9, 4),
    ]);
    assert!(maps.contains(&swap), "{maps:?}");
}

#[test]
fn admissibility_of_6_2() {
    let case = bundled_case("6-2-ell").unwrap();
    assert!(admissible(&case, &[4, 5]));
    assert!(!admissible(&case, &[1]));
    assert!(!admissible(&case, &[]));
    let failing = is_admissible(&case.figure, &set(&[1]))
        .unwrap()
        .failing
        .unwrap();
    assert!(failing.vertices.contains(&case.figure.curve_c().unwrap()));
}

#[test]
fn formula_of_6_2_uses_the_involution() {
    let case = bundled_case("6-2-ell").unwrap();
    assert!(accepted(&case, &[4, 5]));
    assert!(accepted(&case, &[8, 9]));
    assert!(!accepted(&case, &[1]));
}

#[test]
fn formula_of_54_needs_t2() {
    let case = bundled_case("54").unwrap();
    let pools = candidate_pools(&case.figure, case.genus_class).unwrap();
    let off_t2: Vec<u32> = pools
        .iter()
        .filter(|(_, p)| **p != Pool::T2)
        .map(|(l, _)| *l)
        .collect();
    assert!(!off_t2.is_empty());
    for mask in 0u32..(1 << off_t2.len()) {
        let t: Vec<u32> = off_t2
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, l)| *l)
            .collect();
        assert!(!accepted(&case, &t), "{t:?}");
        assert!(!admissible(&case, &t), "{t:?}");
    }
}

#[test]
fn enumeration_of_56_0() {
    let g = bundled_case("56-0").unwrap().figure;
    let got: Vec<Vec<u32>> = enumerate_admissible(&g)
        .unwrap()
        .iter()
        .map(CandidateSet::to_vec)
        .collect();
    assert_eq!(got, vec![vec![1], vec![1, 2], vec![1, 3], vec![1, 2, 3]]);
}

#[test]
fn proper_transform_of_c_for_4_5() {
    let case = bundled_case("6-2-ell").unwrap();
    let g = &case.figure;
    let c = g.curve_c().unwrap();
    let rest = remaining_vertices(g, &set(&[4, 5]));
    let comp = g
        .connected_components(&rest)
        .into_iter()
        .find(|x| x.contains(&c))
        .unwrap();
    let others: Vec<usize> = comp.iter().copied().filter(|&i| i != c).collect();
    assert_eq!(
        proper_transform_self_intersection(g, &others).unwrap(),
        rat(-7, 30)
    );
    let sol = solve_pair(g).unwrap();
    assert_eq!(compute_delta(g, &sol, &rest).unwrap(), 1);
}

#[test]
fn verdicts_for_single_cases() {
    let v = verify_case(&bundled_case("9-1-ell").unwrap()).unwrap();
    assert_eq!(
        (v.index, v.rho_min, v.rho_max, v.agreement),
        (10, Some(1), Some(5), true)
    );
    assert!(v.passed(), "{:?}", v.failed_checks().collect::<Vec<_>>());

    let v = verify_case(&bundled_case("25-1-plus1").unwrap()).unwrap();
    assert_eq!((v.index, v.identity_constant), (17, 6));

    let v = verify_case(&bundled_case("56-0").unwrap()).unwrap();
    assert_eq!(v.rank_delta, vec![10, 11, 12]);
    assert_eq!(v.delta_values, vec![1]);
}

#[test]
fn extremes_of_rho() {
    let v = verify_case(&bundled_case("6-2-ell").unwrap()).unwrap();
    assert_eq!((v.rho_min, v.rho_max), (Some(2), Some(9)));
    let v = verify_case(&bundled_case("51-2-ell").unwrap()).unwrap();
    assert_eq!(v.rho_max, Some(11));
}
