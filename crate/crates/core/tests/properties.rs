mod common;

use common::*;
use enriques_core::cases::bundled_cases;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn blow_up_then_down_is_identity(g in small_graph()) {
        check_round_trip(&g)?;
    }

    #[test]
    fn blow_up_is_covariant(g in small_graph()) {
        check_covariance(&g, usize::MAX)?;
    }

    #[test]
    fn solutions_respect_symmetry(g in small_graph()) {
        check_solution_invariance(&g)?;
    }

    #[test]
    fn definiteness_oracles_agree(rows in int_matrix()) {
        check_definiteness_oracles(&rows)?;
    }

    #[test]
    fn graph_definiteness_oracles_agree(g in small_graph()) {
        check_graph_definiteness(&g)?;
    }

    #[test]
    fn negative_chains_are_klt(w in chain_weights()) {
        check_chain_klt(&w)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symmetric_solutions_are_invariant(g in symmetric_graph()) {
        check_solution_invariance(&g)?;
    }

    #[test]
    fn admissibility_is_invariant(g in symmetric_graph()) {
        check_admissibility_invariance(&g)?;
    }
}

#[test]
fn bundled_round_trip() {
    for case in bundled_cases() {
        check_round_trip(&case.figure).unwrap_or_else(|e| panic!("{}: {e}", case.case_id));
    }
}

#[test]
fn bundled_covariance() {
    for case in bundled_cases() {
        check_covariance(&case.figure, 4).unwrap_or_else(|e| panic!("{}: {e}", case.case_id));
    }
}

#[test]
fn bundled_symmetry() {
    for case in bundled_cases() {
        check_solution_invariance(&case.figure).unwrap_or_else(|e| panic!("{}: {e}", case.case_id));
        check_admissibility_invariance(&case.figure)
            .unwrap_or_else(|e| panic!("{}: {e}", case.case_id));
    }
}

#[test]
fn bundled_definiteness() {
    for case in bundled_cases() {
        check_graph_definiteness(&case.figure).unwrap_or_else(|e| panic!("{}: {e}", case.case_id));
    }
}
