//! Graph generators and property checks shared by the proptest suite and the
//! acceptance runner.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use enriques_core::cases::Symmetry;
use enriques_core::classify::{enumerate_admissible, label_symmetries};
use enriques_core::linalg::{is_negative_definite, pivot_signs, SparseSym};
use enriques_core::pair::{klt_check, solve_pair, KltVerdict};
use enriques_core::symmetry::{automorphisms, is_isomorphic};
use enriques_core::{
    rat, CandidateSet, CurveVertex, ExactMatrix, FloatMatrix, Rational, VertexKind,
    WeightedCurveGraph,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = Result<(), TestCaseError>;

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// A tree on `weights.len()` vertices plus a few extra edges. Vertex 0 is C.
pub fn build(weights: &[i64], parents: &[usize], extra: &[(usize, usize)]) -> WeightedCurveGraph {
    let mut g = WeightedCurveGraph::new();
    for (i, &w) in weights.iter().enumerate() {
        let kind = if i == 0 {
            VertexKind::CurveC
        } else {
            VertexKind::Exceptional
        };
        g.add_vertex(CurveVertex::new(format!("v{i}"), w, kind))
            .unwrap();
    }
    for (i, &p) in parents.iter().enumerate() {
        g.add_edge(i + 1, p % (i + 1)).unwrap();
    }
    for &(a, b) in extra {
        let (a, b) = (a % weights.len(), b % weights.len());
        if a != b && g.multiplicity(a, b) == 0 {
            g.add_edge(a, b).unwrap();
        }
    }
    g
}

/// Small connected graphs with C at vertex 0.
pub fn small_graph() -> impl Strategy<Value = WeightedCurveGraph> {
    (2usize..8)
        .prop_flat_map(|n| {
            (
                -6i64..=1,
                prop::collection::vec(-5i64..=-1, n - 1),
                prop::collection::vec(any::<usize>(), n - 1),
                prop::collection::vec((any::<usize>(), any::<usize>()), 0..2),
            )
        })
        .prop_map(|(c, rest, parents, extra)| {
            let mut w = vec![c];
            w.extend(rest);
            build(&w, &parents, &extra)
        })
}

/// C with `k` copies of one branch; the copies are permuted by automorphisms.
/// Each branch ends in a labelled candidate.
pub fn symmetric_graph() -> impl Strategy<Value = WeightedCurveGraph> {
    (
        2usize..4,
        prop::collection::vec(-4i64..=-2, 1..4),
        -6i64..=-1,
    )
        .prop_map(|(k, branch, c)| {
            let mut g = WeightedCurveGraph::new();
            let c_idx = g
                .add_vertex(CurveVertex::new("c", c, VertexKind::CurveC))
                .unwrap();
            for copy in 0..k {
                let mut prev = c_idx;
                for (d, &w) in branch.iter().enumerate() {
                    let v = g
                        .add_vertex(CurveVertex::new(
                            format!("b{copy}_{d}"),
                            w,
                            VertexKind::Exceptional,
                        ))
                        .unwrap();
                    g.add_edge(prev, v).unwrap();
                    prev = v;
                }
                let label = copy as u32 + 1;
                let t = g
                    .add_vertex(CurveVertex::new(
                        format!("t{label}"),
                        -1,
                        VertexKind::Candidate(label),
                    ))
                    .unwrap();
                g.add_edge(prev, t).unwrap();
            }
            g
        })
}

/// Chains of curves with self-intersection at most -2.
pub fn chain_weights() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-7i64..=-2, 1..10)
}

/// Symmetric integer matrices with small entries.
pub fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6).prop_flat_map(|n| {
        prop::collection::vec(-4i64..=4, n * (n + 1) / 2).prop_map(move |v| {
            let mut rows = vec![vec![0; n]; n];
            let mut it = v.into_iter();
            for i in 0..n {
                for j in i..n {
                    let x = it.next().unwrap();
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            rows
        })
    })
}

pub fn check_round_trip(g: &WeightedCurveGraph) -> Check {
    for ((i, j), _) in g.edges().collect::<Vec<_>>() {
        let (up, n) = g.blow_up_edge(i, j).map_err(|e| fail(e.to_string()))?;
        let down = up.blow_down(n).map_err(|e| fail(e.to_string()))?;
        if &down != g {
            return Err(fail(format!(
                "blow-up of ({i},{j}) followed by blow-down changed the graph"
            )));
        }
    }
    Ok(())
}

/// After blowing up a node of curves with coefficients b_i, b_j, the new
/// curve has coefficient b_i + b_j - 1 and nothing else moves.
pub fn check_covariance(g: &WeightedCurveGraph, max_edges: usize) -> Check {
    let Ok(sol) = solve_pair(g) else {
        return Ok(());
    };
    let edges: Vec<(usize, usize)> = g.edges().map(|(e, _)| e).collect();
    let step = edges.len().div_ceil(max_edges.max(1)).max(1);
    for &(i, j) in edges.iter().step_by(step) {
        if [i, j]
            .iter()
            .any(|&v| g.vertex(v).kind == VertexKind::Witness)
        {
            continue;
        }
        let (up, n) = g.blow_up_edge(i, j).map_err(|e| fail(e.to_string()))?;
        let s = solve_pair(&up).map_err(|e| fail(format!("blown-up graph unsolvable: {e}")))?;
        if s.a != sol.a {
            return Err(fail(format!("a moved from {} to {}", sol.a, s.a)));
        }
        let expect = sol.coefficient(i) + sol.coefficient(j) - Rational::one();
        if *s.coefficient(n) != expect {
            return Err(fail(format!(
                "new coefficient {} != {expect}",
                s.coefficient(n)
            )));
        }
        if (0..g.len()).any(|k| s.coefficient(k) != sol.coefficient(k)) {
            return Err(fail(format!(
                "blowing up ({i},{j}) moved an old coefficient"
            )));
        }
    }
    Ok(())
}

/// Solutions are constant on automorphism orbits and survive relabelling.
pub fn check_solution_invariance(g: &WeightedCurveGraph) -> Check {
    let Ok(sol) = solve_pair(g) else {
        return Ok(());
    };
    for sigma in automorphisms(g) {
        for i in 0..g.len() {
            if sol.coefficient(i) != sol.coefficient(sigma.apply(i)) {
                return Err(fail(format!("automorphism moves coefficient of {i}")));
            }
        }
    }
    let n = g.len();
    let order: Vec<usize> = (0..n).rev().collect();
    let h = g.reordered(&order).map_err(|e| fail(e.to_string()))?;
    let iso = is_isomorphic(g, &h).ok_or_else(|| fail("reversed copy not isomorphic".into()))?;
    let s = solve_pair(&h).map_err(|e| fail(e.to_string()))?;
    for i in 0..n {
        if sol.coefficient(i) != s.coefficient(iso.apply(i)) {
            return Err(fail(format!("relabelled solution differs at {i}")));
        }
    }
    Ok(())
}

/// The admissible family is closed under the label permutations induced by
/// automorphisms.
pub fn check_admissibility_invariance(g: &WeightedCurveGraph) -> Check {
    let adm = enumerate_admissible(g).map_err(|e| fail(e.to_string()))?;
    let set: BTreeSet<&CandidateSet> = adm.iter().collect();
    for sigma in label_symmetries(g, Symmetry::Auto) {
        for t in &adm {
            if !set.contains(&t.mapped(&sigma)) {
                return Err(fail(format!(
                    "{t} admissible but its image {} is not",
                    t.mapped(&sigma)
                )));
            }
        }
    }
    Ok(())
}

/// Sylvester's criterion, the dense pivot signs, the sparse elimination and
/// the floating-point path agree.
pub fn check_definiteness_oracles(rows: &[Vec<i64>]) -> Check {
    let m = ExactMatrix::from_i64_rows(rows).map_err(|e| fail(e.to_string()))?;
    let sylvester = is_negative_definite(&m);
    if let Some(p) = pivot_signs(&m).all_negative() {
        if p != sylvester {
            return Err(fail(format!(
                "pivot signs say {p}, Sylvester says {sylvester}"
            )));
        }
    }
    let n = rows.len();
    let mut sparse = SparseSym::new((0..n).map(|i| rat(rows[i][i], 1)).collect());
    for i in 0..n {
        for j in (i + 1)..n {
            if rows[i][j] != 0 {
                sparse.add(i, j, rat(rows[i][j], 1));
            }
        }
    }
    let sp = sparse.eliminate_negative(None).negative_definite;
    if sp != sylvester {
        return Err(fail(format!(
            "sparse elimination says {sp}, Sylvester says {sylvester}"
        )));
    }
    let f = FloatMatrix::from_i64_rows(rows).map_err(|e| fail(e.to_string()))?;
    if is_negative_definite(&f) != sylvester {
        return Err(fail("floating-point minors disagree".into()));
    }
    Ok(())
}

pub fn check_graph_definiteness(g: &WeightedCurveGraph) -> Check {
    let all = g.all_vertices();
    let m = g
        .intersection_matrix::<Rational>(&all)
        .map_err(|e| fail(e.to_string()))?;
    check_definiteness_oracles(
        &m.rows()
            .iter()
            .map(|r| r.iter().map(to_i64).collect())
            .collect::<Vec<_>>(),
    )
}

fn to_i64(x: &Rational) -> i64 {
    assert!(x.is_integer());
    i64::try_from(x.to_integer()).expect("intersection numbers are small")
}

pub fn check_chain_klt(weights: &[i64]) -> Check {
    let mut g = WeightedCurveGraph::new();
    for (i, &w) in weights.iter().enumerate() {
        g.add_vertex(CurveVertex::new(
            format!("e{i}"),
            w,
            VertexKind::Exceptional,
        ))
        .unwrap();
        if i > 0 {
            g.add_edge(i - 1, i).unwrap();
        }
    }
    let r = klt_check(&g, &g.all_vertices()).map_err(|e| fail(e.to_string()))?;
    if r.verdict != KltVerdict::Klt {
        return Err(fail(format!("chain {weights:?} gave {}", r.verdict)));
    }
    for b in r.coefficients.values() {
        if *b < Rational::zero() || *b >= Rational::one() {
            return Err(fail(format!("chain {weights:?} has coefficient {b}")));
        }
    }
    Ok(())
}
