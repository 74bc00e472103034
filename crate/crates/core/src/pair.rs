//! Log-pair calculus on weighted curve graphs.
//!
//! Coefficients follow the convention `K + a·C + Σ b_i E_i ≡ 0` on the
//! resolution, so a coefficient is minus the discrepancy. With every curve
//! rational, `K·v = -weight(v) - 2`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, VertexKind, WeightedCurveGraph};
use crate::linalg::{solve_exact, Solution};
use crate::{rat, Rational};

/// Blow-up budget for [`saturate`] and [`compute_delta`].
pub const ITERATION_CAP: usize = 10_000;

/// Coefficient threshold for δ: discrepancy ≤ -6/7.
pub fn delta_threshold() -> Rational {
    rat(6, 7)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("graph has no curve-C vertex")]
    NoCurveC,
    #[error("square system is singular (rank {rank} of {order}); check the transcription")]
    SingularSystem { rank: usize, order: usize },
    #[error("witness equations are inconsistent at {0:?}")]
    InconsistentOverdetermined(Vec<(String, Rational)>),
    #[error("exceeded {ITERATION_CAP} blow-ups")]
    IterationCap,
    #[error("configuration is not negative definite")]
    NotNegativeDefinite,
    #[error("curve C must not be contracted here")]
    CurveCContracted,
    #[error("curve C must be in the contracted set")]
    CurveCNotContracted,
    #[error("coefficient {0} out of range")]
    CoefficientOutOfRange(Rational),
    #[error("toric weights must be positive")]
    NonPositiveWeight,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Solved coefficients of the numerically trivial pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSolution {
    /// Coefficient of C.
    pub a: Rational,
    /// Coefficient per vertex index; witness vertices hold 0.
    pub coefficients: Vec<Rational>,
    /// Residual of each witness equation, `(vertex id, value)`; all zero on success.
    pub witness_residuals: Vec<(String, Rational)>,
}

impl PairSolution {
    pub fn coefficient(&self, i: usize) -> &Rational {
        &self.coefficients[i]
    }

    /// `b` for every exceptional or candidate vertex.
    pub fn b(&self, g: &WeightedCurveGraph) -> BTreeMap<usize, Rational> {
        g.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v.kind, VertexKind::Exceptional | VertexKind::Candidate(_)))
            .map(|(i, _)| (i, self.coefficients[i].clone()))
            .collect()
    }

    /// Checks `(K + Σ coeff·E)·v = 0` for every vertex of `g`.
    pub fn residuals(&self, g: &WeightedCurveGraph) -> Vec<Rational> {
        (0..g.len())
            .map(|i| {
                let v = g.vertex(i);
                let mut r = rat(-v.weight - 2, 1) + &self.coefficients[i] * rat(v.weight, 1);
                for (j, m) in g.neighbors(i) {
                    r += &self.coefficients[j] * rat(m as i64, 1);
                }
                r
            })
            .collect()
    }

    pub fn is_exact_solution(&self, g: &WeightedCurveGraph) -> bool {
        self.coefficients.len() == g.len() && self.residuals(g).iter().all(Zero::is_zero)
    }
}

fn unknowns(g: &WeightedCurveGraph) -> Vec<usize> {
    (0..g.len())
        .filter(|&i| g.vertex(i).kind != VertexKind::Witness)
        .collect()
}

/// Solves for the coefficients of the numerically trivial pair on `g`.
pub fn solve_pair(g: &WeightedCurveGraph) -> Result<PairSolution, PairError> {
    let c = g.curve_c().ok_or(PairError::NoCurveC)?;
    let vars = unknowns(g);
    let m = g.intersection_matrix::<Rational>(&vars)?;
    let rhs: Vec<Rational> = vars
        .iter()
        .map(|&i| rat(g.vertex(i).weight + 2, 1))
        .collect();
    let x = match solve_exact(&m, &rhs).expect("dimensions agree by construction") {
        Solution::Unique(x) => x,
        Solution::Underdetermined { nullspace, .. } => {
            return Err(PairError::SingularSystem {
                rank: vars.len() - nullspace.len(),
                order: vars.len(),
            })
        }
        Solution::Inconsistent { rank } => {
            return Err(PairError::SingularSystem {
                rank,
                order: vars.len(),
            })
        }
    };
    let mut coefficients = vec![Rational::zero(); g.len()];
    for (&i, v) in vars.iter().zip(x) {
        coefficients[i] = v;
    }
    let mut sol = PairSolution {
        a: coefficients[c].clone(),
        coefficients,
        witness_residuals: vec![],
    };
    let all = sol.residuals(g);
    sol.witness_residuals = (0..g.len())
        .filter(|&i| g.vertex(i).kind == VertexKind::Witness)
        .map(|i| (g.vertex(i).id.clone(), all[i].clone()))
        .collect();
    if sol.witness_residuals.iter().any(|(_, r)| !r.is_zero()) {
        return Err(PairError::InconsistentOverdetermined(sol.witness_residuals));
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KltVerdict {
    Klt,
    LogCanonicalNotKlt,
    Worse,
    NotContractible,
}

impl fmt::Display for KltVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KltVerdict::Klt => "klt",
            KltVerdict::LogCanonicalNotKlt => "log-canonical-not-klt",
            KltVerdict::Worse => "worse",
            KltVerdict::NotContractible => "not-contractible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub vertices: Vec<usize>,
    pub negative_definite: bool,
    pub verdict: KltVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KltReport {
    pub negative_definite: bool,
    /// Solved coefficients of contractible components, by vertex index.
    pub coefficients: BTreeMap<usize, Rational>,
    pub verdict: KltVerdict,
    pub components: Vec<ComponentReport>,
}

fn classify_coefficients<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> KltVerdict {
    let one = Rational::one();
    let mut verdict = KltVerdict::Klt;
    for c in coeffs {
        if *c > one {
            return KltVerdict::Worse;
        }
        if *c == one {
            verdict = KltVerdict::LogCanonicalNotKlt;
        }
    }
    verdict
}

/// Klt test for one connected configuration, boundary-free.
pub fn klt_component(
    g: &WeightedCurveGraph,
    comp: &[usize],
) -> Result<(ComponentReport, BTreeMap<usize, Rational>), PairError> {
    klt_component_with(g, comp, None)
}

/// As [`klt_component`], but first tries the coefficients of `hint`: when
/// they satisfy the local equations they are the unique local solution.
pub fn klt_component_with(
    g: &WeightedCurveGraph,
    comp: &[usize],
    hint: Option<&PairSolution>,
) -> Result<(ComponentReport, BTreeMap<usize, Rational>), PairError> {
    let order = g.ordered(comp)?;
    if !g
        .sparse_form::<Rational>(&order)?
        .eliminate_negative(None)
        .negative_definite
    {
        let report = ComponentReport {
            vertices: order,
            negative_definite: false,
            verdict: KltVerdict::NotContractible,
        };
        return Ok((report, BTreeMap::new()));
    }
    let x = match hint.filter(|h| solves_locally(g, &order, h)) {
        Some(h) => order.iter().map(|&i| h.coefficients[i].clone()).collect(),
        None => {
            let m = g.intersection_matrix::<Rational>(&order)?;
            let rhs: Vec<Rational> = order
                .iter()
                .map(|&i| rat(g.vertex(i).weight + 2, 1))
                .collect();
            solve_exact(&m, &rhs)
                .expect("dimensions agree by construction")
                .unique()
                .expect("negative definite matrices are nonsingular")
        }
    };
    let verdict = classify_coefficients(x.iter());
    let coeffs = order.iter().copied().zip(x).collect();
    Ok((
        ComponentReport {
            vertices: order,
            negative_definite: true,
            verdict,
        },
        coeffs,
    ))
}

fn solves_locally(g: &WeightedCurveGraph, order: &[usize], h: &PairSolution) -> bool {
    if h.coefficients.len() != g.len() {
        return false;
    }
    let inside: std::collections::BTreeSet<usize> = order.iter().copied().collect();
    order.iter().all(|&i| {
        let v = g.vertex(i);
        let mut r = rat(-v.weight - 2, 1) + &h.coefficients[i] * rat(v.weight, 1);
        for (j, m) in g.neighbors(i) {
            if inside.contains(&j) {
                r += &h.coefficients[j] * rat(m as i64, 1);
            }
        }
        r.is_zero()
    })
}

/// Classifies the singularities obtained by contracting `subset`.
pub fn klt_check(g: &WeightedCurveGraph, subset: &[usize]) -> Result<KltReport, PairError> {
    if subset.is_empty() {
        return Err(GraphError::EmptySubset.into());
    }
    g.ordered(subset)?;
    let mut report = KltReport {
        negative_definite: true,
        coefficients: BTreeMap::new(),
        verdict: KltVerdict::Klt,
        components: vec![],
    };
    for comp in g.connected_components(subset) {
        let (c, coeffs) = klt_component(g, &comp)?;
        report.negative_definite &= c.negative_definite;
        report.verdict = report.verdict.max(c.verdict);
        report.coefficients.extend(coeffs);
        report.components.push(c);
    }
    Ok(report)
}

/// Whether some divisor over the node of two curves with these coefficients
/// has discrepancy exactly 0.
///
/// Divisors with discrepancy ≤ 0 over a snc point are toric; the one with
/// coprime weights (α, β) has coefficient `1 - α(1-b_i) - β(1-b_j)`.
pub fn node_has_crepant_divisor(bi: &Rational, bj: &Rational) -> bool {
    let one = Rational::one();
    let x = &one - bi;
    let y = &one - bj;
    if !x.is_positive() || !y.is_positive() {
        return true;
    }
    let mut alpha = 1i64;
    loop {
        let rest = &one - &x * rat(alpha, 1);
        if !rest.is_positive() {
            return false;
        }
        let beta = &rest / &y;
        if beta.is_integer() {
            let b = beta.to_integer();
            if let Some(b) = b.to_i64() {
                if b >= 1 && alpha.gcd(&b) == 1 {
                    return true;
                }
            }
        }
        alpha += 1;
    }
}

/// True iff no blow-up sequence over the configuration produces a further
/// divisor with discrepancy 0.
pub fn completeness_check(g: &WeightedCurveGraph, sol: &PairSolution) -> bool {
    first_incomplete_edge(g, sol).is_none()
}

/// The first edge over which a missing discrepancy-0 divisor lives.
pub fn first_incomplete_edge(g: &WeightedCurveGraph, sol: &PairSolution) -> Option<(usize, usize)> {
    g.edges()
        .map(|(e, _)| e)
        .find(|&(i, j)| node_has_crepant_divisor(sol.coefficient(i), sol.coefficient(j)))
}

/// The sufficient condition "every edge has coefficient sum < 1".
pub fn edge_sums_below_one(g: &WeightedCurveGraph, sol: &PairSolution) -> bool {
    let one = Rational::one();
    g.edges()
        .all(|((i, j), _)| sol.coefficient(i) + sol.coefficient(j) < one)
}

/// Extracts every divisor with discrepancy ≤ 0 by blowing up edges whose
/// coefficient sum is at least 1. New curves with coefficient exactly 0
/// become candidates with fresh labels.
pub fn saturate(
    g: &WeightedCurveGraph,
    sol: &PairSolution,
) -> Result<(WeightedCurveGraph, PairSolution), PairError> {
    let one = Rational::one();
    if let Some(c) = sol.coefficients.iter().find(|c| **c >= one) {
        return Err(PairError::CoefficientOutOfRange(c.clone()));
    }
    let mut graph = g.clone();
    let mut coeffs = sol.coefficients.clone();
    let mut next_label = g.candidates().last().map_or(1, |&(l, _)| l + 1);
    for _ in 0..ITERATION_CAP {
        let edge = graph
            .edges()
            .map(|(e, _)| e)
            .find(|&(i, j)| &coeffs[i] + &coeffs[j] >= one);
        let Some((i, j)) = edge else {
            let a = coeffs[graph.curve_c().ok_or(PairError::NoCurveC)?].clone();
            let out = PairSolution {
                a,
                coefficients: coeffs,
                witness_residuals: sol.witness_residuals.clone(),
            };
            return Ok((graph, out));
        };
        let (h, n) = graph.blow_up_edge(i, j)?;
        graph = h;
        let c = &coeffs[i] + &coeffs[j] - &one;
        if c.is_zero() {
            graph.set_kind(n, VertexKind::Candidate(next_label))?;
            next_label += 1;
        }
        coeffs.push(c);
    }
    Err(PairError::IterationCap)
}

/// Self-intersection of the image of C after contracting `contracted`.
pub fn proper_transform_self_intersection(
    g: &WeightedCurveGraph,
    contracted: &[usize],
) -> Result<Rational, PairError> {
    let c = g.curve_c().ok_or(PairError::NoCurveC)?;
    let weight = rat(g.vertex(c).weight, 1);
    if contracted.is_empty() {
        return Ok(weight);
    }
    let order = g.ordered(contracted)?;
    if order.contains(&c) {
        return Err(PairError::CurveCContracted);
    }
    // Eliminating C last leaves the Schur complement: the image's self-intersection.
    let mut with_c = order.clone();
    with_c.push(c);
    let local_c = g
        .ordered(&with_c)?
        .iter()
        .position(|&i| i == c)
        .expect("C is in the set");
    let elim = g
        .sparse_form::<Rational>(&with_c)?
        .eliminate_negative(Some(local_c));
    match elim.pivots.last() {
        Some((k, d)) if *k == local_c && elim.pivots.len() == with_c.len() => Ok(d.clone()),
        _ => Err(PairError::NotNegativeDefinite),
    }
}

/// Counts divisors over the contraction of `contracted` with coefficient
/// ≥ 6/7, including infinitely near ones over nodes inside the set.
pub fn compute_delta(
    g: &WeightedCurveGraph,
    sol: &PairSolution,
    contracted: &[usize],
) -> Result<usize, PairError> {
    let c = g.curve_c().ok_or(PairError::NoCurveC)?;
    let order = g.ordered(contracted)?;
    if !order.contains(&c) {
        return Err(PairError::CurveCNotContracted);
    }
    let threshold = delta_threshold();
    let mut count = order
        .iter()
        .filter(|&&i| *sol.coefficient(i) >= threshold)
        .count();
    let mut budget = ITERATION_CAP;
    let inside: std::collections::BTreeSet<usize> = order.iter().copied().collect();
    for ((i, j), m) in g.edges() {
        if inside.contains(&i) && inside.contains(&j) {
            let over = deep_divisors(
                sol.coefficient(i),
                sol.coefficient(j),
                &threshold,
                &mut budget,
            )?;
            count += over * m as usize;
        }
    }
    Ok(count)
}

fn deep_divisors(
    bi: &Rational,
    bj: &Rational,
    threshold: &Rational,
    budget: &mut usize,
) -> Result<usize, PairError> {
    let new = bi + bj - Rational::one();
    if new < *threshold {
        return Ok(0);
    }
    if *budget == 0 {
        return Err(PairError::IterationCap);
    }
    *budget -= 1;
    Ok(1 + deep_divisors(bi, &new, threshold, budget)?
        + deep_divisors(&new, bj, threshold, budget)?)
}

/// Discrepancy of the weighted blow-up with weights (α, β) of `(C², a{xy=0})`.
pub fn toric_blowup_discrepancy(
    alpha: u64,
    beta: u64,
    a: &Rational,
) -> Result<Rational, PairError> {
    if alpha == 0 || beta == 0 {
        return Err(PairError::NonPositiveWeight);
    }
    if a.is_negative() || *a >= Rational::one() {
        return Err(PairError::CoefficientOutOfRange(a.clone()));
    }
    let s = rat((alpha + beta) as i64, 1);
    Ok(&s - Rational::one() - &s * a)
}

/// Index of the surface: the denominator of `a` in lowest terms.
///
/// This is inferred from the tabulated cases, not derived from the cover.
pub fn canonical_index(a: &Rational) -> Result<u64, PairError> {
    if !a.is_positive() || *a >= Rational::one() {
        return Err(PairError::CoefficientOutOfRange(a.clone()));
    }
    a.denom()
        .to_u64()
        .ok_or_else(|| PairError::CoefficientOutOfRange(a.clone()))
}
