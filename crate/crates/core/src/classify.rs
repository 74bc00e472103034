//! Brute-force classification of extraction sets and comparison with the
//! per-case theorem conditions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cases::{rational_str, CaseRecord, GenusClass, Symmetry};
use crate::formula::{FormulaOutcome, PoolSets, TheoremFormula};
use crate::graph::{Pool, WeightedCurveGraph};
use crate::pair::{
    canonical_index, completeness_check, compute_delta, edge_sums_below_one, klt_component,
    klt_component_with, proper_transform_self_intersection, solve_pair, ComponentReport,
    KltVerdict, PairError,
};
use crate::symmetry::automorphisms;
use crate::Rational;

/// Upper bound on candidates for exhaustive enumeration.
pub const MAX_CANDIDATES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("graph has no curve-C vertex")]
    NoCurveC,
    #[error("candidate {label}: computed pool {computed}, data says {recorded}")]
    PoolMismatch {
        label: u32,
        computed: Pool,
        recorded: Pool,
    },
    #[error("candidate {0} sits on a branch of C but carries no pool tag")]
    MissingPool(u32),
    #[error("candidates {0} and {1} share a branch but carry different pools")]
    MixedBranch(u32, u32),
    #[error("{0} candidates exceed the enumeration limit of {MAX_CANDIDATES}")]
    TooManyCandidates(usize),
    #[error("unknown candidate label {0}")]
    UnknownLabel(u32),
    #[error(transparent)]
    Pair(#[from] PairError),
}

/// Assigns each candidate label to T1, T2 or T3 by how its component of
/// `g - C` meets C, cross-checked against pool tags in the data.
pub fn candidate_pools(
    g: &WeightedCurveGraph,
    class: GenusClass,
) -> Result<BTreeMap<u32, Pool>, ClassifyError> {
    let c = g.curve_c().ok_or(ClassifyError::NoCurveC)?;
    let rest: Vec<usize> = (0..g.len()).filter(|&i| i != c).collect();
    let mut out = BTreeMap::new();
    for comp in g.connected_components(&rest) {
        let attach: u32 = comp.iter().map(|&i| g.multiplicity(i, c)).sum();
        let cands: Vec<(u32, Option<Pool>)> = comp
            .iter()
            .filter_map(|&i| g.vertex(i).kind.label().map(|l| (l, g.vertex(i).pool)))
            .collect();
        let computed = match attach {
            0 => Some(Pool::T3),
            1 if class == GenusClass::Rational => None,
            1 => Some(Pool::T1),
            _ => Some(Pool::T2),
        };
        match computed {
            Some(p) => {
                for (l, tag) in cands {
                    if let Some(t) = tag.filter(|t| *t != p) {
                        return Err(ClassifyError::PoolMismatch {
                            label: l,
                            computed: p,
                            recorded: t,
                        });
                    }
                    out.insert(l, p);
                }
            }
            None => {
                let mut branch: Option<(u32, Pool)> = None;
                for (l, tag) in cands {
                    let t = tag.ok_or(ClassifyError::MissingPool(l))?;
                    match branch {
                        Some((first, p)) if p != t => {
                            return Err(ClassifyError::MixedBranch(first, l))
                        }
                        None => branch = Some((l, t)),
                        _ => {}
                    }
                    out.insert(l, t);
                }
            }
        }
    }
    Ok(out)
}

/// A choice of candidates to extract.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CandidateSet {
    pub members: BTreeSet<u32>,
}

impl CandidateSet {
    pub fn new(members: impl IntoIterator<Item = u32>) -> Self {
        CandidateSet {
            members: members.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn partition(&self, pools: &BTreeMap<u32, Pool>) -> PoolSets {
        let labels: Vec<u32> = self.members.iter().copied().collect();
        PoolSets::from_labels(&labels, pools)
    }

    pub fn mapped(&self, label_map: &BTreeMap<u32, u32>) -> CandidateSet {
        CandidateSet::new(self.members.iter().map(|l| *label_map.get(l).unwrap_or(l)))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.members.iter().copied().collect()
    }
}

impl std::fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v: Vec<String> = self.members.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

/// Vertices left after extracting `t`: everything except its candidates.
pub fn remaining_vertices(g: &WeightedCurveGraph, t: &CandidateSet) -> Vec<usize> {
    (0..g.len())
        .filter(|&i| {
            !g.vertex(i)
                .kind
                .label()
                .is_some_and(|l| t.members.contains(&l))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// The first component that is not klt, if any.
    pub failing: Option<ComponentReport>,
}

/// Whether contracting everything except `t` gives only klt points.
pub fn is_admissible(
    g: &WeightedCurveGraph,
    t: &CandidateSet,
) -> Result<Admissibility, ClassifyError> {
    for l in &t.members {
        g.candidate(*l).ok_or(ClassifyError::UnknownLabel(*l))?;
    }
    for comp in g.connected_components(&remaining_vertices(g, t)) {
        let (report, _) = klt_component(g, &comp)?;
        if report.verdict != KltVerdict::Klt {
            return Ok(Admissibility {
                admissible: false,
                failing: Some(report),
            });
        }
    }
    Ok(Admissibility {
        admissible: true,
        failing: None,
    })
}

fn subset_of(labels: &[u32], mask: u64) -> CandidateSet {
    CandidateSet::new(
        labels
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, l)| *l),
    )
}

/// All subsets of the candidates in binary counting order (bit k is the
/// k-th smallest label).
pub fn all_subsets(g: &WeightedCurveGraph) -> Result<Vec<CandidateSet>, ClassifyError> {
    let labels: Vec<u32> = g.candidates().into_iter().map(|(l, _)| l).collect();
    if labels.len() > MAX_CANDIDATES {
        return Err(ClassifyError::TooManyCandidates(labels.len()));
    }
    Ok((0..1u64 << labels.len())
        .map(|m| subset_of(&labels, m))
        .collect())
}

/// Every admissible subset, in binary counting order.
///
/// Components recur across subsets, so each distinct one is classified once.
/// Removed neighbours are candidates with coefficient 0, so the global
/// solution usually restricts to each component's local solution.
pub fn enumerate_admissible(g: &WeightedCurveGraph) -> Result<Vec<CandidateSet>, ClassifyError> {
    let subsets = all_subsets(g)?;
    let comps: Vec<Vec<Vec<usize>>> = subsets
        .par_iter()
        .map(|t| g.connected_components(&remaining_vertices(g, t)))
        .collect();
    let distinct: BTreeSet<&Vec<usize>> = comps.iter().flatten().collect();
    let hint = solve_pair(g).ok();
    let verdicts: HashMap<&Vec<usize>, KltVerdict> = distinct
        .into_par_iter()
        .map(|c| klt_component_with(g, c, hint.as_ref()).map(|(r, _)| (c, r.verdict)))
        .collect::<Result<_, _>>()?;
    Ok(subsets
        .into_iter()
        .zip(&comps)
        .filter(|(_, cs)| cs.iter().all(|c| verdicts[c] == KltVerdict::Klt))
        .map(|(t, _)| t)
        .collect())
}

/// Distinct candidate-label permutations induced by graph automorphisms.
pub fn label_symmetries(g: &WeightedCurveGraph, symmetry: Symmetry) -> Vec<BTreeMap<u32, u32>> {
    let identity: BTreeMap<u32, u32> = g.candidates().into_iter().map(|(l, _)| (l, l)).collect();
    if symmetry == Symmetry::Off {
        return vec![identity];
    }
    let maps: BTreeSet<BTreeMap<u32, u32>> =
        automorphisms(g).iter().map(|a| a.label_map(g)).collect();
    let mut out = vec![identity.clone()];
    out.extend(maps.into_iter().filter(|m| *m != identity));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaVerdict {
    pub accepted: bool,
    /// No guard matched `t` or any of its images.
    pub uncovered: bool,
}

/// Accepts `t` when some symmetry image of it satisfies `f`.
pub fn eval_formula(
    f: &TheoremFormula,
    t: &CandidateSet,
    pools: &BTreeMap<u32, Pool>,
    symmetries: &[BTreeMap<u32, u32>],
) -> FormulaVerdict {
    let mut covered = false;
    for sigma in symmetries {
        let FormulaOutcome { accepted, clause } = f.evaluate(&t.mapped(sigma).partition(pools));
        covered |= clause.is_some();
        if accepted {
            return FormulaVerdict {
                accepted: true,
                uncovered: false,
            };
        }
    }
    FormulaVerdict {
        accepted: false,
        uncovered: !covered,
    }
}

/// Expected value, computed value and whether they agree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub ok: bool,
}

impl Check {
    fn new(name: &str, expected: impl ToString, computed: impl ToString, ok: bool) -> Self {
        Check {
            name: name.to_string(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            ok,
        }
    }

    fn eq<T: PartialEq + ToString>(name: &str, expected: T, computed: T) -> Self {
        let ok = expected == computed;
        Check::new(name, expected.to_string(), computed.to_string(), ok)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDiffs {
    /// Admissible, but rejected by the theorem condition.
    pub admissible_only: Vec<Vec<u32>>,
    /// Accepted by the theorem condition, but not admissible.
    pub accepted_only: Vec<Vec<u32>>,
}

impl SetDiffs {
    pub fn is_empty(&self) -> bool {
        self.admissible_only.is_empty() && self.accepted_only.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseVerdict {
    pub case_id: String,
    pub genus_class: GenusClass,
    #[serde(with = "rational_str")]
    pub a: Rational,
    pub index: u64,
    pub identity_constant: i64,
    pub pools: BTreeMap<u32, Pool>,
    pub symmetries: usize,
    pub admissible: Vec<Vec<u32>>,
    pub accepted: Vec<Vec<u32>>,
    pub agreement: bool,
    pub diffs: SetDiffs,
    pub rho_min: Option<usize>,
    pub rho_max: Option<usize>,
    /// identity constant − ρ per admissible set; a lookup, not computed.
    pub rank_delta: Vec<i64>,
    pub delta_values: Vec<usize>,
    /// Edge sums all below 1 (sufficient for completeness, not necessary).
    pub edge_sums_below_one: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl CaseVerdict {
    pub fn passed(&self) -> bool {
        self.agreement && self.checks.iter().all(|c| c.ok)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

fn sets_to_vecs(sets: &[CandidateSet]) -> Vec<Vec<u32>> {
    sets.iter().map(CandidateSet::to_vec).collect()
}

/// Full comparison of one case against its theorem and corollary.
pub fn verify_case(case: &CaseRecord) -> Result<CaseVerdict, ClassifyError> {
    let g = &case.figure;
    let sol = solve_pair(g)?;
    let pools = candidate_pools(g, case.genus_class)?;
    let mut checks = vec![Check::eq("a", case.expected.a.clone(), sol.a.clone())];
    let zero = g
        .candidates()
        .iter()
        .all(|&(_, i)| num_traits::Zero::is_zero(sol.coefficient(i)));
    checks.push(Check::new(
        "candidate coefficients",
        "all 0",
        if zero { "all 0" } else { "nonzero" },
        zero,
    ));
    let complete = completeness_check(g, &sol);
    checks.push(Check::new("completeness", true, complete, complete));
    let index = canonical_index(&sol.a)?;
    checks.push(Check::eq("index", case.expected.index, index));

    let admissible = enumerate_admissible(g)?;
    let symmetries = label_symmetries(g, case.symmetry);
    let subsets = all_subsets(g)?;
    let evaluated: Vec<FormulaVerdict> = subsets
        .par_iter()
        .map(|t| eval_formula(&case.formula, t, &pools, &symmetries))
        .collect();
    let mut warnings = vec![];
    let mut accepted = vec![];
    for (t, v) in subsets.iter().zip(&evaluated) {
        if v.uncovered {
            warnings.push(format!("no theorem clause covers {t}"));
        }
        if v.accepted {
            accepted.push(t.clone());
        }
    }
    let adm_set: BTreeSet<&CandidateSet> = admissible.iter().collect();
    let acc_set: BTreeSet<&CandidateSet> = accepted.iter().collect();
    let diffs = SetDiffs {
        admissible_only: admissible
            .iter()
            .filter(|t| !acc_set.contains(t))
            .map(CandidateSet::to_vec)
            .collect(),
        accepted_only: accepted
            .iter()
            .filter(|t| !adm_set.contains(t))
            .map(CandidateSet::to_vec)
            .collect(),
    };

    let sizes: Vec<usize> = admissible.iter().map(CandidateSet::len).collect();
    let rho_min = sizes.iter().min().copied();
    let rho_max = sizes.iter().max().copied();
    let show = |v: Option<usize>| v.map_or("none".to_string(), |x| x.to_string());
    checks.push(Check::new(
        "rho_min",
        case.expected.rho_min,
        show(rho_min),
        rho_min == Some(case.expected.rho_min),
    ));
    checks.push(Check::new(
        "rho_max",
        case.expected.rho_max,
        show(rho_max),
        rho_max == Some(case.expected.rho_max),
    ));

    let rank_delta: Vec<i64> = {
        let s: BTreeSet<i64> = sizes
            .iter()
            .map(|&n| case.expected.identity_constant - n as i64)
            .collect();
        s.into_iter().collect()
    };
    let rank_ok = rank_delta.iter().all(|r| (0..=19).contains(r));
    checks.push(Check::new(
        "rank delta in [0,19]",
        "0..=19",
        format!("{rank_delta:?}"),
        rank_ok,
    ));

    let c = g.curve_c().ok_or(ClassifyError::NoCurveC)?;
    let per_set: Vec<(usize, Rational)> = admissible
        .par_iter()
        .map(|t| {
            let rest = remaining_vertices(g, t);
            let delta = compute_delta(g, &sol, &rest)?;
            let c_comp = g
                .connected_components(&rest)
                .into_iter()
                .find(|comp| comp.contains(&c))
                .unwrap_or_default();
            let others: Vec<usize> = c_comp.into_iter().filter(|&i| i != c).collect();
            let c2 = proper_transform_self_intersection(g, &others)?;
            Ok((delta, c2))
        })
        .collect::<Result<_, PairError>>()?;
    let delta_values: Vec<usize> = per_set
        .iter()
        .map(|(d, _)| *d)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    checks.push(Check::new(
        "delta = 1",
        "[1]",
        format!("{delta_values:?}"),
        delta_values.iter().all(|&d| d == 1),
    ));
    checks.push(Check::new(
        "delta <= 2",
        "<= 2",
        format!("{delta_values:?}"),
        delta_values.iter().all(|&d| d <= 2),
    ));
    let c2_ok = per_set
        .iter()
        .all(|(_, c2)| num_traits::Signed::is_negative(c2));
    checks.push(Check::new(
        "C~^2 < 0",
        "all negative",
        if c2_ok { "all negative" } else { "some >= 0" },
        c2_ok,
    ));

    let all = CandidateSet::new(pools.keys().copied());
    let all_ok = adm_set.contains(&all);
    checks.push(Check::new(
        "all candidates admissible",
        true,
        all_ok,
        all_ok,
    ));

    if case.genus_class == GenusClass::Ell {
        let t2_ok = admissible
            .iter()
            .all(|t| !t.partition(&pools).get(Pool::T2).is_empty());
        checks.push(Check::new(
            "every admissible set meets T2",
            true,
            t2_ok,
            t2_ok,
        ));
    }

    Ok(CaseVerdict {
        case_id: case.case_id.clone(),
        genus_class: case.genus_class,
        a: sol.a.clone(),
        index,
        identity_constant: case.expected.identity_constant,
        pools,
        symmetries: symmetries.len(),
        agreement: diffs.is_empty(),
        admissible: sets_to_vecs(&admissible),
        accepted: sets_to_vecs(&accepted),
        diffs,
        rho_min,
        rho_max,
        rank_delta,
        delta_values,
        edge_sums_below_one: edge_sums_below_one(g, &sol),
        checks,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub case_id: String,
    #[serde(with = "rational_str")]
    pub a: Rational,
    pub index: u64,
    pub rho_min: Option<usize>,
    pub rho_max: Option<usize>,
    pub identity_constant: i64,
    pub admissible: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub index_set: BTreeSet<u64>,
    pub passed: usize,
}

pub fn invariants_summary(verdicts: &[CaseVerdict]) -> Summary {
    let rows: Vec<SummaryRow> = verdicts
        .iter()
        .map(|v| SummaryRow {
            case_id: v.case_id.clone(),
            a: v.a.clone(),
            index: v.index,
            rho_min: v.rho_min,
            rho_max: v.rho_max,
            identity_constant: v.identity_constant,
            admissible: v.admissible.len(),
            passed: v.passed(),
        })
        .collect();
    Summary {
        index_set: rows.iter().map(|r| r.index).collect(),
        passed: rows.iter().filter(|r| r.passed).count(),
        rows,
    }
}
