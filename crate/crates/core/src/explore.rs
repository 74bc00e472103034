//! Reconstructing a figure graph from a minimal-resolution diagram.

use num_traits::Signed;

use crate::graph::{VertexKind, WeightedCurveGraph};
use crate::pair::{saturate, solve_pair, PairError, PairSolution};
use crate::symmetry::{is_isomorphic, GraphMorphism};

/// Result of [`extract_and_minimise`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub graph: WeightedCurveGraph,
    pub solution: PairSolution,
    pub blow_ups: usize,
    pub witnesses_removed: usize,
    pub blow_downs: usize,
}

/// Solves the pair, extracts every discrepancy-0 divisor, forgets witness
/// curves, then blows down (-1)-curves with positive coefficient until none
/// is left.
pub fn extract_and_minimise(g: &WeightedCurveGraph) -> Result<Reduction, PairError> {
    let sol = solve_pair(g)?;
    let (saturated, sat_sol) = saturate(g, &sol)?;
    let blow_ups = saturated.len() - g.len();

    let keep: Vec<usize> = (0..saturated.len())
        .filter(|&i| saturated.vertex(i).kind != VertexKind::Witness)
        .collect();
    let witnesses_removed = saturated.len() - keep.len();
    let mut graph = saturated.induced(&keep)?;
    let mut coeffs: Vec<_> = keep
        .iter()
        .map(|&i| sat_sol.coefficients[i].clone())
        .collect();

    let mut blow_downs = 0;
    while let Some(v) = (0..graph.len()).find(|&i| {
        let x = graph.vertex(i);
        x.kind == VertexKind::Exceptional
            && x.weight == -1
            && coeffs[i].is_positive()
            && graph.blow_down(i).is_ok()
    }) {
        graph = graph.blow_down(v)?;
        coeffs.remove(v);
        blow_downs += 1;
    }
    let c = graph.curve_c().ok_or(PairError::NoCurveC)?;
    let solution = PairSolution {
        a: coeffs[c].clone(),
        coefficients: coeffs,
        witness_residuals: vec![],
    };
    Ok(Reduction {
        graph,
        solution,
        blow_ups,
        witnesses_removed,
        blow_downs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundTrip {
    pub reduction: Reduction,
    pub morphism: Option<GraphMorphism>,
}

impl RoundTrip {
    pub fn matched(&self) -> bool {
        self.morphism.is_some()
    }
}

pub fn round_trip(
    diagram: &WeightedCurveGraph,
    figure: &WeightedCurveGraph,
) -> Result<RoundTrip, PairError> {
    let reduction = extract_and_minimise(diagram)?;
    let morphism = is_isomorphic(&reduction.graph, figure);
    Ok(RoundTrip {
        reduction,
        morphism,
    })
}
