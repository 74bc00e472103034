//! DOT and plain-text renderings of curve graphs.

use std::fmt::Write;

use enriques_core::{VertexKind, WeightedCurveGraph};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Candidates are double circles labelled by number, exceptional curves
/// filled circles labelled by weight, C a box.
pub fn to_dot(g: &WeightedCurveGraph, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [fontsize=10];").unwrap();
    for v in g.vertices() {
        let attrs = match v.kind {
            VertexKind::CurveC => format!("shape=box, label=\"C ({})\"", v.weight),
            VertexKind::Exceptional => format!(
                "shape=circle, style=filled, fillcolor=black, fontcolor=white, label=\"{}\"",
                v.weight
            ),
            VertexKind::Candidate(l) => format!("shape=doublecircle, label=\"{l}\""),
            VertexKind::Witness => format!("shape=circle, style=dashed, label=\"{}\"", v.weight),
        };
        writeln!(out, "  {} [{attrs}];", quote(&v.id)).unwrap();
    }
    for ((i, j), m) in g.edges() {
        for _ in 0..m {
            writeln!(
                out,
                "  {} -- {};",
                quote(&g.vertex(i).id),
                quote(&g.vertex(j).id)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn describe(g: &WeightedCurveGraph, i: usize) -> String {
    let v = g.vertex(i);
    match v.kind {
        VertexKind::CurveC => format!("C [{}]", v.weight),
        VertexKind::Exceptional => format!("{} [{}]", v.id, v.weight),
        VertexKind::Candidate(l) => {
            let pool = v.pool.map(|p| format!(" {p}")).unwrap_or_default();
            format!("candidate {l}{pool} [{}]", v.weight)
        }
        VertexKind::Witness => format!("witness {} [{}]", v.id, v.weight),
    }
}

/// One line per vertex: the vertex, then its neighbours (`xN` for multiple edges).
pub fn to_ascii(g: &WeightedCurveGraph) -> String {
    let mut out = String::new();
    for i in 0..g.len() {
        let ns: Vec<String> = g
            .neighbors(i)
            .into_iter()
            .map(|(j, m)| {
                let id = &g.vertex(j).id;
                if m > 1 {
                    format!("{id} x{m}")
                } else {
                    id.clone()
                }
            })
            .collect();
        writeln!(out, "{} -- {}", describe(g, i), ns.join(", ")).unwrap();
    }
    out
}
