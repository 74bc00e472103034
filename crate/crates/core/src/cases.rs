//! Case files: figure graphs, theorem conditions and expected invariants.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::candidate_pools;
use crate::formula::{parse_expr, Clause, FormulaError, TheoremFormula};
use crate::graph::{CurveVertex, Pool, VertexKind, WeightedCurveGraph};
use crate::pair::{
    canonical_index, completeness_check, delta_threshold, first_incomplete_edge, solve_pair,
};
use crate::Rational;

pub const SCHEMA_VERSION: u32 = 1;

/// Bundled case ids in classification order.
pub const CASE_ORDER: [&str; 13] = [
    "6-2-ell",
    "8-1-ell",
    "9-1-ell",
    "22-1-ell",
    "51-2-ell",
    "51-6-ell",
    "52-2-ell",
    "53-2-ell",
    "54-ell",
    "18-1-plus1",
    "25-1-plus1",
    "55-0",
    "56-0",
];

const BUNDLED: [&str; 13] = [
    include_str!("../data/cases/6-2-ell.json"),
    include_str!("../data/cases/8-1-ell.json"),
    include_str!("../data/cases/9-1-ell.json"),
    include_str!("../data/cases/22-1-ell.json"),
    include_str!("../data/cases/51-2-ell.json"),
    include_str!("../data/cases/51-6-ell.json"),
    include_str!("../data/cases/52-2-ell.json"),
    include_str!("../data/cases/53-2-ell.json"),
    include_str!("../data/cases/54-ell.json"),
    include_str!("../data/cases/18-1-plus1.json"),
    include_str!("../data/cases/25-1-plus1.json"),
    include_str!("../data/cases/55-0.json"),
    include_str!("../data/cases/56-0.json"),
];

/// One row of the reference table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseTableRow {
    pub case_id: &'static str,
    pub a: (i64, i64),
    pub c_weight: i64,
    pub index: u64,
    pub rho: (usize, usize),
    pub identity_constant: i64,
}

const fn row(
    case_id: &'static str,
    a: (i64, i64),
    c_weight: i64,
    index: u64,
    rho: (usize, usize),
    identity_constant: i64,
) -> CaseTableRow {
    CaseTableRow {
        case_id,
        a,
        c_weight,
        index,
        rho,
        identity_constant,
    }
}

/// Published values for the thirteen cases.
pub const CASE_TABLE: [CaseTableRow; 13] = [
    row("6-2-ell", (6, 7), -14, 7, (2, 9), 10),
    row("8-1-ell", (8, 9), -18, 9, (1, 8), 12),
    row("9-1-ell", (9, 10), -20, 10, (1, 5), 12),
    row("22-1-ell", (7, 8), -16, 8, (1, 6), 12),
    row("51-2-ell", (10, 11), -22, 11, (1, 11), 12),
    row("51-6-ell", (7, 8), -16, 8, (1, 6), 12),
    row("52-2-ell", (6, 7), -14, 7, (1, 8), 10),
    row("53-2-ell", (8, 9), -18, 9, (1, 8), 12),
    row("54-ell", (6, 7), -14, 7, (1, 8), 10),
    row("18-1-plus1", (12, 13), -26, 13, (1, 9), 10),
    row("25-1-plus1", (15, 17), -17, 17, (1, 6), 6),
    row("55-0", (10, 11), -22, 11, (1, 11), 12),
    row("56-0", (6, 7), -5, 7, (1, 3), 13),
];

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: at `{field}` (line {line}, column {column}): {message}")]
    Parse {
        origin: String,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{origin}: unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { origin: String, found: u32 },
    #[error("{origin}: {message}")]
    Schema { origin: String, message: String },
    #[error("unknown case `{0}`")]
    UnknownCase(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenusClass {
    /// C has arithmetic genus 1.
    Ell,
    /// C is rational.
    Rational,
}

impl fmt::Display for GenusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenusClass::Ell => "ell",
            GenusClass::Rational => "rational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    #[default]
    Auto,
    Off,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub a: Rational,
    pub index: u64,
    pub rho_min: usize,
    pub rho_max: usize,
    /// rank Δ + ρ.
    pub identity_constant: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseRecord {
    pub case_id: String,
    pub genus_class: GenusClass,
    pub model: String,
    pub expected: Expected,
    pub figure: WeightedCurveGraph,
    /// Minimal resolution with witness curves, where one is drawn.
    pub theorem_diagram: Option<WeightedCurveGraph>,
    pub formula: TheoremFormula,
    pub symmetry: Symmetry,
    pub notes: Vec<String>,
}

/// `"p/q"` strings for rationals.
pub mod rational_str {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let (n, d) = t.split_once('/').unwrap_or((t, "1"));
    let n: num_bigint::BigInt = n
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{s}`"))?;
    let d: num_bigint::BigInt = d
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

// ---- file representation ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum KindFile {
    #[serde(rename = "curveC")]
    CurveC,
    #[serde(rename = "exceptional")]
    Exceptional,
    #[serde(rename = "candidate")]
    Candidate,
    #[serde(rename = "witness")]
    Witness,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    id: String,
    kind: KindFile,
    weight: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pool: Option<Pool>,
}

/// A bare graph: the `vertices`/`edges` part of a case file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    vertices: Vec<VertexFile>,
    edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpectedFile {
    #[serde(with = "rational_str")]
    a: Rational,
    index: u64,
    rho_min: usize,
    rho_max: usize,
    identity_constant: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClauseFile {
    guard: String,
    body: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormulaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    global: Option<String>,
    clauses: Vec<ClauseFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    schema: u32,
    case_id: String,
    genus_class: GenusClass,
    model: String,
    expected: ExpectedFile,
    vertices: Vec<VertexFile>,
    edges: Vec<[String; 2]>,
    formula: FormulaFile,
    #[serde(default)]
    symmetry: Symmetry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theorem_diagram: Option<GraphFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

fn schema_err(origin: &str, message: impl fmt::Display) -> CaseError {
    CaseError::Schema {
        origin: origin.to_string(),
        message: message.to_string(),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CaseError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CaseError::Parse {
            origin: origin.to_string(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<WeightedCurveGraph, String> {
        let mut g = WeightedCurveGraph::new();
        for v in &self.vertices {
            let kind = match (v.kind, v.label) {
                (KindFile::CurveC, None) => VertexKind::CurveC,
                (KindFile::Exceptional, None) => VertexKind::Exceptional,
                (KindFile::Witness, None) => VertexKind::Witness,
                (KindFile::Candidate, Some(l)) => VertexKind::Candidate(l),
                (KindFile::Candidate, None) => {
                    return Err(format!("candidate `{}` has no label", v.id))
                }
                (_, Some(_)) => {
                    return Err(format!("`{}` has a label but is not a candidate", v.id))
                }
            };
            let mut cv = CurveVertex::new(v.id.clone(), v.weight, kind);
            cv.pool = v.pool;
            g.add_vertex(cv).map_err(|e| e.to_string())?;
        }
        for [a, b] in &self.edges {
            g.add_edge_by_id(a, b).map_err(|e| e.to_string())?;
        }
        Ok(g)
    }

    pub fn from_graph(g: &WeightedCurveGraph) -> Self {
        let vertices = g
            .vertices()
            .iter()
            .map(|v| VertexFile {
                id: v.id.clone(),
                kind: match v.kind {
                    VertexKind::CurveC => KindFile::CurveC,
                    VertexKind::Exceptional => KindFile::Exceptional,
                    VertexKind::Candidate(_) => KindFile::Candidate,
                    VertexKind::Witness => KindFile::Witness,
                },
                weight: v.weight,
                label: v.kind.label(),
                pool: v.pool,
            })
            .collect();
        let mut edges = vec![];
        for ((i, j), m) in g.edges() {
            for _ in 0..m {
                edges.push([g.vertex(i).id.clone(), g.vertex(j).id.clone()]);
            }
        }
        GraphFile { vertices, edges }
    }
}

fn formula_from_file(f: &FormulaFile) -> Result<TheoremFormula, FormulaError> {
    Ok(TheoremFormula {
        global: f.global.as_deref().map(parse_expr).transpose()?,
        clauses: f
            .clauses
            .iter()
            .map(|c| {
                Ok(Clause {
                    guard: parse_expr(&c.guard)?,
                    body: parse_expr(&c.body)?,
                })
            })
            .collect::<Result<_, FormulaError>>()?,
    })
}

fn formula_to_file(f: &TheoremFormula) -> FormulaFile {
    FormulaFile {
        global: f.global.as_ref().map(ToString::to_string),
        clauses: f
            .clauses
            .iter()
            .map(|c| ClauseFile {
                guard: c.guard.to_string(),
                body: c.body.to_string(),
            })
            .collect(),
    }
}

impl CaseRecord {
    /// Parses a case from JSON text; `origin` names the source in errors.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CaseError> {
        let file: CaseFile = parse_json(text, origin)?;
        if file.schema != SCHEMA_VERSION {
            return Err(CaseError::SchemaVersion {
                origin: origin.to_string(),
                found: file.schema,
            });
        }
        let figure = GraphFile {
            vertices: file.vertices,
            edges: file.edges,
        }
        .to_graph()
        .map_err(|e| schema_err(origin, e))?;
        if figure.curve_c().is_none() {
            return Err(schema_err(origin, "figure has no curveC vertex"));
        }
        let theorem_diagram = file
            .theorem_diagram
            .map(|d| d.to_graph())
            .transpose()
            .map_err(|e| schema_err(origin, format!("theorem_diagram: {e}")))?;
        let formula = formula_from_file(&file.formula).map_err(|e| schema_err(origin, e))?;
        Ok(CaseRecord {
            case_id: file.case_id,
            genus_class: file.genus_class,
            model: file.model,
            expected: Expected {
                a: file.expected.a,
                index: file.expected.index,
                rho_min: file.expected.rho_min,
                rho_max: file.expected.rho_max,
                identity_constant: file.expected.identity_constant,
            },
            figure,
            theorem_diagram,
            formula,
            symmetry: file.symmetry,
            notes: file.notes,
        })
    }

    pub fn to_json(&self) -> String {
        let g = GraphFile::from_graph(&self.figure);
        let file = CaseFile {
            schema: SCHEMA_VERSION,
            case_id: self.case_id.clone(),
            genus_class: self.genus_class,
            model: self.model.clone(),
            expected: ExpectedFile {
                a: self.expected.a.clone(),
                index: self.expected.index,
                rho_min: self.expected.rho_min,
                rho_max: self.expected.rho_max,
                identity_constant: self.expected.identity_constant,
            },
            vertices: g.vertices,
            edges: g.edges,
            formula: formula_to_file(&self.formula),
            symmetry: self.symmetry,
            theorem_diagram: self.theorem_diagram.as_ref().map(GraphFile::from_graph),
            notes: self.notes.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("case records serialize");
        s.push('\n');
        s
    }

    pub fn candidate_labels(&self) -> Vec<u32> {
        self.figure
            .candidates()
            .into_iter()
            .map(|(l, _)| l)
            .collect()
    }
}

pub fn load_case(path: &Path) -> Result<CaseRecord, CaseError> {
    let text = fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CaseRecord::from_json(&text, &path.display().to_string())
}

pub fn save_case(rec: &CaseRecord, path: &Path) -> Result<(), CaseError> {
    fs::write(path, rec.to_json()).map_err(|source| CaseError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a graph from either a full case file (its figure) or a bare
/// `{vertices, edges}` file.
pub fn load_graph(path: &Path) -> Result<WeightedCurveGraph, CaseError> {
    let text = fs::read_to_string(path).map_err(|source| CaseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let origin = path.display().to_string();
    let value: serde_json::Value = parse_json(&text, &origin)?;
    if value.get("case_id").is_some() {
        return CaseRecord::from_json(&text, &origin).map(|r| r.figure);
    }
    let file: GraphFile = parse_json(&text, &origin)?;
    file.to_graph().map_err(|e| schema_err(&origin, e))
}

pub fn graph_to_json(g: &WeightedCurveGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("graphs serialize")
}

fn order_key(id: &str) -> (usize, String) {
    let pos = CASE_ORDER
        .iter()
        .position(|c| *c == id)
        .unwrap_or(CASE_ORDER.len());
    (pos, id.to_string())
}

/// Ids of the case files in `dir`, bundled cases first in classification order.
pub fn list_cases(dir: &Path) -> Result<Vec<String>, CaseError> {
    let entries = fs::read_dir(dir).map_err(|source| CaseError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut ids = vec![];
    for entry in entries {
        let path = entry
            .map_err(|source| CaseError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .path();
        if path.extension().is_some_and(|e| e == "json") {
            ids.push(load_case(&path)?.case_id);
        }
    }
    ids.sort_by_key(|id| order_key(id));
    Ok(ids)
}

pub fn bundled_cases() -> Vec<CaseRecord> {
    BUNDLED
        .iter()
        .zip(CASE_ORDER)
        .map(|(text, id)| CaseRecord::from_json(text, id).expect("bundled cases parse"))
        .collect()
}

/// Finds a bundled case by id. A prefix that identifies one case is also
/// accepted, e.g. `54` or `56`.
pub fn bundled_case(id: &str) -> Result<CaseRecord, CaseError> {
    let pos = CASE_ORDER.iter().position(|c| *c == id).or_else(|| {
        let hits: Vec<usize> = (0..CASE_ORDER.len())
            .filter(|&i| {
                CASE_ORDER[i]
                    .strip_prefix(id)
                    .is_some_and(|rest| rest.starts_with('-'))
            })
            .collect();
        (hits.len() == 1).then(|| hits[0])
    });
    let pos = pos.ok_or_else(|| CaseError::UnknownCase(id.to_string()))?;
    CaseRecord::from_json(BUNDLED[pos], CASE_ORDER[pos])
}

/// A bundled id or a path to a case file.
pub fn resolve_case(arg: &str) -> Result<CaseRecord, CaseError> {
    let path = Path::new(arg);
    if path.is_file() {
        load_case(path)
    } else {
        bundled_case(arg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationItem {
    pub check: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub case_id: String,
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.items.iter().all(|i| i.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationItem> {
        self.items.iter().filter(|i| !i.ok)
    }

    fn push(&mut self, check: &str, ok: bool, detail: impl Into<String>) {
        self.items.push(ValidationItem {
            check: check.to_string(),
            ok,
            detail: detail.into(),
        });
    }
}

/// Runs the self-consistency suite on a loaded record.
pub fn validate_case(rec: &CaseRecord) -> ValidationReport {
    let mut r = ValidationReport {
        case_id: rec.case_id.clone(),
        items: vec![],
    };
    let g = &rec.figure;

    let bad_weights: Vec<&str> = g
        .candidates()
        .into_iter()
        .map(|(_, i)| g.vertex(i))
        .filter(|v| v.weight != -1)
        .map(|v| v.id.as_str())
        .collect();
    r.push(
        "candidate weights",
        bad_weights.is_empty(),
        list_or_ok(&bad_weights, "not -1"),
    );

    let n_candidates = g.candidates().len();
    r.push(
        "candidate count",
        n_candidates == rec.expected.rho_max,
        format!(
            "{n_candidates} candidates, expected rho_max {}",
            rec.expected.rho_max
        ),
    );

    match candidate_pools(g, rec.genus_class) {
        Ok(pools) => {
            r.push("pools", true, pool_summary(&pools));
            match rec.formula.check_labels(&pools) {
                Ok(()) => r.push("formula labels", true, "ok"),
                Err(e) => r.push("formula labels", false, e),
            }
        }
        Err(e) => r.push("pools", false, e.to_string()),
    }

    let sol = match solve_pair(g) {
        Ok(s) => {
            r.push("solve", true, "unique solution");
            s
        }
        Err(e) => {
            r.push("solve", false, e.to_string());
            return r;
        }
    };
    r.push(
        "a",
        sol.a == rec.expected.a,
        format!("computed {}, expected {}", sol.a, rec.expected.a),
    );

    let nonzero: Vec<String> = g
        .candidates()
        .into_iter()
        .filter(|&(_, i)| !sol.coefficient(i).is_zero())
        .map(|(_, i)| format!("{}={}", g.vertex(i).id, sol.coefficient(i)))
        .collect();
    r.push(
        "candidate coefficients",
        nonzero.is_empty(),
        list_or_ok(&nonzero, "nonzero"),
    );

    // Zero is allowed only away from C: Du Val points off the boundary.
    let c = g.curve_c().expect("checked at load");
    let non_candidates: Vec<usize> = (0..g.len())
        .filter(|&i| !matches!(g.vertex(i).kind, VertexKind::Candidate(_)))
        .collect();
    let c_component: Vec<usize> = g
        .connected_components(&non_candidates)
        .into_iter()
        .find(|comp| comp.contains(&c))
        .unwrap_or_default();
    let limit = delta_threshold();
    let out_of_range: Vec<String> = (0..g.len())
        .filter(|&i| g.vertex(i).kind == VertexKind::Exceptional)
        .filter(|&i| {
            let b = sol.coefficient(i);
            b.is_negative() || *b >= limit || (b.is_zero() && c_component.contains(&i))
        })
        .map(|i| format!("{}={}", g.vertex(i).id, sol.coefficient(i)))
        .collect();
    r.push(
        "exceptional coefficients",
        out_of_range.is_empty(),
        list_or_ok(&out_of_range, "outside (0, 6/7)"),
    );

    let complete = completeness_check(g, &sol);
    let detail = match first_incomplete_edge(g, &sol) {
        None => "ok".to_string(),
        Some((i, j)) => format!(
            "a discrepancy-0 divisor lies over `{}`-`{}`",
            g.vertex(i).id,
            g.vertex(j).id
        ),
    };
    r.push("completeness", complete, detail);

    match canonical_index(&sol.a) {
        Ok(i) => r.push(
            "index",
            i == rec.expected.index,
            format!("computed {i}, expected {}", rec.expected.index),
        ),
        Err(e) => r.push("index", false, e.to_string()),
    }
    r
}

fn list_or_ok<S: AsRef<str>>(items: &[S], what: &str) -> String {
    if items.is_empty() {
        "ok".to_string()
    } else {
        let v: Vec<&str> = items.iter().map(AsRef::as_ref).collect();
        format!("{what}: {}", v.join(", "))
    }
}

fn pool_summary(pools: &BTreeMap<u32, Pool>) -> String {
    Pool::ALL
        .iter()
        .map(|p| {
            let ls: Vec<String> = pools
                .iter()
                .filter(|(_, q)| *q == p)
                .map(|(l, _)| l.to_string())
                .collect();
            format!("{p}={{{}}}", ls.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}
