//! Command implementations for `enriques-verify`.
//!
//! Every command writes to caller-supplied streams and returns its exit code:
//! 0 when verified, 1 on a mathematical mismatch, 2 on usage or input errors.

pub mod render;
pub mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use enriques_core::cases::{self, load_graph, parse_rational, resolve_case, CaseRecord};
use enriques_core::classify::{enumerate_admissible, remaining_vertices, verify_case};
use enriques_core::explore::extract_and_minimise;
use enriques_core::pair::{compute_delta, klt_check, solve_pair, toric_blowup_discrepancy};
use enriques_core::symmetry::is_isomorphic;
use enriques_core::{CaseVerdict, VertexKind, WeightedCurveGraph};

use report::{Timing, VerificationReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "enriques-verify",
    version,
    about = "Verify the classification of log Enriques surfaces with delta = 1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dot,
    Ascii,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate, compare with the theorem condition and check the corollary.
    Verify {
        /// Bundled case id or path to a case file.
        case: Option<String>,
        #[arg(long, conflicts_with = "case")]
        all: bool,
        /// Write a JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the transcription self-checks on a case.
    Validate { case: String },
    /// Print the admissible extraction sets.
    Enumerate {
        case: String,
        #[arg(long, conflicts_with = "count")]
        list: bool,
        #[arg(long)]
        count: bool,
    },
    /// Solve for the pair coefficients on a graph file.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Classify the singularities from contracting a vertex set.
    Klt {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated vertex ids; defaults to every vertex except C.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<String>,
    },
    /// Extract all discrepancy-0 divisors, drop witnesses, blow down.
    Saturate {
        #[arg(long)]
        graph: PathBuf,
        /// Compare the result with this graph up to isomorphism.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Write the resulting graph here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// δ for every admissible set of a case.
    Delta { case: String },
    /// Discrepancy of a weighted blow-up over a node with coefficient `coeff`.
    Toric {
        #[arg(long)]
        alpha: u64,
        #[arg(long)]
        beta: u64,
        #[arg(long)]
        coeff: String,
    },
    /// Draw a case's figure graph.
    Render {
        case: String,
        #[arg(long, value_enum)]
        format: Format,
    },
    /// List case ids, bundled or from a directory.
    List {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

type CmdResult = Result<u8, String>;

/// Runs one parsed command.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Verify { case, all, json } => {
            cmd_verify(case.as_deref(), all, json.as_deref(), out)
        }
        Command::Validate { case } => cmd_validate(&case, out),
        Command::Enumerate { case, count, .. } => cmd_enumerate(&case, count, out),
        Command::Solve { graph, json } => cmd_solve(&graph, json, out),
        Command::Klt { graph, subset } => cmd_klt(&graph, &subset, out),
        Command::Saturate {
            graph,
            compare,
            out: dest,
        } => cmd_saturate(&graph, compare.as_deref(), dest.as_deref(), out),
        Command::Delta { case } => cmd_delta(&case, out),
        Command::Toric { alpha, beta, coeff } => cmd_toric(alpha, beta, &coeff, out),
        Command::Render { case, format } => cmd_render(&case, format, out),
        Command::List { dir } => cmd_list(dir.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            }
        }
    }
}

fn io<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn load(case: &str) -> Result<CaseRecord, String> {
    io(resolve_case(case))
}

fn w(out: &mut dyn Write, s: impl AsRef<str>) -> Result<(), String> {
    io(writeln!(out, "{}", s.as_ref()))
}

fn print_verdict_detail(v: &CaseVerdict, out: &mut dyn Write) -> Result<(), String> {
    for c in v.failed_checks() {
        w(
            out,
            format!(
                "  FAILED {}: expected {}, computed {}",
                c.name, c.expected, c.computed
            ),
        )?;
    }
    for t in &v.diffs.admissible_only {
        w(
            out,
            format!(
                "  admissible but rejected by the theorem: {}",
                report::fmt_set(t)
            ),
        )?;
    }
    for t in &v.diffs.accepted_only {
        w(
            out,
            format!(
                "  accepted by the theorem but not admissible: {}",
                report::fmt_set(t)
            ),
        )?;
    }
    for warning in &v.warnings {
        w(out, format!("  warning: {warning}"))?;
    }
    Ok(())
}

fn cmd_verify(
    case: Option<&str>,
    all: bool,
    json: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let records: Vec<CaseRecord> = match (case, all) {
        (_, true) => cases::bundled_cases(),
        (Some(c), false) => vec![load(c)?],
        (None, false) => return Err("give a case id or --all".into()),
    };
    let start = Instant::now();
    let results: Vec<(Result<CaseVerdict, String>, u128)> = records
        .par_iter()
        .map(|r| {
            let t = Instant::now();
            (io(verify_case(r)), t.elapsed().as_millis())
        })
        .collect();
    let mut verdicts = vec![];
    let mut per_case_ms = BTreeMap::new();
    for (rec, (res, ms)) in records.iter().zip(results) {
        verdicts.push(res.map_err(|e| format!("{}: {e}", rec.case_id))?);
        per_case_ms.insert(rec.case_id.clone(), ms);
    }
    let timing = Timing {
        total_ms: start.elapsed().as_millis(),
        per_case_ms,
    };
    let report = VerificationReport::new(verdicts, all);

    w(out, report::table(&report))?;
    for v in &report.cases {
        if !v.passed() || !v.warnings.is_empty() {
            w(out, format!("{}:", v.case_id))?;
            print_verdict_detail(v, out)?;
        }
    }
    if let [v] = &report.cases[..] {
        w(out, format!("admissible sets ({}):", v.admissible.len()))?;
        for t in &v.admissible {
            w(out, format!("  {}", report::fmt_set(t)))?;
        }
    }
    if let Some(path) = json {
        io(std::fs::write(path, report::to_json_file(&report, &timing)))?;
    }
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn cmd_validate(case: &str, out: &mut dyn Write) -> CmdResult {
    let rec = load(case)?;
    let r = cases::validate_case(&rec);
    for item in &r.items {
        let mark = if item.ok { "ok  " } else { "FAIL" };
        w(out, format!("{mark} {:<26} {}", item.check, item.detail))?;
    }
    Ok(if r.is_ok() { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_enumerate(case: &str, count: bool, out: &mut dyn Write) -> CmdResult {
    let rec = load(case)?;
    let sets = io(enumerate_admissible(&rec.figure))?;
    if count {
        w(out, sets.len().to_string())?;
    } else {
        for t in &sets {
            w(out, t.to_string())?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_solve(path: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let g = io(load_graph(path))?;
    let sol = io(solve_pair(&g))?;
    if json {
        let coeffs: BTreeMap<String, String> = (0..g.len())
            .map(|i| (g.vertex(i).id.clone(), sol.coefficient(i).to_string()))
            .collect();
        let v = serde_json::json!({ "a": sol.a.to_string(), "coefficients": coeffs });
        w(out, io(serde_json::to_string_pretty(&v))?)?;
    } else {
        w(out, format!("a = {}", sol.a))?;
        for (i, v) in g.vertices().iter().enumerate() {
            if v.kind != VertexKind::CurveC {
                w(
                    out,
                    format!("  {:<12} {:>4}  {}", v.id, v.weight, sol.coefficient(i)),
                )?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_klt(path: &Path, subset: &[String], out: &mut dyn Write) -> CmdResult {
    let g = io(load_graph(path))?;
    let idx: Vec<usize> = if subset.is_empty() {
        (0..g.len())
            .filter(|&i| g.vertex(i).kind != VertexKind::CurveC)
            .collect()
    } else {
        io(g.resolve_ids(subset))?
    };
    let r = io(klt_check(&g, &idx))?;
    w(out, format!("verdict: {}", r.verdict))?;
    w(out, format!("negative definite: {}", r.negative_definite))?;
    for c in &r.components {
        let ids: Vec<&str> = c
            .vertices
            .iter()
            .map(|&i| g.vertex(i).id.as_str())
            .collect();
        w(out, format!("component [{}]: {}", ids.join(","), c.verdict))?;
    }
    for (i, b) in &r.coefficients {
        w(out, format!("  {} b = {b}", g.vertex(*i).id))?;
    }
    Ok(EXIT_OK)
}

fn cmd_saturate(
    path: &Path,
    compare: Option<&Path>,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> CmdResult {
    let g = io(load_graph(path))?;
    let red = io(extract_and_minimise(&g))?;
    w(
        out,
        format!(
            "{} blow-ups, {} witnesses removed, {} blow-downs; {} vertices, {} candidates",
            red.blow_ups,
            red.witnesses_removed,
            red.blow_downs,
            red.graph.len(),
            red.graph.candidates().len()
        ),
    )?;
    w(out, format!("a = {}", red.solution.a))?;
    io(write!(out, "{}", render::to_ascii(&red.graph)))?;
    if let Some(d) = dest {
        io(std::fs::write(d, cases::graph_to_json(&red.graph)))?;
    }
    let Some(other) = compare else {
        return Ok(EXIT_OK);
    };
    let target = io(load_graph(other))?;
    Ok(if is_isomorphic(&red.graph, &target).is_some() {
        w(out, "match")?;
        EXIT_OK
    } else {
        w(out, "mismatch")?;
        EXIT_MISMATCH
    })
}

fn cmd_delta(case: &str, out: &mut dyn Write) -> CmdResult {
    let rec = load(case)?;
    let g: &WeightedCurveGraph = &rec.figure;
    let sol = io(solve_pair(g))?;
    let sets = io(enumerate_admissible(g))?;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &sets {
        let d = io(compute_delta(g, &sol, &remaining_vertices(g, t)))?;
        *histogram.entry(d).or_default() += 1;
    }
    for (d, n) in &histogram {
        w(out, format!("delta = {d}: {n} admissible sets"))?;
    }
    let ok = histogram.keys().all(|&d| d == 1);
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_toric(alpha: u64, beta: u64, coeff: &str, out: &mut dyn Write) -> CmdResult {
    let a = parse_rational(coeff)?;
    let d = io(toric_blowup_discrepancy(alpha, beta, &a))?;
    w(out, d.to_string())?;
    Ok(EXIT_OK)
}

fn cmd_render(case: &str, format: Format, out: &mut dyn Write) -> CmdResult {
    let rec = load(case)?;
    let text = match format {
        Format::Dot => render::to_dot(&rec.figure, &rec.case_id),
        Format::Ascii => render::to_ascii(&rec.figure),
    };
    io(write!(out, "{text}"))?;
    Ok(EXIT_OK)
}

fn cmd_list(dir: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let ids = match dir {
        Some(d) => io(cases::list_cases(d))?,
        None => cases::CASE_ORDER.iter().map(|s| s.to_string()).collect(),
    };
    for id in ids {
        w(out, id)?;
    }
    Ok(EXIT_OK)
}
