//! Command-line driver: parses input, runs the pipeline and renders the
//! analysis as JSON or a plain-text table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use milnor_core::monodromy::{self, MotivicTable};
use milnor_core::oracles::{self, ValidationReport};
use milnor_core::poly::{load_support, parse_polynomial};
use milnor_core::{CompactFace, Engine, EquivariantHodgeTable, Error, NewtonPolyhedron, RootOfUnity, SupportSet};
use serde::Serialize;

pub const MAX_VARIABLES: usize = 6;
pub const MAX_SUPPORT: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "milnor", version, about = "Jordan blocks of Milnor monodromies from Newton polyhedra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a polynomial or a support file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Polynomial such as "x^2 + y^3"; coefficients only matter through the support.
    #[arg(required_unless_present = "support", conflicts_with = "support")]
    pub polynomial: Option<String>,
    /// JSON support file {"variables": [...], "support": [[...], ...]}.
    #[arg(long, value_name = "PATH")]
    pub support: Option<PathBuf>,
    /// Variable order for the polynomial, comma separated.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub variables: Option<Vec<String>>,
    #[arg(long, conflicts_with = "table")]
    pub json: bool,
    #[arg(long)]
    pub table: bool,
    /// Only run the closed-form block counts at the largest sizes.
    #[arg(long)]
    pub fast_only: bool,
    /// Run the cross-check battery; any failing check exits with status 3.
    #[arg(long)]
    pub validate: bool,
    /// Include per-face and total equivariant Hodge tables.
    #[arg(long)]
    pub emit_hodge_tables: bool,
    /// Restrict the reported eigenvalues to this one, written a/b.
    #[arg(long, value_name = "a/b")]
    pub eigenvalue: Option<RootOfUnity>,
    /// Lift the guard on the number of variables and support points.
    #[arg(long)]
    pub unsafe_large: bool,
    /// Corrupt the total table before validation.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalysisDocument {
    pub input: String,
    pub variables: Vec<String>,
    pub support: Vec<Vec<i64>>,
    pub n: usize,
    pub convenient: bool,
    pub faces: Vec<CompactFace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<u64>,
    /// Eigenvalue ↦ block size ↦ count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BTreeMap<RootOfUnity, BTreeMap<usize, u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<BTreeMap<RootOfUnity, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fast_paths: Option<FastPaths>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hodge_tables: Option<HodgeTables>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationReport>,
}

#[derive(Debug, Serialize)]
pub struct FastPaths {
    /// Blocks of sizes `n` and `n−1` for each eigenvalue other than 1.
    pub top: BTreeMap<RootOfUnity, BTreeMap<usize, u64>>,
    /// Blocks of sizes `n−1` and `n−2` for eigenvalue 1.
    pub unipotent: BTreeMap<usize, u64>,
}

#[derive(Debug, Serialize)]
pub struct FaceTables {
    pub face: usize,
    pub pyramid: Vec<milnor_core::hodge::HodgeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub own: Option<Vec<milnor_core::hodge::HodgeEntry>>,
}

#[derive(Debug, Serialize)]
pub struct HodgeTables {
    pub faces: Vec<FaceTables>,
    pub first_sum: Vec<milnor_core::hodge::HodgeEntry>,
    pub second_sum: Vec<milnor_core::hodge::HodgeEntry>,
    pub total: Vec<milnor_core::hodge::HodgeEntry>,
}

/// Process outcome: exit status, document on stdout, diagnostics on stderr.
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_internal() {
        3
    } else {
        2
    }
}

fn failure(e: Error) -> Outcome {
    Outcome {
        code: exit_code(&e),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

fn read_input(args: &AnalyzeArgs) -> Result<(String, SupportSet), Error> {
    match (&args.polynomial, &args.support) {
        (Some(p), None) => Ok((p.clone(), parse_polynomial(p, args.variables.as_deref())?)),
        (None, Some(path)) => Ok((path.display().to_string(), load_support(path)?)),
        _ => Err(Error::Precondition("give exactly one of a polynomial or --support".into())),
    }
}

fn guard(s: &SupportSet, unsafe_large: bool) -> Result<(), Error> {
    if unsafe_large {
        return Ok(());
    }
    if s.n() > MAX_VARIABLES {
        return Err(Error::TooLarge(format!(
            "{} variables exceed the limit of {MAX_VARIABLES}; pass --unsafe-large to override",
            s.n()
        )));
    }
    if s.len() > MAX_SUPPORT {
        return Err(Error::TooLarge(format!(
            "{} support points exceed the limit of {MAX_SUPPORT}; pass --unsafe-large to override",
            s.len()
        )));
    }
    Ok(())
}

/// Eigenvalues other than 1 whose order divides some face distance.
fn candidate_eigenvalues(np: &NewtonPolyhedron) -> Vec<RootOfUnity> {
    let mut out = std::collections::BTreeSet::new();
    for f in np.faces() {
        for den in 2..=f.d {
            if f.d % den != 0 {
                continue;
            }
            for num in 1..den {
                out.insert(RootOfUnity::new(num as i64, den));
            }
        }
    }
    out.into_iter().collect()
}

fn fast_paths(np: &NewtonPolyhedron, only: Option<RootOfUnity>) -> Result<FastPaths, Error> {
    let n = np.n();
    let mut top = BTreeMap::new();
    for l in candidate_eigenvalues(np) {
        if only.is_some_and(|o| o != l) {
            continue;
        }
        let (a, b) = monodromy::fastpath_top(np, l)?;
        let sizes: BTreeMap<usize, u64> = [(n, a), (n - 1, b)].into_iter().filter(|e| e.1 > 0).collect();
        if !sizes.is_empty() {
            top.insert(l, sizes);
        }
    }
    let mut unipotent = BTreeMap::new();
    if only.is_none_or(|o| o.is_one()) {
        let (a, b) = monodromy::fastpath_unipotent(np);
        unipotent = [(n - 1, a), (n - 2, b)].into_iter().filter(|e| e.0 > 0 && e.1 > 0).collect();
    }
    Ok(FastPaths { top, unipotent })
}

fn hodge_tables(t: &MotivicTable, only: Option<RootOfUnity>) -> HodgeTables {
    let keep = |table: &EquivariantHodgeTable| {
        table
            .entries()
            .into_iter()
            .filter(|e| only.is_none_or(|o| o == e.alpha))
            .collect::<Vec<_>>()
    };
    HodgeTables {
        faces: t
            .contributions
            .iter()
            .map(|c| FaceTables {
                face: c.face,
                pyramid: keep(&c.pyramid),
                own: c.face_table.as_ref().map(|f| keep(f)),
            })
            .collect(),
        first_sum: keep(&t.first_sum),
        second_sum: keep(&t.second_sum),
        total: keep(&t.total),
    }
}

/// Builds the document; the second value is set when validation failed.
pub fn analyze(args: &AnalyzeArgs) -> Result<(AnalysisDocument, bool), Error> {
    let (input, support) = read_input(args)?;
    guard(&support, args.unsafe_large)?;
    let np = NewtonPolyhedron::new(support.clone())?;
    let engine = Engine::new();
    let mut doc = AnalysisDocument {
        input,
        variables: support.variables().to_vec(),
        support: support.points().map(|p| p.to_vec()).collect(),
        n: np.n(),
        convenient: np.is_convenient(),
        faces: np.faces().to_vec(),
        mu: None,
        blocks: None,
        multiplicities: None,
        fast_paths: None,
        hodge_tables: None,
        validation: None,
    };
    let only = args.eigenvalue;
    let needs_table = !args.fast_only || args.emit_hodge_tables || args.validate;
    let mut table = if needs_table {
        Some(monodromy::motivic_milnor_table(&np, &engine)?)
    } else {
        None
    };
    if args.fast_only {
        doc.fast_paths = Some(fast_paths(&np, only)?);
    } else if let Some(t) = &table {
        let s = monodromy::spectrum_from_table(t)?;
        doc.mu = Some(s.mu);
        doc.blocks = Some(s.blocks.into_iter().filter(|(l, _)| only.is_none_or(|o| o == *l)).collect());
        doc.multiplicities =
            Some(s.multiplicities.into_iter().filter(|(l, _)| only.is_none_or(|o| o == *l)).collect());
    }
    if args.emit_hodge_tables {
        doc.hodge_tables = table.as_ref().map(|t| hodge_tables(t, only));
    }
    let mut failed = false;
    if args.validate {
        let t = table.as_mut().expect("validation computes the table");
        if args.inject_fault {
            let a = t.total.roots().into_iter().find(|a| !a.is_one()).unwrap_or(RootOfUnity::ONE);
            t.total.add(0, 0, a, 1);
        }
        let report = oracles::validate_tables(&np, &engine, t)?;
        failed = !report.all_passed();
        doc.validation = Some(report);
    }
    Ok((doc, failed))
}

pub fn render_json(doc: &AnalysisDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

fn sizes(m: &BTreeMap<usize, u64>) -> String {
    m.iter()
        .rev()
        .map(|(k, c)| format!("{c}×J{k}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn vertex(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn entries(out: &mut String, title: &str, e: &[milnor_core::hodge::HodgeEntry]) {
    let _ = writeln!(out, "  {title}");
    if e.is_empty() {
        let _ = writeln!(out, "    (empty)");
    }
    for h in e {
        let _ = writeln!(out, "    e^({},{})_{:<6} {:>4}", h.p, h.q, h.alpha.to_string(), h.value);
    }
}

pub fn render_table(doc: &AnalysisDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "input       {}", doc.input);
    let _ = writeln!(out, "variables   {}", doc.variables.join(", "));
    let _ = writeln!(out, "n           {}", doc.n);
    let _ = writeln!(out, "convenient  {}", if doc.convenient { "yes" } else { "no" });
    if let Some(mu) = doc.mu {
        let _ = writeln!(out, "mu          {mu}");
    }
    let _ = writeln!(out, "\ncompact faces");
    let _ = writeln!(out, "  {:>3} {:>3} {:>3} {:>3}  {:<8}  vertices", "id", "dim", "d", "m", "interior");
    for f in &doc.faces {
        let vs: Vec<String> = f.vertices.iter().map(|v| vertex(v)).collect();
        let _ = writeln!(
            out,
            "  {:>3} {:>3} {:>3} {:>3}  {:<8}  {}",
            f.id,
            f.dim,
            f.d,
            f.m,
            if f.interior_touching { "yes" } else { "no" },
            vs.join(" ")
        );
    }
    if let (Some(blocks), Some(mult)) = (&doc.blocks, &doc.multiplicities) {
        let _ = writeln!(out, "\njordan blocks");
        let _ = writeln!(out, "  {:<10} {:>12}  blocks", "eigenvalue", "multiplicity");
        for (l, b) in blocks {
            let _ = writeln!(out, "  {:<10} {:>12}  {}", l.to_string(), mult[l], sizes(b));
        }
    }
    if let Some(fp) = &doc.fast_paths {
        let _ = writeln!(out, "\nlargest blocks (closed form)");
        for (l, b) in &fp.top {
            let _ = writeln!(out, "  {:<10} {}", l.to_string(), sizes(b));
        }
        if !fp.unipotent.is_empty() {
            let _ = writeln!(out, "  {:<10} {}", "0/1", sizes(&fp.unipotent));
        }
    }
    if let Some(h) = &doc.hodge_tables {
        let _ = writeln!(out, "\nequivariant hodge tables");
        for f in &h.faces {
            entries(&mut out, &format!("face {} pyramid", f.face), &f.pyramid);
            if let Some(own) = &f.own {
                entries(&mut out, &format!("face {} itself", f.face), own);
            }
        }
        entries(&mut out, "first sum", &h.first_sum);
        entries(&mut out, "second sum", &h.second_sum);
        entries(&mut out, "total", &h.total);
    }
    if let Some(r) = &doc.validation {
        let _ = writeln!(out, "\nvalidation");
        for c in &r.checks {
            let status = if c.passed { "ok" } else { "FAILED" };
            match &c.detail {
                Some(d) => {
                    let _ = writeln!(out, "  {:<30} {status}  {d}", c.name);
                }
                None => {
                    let _ = writeln!(out, "  {:<30} {status}", c.name);
                }
            }
        }
    }
    out
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Analyze(args) => {
            let start = Instant::now();
            let (doc, failed) = match analyze(args) {
                Ok(v) => v,
                Err(e) => return failure(e),
            };
            let stdout = if args.json { render_json(&doc) } else { render_table(&doc) };
            let mut stderr = format!("analysis took {:.3?}\n", start.elapsed());
            if failed {
                stderr.push_str("error: validation failed\n");
            }
            Outcome {
                code: if failed { 3 } else { 0 },
                stdout,
                stderr,
            }
        }
    }
}
