//! Command implementations, result document, and serialization.

use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::chartables::GeneratorChoice;
use crate::error::{Error, Result};
use crate::numtheory::classify_shape_allow_even;
use crate::oracle::{self, classify_residual, Counterexample, OracleVerdict};
use crate::search::{self, canonicalize, MatchFilter, SearchTask};
use crate::spectra::{build_profile, compare_profiles, MatchReport};

#[derive(Parser, Debug)]
#[command(
    name = "lenspec",
    version,
    about = "Find and certify lens spaces isospectral on p-forms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exhaustive search over all generator classes of one (q, k).
    Search(SearchArgs),
    /// Compare two explicit residue sets directly.
    Compare(CompareArgs),
    /// Run the numeric verification suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Modulus of the lens spaces.
    #[arg(long)]
    pub q: u64,
    /// Half-size of the generating residue set.
    #[arg(long)]
    pub k: usize,
    /// Which pairs to report: any-equality, nontrivial,
    /// forms-not-functions, or all.
    #[arg(long, default_value = "any-equality")]
    pub filter: String,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Sub-range A..B of the enumeration index to process this run.
    #[arg(long)]
    pub chunk: Option<String>,
    /// Checkpoint cache file to append to and resume from.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Accept semiprimes with an even factor.
    #[arg(long)]
    pub allow_even: bool,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Modulus of the lens spaces.
    #[arg(long)]
    pub q: u64,
    /// Full 2k-element residue set, comma-separated; pass exactly twice.
    #[arg(long = "set", num_args = 1, action = clap::ArgAction::Append)]
    pub sets: Vec<String>,
    /// Append numeric generating-function residuals per degree.
    #[arg(long)]
    pub oracle: bool,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    /// Accept semiprimes with an even factor.
    #[arg(long)]
    pub allow_even: bool,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Restrict every suite to q <= 9.
    #[arg(long)]
    pub quick: bool,
    /// Perturb one pair-count entry to confirm the harness catches it
    /// (expected outcome: exit 3).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Everything a command run produces, round-trippable through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    pub task: TaskEcho,
    pub class_count: usize,
    pub candidate_count: u64,
    pub complete: bool,
    pub elapsed_ms: u64,
    pub matches: Vec<MatchRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEcho {
    pub command: String,
    pub q: u64,
    pub k: usize,
    pub shape: String,
    pub filter: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    /// Canonical +/- closures, sorted ascending.
    pub first_set: Vec<u64>,
    pub second_set: Vec<u64>,
    pub equal_degrees: Vec<usize>,
    pub runs: Vec<(usize, usize)>,
    pub any_equality: bool,
    pub nontrivial: bool,
    pub forms_not_functions: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<Vec<OracleResidual>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResidual {
    pub degree: usize,
    pub residual: f64,
    pub verdict: String,
}

impl MatchRecord {
    pub fn from_report(report: &MatchReport, oracle: Option<Vec<OracleResidual>>) -> Self {
        Self::from_report_owned(report.clone(), oracle)
    }

    /// Consuming conversion; search documents can hold millions of
    /// records, so the sets and runs move instead of cloning.
    pub fn from_report_owned(report: MatchReport, oracle: Option<Vec<OracleResidual>>) -> Self {
        let equal_degrees = report.equal_degrees();
        let any_equality = report.any_equality();
        let nontrivial = report.nontrivial();
        let forms_not_functions = report.forms_not_functions();
        MatchRecord {
            first_set: report.first_set,
            second_set: report.second_set,
            equal_degrees,
            runs: report.runs,
            any_equality,
            nontrivial,
            forms_not_functions,
            oracle,
        }
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn set_cell(set: &[u64]) -> String {
    format!("[{}]", join(set, ","))
}

fn csv_quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<ResultDocument> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("cannot parse document: {e}")))
    }

    /// CSV with the published table's column structure.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,k,degrees,first_set,second_set\n");
        for m in &self.matches {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.task.q,
                self.task.k,
                csv_quote(&join(&m.equal_degrees, ",")),
                csv_quote(&set_cell(&m.first_set)),
                csv_quote(&set_cell(&m.second_set)),
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# lenspec {} | {} q={} k={} shape={} filter={}",
            self.version, self.task.command, self.task.q, self.task.k, self.task.shape, self.task.filter
        );
        let _ = writeln!(
            out,
            "# classes={} candidates={} complete={} elapsed_ms={}",
            self.class_count, self.candidate_count, self.complete, self.elapsed_ms
        );
        let mut rows: Vec<[String; 5]> = vec![[
            "q".into(),
            "k".into(),
            "degrees".into(),
            "first set".into(),
            "second set".into(),
        ]];
        for m in &self.matches {
            rows.push([
                self.task.q.to_string(),
                self.task.k.to_string(),
                join(&m.equal_degrees, ","),
                set_cell(&m.first_set),
                set_cell(&m.second_set),
            ]);
        }
        let widths: Vec<usize> = (0..5)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join(" | "));
        }
        let _ = writeln!(out, "# {} match(es)", self.matches.len());
        for m in &self.matches {
            if let Some(residuals) = &m.oracle {
                let _ = writeln!(
                    out,
                    "# oracle {} vs {}",
                    set_cell(&m.first_set),
                    set_cell(&m.second_set)
                );
                for r in residuals {
                    let _ = writeln!(
                        out,
                        "#   p={} residual={:.3e} {}",
                        r.degree, r.residual, r.verdict
                    );
                }
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Table => self.to_table(),
        }
    }
}

fn emit(doc: &ResultDocument, format: OutputFormat, out: Option<&PathBuf>) -> Result<()> {
    let text = doc.render(format);
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Cache(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

fn parse_chunk(text: &str) -> Result<Range<usize>> {
    let (a, b) = text.split_once("..").ok_or_else(|| {
        Error::InvalidParameter(format!("chunk must look like A..B, got {text:?}"))
    })?;
    let start: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad chunk start {a:?}")))?;
    let end: usize = b
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad chunk end {b:?}")))?;
    if end < start {
        return Err(Error::InvalidParameter(format!(
            "chunk end {end} before start {start}"
        )));
    }
    Ok(start..end)
}

/// Parse a residue list; surrounding brackets are accepted so published
/// rows can be pasted verbatim.
pub fn parse_set(text: &str) -> Result<Vec<u64>> {
    let trimmed = text.trim().trim_start_matches('[').trim_end_matches(']');
    trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::InvalidSet(format!("cannot parse residue {:?}", t.trim())))
        })
        .collect()
}

/// Run a search task and assemble the result document.
pub fn run_search_command(args: &SearchArgs) -> Result<ResultDocument> {
    let started = Instant::now();
    let shape = classify_shape_allow_even(args.q, args.allow_even);
    if !shape.is_supported() {
        return Err(Error::UnsupportedShape(shape.describe()));
    }
    let filter: MatchFilter = args.filter.parse()?;
    let chunk = args.chunk.as_deref().map(parse_chunk).transpose()?;
    let task = SearchTask {
        q: args.q,
        k: args.k,
        shape,
        filter,
        chunk,
        jobs: args.jobs,
        checkpoint: args.resume.clone(),
    };
    let outcome = search::run_search(&task)?;
    let matches = outcome
        .reports
        .iter()
        .map(|r| MatchRecord::from_report(r, None))
        .collect();
    Ok(ResultDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        task: TaskEcho {
            command: "search".into(),
            q: args.q,
            k: args.k,
            shape: shape.describe(),
            filter: filter.to_string(),
        },
        class_count: outcome.class_count,
        candidate_count: outcome.candidate_count,
        complete: outcome.complete,
        elapsed_ms: started.elapsed().as_millis() as u64,
        matches,
    })
}

/// Validate, canonicalize and compare two explicit sets.
pub fn run_compare_command(args: &CompareArgs) -> Result<ResultDocument> {
    let started = Instant::now();
    if args.sets.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "compare needs exactly two --set lists, got {}",
            args.sets.len()
        )));
    }
    let shape = classify_shape_allow_even(args.q, args.allow_even);
    if !shape.is_supported() {
        return Err(Error::UnsupportedShape(shape.describe()));
    }
    let set_a = parse_set(&args.sets[0])?;
    let set_b = parse_set(&args.sets[1])?;
    if set_a.len() != set_b.len() {
        return Err(Error::InvalidSet(format!(
            "sets have different sizes ({} vs {})",
            set_a.len(),
            set_b.len()
        )));
    }
    let choice_a = canonicalize(&GeneratorChoice::from_full_set(args.q, &set_a)?);
    let choice_b = canonicalize(&GeneratorChoice::from_full_set(args.q, &set_b)?);
    let k = choice_a.k;

    let profile_a = build_profile(&choice_a, &shape)?;
    let profile_b = build_profile(&choice_b, &shape)?;
    let report = compare_profiles(&profile_a, &profile_b)?;

    let residuals = if args.oracle {
        let rs = oracle::pair_residuals(&choice_a, &choice_b)?;
        Some(
            rs.iter()
                .enumerate()
                .map(|(degree, &residual)| OracleResidual {
                    degree,
                    residual,
                    verdict: format!("{:?}", classify_residual(residual)),
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(ResultDocument {
        version: env!("CARGO_PKG_VERSION").to_string(),
        task: TaskEcho {
            command: "compare".into(),
            q: args.q,
            k,
            shape: shape.describe(),
            filter: "-".into(),
        },
        class_count: 2,
        candidate_count: 2,
        complete: true,
        elapsed_ms: started.elapsed().as_millis() as u64,
        matches: vec![MatchRecord::from_report(&report, residuals)],
    })
}

/// The selftest suites in order; returns the first counterexample.
pub fn run_selftest(args: &SelftestArgs) -> std::result::Result<(), Counterexample> {
    let (roots, dets, consistency): (Vec<u64>, Vec<u64>, Vec<u64>) = if args.quick {
        (vec![7, 8, 9], vec![9], vec![7, 9])
    } else {
        (
            vec![13, 15, 25, 27, 62],
            vec![15, 25, 27, 35, 49],
            vec![7, 9, 11, 13, 15, 25, 27],
        )
    };
    for q in roots {
        eprintln!("selftest: root-of-unity tables, q = {q}");
        oracle::root_of_unity_suite(q)?;
    }
    for q in dets {
        eprintln!("selftest: determinant products, q = {q}");
        oracle::det_product_suite(q)?;
    }
    let mut inject = args.inject_fault;
    for q in consistency {
        eprintln!("selftest: exact/numeric consistency, q = {q}");
        oracle::consistency_suite(q, inject)?;
        inject = false;
    }
    Ok(())
}

pub fn cmd_search(args: &SearchArgs) -> i32 {
    match run_search_command(args) {
        Ok(doc) => {
            if let Err(e) = emit(&doc, args.format, args.out.as_ref()) {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_compare(args: &CompareArgs) -> i32 {
    match run_compare_command(args) {
        Ok(doc) => {
            if let Err(e) = emit(&doc, args.format, args.out.as_ref()) {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn cmd_selftest(args: &SelftestArgs) -> i32 {
    match run_selftest(args) {
        Ok(()) => {
            println!("selftest: all suites passed");
            0
        }
        Err(counterexample) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&counterexample).expect("counterexample serializes")
            );
            3
        }
    }
}

/// Shared verdict wording for the oracle residual band.
pub fn verdict_name(v: OracleVerdict) -> &'static str {
    match v {
        OracleVerdict::Match => "Match",
        OracleVerdict::Mismatch => "Mismatch",
        OracleVerdict::Inconclusive => "Inconclusive",
    }
}
