//! The `wmra` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure or mismatch, 2 I/O, parse
//! or usage error, 3 degenerate channel during simulation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_integer::binomial;
use serde::Serialize;
use serde_json::{json, Value};

use crate::array::{parse_array, WmrArray};
use crate::construct::{choose_method, construct, Method};
use crate::engine::{
    builtin_job, generate_corpus, load_files, matches_centralized, run_centralized,
    run_distributed, EngineError, RunConfig,
};
use crate::epda::{corollary1_params, parse_epda, wmra_from_epda, EpdaError};
use crate::ndt::{ndt, optimal_ndt, Rational};
use crate::shuffle::{
    gen_channel, simulate_shuffle, IvStore, ShuffleConfig, ShuffleReport, DEFAULT_SYMBOLS,
};
use crate::TOOL_VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "wmra", version, about = "Wireless MapReduce array toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    CaseA,
    CaseB,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an array for K nodes at computation load r.
    Construct {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Check an array file against the defining conditions.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Simulate the shuffle of an array over random channels.
    Simulate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "snr-db")]
        snr_db: Option<f64>,
        /// Complex symbols per intermediate value.
        #[arg(long = "T", default_value_t = DEFAULT_SYMBOLS)]
        symbols: usize,
        #[arg(long, default_value_t = 1)]
        trials: u64,
    },
    /// Run a MapReduce job on an array and compare with a centralized run.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        job: String,
        /// Directory of N files or a JSON manifest; a seeded corpus when omitted.
        #[arg(long)]
        files: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output functions Q, a multiple of K; defaults to K.
        #[arg(long)]
        functions: Option<usize>,
        #[arg(long = "T", default_value_t = DEFAULT_SYMBOLS)]
        symbols: usize,
        #[arg(long = "snr-db")]
        snr_db: Option<f64>,
    },
    /// Convert a 2r-regular EPDA file into an array file.
    ConvertEpda {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Tabulate constructible (K, r) pairs up to K-max.
    Sweep {
        #[arg(long = "K-max")]
        k_max: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        /// Add rows for the EPDA family parameters with 2r <= K.
        #[arg(long = "include-epda")]
        include_epda: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn failed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Construct {
            k,
            r,
            method,
            out,
            format,
        } => cmd_construct(k, r, method, out.as_deref(), format),
        Command::Verify { input, json } => cmd_verify(&input, json),
        Command::Simulate {
            input,
            seed,
            snr_db,
            symbols,
            trials,
        } => cmd_simulate(&input, seed, snr_db, symbols, trials),
        Command::Run {
            input,
            job,
            files,
            seed,
            functions,
            symbols,
            snr_db,
        } => cmd_run(
            &input,
            &job,
            files.as_deref(),
            seed,
            functions,
            symbols,
            snr_db,
        ),
        Command::ConvertEpda { input, out, format } => {
            cmd_convert_epda(&input, out.as_deref(), format)
        }
        Command::Sweep {
            k_max,
            format,
            include_epda,
        } => cmd_sweep(k_max, format, include_epda),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_array(path: &Path) -> Result<WmrArray, Failure> {
    parse_array(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            stdout(text);
            Ok(())
        }
    }
}

fn with_version(doc: &str) -> String {
    let mut v: Value = serde_json::from_str(doc).expect("library emits valid JSON");
    v.as_object_mut()
        .expect("JSON object")
        .insert("tool_version".into(), json!(TOOL_VERSION));
    format!("{v}\n")
}

// A closed pipe (`wmra sweep | head`) is not an error worth reporting.
fn stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    stdout(&format!("{:#}\n", v));
}

fn array_document(a: &WmrArray, format: FormatArg) -> String {
    match format {
        FormatArg::Text => a.to_text_with_header(),
        FormatArg::Json => with_version(&a.to_json()),
    }
}

fn cmd_construct(
    k: usize,
    r: usize,
    method: MethodArg,
    out: Option<&Path>,
    format: FormatArg,
) -> CmdResult {
    let unsupported = || {
        Failure::input(format!(
            "no direct construction for K={k}, r={r} (needs 2r >= K, or r dividing K); \
             supply an EPDA and use `wmra convert-epda`"
        ))
    };
    if k == 0 || r == 0 || r > k {
        return Err(Failure::input(format!(
            "invalid load: need 1 <= r <= K, got K={k}, r={r}"
        )));
    }
    let method = match method {
        MethodArg::Auto => choose_method(k, r).ok_or_else(unsupported)?,
        MethodArg::CaseA => Method::CaseA,
        MethodArg::CaseB => Method::CaseB,
    };
    let a = construct(k, r, method).map_err(|e| Failure::input(e.to_string()))?;
    emit(out, &array_document(&a, format))?;
    if let Some(p) = out {
        eprintln!(
            "wrote {} ({}, K={k}, N={}, r={r}, S={})",
            p.display(),
            method.name(),
            a.n(),
            a.s()
        );
    }
    Ok(EXIT_OK)
}

fn cmd_verify(input: &Path, as_json: bool) -> CmdResult {
    let a = read_array(input)?;
    let report = a.verify();
    if as_json {
        print_json(&json!({
            "tool_version": TOOL_VERSION,
            "K": a.k(),
            "N": a.n(),
            "r": a.r(),
            "S": a.s(),
            "passed": report.passed,
            "violations": report.violations,
        }));
    } else {
        stdout(&format!(
            "K={} N={} r={} S={}\n{report}",
            a.k(),
            a.n(),
            a.r(),
            a.s()
        ));
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

/// Channel seed of trial `i`; the noise seed of a trial is derived from it.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_add(trial)
}

const NOISE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

fn cmd_simulate(
    input: &Path,
    seed: u64,
    snr_db: Option<f64>,
    symbols: usize,
    trials: u64,
) -> CmdResult {
    let a = read_array(input)?;
    if symbols == 0 || trials == 0 {
        return Err(Failure::input("--T and --trials must be positive"));
    }
    let report = a.verify();
    if !report.passed {
        return Err(Failure::failed(format!(
            "array fails verification:\n{report}"
        )));
    }
    let mut max_residual: f64 = 0.0;
    let mut max_leakage: f64 = 0.0;
    let mut first: Option<ShuffleReport> = None;
    for i in 0..trials {
        let ts = trial_seed(seed, i);
        let h = gen_channel(a.k(), ts);
        let ivs = IvStore::random(&a, a.k(), symbols, ts);
        let cfg = ShuffleConfig {
            functions: None,
            snr_db,
            noise_seed: ts ^ NOISE_SALT,
        };
        match simulate_shuffle(&a, &h, &ivs, &cfg) {
            Ok(rep) => {
                max_residual = max_residual.max(rep.max_residual);
                max_leakage = max_leakage.max(rep.max_leakage);
                first.get_or_insert(rep);
            }
            Err(e) if e.is_degenerate_channel() => {
                eprintln!("error: trial {i}: {e}");
                return Ok(EXIT_DEGENERATE);
            }
            Err(e) => return Err(Failure::input(e.to_string())),
        }
    }
    let first = first.expect("at least one trial");
    print_json(&json!({
        "tool_version": TOOL_VERSION,
        "seed": seed,
        "trials": trials,
        "T": symbols,
        "snr_db": snr_db,
        "ndt": first.ndt,
        "ndt_decimal": first.ndt.to_f64(),
        "max_residual": max_residual,
        "max_leakage": max_leakage,
        "first_trial": first,
    }));
    Ok(EXIT_OK)
}

fn engine_failure(e: EngineError) -> Failure {
    match e {
        EngineError::InvalidArray(_) => Failure::failed(e.to_string()),
        EngineError::Shuffle(ref s) if s.is_degenerate_channel() => Failure {
            code: EXIT_DEGENERATE,
            message: e.to_string(),
        },
        _ => Failure::input(e.to_string()),
    }
}

fn cmd_run(
    input: &Path,
    job_name: &str,
    files: Option<&Path>,
    seed: u64,
    functions: Option<usize>,
    symbols: usize,
    snr_db: Option<f64>,
) -> CmdResult {
    let a = read_array(input)?;
    let job = builtin_job(job_name, functions.unwrap_or(a.k()), symbols).map_err(engine_failure)?;
    let data = match files {
        Some(p) => load_files(p).map_err(engine_failure)?,
        None => generate_corpus(a.n(), seed),
    };
    let run = run_distributed(&a, job.as_ref(), &data, &RunConfig { seed, snr_db })
        .map_err(engine_failure)?;
    let central = run_centralized(job.as_ref(), &data);
    let matches = matches_centralized(job.as_ref(), &run.outputs, &central);
    print_json(&json!({
        "tool_version": TOOL_VERSION,
        "seed": seed,
        "job": job.name(),
        "files": data.len(),
        "Q": job.functions(),
        "snr_db": snr_db,
        "ndt": run.report.ndt,
        "max_residual": run.report.max_residual,
        "outputs": run.outputs,
        "centralized": central,
        "matches_centralized": matches,
    }));
    Ok(if matches { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_convert_epda(input: &Path, out: Option<&Path>, format: FormatArg) -> CmdResult {
    let text = read(input)?;
    let e = parse_epda(&text).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
    let a = wmra_from_epda(&e).map_err(|err| match err {
        EpdaError::InvalidLoad { .. } => Failure::input(err.to_string()),
        _ => Failure::failed(err.to_string()),
    })?;
    emit(out, &array_document(&a, format))?;
    Ok(EXIT_OK)
}

/// One line of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub r: usize,
    pub source: String,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub ndt: Rational,
    pub ndt_decimal: f64,
    pub optimal_ndt: Rational,
    pub optimal: bool,
    /// `C(K, r)`, the smallest file count of the wired coded scheme.
    #[serde(rename = "N_lcw")]
    pub n_lcw: u128,
}

/// Rows for every `(K, r)` with `2 <= K <= k_max` that the direct
/// constructions cover, plus the EPDA family rows when requested.
pub fn sweep_rows(k_max: usize, include_epda: bool) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for k in 2..=k_max {
        for r in 1..=k {
            let n_lcw = binomial(k as u128, r as u128);
            let opt = optimal_ndt(k, r).expect("1 <= r <= K");
            if let Some(method) = choose_method(k, r) {
                let a = construct(k, r, method).expect("chosen method applies");
                let l = ndt(&a).expect("constructions verify");
                rows.push(SweepRow {
                    k,
                    r,
                    source: method.name().into(),
                    n: a.n() as u64,
                    s: a.s() as u64,
                    ndt: l,
                    ndt_decimal: l.to_f64(),
                    optimal_ndt: opt,
                    optimal: l == opt,
                    n_lcw,
                });
            }
            if include_epda && 2 * r <= k {
                let p = corollary1_params(k, r).expect("2r <= K");
                rows.push(SweepRow {
                    k,
                    r,
                    source: "epda".into(),
                    n: p.n,
                    s: p.s,
                    ndt: p.ndt,
                    ndt_decimal: p.ndt.to_f64(),
                    optimal_ndt: opt,
                    optimal: p.ndt == opt,
                    n_lcw,
                });
            }
        }
    }
    rows
}

/// The sweep table as CSV with a header line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "K",
        "r",
        "source",
        "N",
        "S",
        "ndt",
        "optimal_ndt",
        "optimal",
        "N_lcw",
    ])
    .expect("in-memory write");
    for row in rows {
        w.write_record([
            row.k.to_string(),
            row.r.to_string(),
            row.source.clone(),
            row.n.to_string(),
            row.s.to_string(),
            row.ndt.to_string(),
            row.optimal_ndt.to_string(),
            row.optimal.to_string(),
            row.n_lcw.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII table")
}

fn cmd_sweep(k_max: usize, format: TableFormat, include_epda: bool) -> CmdResult {
    let rows = sweep_rows(k_max, include_epda);
    match format {
        TableFormat::Json => print_json(&json!({
            "tool_version": TOOL_VERSION,
            "K_max": k_max,
            "rows": rows,
        })),
        TableFormat::Csv => stdout(&sweep_csv(&rows)),
    }
    Ok(EXIT_OK)
}
