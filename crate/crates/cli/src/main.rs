use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use quasiherm::geometry::{
    bm_variety, character_spectrum, hermitian_characters, hermitian_size, ParamsDescription,
    DEFAULT_ENUMERATION_BUDGET,
};
use quasiherm::mds::{
    build_code, doubly_extend, min_distance, omega_set, rs_equivalence_check, scale_to_fq, CodeMetadata,
    DEFAULT_CODEWORD_BUDGET,
};
use quasiherm::oa::{build_oa, OaSidecar, StrengthReport, DEFAULT_ENTRY_BUDGET};
use quasiherm::suite::{run_grid, select_params, Budgets, GridInstance, GridReport, GridSpec, Status};
use quasiherm::{FieldCtx, FieldDescription};

const TOOL: &str = "quasiherm";
const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "quasiherm", version, about = "Quasi-Hermitian varieties, orthogonal arrays and MDS codes over GF(q^2)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Build M_{a,b} in PG(n, q^2) and check its hyperplane intersection numbers
    Variety(VarietyArgs),
    /// Build the orthogonal array A(F^g, g in R; W) and verify strength 2
    Oa(OaArgs),
    /// Build the [q,5,q-4] evaluation code (n = 3) and check MDS and RS equivalence
    Code(CodeArgs),
    /// Run every check on a grid of (n, q) instances
    Grid(GridArgs),
    /// Print the field description (moduli, epsilon, theta, transversal)
    Field(FieldArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    /// human-readable summary on stdout
    Text,
    /// JSON report on stdout
    Json,
    /// CSV array export (oa only; the summary stays text)
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ParamArgs {
    /// field size q (prime power); the variety lives over GF(q^2)
    #[arg(long)]
    q: u32,
    /// coefficient a as a canonical element index; scanned when omitted
    #[arg(long)]
    a: Option<u32>,
    /// coefficient b as a canonical element index; scanned when omitted
    #[arg(long)]
    b: Option<u32>,
    /// directory receiving the output files
    #[arg(long, value_name = "DIR")]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// cap on enumeration sizes, overriding the built-in defaults
    #[arg(long, env = "QUASIHERM_BUDGET", value_name = "N")]
    budget: Option<u128>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VarietyArgs {
    /// projective dimension
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    p: ParamArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OaArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    p: ParamArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CodeArgs {
    /// projective dimension; the construction needs 3
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// refuse q <= 4 instead of warning
    #[arg(long)]
    strict: bool,
    /// append the coordinate at infinity, giving a [q+1, 5, q-3] code
    #[arg(long)]
    doubly_extend: bool,
    /// also write every codeword
    #[arg(long)]
    dump_codewords: bool,
    #[command(flatten)]
    #[serde(flatten)]
    p: ParamArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    /// instance as n,q or n,q,a,b; repeatable (default: the standard grid)
    #[arg(long = "instance", value_name = "N,Q[,A,B]")]
    instances: Vec<String>,
    /// file receiving the JSON report
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, env = "QUASIHERM_BUDGET", value_name = "N")]
    budget: Option<u128>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct FieldArgs {
    #[arg(long)]
    q: u32,
    /// file receiving the JSON description (stdout otherwise)
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] quasiherm::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use quasiherm::Error as E;
        match self {
            CliError::Core(E::BudgetExceeded { .. }) => 3,
            CliError::Core(E::TheoremViolation(_)) => 1,
            CliError::Core(_) | CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
}

struct Ctx<'a> {
    meta: Meta<'a>,
}

impl<'a> Ctx<'a> {
    fn new(config: &'a Command) -> Self {
        Ctx { meta: Meta { tool: TOOL, version: VERSION, config } }
    }

    fn header(&self) -> String {
        let cfg = serde_json::to_string(self.meta.config).expect("config serializes");
        format!("# {TOOL} {VERSION}\n# config {cfg}\n")
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(path)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VarietyReport<'a> {
    meta: &'a Meta<'a>,
    field: FieldDescription,
    params: ParamsDescription,
    points: usize,
    expected_points: u128,
    /// intersection size -> number of hyperplanes
    spectrum: BTreeMap<usize, usize>,
    expected_characters: [u128; 2],
    passed: bool,
}

fn cmd_variety(cx: &Ctx, args: &VarietyArgs) -> CliResult<bool> {
    let p = &args.p;
    let ctx = FieldCtx::new(p.q)?;
    let params = select_params(&ctx, args.n, p.a, p.b)?;
    let set = bm_variety(&ctx, &params);
    let spectrum = character_spectrum(&ctx, &set, p.budget.unwrap_or(DEFAULT_ENUMERATION_BUDGET))?;
    let expected_points = if args.n == 2 { (p.q as u128).pow(3) + 1 } else { hermitian_size(args.n, p.q) };
    let expected_characters = hermitian_characters(args.n, p.q);
    let support: Vec<u128> = spectrum.support().iter().map(|&c| c as u128).collect();
    let passed = set.len() as u128 == expected_points && support == expected_characters;
    let report = VarietyReport {
        meta: &cx.meta,
        field: ctx.describe(),
        params: params.describe(&ctx),
        points: set.len(),
        expected_points,
        spectrum: spectrum.0,
        expected_characters,
        passed,
    };
    let stem = format!("variety_n{}_q{}", args.n, p.q);
    if let Some(dir) = &p.out {
        write_file(dir, &format!("{stem}.points.txt"), &(cx.header() + &set.export_text(&ctx)))?;
        write_file(dir, &format!("{stem}.json"), &to_json(&report))?;
    }
    if p.format == Format::Json {
        print!("{}", to_json(&report));
    } else {
        println!(
            "M_(a,b) in PG({}, {}^2): a={} b={} ({})",
            args.n,
            p.q,
            report.params.a_text,
            report.params.b_text,
            report.params.condition
        );
        println!("points: {} (expected {expected_points})", report.points);
        println!("spectrum: {:?} (expected {:?})", report.spectrum, expected_characters);
        println!("{}", if passed { "two-character check: pass" } else { "two-character check: FAIL" });
    }
    Ok(passed)
}

#[derive(Serialize)]
struct OaReport<'a> {
    meta: &'a Meta<'a>,
    #[serde(flatten)]
    sidecar: OaSidecar,
    strength_report: StrengthReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<&'a [Vec<u32>]>,
}

fn cmd_oa(cx: &Ctx, args: &OaArgs) -> CliResult<bool> {
    let p = &args.p;
    let ctx = FieldCtx::new(p.q)?;
    let params = select_params(&ctx, args.n, p.a, p.b)?;
    let oa = build_oa(&ctx, &params, p.budget.unwrap_or(DEFAULT_ENTRY_BUDGET))?;
    let strength_report = oa.verify_strength(2);
    let passed = strength_report.passed() && strength_report.expected == Some(oa.index()) && oa.verify_simple();
    let stem = format!("oa_n{}_q{}", args.n, p.q);
    let sidecar = oa.sidecar(&ctx);
    if let Some(dir) = &p.out {
        let inline = p.format == Format::Json;
        let report = OaReport {
            meta: &cx.meta,
            sidecar: sidecar.clone(),
            strength_report: strength_report.clone(),
            entries: inline.then(|| oa.entries()),
        };
        if !inline {
            write_file(dir, &format!("{stem}.csv"), &oa.to_csv())?;
        }
        write_file(dir, &format!("{stem}.json"), &to_json(&report))?;
    }
    if p.format == Format::Json {
        let report = OaReport { meta: &cx.meta, sidecar, strength_report, entries: None };
        print!("{}", to_json(&report));
    } else {
        println!(
            "OA({}, {}, {}, 2) index {} from a={} b={} ({})",
            oa.rows(),
            oa.cols(),
            oa.levels(),
            oa.index(),
            sidecar.params.a_text,
            sidecar.params.b_text,
            sidecar.params.condition
        );
        println!(
            "strength 2: {} column pairs, {} bad cells; simple: {}",
            strength_report.column_sets,
            strength_report.violation_count,
            oa.verify_simple()
        );
        println!("csv sha256: {}", sidecar.csv_sha256);
    }
    Ok(passed)
}

#[derive(Serialize)]
struct CodeReport<'a> {
    meta: &'a Meta<'a>,
    #[serde(flatten)]
    code: CodeMetadata,
    passed: bool,
}

fn cmd_code(cx: &Ctx, args: &CodeArgs) -> CliResult<bool> {
    let p = &args.p;
    if args.n != 3 {
        return Err(CliError::Usage(format!("the code construction needs n = 3, got n = {}", args.n)));
    }
    if p.q <= 4 && args.strict {
        return Err(CliError::Usage(format!("q = {} <= 4: the MDS statements need q > 4", p.q)));
    }
    let ctx = FieldCtx::new(p.q)?;
    let params = select_params(&ctx, 3, p.a, p.b)?;
    let om = omega_set(&ctx);
    if om.degraded() {
        eprintln!("warning: q = {} <= 4, MDS and Reed-Solomon checks are disabled", p.q);
    }
    let budget = p.budget.unwrap_or(DEFAULT_CODEWORD_BUDGET);
    let eval = build_code(&ctx, &params, &om, budget)?;
    let code = if args.doubly_extend { doubly_extend(&ctx, &eval)? } else { scale_to_fq(&ctx, &eval)? };
    let distance = min_distance(&code, budget)?;
    let rs_equivalence = if om.degraded() {
        None
    } else {
        // the interpolation check runs on the unextended code
        let plain = if args.doubly_extend { scale_to_fq(&ctx, &eval)? } else { code.clone() };
        Some(rs_equivalence_check(&ctx, &plain, &om)?)
    };
    let q = p.q as usize;
    let want_d = if args.doubly_extend { q - 3 } else { q.saturating_sub(4) };
    let passed = om.degraded()
        || (distance.dimension == 5
            && distance.min_distance == want_d
            && distance.mds
            && rs_equivalence.as_ref().is_some_and(|r| r.passed()));
    let meta = CodeMetadata {
        q: p.q,
        field: ctx.describe(),
        params: params.describe(&ctx),
        epsilon: ctx.epsilon().index(),
        theta: ctx.theta().index(),
        omega: om.pairs().iter().map(|(a, b)| (a.index(), b.index())).collect(),
        evaluation_points: om.ts().iter().map(|&t| ctx.subfield_label(t).expect("t lies in GF(q)")).collect(),
        degraded: om.degraded(),
        doubly_extended: args.doubly_extend,
        distance: distance.clone(),
        systematic: code.is_systematic(),
        rs_equivalence,
    };
    let report = CodeReport { meta: &cx.meta, code: meta, passed };
    let stem = if args.doubly_extend { format!("code_q{}_ext", p.q) } else { format!("code_q{}", p.q) };
    if let Some(dir) = &p.out {
        write_file(dir, &format!("{stem}.gen.txt"), &(cx.header() + &code.generator_text(&ctx)))?;
        write_file(dir, &format!("{stem}.json"), &to_json(&report))?;
        if args.dump_codewords {
            let mut s = cx.header();
            for w in code.words() {
                let labels: Vec<String> =
                    w.iter().map(|&x| ctx.subfield_label(x).expect("GF(q) entry").to_string()).collect();
                s.push_str(&labels.join(" "));
                s.push('\n');
            }
            write_file(dir, &format!("{stem}.words.txt"), &s)?;
        }
    }
    if p.format == Format::Json {
        print!("{}", to_json(&report));
    } else {
        println!(
            "[{}, {}, {}] code over GF({}) from a={} b={}{}",
            distance.length,
            distance.dimension,
            distance.min_distance,
            p.q,
            report.code.params.a_text,
            report.code.params.b_text,
            if args.doubly_extend { ", doubly extended" } else { "" }
        );
        println!("MDS: {}", distance.mds);
        match &report.code.rs_equivalence {
            Some(r) => println!(
                "Reed-Solomon equivalence: {} ({} mismatches, {} distinct polynomials)",
                if r.passed() { "pass" } else { "FAIL" },
                r.mismatches,
                r.distinct_polynomials
            ),
            None => println!("Reed-Solomon equivalence: skipped"),
        }
    }
    Ok(passed)
}

fn parse_instance(s: &str) -> CliResult<GridInstance> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad instance {s:?}"))))
        .collect::<CliResult<_>>()?;
    match parts[..] {
        [n, q] => Ok(GridInstance::auto(n as usize, q)),
        [n, q, a, b] => Ok(GridInstance { n: n as usize, q, a: Some(a), b: Some(b) }),
        _ => Err(CliError::Usage(format!("instance {s:?} is not n,q or n,q,a,b"))),
    }
}

#[derive(Serialize)]
struct GridOutput<'a> {
    meta: &'a Meta<'a>,
    #[serde(flatten)]
    report: GridReport,
}

fn cmd_grid(cx: &Ctx, args: &GridArgs) -> CliResult<bool> {
    let mut spec = GridSpec::standard();
    if !args.instances.is_empty() {
        spec.instances = args.instances.iter().map(|s| parse_instance(s)).collect::<CliResult<_>>()?;
    }
    if let Some(b) = args.budget {
        spec.budgets = Budgets { enumeration: b, oa_entries: b, codewords: b, ..Budgets::default() };
    }
    let report = run_grid(&spec);
    let passed = report.passed;
    let out = GridOutput { meta: &cx.meta, report };
    if let Some(path) = &args.out {
        fs::write(path, to_json(&out)).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    if args.format == Format::Json {
        print!("{}", to_json(&out));
    } else {
        for inst in &out.report.instances {
            let verdict = if inst.passed() { "pass" } else { "FAIL" };
            println!("(n={}, q={}) {verdict}", inst.n, inst.q);
            if let Some(e) = &inst.error {
                println!("  error: {e}");
            }
            for c in &inst.checks {
                let s = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Skipped => "skip",
                };
                println!("  {s:4} {}", c.name);
            }
        }
    }
    Ok(passed)
}

fn cmd_field(args: &FieldArgs) -> CliResult<bool> {
    let ctx = FieldCtx::new(args.q)?;
    let json = to_json(&ctx.describe());
    match &args.out {
        Some(path) => fs::write(path, &json).map_err(|source| CliError::Io { path: path.clone(), source })?,
        None => print!("{json}"),
    }
    Ok(true)
}

fn run(cli: &Cli) -> CliResult<bool> {
    let cx = Ctx::new(&cli.command);
    match &cli.command {
        Command::Variety(a) => cmd_variety(&cx, a),
        Command::Oa(a) => cmd_oa(&cx, a),
        Command::Code(a) => cmd_code(&cx, a),
        Command::Grid(a) => cmd_grid(&cx, a),
        Command::Field(a) => cmd_field(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
