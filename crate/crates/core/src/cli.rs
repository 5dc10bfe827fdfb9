//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{compare_schemes, plans, CostReport};
use crate::annotations::{parse_expression, scan_source, AnnotatedFunction};
use crate::codegen::{count_arith_tokens, emit_benchmark, transform_source, BenchmarkConfig};
use crate::dag::EvalDag;
use crate::error::{line_col, Error};
use crate::expr::{normalize, Polynomial, RingSpec};
use crate::oracle::{verify_equivalence, VerificationReport, VerifyMode, Width};
use crate::schemes::{Scheme, SchemeOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

pub const REPORT_SCHEMA: &str = "ringopt.report/1";
pub const NO_COLOR_ENV: &str = "RINGOPT_NO_COLOR";

#[derive(Debug, Parser)]
#[command(
    name = "ringopt",
    version,
    about = "Plan, check and rewrite polynomial evaluation in annotated C"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operation counts of every evaluation scheme for each annotated function
    Analyze(AnalyzeArgs),
    /// Rewrite annotated function bodies with one scheme
    Transform(TransformArgs),
    /// Check every scheme against the polynomial over wrapping integers
    Verify(VerifyArgs),
    /// Write a C timing harness comparing schemes
    EmitBench(EmitBenchArgs),
    /// Analyze or verify a bare expression
    Expr(ExprArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Machine-readable report
    #[arg(long, conflicts_with = "table")]
    pub json: bool,
    /// Human-readable table (default)
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Skip terms whose coefficient is the literal 0 in naive and incremental plans
    #[arg(long)]
    pub sparse: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    pub file: PathBuf,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long)]
    pub sparse: bool,
    /// Output file; `-` or absent writes to stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CheckArgs {
    /// Ring width in bits: 8, 16, 32 or 64
    #[arg(long, default_value_t = 8)]
    pub width: u32,
    /// Every value of the variable (default when the width is at most 16)
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Random points instead of an exhaustive sweep
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random coefficient assignments per exhaustive sweep
    #[arg(long, default_value_t = 32)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `all`, or one scheme name (the degree-4 compiler plan is `llvm-f0`)
    #[arg(long, default_value = "all")]
    pub scheme: String,
    /// Also check N plans with one add/multiply swapped; each should fail
    #[arg(long, default_value_t = 0)]
    pub mutate: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub sparse: bool,
    #[command(flatten)]
    pub check: CheckArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EmitBenchArgs {
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    /// Comma-separated scheme names
    #[arg(long, value_delimiter = ',', default_value = "naive,incremental,horner,balanced", value_parser = parse_scheme)]
    pub schemes: Vec<Scheme>,
    #[arg(long, default_value_t = 128)]
    pub iterations: usize,
    /// Timed loops per scheme; the minimum is reported
    #[arg(long, default_value_t = 64)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 32)]
    pub width: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExprArgs {
    #[arg(long = "expr")]
    pub expression: String,
    #[arg(long = "var")]
    pub variable: String,
    #[arg(long)]
    pub sparse: bool,
    /// Run the equivalence checks as well
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub check: CheckArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse::<Scheme>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub functions: Vec<FunctionReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionReport {
    pub name: String,
    pub ring_prop: String,
    pub math_exp: String,
    pub variable: String,
    pub polynomial: PolynomialReport,
    /// Operator tokens in the body as currently written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implementation: Option<OpCount>,
    pub schemes: Vec<CostReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<PlanVerification>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolynomialReport {
    pub degree: usize,
    /// `A0` first.
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OpCount {
    pub adds: usize,
    pub muls: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanVerification {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
    pub report: VerificationReport,
}

/// An add/multiply swap applied to one node of a generated plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mutation {
    pub node: usize,
    pub from: &'static str,
    pub to: &'static str,
}

/// Whether tables use ANSI styling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Styling {
    Plain,
    Ansi,
}

impl Styling {
    /// ANSI only on a terminal, and never when the opt-out variable is set.
    pub fn detect() -> Styling {
        use std::io::IsTerminal;
        if std::env::var_os(NO_COLOR_ENV).is_some() || !std::io::stdout().is_terminal() {
            Styling::Plain
        } else {
            Styling::Ansi
        }
    }

    fn paint(self, code: &str, text: &str) -> String {
        match self {
            Styling::Plain => text.to_string(),
            Styling::Ansi => format!("\x1b[{code}m{text}\x1b[0m"),
        }
    }
}

/// A failure that ends the command, with the exit code to use.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn located(path: &str, text: &str, offset: usize, e: &Error) -> Failure {
    let (line, col) = line_col(text, offset);
    Failure::input(format!("{path}:{line}:{col}: error: {e}"))
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, styling: Styling) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err, styling) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write, styling: Styling) -> Result<i32, Failure> {
    match command {
        Command::Analyze(a) => {
            let (doc, _) = file_report(&a.file, SchemeOptions { sparse: a.sparse }, None, err)?;
            write_report(out, &doc, a.output.json, styling)?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let (doc, failed) = file_report(&a.file, SchemeOptions { sparse: a.sparse }, Some(&a.check), err)?;
            write_report(out, &doc, a.output.json, styling)?;
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
        Command::Transform(a) => {
            let (path, text) = read_input(&a.file)?;
            let rewritten = transform_source(&text, a.scheme, SchemeOptions { sparse: a.sparse })
                .map_err(|e| located(&path, &text, e.offset().unwrap_or(0), &e))?;
            write_output(a.output.as_deref(), rewritten.as_bytes(), out)?;
            Ok(EXIT_OK)
        }
        Command::EmitBench(a) => {
            let width = Width::from_bits(a.width).map_err(|e| Failure::input(format!("error: {e}")))?;
            let config = BenchmarkConfig {
                degree: a.degree,
                schemes: a.schemes,
                iterations: a.iterations,
                repetitions: a.repetitions,
                width,
                seed: a.seed,
            };
            let program = emit_benchmark(&config).map_err(|e| Failure::input(format!("error: {e}")))?;
            write_output(a.output.as_deref(), program.source.as_bytes(), out)?;
            Ok(EXIT_OK)
        }
        Command::Expr(a) => {
            let (doc, failed) = expr_report(&a)?;
            write_report(out, &doc, a.output.json, styling)?;
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
    }
}

fn read_input(path: &Path) -> Result<(String, String), Failure> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{shown}: error: {e}")))?;
    Ok((shown, text))
}

fn write_output(path: Option<&Path>, bytes: &[u8], out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).map_err(|e| Failure::input(format!("{}: error: {e}", p.display())))
        }
        _ => out
            .write_all(bytes)
            .map_err(|e| Failure::input(format!("error: writing output: {e}"))),
    }
}

fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn file_report(
    path: &Path,
    opts: SchemeOptions,
    check: Option<&CheckArgs>,
    err: &mut dyn Write,
) -> Result<(ReportDocument, bool), Failure> {
    let (shown, text) = read_input(path)?;
    let (mut reports, polys) = source_reports(&text, opts).map_err(|(e, at)| located(&shown, &text, at, &e))?;
    if reports.is_empty() {
        let _ = writeln!(err, "{shown}: warning: no annotated functions found");
    }
    let failed = match check {
        Some(c) => attach_verification(&mut reports, &polys, opts, c)
            .map_err(|e| Failure::input(format!("{shown}: error: {e}")))?,
        None => false,
    };
    Ok((
        ReportDocument {
            schema: REPORT_SCHEMA,
            tool_version: tool_version(),
            input: shown,
            functions: reports,
        },
        failed,
    ))
}

/// Per-function reports and polynomials; errors carry the byte offset to
/// blame.
fn source_reports(text: &str, opts: SchemeOptions) -> Result<(Vec<FunctionReport>, Vec<Polynomial>), (Error, usize)> {
    let functions = scan_source(text).map_err(|e| {
        let at = e.offset().unwrap_or(0);
        (e, at)
    })?;
    let mut polys = Vec::with_capacity(functions.len());
    for f in &functions {
        polys.push(f.polynomial().map_err(|e| (e, f.span.start))?);
    }
    let reports = functions
        .iter()
        .zip(&polys)
        .map(|(f, p)| function_report(f, p, Some(text), opts))
        .collect();
    Ok((reports, polys))
}

/// The `analyze` report for source text already in memory.
pub fn analyze_source(input: &str, text: &str, opts: SchemeOptions) -> crate::Result<ReportDocument> {
    let (functions, _) = source_reports(text, opts).map_err(|(e, _)| e)?;
    Ok(ReportDocument {
        schema: REPORT_SCHEMA,
        tool_version: tool_version(),
        input: input.to_string(),
        functions,
    })
}

fn expr_report(a: &ExprArgs) -> Result<(ReportDocument, bool), Failure> {
    let input = "<expr>";
    let fail = |e: Error| located(input, &a.expression, e.offset().unwrap_or(0), &e);
    let expr = parse_expression(&a.expression, &a.variable).map_err(fail)?;
    let ring = RingSpec::integer("int");
    let poly = normalize(&expr, &ring, &a.variable).map_err(fail)?;
    let opts = SchemeOptions { sparse: a.sparse };
    let mut reports = vec![FunctionReport {
        name: "expr".into(),
        ring_prop: ring.to_pragma(),
        math_exp: a.expression.trim().to_string(),
        variable: a.variable.clone(),
        polynomial: polynomial_report(&poly),
        implementation: None,
        schemes: compare_schemes(&poly, opts),
        verification: None,
    }];
    let failed = if a.verify {
        attach_verification(&mut reports, std::slice::from_ref(&poly), opts, &a.check)
            .map_err(|e| Failure::input(format!("error: {e}")))?
    } else {
        false
    };
    Ok((
        ReportDocument {
            schema: REPORT_SCHEMA,
            tool_version: tool_version(),
            input: input.into(),
            functions: reports,
        },
        failed,
    ))
}

fn polynomial_report(poly: &Polynomial) -> PolynomialReport {
    PolynomialReport {
        degree: poly.degree(),
        coefficients: poly.terms().iter().map(|t| t.to_string()).collect(),
    }
}

fn function_report(f: &AnnotatedFunction, poly: &Polynomial, src: Option<&str>, opts: SchemeOptions) -> FunctionReport {
    FunctionReport {
        name: f.function_name().to_string(),
        ring_prop: f.ring_text.trim().to_string(),
        math_exp: f.math_text.trim().to_string(),
        variable: f.variable().to_string(),
        polynomial: polynomial_report(poly),
        implementation: src.map(|s| {
            let (adds, muls) = count_arith_tokens(f.body(s));
            OpCount { adds, muls }
        }),
        schemes: compare_schemes(poly, opts),
        verification: None,
    }
}

fn verify_mode(c: &CheckArgs, width: Width) -> VerifyMode {
    match c.samples {
        Some(count) => VerifyMode::Sampled { count, seed: c.seed },
        None if c.exhaustive || width.bits() <= 16 => VerifyMode::Exhaustive {
            coefficient_draws: c.draws,
            seed: c.seed,
        },
        None => VerifyMode::Sampled {
            count: 10_000,
            seed: c.seed,
        },
    }
}

/// Verify the selected plans of every function, plus `c.mutate` mutants
/// spread over them. Returns whether any check failed.
fn attach_verification(
    reports: &mut [FunctionReport],
    polys: &[Polynomial],
    opts: SchemeOptions,
    c: &CheckArgs,
) -> crate::Result<bool> {
    let width = Width::from_bits(c.width)?;
    let mode = verify_mode(c, width);
    let selected: Vec<Vec<(String, EvalDag)>> = polys
        .iter()
        .map(|p| {
            plans(p, opts)
                .into_iter()
                .filter(|(name, _)| c.scheme == "all" || *name == c.scheme)
                .collect()
        })
        .collect();
    if c.scheme != "all" && selected.iter().all(Vec::is_empty) && !polys.is_empty() {
        return Err(Error::UnknownScheme { name: c.scheme.clone() });
    }

    let mut failed = false;
    for ((report, poly), plans) in reports.iter_mut().zip(polys).zip(&selected) {
        let mut entries = Vec::with_capacity(plans.len());
        for (name, dag) in plans {
            let r = verify_equivalence(dag, poly, width, mode)?;
            failed |= !r.passed;
            entries.push(PlanVerification {
                scheme: name.clone(),
                mutation: None,
                report: r,
            });
        }
        report.verification = Some(entries);
    }

    for m in mutations(&selected, c.mutate, c.seed) {
        let (name, dag) = &selected[m.function][m.plan];
        let mutant = dag
            .with_swapped_op(m.mutation.node)
            .expect("mutation targets an arithmetic node");
        let r = verify_equivalence(&mutant, &polys[m.function], width, mode)?;
        failed |= !r.passed;
        reports[m.function]
            .verification
            .get_or_insert_with(Vec::new)
            .push(PlanVerification {
                scheme: name.clone(),
                mutation: Some(m.mutation),
                report: r,
            });
    }
    Ok(failed)
}

/// A plan index with its arithmetic nodes, flagged `true` for additions.
type PlanNodes = (usize, Vec<(usize, bool)>);

struct Planned {
    function: usize,
    plan: usize,
    mutation: Mutation,
}

/// `count` seeded picks: a function, then one of its plans, then one of
/// that plan's arithmetic nodes, each uniformly.
fn mutations(selected: &[Vec<(String, EvalDag)>], count: usize, seed: u64) -> Vec<Planned> {
    use crate::dag::Node;
    let arithmetic = |dag: &EvalDag| -> Vec<(usize, bool)> {
        dag.nodes()
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n {
                Node::Add(..) => Some((i, true)),
                Node::Mul(..) => Some((i, false)),
                _ => None,
            })
            .collect()
    };
    // per function, the plans that have something to mutate
    let candidates: Vec<(usize, Vec<PlanNodes>)> = selected
        .iter()
        .enumerate()
        .map(|(fi, plans)| {
            let usable = plans
                .iter()
                .enumerate()
                .map(|(pi, (_, dag))| (pi, arithmetic(dag)))
                .filter(|(_, nodes)| !nodes.is_empty())
                .collect::<Vec<_>>();
            (fi, usable)
        })
        .filter(|(_, plans)| !plans.is_empty())
        .collect();
    if candidates.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    (0..count)
        .map(|_| {
            let (function, plans) = &candidates[rng.random_range(0..candidates.len())];
            let (plan, nodes) = &plans[rng.random_range(0..plans.len())];
            let (node, is_add) = nodes[rng.random_range(0..nodes.len())];
            let (from, to) = if is_add { ("add", "mul") } else { ("mul", "add") };
            Planned {
                function: *function,
                plan: *plan,
                mutation: Mutation { node, from, to },
            }
        })
        .collect()
}

fn write_report(out: &mut dyn Write, doc: &ReportDocument, json: bool, styling: Styling) -> Result<(), Failure> {
    let text = if json {
        let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
        s.push('\n');
        s
    } else {
        render_table(doc, styling)
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::input(format!("error: writing output: {e}")))
}

/// One block per function: scheme rows with ADD and MUL columns.
pub fn render_table(doc: &ReportDocument, styling: Styling) -> String {
    let mut s = String::new();
    for f in &doc.functions {
        s.push_str(&styling.paint(
            "1",
            &format!(
                "{}  degree {} in {}  [{}]",
                f.name, f.polynomial.degree, f.variable, f.math_exp
            ),
        ));
        s.push('\n');
        s.push_str(&styling.paint(
            "2",
            &format!(
                "  {:<14} {:>4} {:>4} {:>6} {:>5}",
                "version", "ADD", "MUL", "total", "path"
            ),
        ));
        s.push('\n');
        if let Some(imp) = f.implementation {
            s.push_str(&format!(
                "  {:<14} {:>4} {:>4} {:>6} {:>5}\n",
                "(as written)",
                imp.adds,
                imp.muls,
                imp.adds + imp.muls,
                "-"
            ));
        }
        for r in &f.schemes {
            s.push_str(&format!(
                "  {:<14} {:>4} {:>4} {:>6} {:>5}\n",
                r.scheme, r.adds, r.muls, r.total_ops, r.critical_path
            ));
        }
        if let Some(checks) = &f.verification {
            for v in checks {
                let status = if v.report.passed {
                    styling.paint("32", "pass")
                } else {
                    styling.paint("31", "FAIL")
                };
                let label = match v.mutation {
                    Some(m) => format!("{} (node {} {}->{})", v.scheme, m.node, m.from, m.to),
                    None => v.scheme.clone(),
                };
                s.push_str(&format!(
                    "  verify {:<28} {}  w={} {} points={}",
                    label, status, v.report.width, v.report.mode, v.report.points_checked
                ));
                if let Some(cex) = &v.report.counterexample {
                    let coeffs: Vec<String> = cex
                        .binding
                        .coefficient_values
                        .iter()
                        .map(|(k, v)| format!("{k}={v}"))
                        .collect();
                    s.push_str(&format!(
                        "  {}={} {} expected={} actual={}",
                        f.variable,
                        cex.binding.variable_value,
                        coeffs.join(" "),
                        cex.expected,
                        cex.actual
                    ));
                }
                s.push('\n');
            }
        }
        s.push('\n');
    }
    s
}
