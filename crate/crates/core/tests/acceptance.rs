//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Expected figures are recomputed here from closed forms
//! and a local evaluator rather than taken from the library.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use ringopt::analysis::{count_ops, critical_path, llvm_fixture_deg4, plans, LLVM_FIXTURE};
use ringopt::cli::{run, Styling, EXIT_OK, EXIT_VERIFY_FAILED};
use ringopt::codegen::{count_arith_tokens, emit_benchmark, transform_source, BenchmarkConfig};
use ringopt::oracle::{eval_dag, verify_equivalence, Binding, VerifyMode, Width};
use ringopt::{scan_source, EvalDag, Polynomial, Scheme, SchemeOptions};

const CRITERION_1_BUDGET: Duration = Duration::from_secs(1);
const CRITERION_4_BUDGET: Duration = Duration::from_secs(5);
const CRITERION_5_BUDGET: Duration = Duration::from_secs(30);
const CRITERION_5_MAX_DEGREE: usize = 16;
const CRITERION_5_DRAWS: usize = 32;
const CRITERION_8_MUTATIONS: usize = 100;
const CRITERION_8_DEGREES: std::ops::RangeInclusive<usize> = 2..=9;
const SEED: u64 = 20150701;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(
        std::iter::once("ringopt").chain(args.iter().copied()),
        &mut out,
        &mut err,
        Styling::Plain,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cli_json(args: &[&str]) -> Result<(i32, Value), String> {
    let (code, out, err) = cli(args);
    let doc = serde_json::from_str(&out).map_err(|e| format!("bad JSON ({e}); stderr: {err}"))?;
    Ok((code, doc))
}

fn analyze(path: &Path) -> Result<Value, String> {
    let (code, doc) = cli_json(&["analyze", path.to_str().unwrap(), "--json"])?;
    if code != EXIT_OK {
        return Err(format!("analyze exited {code}"));
    }
    Ok(doc)
}

fn row<'a>(function: &'a Value, scheme: &str) -> Result<&'a Value, String> {
    function["schemes"]
        .as_array()
        .and_then(|rows| rows.iter().find(|r| r["scheme"] == scheme))
        .ok_or_else(|| format!("no `{scheme}` row"))
}

fn add_mul(function: &Value, scheme: &str) -> Result<(u64, u64), String> {
    let r = row(function, scheme)?;
    Ok((r["adds"].as_u64().unwrap(), r["muls"].as_u64().unwrap()))
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, actual: T, expected: T) -> Result<(), String> {
    if actual == expected {
        Ok(())
    } else {
        Err(format!("{what}: got {actual:?}, expected {expected:?}"))
    }
}

fn within(what: &str, elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:?}, budget {budget:?}"))
    }
}

/// `sum(c_i * x^i) mod 2^w`, written out independently of the library.
fn reference(coefficients: &[u64], x: u64, mask: u64) -> u64 {
    let mut total = 0u64;
    let mut power = 1u64;
    for &c in coefficients {
        total = total.wrapping_add(c.wrapping_mul(power)) & mask;
        power = power.wrapping_mul(x) & mask;
    }
    total
}

fn annotated_file(functions: &[(String, usize)]) -> String {
    let mut src = String::new();
    for (name, n) in functions {
        let terms: Vec<String> = (0..=*n).map(|i| format!("A{i}*x^{i}")).collect();
        src.push_str(&format!(
            "#pragma ring_prop (+, 0, -, *, 1) unsigned int\n#pragma math_exp ({})\nunsigned int {name}(unsigned int x) {{\n  return 0;\n}}\n\n",
            terms.join(" + ")
        ));
    }
    src
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let doc = analyze(&fixture("quartic.c"))?;
    let elapsed = start.elapsed();
    let f = &doc["functions"][0];
    expect("degree", f["polynomial"]["degree"].as_u64(), Some(4))?;
    expect("naive", add_mul(f, "naive")?, (4, 10))?;
    expect("incremental", add_mul(f, "incremental")?, (4, 7))?;
    expect("horner", add_mul(f, "horner")?, (4, 4))?;
    within("analyze", elapsed, CRITERION_1_BUDGET)?;
    Ok(format!("(4,10) (4,7) (4,4) in {elapsed:.1?}"))
}

fn criterion_2() -> Outcome {
    let doc = analyze(&fixture("nonic.c"))?;
    let f = &doc["functions"][0];
    expect("degree", f["polynomial"]["degree"].as_u64(), Some(9))?;
    expect("naive", add_mul(f, "naive")?, (9, 45))?;
    expect("incremental", add_mul(f, "incremental")?, (9, 17))?;
    expect("horner", add_mul(f, "horner")?, (9, 9))?;
    Ok("(9,45) (9,17) (9,9)".into())
}

fn criterion_3() -> Outcome {
    let quartic = analyze(&fixture("quartic.c"))?;
    let nonic = analyze(&fixture("nonic.c"))?;
    expect(
        "horner degree 4 path",
        row(&quartic["functions"][0], "horner")?["critical_path"].as_u64(),
        Some(8),
    )?;
    expect(
        "horner degree 9 path",
        row(&nonic["functions"][0], "horner")?["critical_path"].as_u64(),
        Some(18),
    )?;
    let fixture_row = row(&quartic["functions"][0], LLVM_FIXTURE)?;
    expect("fixture path (report)", fixture_row["critical_path"].as_u64(), Some(6))?;
    expect(
        "fixture counts (report)",
        add_mul(&quartic["functions"][0], LLVM_FIXTURE)?,
        (4, 6),
    )?;
    let dag = llvm_fixture_deg4();
    expect("fixture counts", count_ops(&dag).map_err(|e| e.to_string())?, (4, 6))?;
    expect("fixture path", critical_path(&dag).map_err(|e| e.to_string())?, 6)?;
    Ok("horner 8 / 18, llvm-f0 path 6 with (4,6)".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    for n in 1..=16usize {
        let p = Polynomial::with_atoms("x", "A", n).map_err(|e| e.to_string())?;
        let ops = |s: Scheme| count_ops(&s.build(&p, SchemeOptions::default())).unwrap();
        expect(&format!("naive n={n}"), ops(Scheme::Naive), (n, n * (n + 1) / 2))?;
        expect(&format!("incremental n={n}"), ops(Scheme::Incremental), (n, 2 * n - 1))?;
        expect(&format!("horner n={n}"), ops(Scheme::Horner), (n, n))?;
    }
    let elapsed = start.elapsed();
    within("count formulas", elapsed, CRITERION_4_BUDGET)?;
    Ok(format!("degrees 1..16 in {elapsed:.1?}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let width = Width::W8;
    let mask = width.mask();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut plans_checked = 0;
    let mut fixture_checked = false;
    for n in 0..=CRITERION_5_MAX_DEGREE {
        let p = Polynomial::with_atoms("x", "A", n).map_err(|e| e.to_string())?;
        let all: Vec<(String, EvalDag)> = plans(&p, SchemeOptions::default());
        for (name, dag) in &all {
            fixture_checked |= name == LLVM_FIXTURE;
            // library check, exhaustive over x with its own coefficient draws
            let mode = VerifyMode::Exhaustive {
                coefficient_draws: CRITERION_5_DRAWS,
                seed: SEED + n as u64,
            };
            let r = verify_equivalence(dag, &p, width, mode).map_err(|e| e.to_string())?;
            if !r.passed {
                return Err(format!("{name} degree {n}: {:?}", r.counterexample));
            }
            // local check against the closed-form sum
            for _ in 0..CRITERION_5_DRAWS {
                let coefficients: Vec<u64> = (0..=n).map(|_| rng.random::<u64>() & mask).collect();
                let base = coefficients
                    .iter()
                    .enumerate()
                    .fold(Binding::new(width, 0), |b, (i, &c)| b.with(format!("A{i}"), c));
                for x in 0..=mask {
                    let mut b = base.clone();
                    b.variable_value = x;
                    let got = eval_dag(dag, &b).map_err(|e| e.to_string())?;
                    let want = reference(&coefficients, x, mask);
                    if got != want {
                        return Err(format!(
                            "{name} degree {n} x={x} coefficients={coefficients:?}: {got} != {want}"
                        ));
                    }
                }
            }
            plans_checked += 1;
        }
    }
    if !fixture_checked {
        return Err("compiler fixture was not checked".into());
    }
    let elapsed = start.elapsed();
    within("equivalence sweep", elapsed, CRITERION_5_BUDGET)?;
    Ok(format!(
        "{plans_checked} plans, degrees 0..16, w=8, 256 x {CRITERION_5_DRAWS} draws, in {elapsed:.1?}"
    ))
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let once = dir.path().join("horner.c");
    let (code, _, err) = cli(&[
        "transform",
        fixture("quartic.c").to_str().unwrap(),
        "--scheme",
        "horner",
        "-o",
        once.to_str().unwrap(),
    ]);
    expect("transform exit", code, EXIT_OK).map_err(|e| format!("{e}: {err}"))?;

    let doc = analyze(&once)?;
    let f = &doc["functions"][0];
    let implementation = (
        f["implementation"]["adds"].as_u64(),
        f["implementation"]["muls"].as_u64(),
    );
    expect("re-analysis of the rewritten body", implementation, (Some(4), Some(4)))?;
    expect("re-analysis horner row", add_mul(f, "horner")?, (4, 4))?;

    let text = std::fs::read_to_string(&once).map_err(|e| e.to_string())?;
    let functions = scan_source(&text).map_err(|e| e.to_string())?;
    let body = functions[0].body(&text);
    expect("textual counts of the emitted body", count_arith_tokens(body), (4, 4))?;
    if !body.contains("(((A4*x + A3)*x + A2)*x + A1)*x + A0") {
        return Err(format!("unexpected body: {body}"));
    }

    let original = std::fs::read_to_string(fixture("quartic.c")).map_err(|e| e.to_string())?;
    let before = &original[..scan_source(&original).unwrap()[0].body_span.start];
    if !text.starts_with(before) {
        return Err("text before the body changed".into());
    }
    let twice = transform_source(&text, Scheme::Horner, SchemeOptions::default()).map_err(|e| e.to_string())?;
    expect("idempotent re-transform", twice == text, true)?;
    Ok("rewritten body re-analyzes to (4,4); second pass is byte-identical".into())
}

fn c_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| {
        Command::new(c)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

fn criterion_7() -> Outcome {
    let program = emit_benchmark(&BenchmarkConfig::default()).map_err(|e| e.to_string())?;
    let golden_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/bench_deg4_w32_seed0.c");
    let golden = std::fs::read_to_string(&golden_path).map_err(|e| e.to_string())?;
    expect("golden file", program.source == golden, true)?;
    let run = program.simulate().map_err(|e| e.to_string())?;
    expect("simulated self-check", run.verdict, "OK")?;

    // an independent recomputation of what every scheme function returns
    let mask = program.config.width.mask();
    for (scheme, outputs) in &run.outputs {
        for (x, got) in program.inputs.iter().zip(outputs) {
            expect(
                &format!("{scheme} at {x}"),
                *got,
                reference(&program.coefficients, *x, mask),
            )?;
        }
    }

    let syntax = match c_compiler() {
        Some(cc) => {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let src = dir.path().join("bench.c");
            std::fs::write(&src, &program.source).map_err(|e| e.to_string())?;
            let out = Command::new(cc)
                .args(["-std=c99", "-pedantic", "-Wall", "-Wextra", "-Werror", "-fsyntax-only"])
                .arg(&src)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(String::from_utf8_lossy(&out.stderr).into_owned());
            }
            format!("{cc} -std=c99 -fsyntax-only clean")
        }
        None => "no C compiler; golden comparison only".into(),
    };
    Ok(format!("golden match, simulated verdict OK, {syntax}"))
}

fn criterion_8() -> Outcome {
    let functions: Vec<(String, usize)> = CRITERION_8_DEGREES.map(|n| (format!("poly{n}"), n)).collect();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("mutants.c");
    std::fs::write(&path, annotated_file(&functions)).map_err(|e| e.to_string())?;

    let mutate = CRITERION_8_MUTATIONS.to_string();
    let seed = SEED.to_string();
    let (code, doc) = cli_json(&[
        "verify",
        path.to_str().unwrap(),
        "--width",
        "8",
        "--mutate",
        &mutate,
        "--seed",
        &seed,
        "--json",
    ])?;
    expect("verify exit code", code, EXIT_VERIFY_FAILED)?;

    let mask = Width::W8.mask();
    let mut caught = 0;
    let mut degrees_hit = std::collections::BTreeSet::new();
    for (f, (_, n)) in doc["functions"].as_array().unwrap().iter().zip(&functions) {
        let p = Polynomial::with_atoms("x", "A", *n).unwrap();
        let generated = plans(&p, SchemeOptions::default());
        for entry in f["verification"].as_array().unwrap() {
            let Some(m) = entry.get("mutation") else {
                expect("unmutated plan passes", entry["report"]["passed"].as_bool(), Some(true))?;
                continue;
            };
            let report = &entry["report"];
            if report["passed"] != false {
                return Err(format!("mutant escaped: {entry}"));
            }
            let cex = &report["counterexample"];
            let x = cex["binding"]["variable_value"].as_u64().unwrap();
            let coefficients: Vec<u64> = (0..=*n)
                .map(|i| cex["binding"]["coefficient_values"][format!("A{i}")].as_u64().unwrap())
                .collect();
            // replay the counterexample on an independently rebuilt mutant
            let (_, dag) = generated
                .iter()
                .find(|(name, _)| entry["scheme"] == name.as_str())
                .unwrap();
            let mutant = dag.with_swapped_op(m["node"].as_u64().unwrap() as usize).unwrap();
            let b = coefficients
                .iter()
                .enumerate()
                .fold(Binding::new(Width::W8, x), |b, (i, &c)| b.with(format!("A{i}"), c));
            let actual = eval_dag(&mutant, &b).map_err(|e| e.to_string())?;
            let expected = reference(&coefficients, x, mask);
            expect("replayed actual", Some(actual), cex["actual"].as_u64())?;
            expect("replayed expected", Some(expected), cex["expected"].as_u64())?;
            if actual == expected {
                return Err("counterexample does not distinguish the mutant".into());
            }
            caught += 1;
            degrees_hit.insert(*n);
        }
    }
    expect("mutants caught", caught, CRITERION_8_MUTATIONS)?;
    expect("degrees covered", degrees_hit.len(), functions.len())?;
    Ok(format!(
        "{caught}/{CRITERION_8_MUTATIONS} mutants caught with replayable counterexamples across degrees 2..9"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("1 degree-4 operation counts", criterion_1),
        ("2 degree-9 operation counts", criterion_2),
        ("3 critical paths", criterion_3),
        ("4 count formulas, degrees 1..16", criterion_4),
        ("5 exhaustive equivalence at 8 bits", criterion_5),
        ("6 transformation round trip", criterion_6),
        ("7 benchmark harness", criterion_7),
        ("8 mutation detection", criterion_8),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
