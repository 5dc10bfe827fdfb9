//! Stand-alone C timing harness for a set of schemes.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{emit_scheme, EmittedUnit};
use crate::annotations::Signature;
use crate::dag::EvalDag;
use crate::error::{Error, Result};
use crate::expr::Polynomial;
use crate::oracle::{eval_dag, Binding, Width};
use crate::schemes::{Scheme, SchemeOptions};

pub const MAX_BENCH_DEGREE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkConfig {
    pub degree: usize,
    pub schemes: Vec<Scheme>,
    /// Evaluations per timed loop.
    pub iterations: usize,
    /// Timed loops per scheme; the minimum is reported.
    pub repetitions: usize,
    pub width: Width,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            degree: 4,
            schemes: Scheme::ALL.to_vec(),
            iterations: 128,
            repetitions: 64,
            width: Width::W32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkProgram {
    pub config: BenchmarkConfig,
    pub source: String,
    pub polynomial: Polynomial,
    /// Values substituted for `A0..An`, already reduced to the width.
    pub coefficients: Vec<u64>,
    pub inputs: Vec<u64>,
    pub plans: Vec<(Scheme, EvalDag)>,
    pub functions: Vec<EmittedUnit>,
}

/// What the harness computes, reproduced with the exact evaluator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulatedRun {
    /// Per scheme, one result per input.
    pub outputs: Vec<(Scheme, Vec<u64>)>,
    pub consistent: bool,
    /// The harness's final line: `OK` or `MISMATCH`.
    pub verdict: &'static str,
}

impl BenchmarkProgram {
    pub fn simulate(&self) -> Result<SimulatedRun> {
        let base = self
            .coefficients
            .iter()
            .enumerate()
            .fold(Binding::new(self.config.width, 0), |b, (i, &v)| {
                b.with(format!("A{i}"), v)
            });
        let mut outputs = Vec::with_capacity(self.plans.len());
        for (scheme, dag) in &self.plans {
            let values = self
                .inputs
                .iter()
                .map(|&x| {
                    let mut b = base.clone();
                    b.variable_value = x;
                    eval_dag(dag, &b)
                })
                .collect::<Result<Vec<_>>>()?;
            outputs.push((*scheme, values));
        }
        let consistent = outputs.windows(2).all(|w| w[0].1 == w[1].1);
        Ok(SimulatedRun {
            outputs,
            consistent,
            verdict: if consistent { "OK" } else { "MISMATCH" },
        })
    }
}

fn word_type(width: Width) -> &'static str {
    match width {
        Width::W8 => "uint8_t",
        Width::W16 => "uint16_t",
        Width::W32 => "uint32_t",
        Width::W64 => "uint64_t",
    }
}

/// Arithmetic is done in at least 32 unsigned bits so that narrow operands
/// are never promoted to signed `int`.
fn calc_type(width: Width) -> &'static str {
    match width {
        Width::W64 => "uint64_t",
        _ => "uint32_t",
    }
}

pub fn emit_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkProgram> {
    if config.degree > MAX_BENCH_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree: config.degree,
            max: MAX_BENCH_DEGREE,
        });
    }
    if config.schemes.is_empty() {
        return Err(Error::EmptySchemeList);
    }
    if config.iterations == 0 || config.repetitions == 0 {
        return Err(Error::InvalidIterations);
    }
    let mut schemes: Vec<Scheme> = Vec::new();
    for s in &config.schemes {
        if !schemes.contains(s) {
            schemes.push(*s);
        }
    }
    let config = BenchmarkConfig {
        schemes,
        ..config.clone()
    };
    let width = config.width;

    let polynomial = Polynomial::with_atoms("x", "A", config.degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    let coefficients: Vec<u64> = (0..=config.degree).map(|_| width.reduce(rng.random())).collect();
    rng.set_stream(1);
    let inputs: Vec<u64> = (0..config.iterations).map(|_| width.reduce(rng.random())).collect();

    let calc = "calc_t";
    let mut plans = Vec::new();
    let mut functions = Vec::new();
    for &s in &config.schemes {
        let dag = s.build(&polynomial, SchemeOptions::default());
        let sig = Signature::unary(&format!("static {calc}"), &format!("poly_{}", s.name()), calc, "x");
        functions.push(emit_scheme(&dag, s, &sig)?);
        plans.push((s, dag));
    }

    let source = render(&config, &coefficients, &inputs, &functions);
    Ok(BenchmarkProgram {
        config,
        source,
        polynomial,
        coefficients,
        inputs,
        plans,
        functions,
    })
}

fn render(config: &BenchmarkConfig, coefficients: &[u64], inputs: &[u64], functions: &[EmittedUnit]) -> String {
    let width = config.width;
    let names: Vec<&str> = config.schemes.iter().map(|s| s.name()).collect();
    let mut c = String::new();
    let _ = writeln!(
        c,
        "/* Polynomial evaluation benchmark: degree {}, schemes {}, {} evaluations\n * per timed loop, {}-bit unsigned wrapping arithmetic, seed {}.\n * Generated by ringopt. Build with -DRINGOPT_USE_CLOCK to time with\n * clock_gettime instead of the cycle counter. */",
        config.degree,
        names.join(", "),
        config.iterations,
        width.bits(),
        config.seed
    );
    c.push_str("#define _POSIX_C_SOURCE 199309L\n\n#include <stdint.h>\n#include <stdio.h>\n\n");
    let _ = writeln!(c, "#define ITERATIONS {}", config.iterations);
    let _ = writeln!(c, "#define REPETITIONS {}", config.repetitions);
    let _ = writeln!(c, "#define SCHEMES {}\n", config.schemes.len());
    let _ = writeln!(c, "typedef {} word_t;", word_type(width));
    let _ = writeln!(c, "typedef {} calc_t;\n", calc_type(width));

    c.push_str(
        "#if defined(RINGOPT_USE_CLOCK) || !(defined(__x86_64__) || defined(__i386__))\n\
         #include <time.h>\n\
         \n\
         static uint64_t read_counter(void)\n\
         {\n\
         \x20 struct timespec ts;\n\
         \x20 clock_gettime(CLOCK_MONOTONIC, &ts);\n\
         \x20 return (uint64_t)ts.tv_sec * UINT64_C(1000000000) + (uint64_t)ts.tv_nsec;\n\
         }\n\
         #else\n\
         /* rdtscp waits for all earlier instructions to complete */\n\
         static uint64_t read_counter(void)\n\
         {\n\
         \x20 uint32_t lo, hi, aux;\n\
         \x20 __asm__ __volatile__(\"rdtscp\" : \"=a\"(lo), \"=d\"(hi), \"=c\"(aux) : : \"memory\");\n\
         \x20 (void)aux;\n\
         \x20 return ((uint64_t)hi << 32) | lo;\n\
         }\n\
         #endif\n\n",
    );

    for (i, v) in coefficients.iter().enumerate() {
        let _ = writeln!(c, "#define A{i} ((calc_t)UINT64_C({v}))");
    }
    c.push('\n');

    for f in functions {
        c.push_str(&f.text);
        c.push('\n');
    }

    c.push_str("word_t inputs[ITERATIONS] = {\n");
    for chunk in inputs.chunks(8) {
        let row: Vec<String> = chunk.iter().map(|v| format!("UINT64_C({v})")).collect();
        let _ = writeln!(c, "  {},", row.join(", "));
    }
    c.push_str("};\n\nword_t results[SCHEMES][ITERATIONS];\nstatic volatile word_t sink;\n\n");

    for (k, s) in config.schemes.iter().enumerate() {
        let _ = write!(
            c,
            "static uint64_t time_{name}(void)\n\
             {{\n\
             \x20 uint64_t best = UINT64_MAX;\n\
             \x20 int r, i;\n\
             \n\
             \x20 for (r = 0; r < REPETITIONS; r++) {{\n\
             \x20   uint64_t start, stop;\n\
             \x20   start = read_counter();\n\
             \x20   for (i = 0; i < ITERATIONS; i++) {{\n\
             \x20     results[{k}][i] = (word_t)poly_{name}(inputs[i]);\n\
             \x20   }}\n\
             \x20   stop = read_counter();\n\
             \x20   if (stop - start < best) {{\n\
             \x20     best = stop - start;\n\
             \x20   }}\n\
             \x20 }}\n\
             \x20 return best;\n\
             }}\n\n",
            name = s.name(),
        );
    }

    c.push_str("int main(void)\n{\n  int s, i, ok = 1;\n\n");
    for s in &config.schemes {
        let _ = writeln!(
            c,
            "  printf(\"{name},%llu\\n\", (unsigned long long)time_{name}());",
            name = s.name()
        );
    }
    c.push_str(
        "\n  for (s = 1; s < SCHEMES; s++) {\n\
         \x20   for (i = 0; i < ITERATIONS; i++) {\n\
         \x20     if (results[s][i] != results[0][i]) {\n\
         \x20       ok = 0;\n\
         \x20     }\n\
         \x20   }\n\
         \x20 }\n\
         \x20 for (i = 0; i < ITERATIONS; i++) {\n\
         \x20   sink = results[0][i];\n\
         \x20 }\n\
         \x20 puts(ok ? \"OK\" : \"MISMATCH\");\n\
         \x20 return ok ? 0 : 1;\n\
         }\n",
    );
    c
}
