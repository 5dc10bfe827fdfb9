//! Exact evaluation over w-bit wrapping integers and plan equivalence checks.
//!
//! Integers modulo 2^w form a commutative ring, so every plan produced from
//! the same polynomial must agree with it bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dag::{EvalDag, Node};
use crate::error::{Error, Result};
use crate::expr::{Expression, Polynomial};

/// Largest exhaustively enumerated domain (points per coefficient draw).
pub const EXHAUSTIVE_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "u32")]
pub enum Width {
    W8,
    W16,
    W32,
    W64,
}

impl Width {
    pub const ALL: [Width; 4] = [Width::W8, Width::W16, Width::W32, Width::W64];

    pub fn from_bits(bits: u32) -> Result<Width> {
        match bits {
            8 => Ok(Width::W8),
            16 => Ok(Width::W16),
            32 => Ok(Width::W32),
            64 => Ok(Width::W64),
            _ => Err(Error::UnsupportedWidth { bits }),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Width::W8 => 8,
            Width::W16 => 16,
            Width::W32 => 32,
            Width::W64 => 64,
        }
    }

    pub fn mask(self) -> u64 {
        match self {
            Width::W64 => u64::MAX,
            w => (1u64 << w.bits()) - 1,
        }
    }

    pub fn reduce(self, v: u64) -> u64 {
        v & self.mask()
    }

    pub fn reduce_big(self, v: &BigInt) -> u64 {
        let modulus = BigInt::from(1u8) << self.bits();
        v.mod_floor(&modulus).to_u64().expect("reduced below 2^64")
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        a.wrapping_add(b) & self.mask()
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a.wrapping_mul(b) & self.mask()
    }

    pub fn neg(self, a: u64) -> u64 {
        a.wrapping_neg() & self.mask()
    }

    pub fn pow(self, base: u64, exp: u32) -> u64 {
        base.wrapping_pow(exp) & self.mask()
    }

    /// Number of distinct values, `2^w`.
    pub fn domain_size(self) -> u128 {
        1u128 << self.bits()
    }
}

impl From<Width> for u32 {
    fn from(w: Width) -> u32 {
        w.bits()
    }
}

impl TryFrom<u32> for Width {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Width> {
        Width::from_bits(bits)
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// Values for the variable and every coefficient atom, all reduced mod 2^w.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Binding {
    pub width: Width,
    pub variable_value: u64,
    pub coefficient_values: BTreeMap<String, u64>,
}

impl Binding {
    pub fn new(width: Width, variable_value: u64) -> Self {
        Binding {
            width,
            variable_value: width.reduce(variable_value),
            coefficient_values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: u64) -> Self {
        self.coefficient_values.insert(name.into(), self.width.reduce(value));
        self
    }

    fn coefficient(&self, name: &str) -> Result<u64> {
        self.coefficient_values
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundName { name: name.to_string() })
    }
}

/// Evaluate an expression; `Variable` nodes take the binding's variable value.
pub fn eval_expression(expr: &Expression, b: &Binding) -> Result<u64> {
    let w = b.width;
    Ok(match expr {
        Expression::Variable(_) => b.variable_value,
        Expression::Coefficient(name) => b.coefficient(name)?,
        Expression::Literal(v) => w.reduce_big(v),
        Expression::Sum(l, r) => w.add(eval_expression(l, b)?, eval_expression(r, b)?),
        Expression::Product(l, r) => w.mul(eval_expression(l, b)?, eval_expression(r, b)?),
        Expression::Negation(c) => w.neg(eval_expression(c, b)?),
        Expression::Power(base, e) => w.pow(eval_expression(base, b)?, *e),
    })
}

/// Bottom-up evaluation; each node is computed once.
pub fn eval_dag(dag: &EvalDag, b: &Binding) -> Result<u64> {
    let w = b.width;
    let mut values = Vec::with_capacity(dag.len());
    for node in dag.nodes() {
        let v = match node {
            Node::Input(_) => b.variable_value,
            Node::Constant(e) => eval_expression(e, b)?,
            Node::Add(l, r) => w.add(values[*l], values[*r]),
            Node::Mul(l, r) => w.mul(values[*l], values[*r]),
        };
        values.push(v);
    }
    Ok(values[dag.root()])
}

/// `sum(A_i * x^i)` straight from the definition, independent of every plan
/// generator.
pub fn eval_poly_reference(poly: &Polynomial, b: &Binding) -> Result<u64> {
    let w = b.width;
    let mut total = 0u64;
    for (i, c) in poly.terms().iter().enumerate() {
        let coefficient = eval_expression(c, b)?;
        let power = w.pow(b.variable_value, i as u32);
        total = w.add(total, w.mul(coefficient, power));
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every value of the variable, for each of `coefficient_draws` random
    /// coefficient assignments.
    Exhaustive { coefficient_draws: usize, seed: u64 },
    /// `count` points with variable and coefficients drawn uniformly.
    Sampled { count: usize, seed: u64 },
}

impl VerifyMode {
    pub fn seed(self) -> u64 {
        match self {
            VerifyMode::Exhaustive { seed, .. } | VerifyMode::Sampled { seed, .. } => seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    #[default]
    Rayon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub binding: Binding,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub width: Width,
    pub mode: &'static str,
    pub seed: u64,
    pub coefficient_draws: usize,
    /// Points evaluated, up to and including the first counterexample.
    pub points_checked: u64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

/// Compare `dag` against the reference evaluation of `poly`.
pub fn verify_equivalence(
    dag: &EvalDag,
    poly: &Polynomial,
    width: Width,
    mode: VerifyMode,
) -> Result<VerificationReport> {
    verify_equivalence_with(dag, poly, width, mode, Parallelism::default())
}

/// As [`verify_equivalence`]; the report does not depend on `parallelism`.
pub fn verify_equivalence_with(
    dag: &EvalDag,
    poly: &Polynomial,
    width: Width,
    mode: VerifyMode,
    parallelism: Parallelism,
) -> Result<VerificationReport> {
    dag.validate()?;
    let names = free_coefficients(dag, poly);
    let input_varies = poly.degree() > 0 || dag.has_input();

    match mode {
        VerifyMode::Exhaustive {
            coefficient_draws,
            seed,
        } => {
            let xs: u64 = if input_varies {
                if width.domain_size() > EXHAUSTIVE_CAP {
                    return Err(Error::DomainTooLarge {
                        points: width.domain_size(),
                        cap: EXHAUSTIVE_CAP,
                    });
                }
                width.domain_size() as u64
            } else {
                1
            };
            let draws = if names.is_empty() { 1 } else { coefficient_draws.max(1) };
            let check_draw = |d: usize| -> Result<Option<(u64, Counterexample)>> {
                let mut rng = stream(seed, d as u64);
                let base = draw_coefficients(&mut rng, width, &names);
                let plan = Compiled::new(dag, poly, &base)?;
                for x in 0..xs {
                    if let Some(cex) = plan.check(x) {
                        return Ok(Some((d as u64 * xs + x + 1, cex)));
                    }
                }
                Ok(None)
            };
            let first = match parallelism {
                Parallelism::Sequential => (0..draws).map(check_draw).find(|r| !matches!(r, Ok(None))),
                Parallelism::Rayon => (0..draws)
                    .into_par_iter()
                    .map(check_draw)
                    .find_first(|r| !matches!(r, Ok(None))),
            };
            report(width, "exhaustive", seed, draws, draws as u64 * xs, first)
        }
        VerifyMode::Sampled { count, seed } => {
            let check_sample = |i: usize| -> Result<Option<(u64, Counterexample)>> {
                let mut rng = stream(seed, i as u64);
                let x = width.reduce(rng.random());
                let base = draw_coefficients(&mut rng, width, &names);
                let plan = Compiled::new(dag, poly, &base)?;
                Ok(plan.check(x).map(|cex| (i as u64 + 1, cex)))
            };
            let first = match parallelism {
                Parallelism::Sequential => (0..count).map(check_sample).find(|r| !matches!(r, Ok(None))),
                Parallelism::Rayon => (0..count)
                    .into_par_iter()
                    .map(check_sample)
                    .find_first(|r| !matches!(r, Ok(None))),
            };
            report(width, "sampled", seed, count, count as u64, first)
        }
    }
}

fn report(
    width: Width,
    mode: &'static str,
    seed: u64,
    coefficient_draws: usize,
    total: u64,
    first: Option<Result<Option<(u64, Counterexample)>>>,
) -> Result<VerificationReport> {
    let (points_checked, counterexample) = match first {
        None | Some(Ok(None)) => (total, None),
        Some(Ok(Some((n, cex)))) => (n, Some(cex)),
        Some(Err(e)) => return Err(e),
    };
    Ok(VerificationReport {
        width,
        mode,
        seed,
        coefficient_draws,
        points_checked,
        passed: counterexample.is_none(),
        counterexample,
    })
}

fn free_coefficients(dag: &EvalDag, poly: &Polynomial) -> Vec<String> {
    let mut names = poly.coefficient_names();
    names.extend(dag.coefficient_names());
    names.sort();
    names.dedup();
    names
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn draw_coefficients(rng: &mut ChaCha8Rng, width: Width, names: &[String]) -> Binding {
    let mut b = Binding::new(width, 0);
    for name in names {
        let v: u64 = rng.random();
        b = b.with(name.clone(), v);
    }
    b
}

/// A plan and the reference polynomial with coefficients already resolved,
/// so that sweeping the variable only does ring arithmetic.
struct Compiled {
    width: Width,
    base: Binding,
    ops: Vec<Op>,
    root: usize,
    coefficients: Vec<u64>,
}

enum Op {
    Input,
    Const(u64),
    Add(usize, usize),
    Mul(usize, usize),
}

impl Compiled {
    fn new(dag: &EvalDag, poly: &Polynomial, base: &Binding) -> Result<Self> {
        let ops = dag
            .nodes()
            .iter()
            .map(|n| {
                Ok(match n {
                    Node::Input(_) => Op::Input,
                    Node::Constant(e) => Op::Const(eval_expression(e, base)?),
                    Node::Add(a, b) => Op::Add(*a, *b),
                    Node::Mul(a, b) => Op::Mul(*a, *b),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coefficients = poly
            .terms()
            .iter()
            .map(|c| eval_expression(c, base))
            .collect::<Result<Vec<_>>>()?;
        Ok(Compiled {
            width: base.width,
            base: base.clone(),
            ops,
            root: dag.root(),
            coefficients,
        })
    }

    fn run(&self, x: u64, scratch: &mut Vec<u64>) -> u64 {
        let w = self.width;
        scratch.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Input => x,
                Op::Const(c) => c,
                Op::Add(a, b) => w.add(scratch[a], scratch[b]),
                Op::Mul(a, b) => w.mul(scratch[a], scratch[b]),
            };
            scratch.push(v);
        }
        scratch[self.root]
    }

    fn reference(&self, x: u64) -> u64 {
        let w = self.width;
        self.coefficients
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &c)| w.add(acc, w.mul(c, w.pow(x, i as u32))))
    }

    fn check(&self, x: u64) -> Option<Counterexample> {
        let mut scratch = Vec::with_capacity(self.ops.len());
        let actual = self.run(x, &mut scratch);
        let expected = self.reference(x);
        (actual != expected).then(|| {
            let mut binding = self.base.clone();
            binding.variable_value = x;
            Counterexample {
                binding,
                expected,
                actual,
            }
        })
    }
}
