//! Operation counts and critical paths of evaluation plans.

use serde::Serialize;

use crate::dag::{DagBuilder, EvalDag, Node};
use crate::error::Result;
use crate::expr::{Expression, Polynomial};
use crate::schemes::{Scheme, SchemeOptions};

/// Label of the hand-encoded degree-4 compiler-output plan.
pub const LLVM_FIXTURE: &str = "llvm-f0";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub scheme: String,
    pub degree: usize,
    pub adds: usize,
    pub muls: usize,
    pub total_ops: usize,
    /// Arithmetic nodes on the longest input-to-root chain.
    pub critical_path: usize,
}

/// Aggregate figures of a compiler-generated plan whose exact shape is not
/// recoverable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceStats {
    pub degree: usize,
    pub adds: usize,
    pub muls: usize,
    pub longest_path: usize,
}

/// LLVM 3.6 `-O3` output for the naive degree-9 source. The listing omits
/// register operands, so only these totals are known.
pub const LLVM_DEG9_REFERENCE: ReferenceStats = ReferenceStats {
    degree: 9,
    adds: 9,
    muls: 14,
    longest_path: 12,
};

/// `(adds, muls)` over nodes whose value depends on the input. Constant-only
/// arithmetic is treated as precomputed.
pub fn count_ops(dag: &EvalDag) -> Result<(usize, usize)> {
    dag.validate()?;
    let dep = dag.input_dependence();
    Ok(dag
        .nodes()
        .iter()
        .zip(&dep)
        .fold((0, 0), |(adds, muls), (node, &d)| match node {
            Node::Add(..) if d => (adds + 1, muls),
            Node::Mul(..) if d => (adds, muls + 1),
            _ => (adds, muls),
        }))
}

/// Longest chain of input-dependent arithmetic nodes ending at the root.
pub fn critical_path(dag: &EvalDag) -> Result<usize> {
    dag.validate()?;
    // None: independent of the input
    let mut depth: Vec<Option<usize>> = Vec::with_capacity(dag.len());
    for node in dag.nodes() {
        let d = match *node {
            Node::Input(_) => Some(0),
            Node::Constant(_) => None,
            Node::Add(a, b) | Node::Mul(a, b) => depth[a].max(depth[b]).map(|m| m + 1),
        };
        depth.push(d);
    }
    Ok(depth[dag.root()].unwrap_or(0))
}

pub fn cost_report(scheme: &str, degree: usize, dag: &EvalDag) -> Result<CostReport> {
    let (adds, muls) = count_ops(dag)?;
    Ok(CostReport {
        scheme: scheme.to_string(),
        degree,
        adds,
        muls,
        total_ops: adds + muls,
        critical_path: critical_path(dag)?,
    })
}

/// Degree-4 plan produced by LLVM for the naive source, over atoms `A0..A4`
/// and input `x`.
///
/// Two branches merge in the final add: `((A3*x + A2)*x + A1)*x` and
/// `A4*x4 + A0` with `x2 = x*x`, `x4 = x2*x2`.
pub fn llvm_fixture_deg4() -> EvalDag {
    let coefficients: Vec<Expression> = (0..=4).map(|i| Expression::coef(format!("A{i}"))).collect();
    llvm_shape("x", &coefficients)
}

/// The same shape over `poly`'s own coefficients, when `poly` has degree 4.
pub fn llvm_fixture_for(poly: &Polynomial) -> Option<EvalDag> {
    (poly.degree() == 4).then(|| llvm_shape(poly.variable(), poly.terms()))
}

fn llvm_shape(variable: &str, a: &[Expression]) -> EvalDag {
    let mut b = DagBuilder::new();
    let x = b.input(variable);
    let c = |b: &mut DagBuilder, i: usize| b.constant(a[i].clone());

    let a3 = c(&mut b, 3);
    let left = b.mul(a3, x);
    let a2 = c(&mut b, 2);
    let left = b.add(left, a2);
    let left = b.mul(left, x);
    let a1 = c(&mut b, 1);
    let left = b.add(left, a1);
    let left = b.mul(left, x);

    let x2 = b.mul(x, x);
    let x4 = b.mul(x2, x2);
    let a4 = c(&mut b, 4);
    let right = b.mul(a4, x4);
    let a0 = c(&mut b, 0);
    let right = b.add(right, a0);

    let root = b.add(left, right);
    b.finish(root)
}

/// Every plan available for `poly`: the four schemes, plus the compiler
/// fixture when the degree matches.
pub fn plans(poly: &Polynomial, opts: SchemeOptions) -> Vec<(String, EvalDag)> {
    let mut out: Vec<(String, EvalDag)> = Scheme::ALL
        .iter()
        .map(|s| (s.name().to_string(), s.build(poly, opts)))
        .collect();
    if let Some(fixture) = llvm_fixture_for(poly) {
        out.push((LLVM_FIXTURE.to_string(), fixture));
    }
    out
}

/// Cost of every plan, cheapest first; ties broken by name.
pub fn compare_schemes(poly: &Polynomial, opts: SchemeOptions) -> Vec<CostReport> {
    let mut reports: Vec<CostReport> = plans(poly, opts)
        .iter()
        .map(|(name, dag)| cost_report(name, poly.degree(), dag).expect("generated plans are valid"))
        .collect();
    reports.sort_by(|a, b| a.total_ops.cmp(&b.total_ops).then_with(|| a.scheme.cmp(&b.scheme)));
    reports
}
