//! Evaluation plans for a canonical polynomial.
//!
//! | scheme        | MUL (dense, n >= 1) | ADD | critical path     |
//! |---------------|---------------------|-----|-------------------|
//! | naive         | n(n+1)/2            | n   | 2n                |
//! | incremental   | 2n - 1              | n   | n + 1             |
//! | horner        | n                   | n   | 2n                |
//! | balanced      | n + ceil(log2(n+1)) - 1 | n | O(log n)       |

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dag::{DagBuilder, EvalDag, NodeId};
use crate::error::Error;
use crate::expr::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Naive,
    Incremental,
    Horner,
    Balanced,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Naive, Scheme::Incremental, Scheme::Horner, Scheme::Balanced];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Naive => "naive",
            Scheme::Incremental => "incremental",
            Scheme::Horner => "horner",
            Scheme::Balanced => "balanced",
        }
    }

    pub fn build(self, poly: &Polynomial, opts: SchemeOptions) -> EvalDag {
        match self {
            Scheme::Naive => scheme_naive(poly, opts),
            Scheme::Incremental => scheme_incremental(poly, opts),
            Scheme::Horner => scheme_horner(poly),
            Scheme::Balanced => scheme_balanced(poly),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownScheme { name: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SchemeOptions {
    /// Drop the multiply and add of terms whose coefficient is the literal 0
    /// (naive and incremental only).
    pub sparse: bool,
}

fn skipped(poly: &Polynomial, i: usize, opts: SchemeOptions) -> bool {
    opts.sparse && poly.degree() > 0 && poly.terms()[i].is_zero_literal()
}

fn accumulate(b: &mut DagBuilder, acc: Option<NodeId>, term: NodeId) -> NodeId {
    match acc {
        Some(a) => b.add(a, term),
        None => term,
    }
}

/// Each term on its own: `An*x*x*...*x + ... + A1*x + A0`, summed from the
/// highest power down. No multiplication is shared between terms.
pub fn scheme_naive(poly: &Polynomial, opts: SchemeOptions) -> EvalDag {
    let mut b = DagBuilder::new();
    let x = b.input(poly.variable());
    let mut acc = None;
    for i in (0..=poly.degree()).rev() {
        if skipped(poly, i, opts) {
            continue;
        }
        let mut term = b.constant(poly.terms()[i].clone());
        for _ in 0..i {
            term = b.mul(term, x);
        }
        acc = Some(accumulate(&mut b, acc, term));
    }
    let root = acc.unwrap_or_else(|| b.constant(poly.terms()[0].clone()));
    b.finish(root)
}

/// Powers built once (`x2 = x*x`, `xi = x(i-1)*x`) and reused; terms
/// accumulated from `A0` upward.
pub fn scheme_incremental(poly: &Polynomial, opts: SchemeOptions) -> EvalDag {
    let mut b = DagBuilder::new();
    let x = b.input(poly.variable());
    let mut acc = if skipped(poly, 0, opts) {
        None
    } else {
        Some(b.constant(poly.terms()[0].clone()))
    };
    let mut power = x;
    for i in 1..=poly.degree() {
        if i >= 2 {
            power = b.mul(power, x);
        }
        if skipped(poly, i, opts) {
            continue;
        }
        let c = b.constant(poly.terms()[i].clone());
        let term = b.mul(c, power);
        acc = Some(accumulate(&mut b, acc, term));
    }
    let root = acc.unwrap_or_else(|| b.constant(poly.terms()[0].clone()));
    b.finish(root)
}

/// `((An*x + An-1)*x + ...)*x + A0`: one dependent chain of n multiplies and
/// n adds.
pub fn scheme_horner(poly: &Polynomial) -> EvalDag {
    let mut b = DagBuilder::new();
    let x = b.input(poly.variable());
    let n = poly.degree();
    let mut acc = b.constant(poly.terms()[n].clone());
    for i in (0..n).rev() {
        let scaled = b.mul(acc, x);
        let c = b.constant(poly.terms()[i].clone());
        acc = b.add(scaled, c);
    }
    b.finish(acc)
}

/// Estrin-style evaluation. Adjacent coefficients are paired as
/// `A(2i+1)*x + A(2i)`; the pairs are then paired again against `x^2`, then
/// `x^4`, and so on, with the powers obtained by repeated squaring. An odd
/// item at the end of a level is carried up unchanged.
pub fn scheme_balanced(poly: &Polynomial) -> EvalDag {
    let mut b = DagBuilder::new();
    let x = b.input(poly.variable());
    let mut items: Vec<NodeId> = poly.terms().iter().map(|c| b.constant(c.clone())).collect();
    let mut power = x;
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        for pair in items.chunks(2) {
            match *pair {
                [low, high] => {
                    let scaled = b.mul(high, power);
                    next.push(b.add(scaled, low));
                }
                [single] => next.push(single),
                _ => unreachable!(),
            }
        }
        items = next;
        if items.len() > 1 {
            power = b.mul(power, power);
        }
    }
    b.finish(items[0])
}
