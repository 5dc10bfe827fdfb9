//! C emission for evaluation plans.
//!
//! Emitted bodies use 2-space indentation and LF line endings. Coefficients
//! that are not a single identifier or literal are hoisted into `const`
//! locals at the top of the body; those lines are precomputed constants and
//! are not counted as arithmetic by [`count_arith_tokens`].

mod bench;

use std::collections::HashSet;

use crate::annotations::{scan_source, Signature};
use crate::dag::{EvalDag, Node, NodeId};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::schemes::{Scheme, SchemeOptions};

pub use bench::{emit_benchmark, BenchmarkConfig, BenchmarkProgram, SimulatedRun, MAX_BENCH_DEGREE};

/// A function definition generated from a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedUnit {
    pub scheme: String,
    pub function_name: String,
    /// Text strictly between the outer braces.
    pub body: String,
    /// Complete definition: header, braces and body.
    pub text: String,
    pub adds: usize,
    pub muls: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitStyle {
    /// One assignment to `res`, with a local for every node used more than once.
    Expression,
    /// `res = A0; res += A1*x; _x = x*x; ...` with the running power in `_x`.
    Accumulator,
}

impl From<Scheme> for EmitStyle {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Incremental => EmitStyle::Accumulator,
            _ => EmitStyle::Expression,
        }
    }
}

const STORAGE_WORDS: &[&str] = &[
    "static",
    "inline",
    "extern",
    "register",
    "__inline",
    "__inline__",
    "_Noreturn",
];

/// Return type without storage-class or inline specifiers.
fn value_type(sig: &Signature) -> String {
    sig.return_type
        .split_whitespace()
        .filter(|w| !STORAGE_WORDS.contains(w))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Emit `dag` as the body of `sig` in the given style. An accumulator layout
/// falls back to the expression layout when the plan is not an accumulation
/// over a power chain.
pub fn emit_function(dag: &EvalDag, scheme: &str, style: EmitStyle, sig: &Signature) -> Result<EmittedUnit> {
    dag.validate()?;
    if !sig.parameters.iter().any(|p| p.name == sig.variable) {
        return Err(Error::SignatureMismatch {
            reason: format!("`{}` is not a parameter of `{}`", sig.variable, sig.name),
        });
    }
    if let Some(other) = dag.nodes().iter().find_map(|n| match n {
        Node::Input(name) if *name != sig.variable => Some(name),
        _ => None,
    }) {
        return Err(Error::SignatureMismatch {
            reason: format!("plan reads `{other}` but `{}` takes `{}`", sig.name, sig.variable),
        });
    }

    let ty = value_type(sig);
    let mut emitter = Emitter::new(dag, sig, &ty);
    let statements = match style {
        EmitStyle::Accumulator => emitter.accumulator().unwrap_or_else(|| {
            emitter = Emitter::new(dag, sig, &ty);
            emitter.expression()
        }),
        EmitStyle::Expression => emitter.expression(),
    };
    let body = emitter.render(statements);
    let (adds, muls) = count_arith_tokens(&body);
    let text = format!("{} {{{}}}\n", sig.header(), body);
    Ok(EmittedUnit {
        scheme: scheme.to_string(),
        function_name: sig.name.clone(),
        body,
        text,
        adds,
        muls,
    })
}

/// Emit a scheme's plan in that scheme's layout.
pub fn emit_scheme(dag: &EvalDag, scheme: Scheme, sig: &Signature) -> Result<EmittedUnit> {
    emit_function(dag, scheme.name(), scheme.into(), sig)
}

/// Rewrite the body of every annotated function in `src` with `scheme`'s
/// plan. Bytes outside the bodies, pragmas included, are left untouched.
pub fn transform_source(src: &str, scheme: Scheme, opts: SchemeOptions) -> Result<String> {
    let functions = scan_source(src)?;
    if functions.is_empty() {
        return Err(Error::NoAnnotatedFunctions);
    }
    let crlf = src.contains("\r\n");
    let mut out = String::with_capacity(src.len());
    let mut last = 0;
    for f in &functions {
        let poly = f.polynomial()?;
        let dag = scheme.build(&poly, opts);
        let unit = emit_scheme(&dag, scheme, &f.signature)?;
        out.push_str(&src[last..f.body_span.start]);
        if crlf {
            out.push_str(&unit.body.replace('\n', "\r\n"));
        } else {
            out.push_str(&unit.body);
        }
        last = f.body_span.end;
    }
    out.push_str(&src[last..]);
    Ok(out)
}

/// Count `+`/`+=` and `*`/`*=` tokens, ignoring comments, string and
/// character literals, and `const` declaration lines.
pub fn count_arith_tokens(body: &str) -> (usize, usize) {
    let mut adds = 0;
    let mut muls = 0;
    let mut in_block_comment = false;
    for line in body.lines() {
        if !in_block_comment && line.trim_start().starts_with("const ") {
            continue;
        }
        let b = line.as_bytes();
        let mut i = 0;
        while i < b.len() {
            if in_block_comment {
                if b[i] == b'*' && b.get(i + 1) == Some(&b'/') {
                    in_block_comment = false;
                    i += 2;
                } else {
                    i += 1;
                }
                continue;
            }
            match b[i] {
                b'/' if b.get(i + 1) == Some(&b'/') => break,
                b'/' if b.get(i + 1) == Some(&b'*') => {
                    in_block_comment = true;
                    i += 2;
                    continue;
                }
                q @ (b'"' | b'\'') => {
                    i += 1;
                    while i < b.len() && b[i] != q {
                        i += if b[i] == b'\\' { 2 } else { 1 };
                    }
                }
                b'+' if b.get(i + 1) == Some(&b'+') => i += 1,
                b'+' => adds += 1,
                b'*' => muls += 1,
                _ => {}
            }
            i += 1;
        }
    }
    (adds, muls)
}

struct Emitter<'a> {
    dag: &'a EvalDag,
    sig: &'a Signature,
    ty: &'a str,
    /// C name bound to a node: the parameter, a hoisted constant, a local.
    names: Vec<Option<String>>,
    consts: Vec<String>,
    locals: Vec<String>,
    taken: HashSet<String>,
}

impl<'a> Emitter<'a> {
    fn new(dag: &'a EvalDag, sig: &'a Signature, ty: &'a str) -> Self {
        let mut taken: HashSet<String> = dag.coefficient_names().into_iter().collect();
        taken.extend(sig.parameters.iter().map(|p| p.name.clone()));
        taken.insert(sig.name.clone());
        let mut e = Emitter {
            dag,
            sig,
            ty,
            names: vec![None; dag.len()],
            consts: Vec::new(),
            locals: Vec::new(),
            taken,
        };
        e.bind_leaves();
        e
    }

    fn fresh(&mut self, stem: &str, n: usize) -> String {
        let mut name = format!("{stem}{n}");
        while self.taken.contains(&name) {
            name.insert(0, '_');
        }
        self.taken.insert(name.clone());
        name
    }

    fn reserve(&mut self, wanted: &str) -> String {
        let mut name = wanted.to_string();
        while self.taken.contains(&name) {
            name.insert(0, '_');
        }
        self.taken.insert(name.clone());
        name
    }

    /// Name the input, simple constants, and hoisted constant subtrees.
    fn bind_leaves(&mut self) {
        let dep = self.dag.input_dependence();
        for (id, node) in self.dag.nodes().iter().enumerate() {
            match node {
                Node::Input(_) => self.names[id] = Some(self.sig.variable.clone()),
                Node::Constant(e) => {
                    if let Some(text) = simple_constant(e) {
                        self.names[id] = Some(text);
                    } else {
                        let text = c_constant(e);
                        self.hoist(id, text);
                    }
                }
                Node::Add(..) | Node::Mul(..) if !dep[id] => {
                    let text = self.inline(id, 0);
                    self.hoist(id, text);
                }
                _ => {}
            }
        }
    }

    fn hoist(&mut self, id: NodeId, text: String) {
        let n = self.consts.len();
        let name = self.fresh("_k", n);
        self.consts.push(format!("const {} {} = {};", self.ty, name, text));
        self.names[id] = Some(name);
    }

    /// C text for `id` at the given binding strength (0 loosest, 1 after `+`,
    /// 2 after `*`).
    fn inline(&self, id: NodeId, min: u8) -> String {
        if let Some(name) = &self.names[id] {
            return name.clone();
        }
        let (text, prec) = match *self.dag.node(id) {
            Node::Add(a, b) => (format!("{} + {}", self.inline(a, 0), self.inline(b, 1)), 0),
            Node::Mul(a, b) => (format!("{}*{}", self.inline(a, 1), self.inline(b, 2)), 1),
            _ => unreachable!("leaves are always named"),
        };
        if prec < min {
            format!("({text})")
        } else {
            text
        }
    }

    fn expression(&mut self) -> Vec<String> {
        let root = self.dag.root();
        if !self.dag.node(root).is_arithmetic() || self.names[root].is_some() {
            let mut statements = Vec::new();
            if !self.dag.has_input() {
                // keeps -Wunused-parameter quiet when the value is constant
                statements.push(format!("(void){};", self.sig.variable));
            }
            statements.push(format!("return {};", self.inline(root, 0)));
            return statements;
        }
        let uses = self.dag.use_counts();
        let mut statements = Vec::new();
        for (id, &n) in uses.iter().enumerate() {
            if self.names[id].is_none() && n > 1 {
                let text = self.inline(id, 0);
                let n = self.locals.len();
                let name = self.fresh("t", n);
                statements.push(format!("{name} = {text};"));
                self.locals.push(name.clone());
                self.names[id] = Some(name);
            }
        }
        let res = self.reserve("res");
        statements.push(format!("{res} = {};", self.inline(root, 0)));
        statements.push(String::new());
        statements.push(format!("return {res};"));
        self.locals.insert(0, res);
        statements
    }

    fn accumulator(&mut self) -> Option<Vec<String>> {
        let root = self.dag.root();
        if !self.dag.node(root).is_arithmetic() || self.names[root].is_some() {
            return None;
        }
        // left spine of additions: first + t1 + t2 + ...
        let mut terms = Vec::new();
        let mut cur = root;
        while let Node::Add(a, b) = *self.dag.node(cur) {
            if self.names[cur].is_some() {
                break;
            }
            terms.push(b);
            cur = a;
        }
        terms.push(cur);
        terms.reverse();

        let x = self.dag.nodes().iter().position(|n| matches!(n, Node::Input(_)))?;
        let res = self.reserve("res");
        let power_var = self.reserve("_x");
        let mut power_state: Option<NodeId> = None;
        let mut power_used = false;
        let mut statements = Vec::new();
        let uses = self.dag.use_counts();
        for (k, &term) in terms.iter().enumerate() {
            let op = if k == 0 { "=" } else { "+=" };
            let rhs = match *self.dag.node(term) {
                Node::Mul(c, p) if self.names[c].is_some() && self.names[term].is_none() => {
                    let operand = self.materialize_power(p, x, &power_var, &mut power_state, &mut statements)?;
                    power_used |= operand == power_var;
                    format!("{}*{}", self.names[c].as_ref().unwrap(), operand)
                }
                _ if self.names[term].is_some() => self.inline(term, 0),
                _ => {
                    // a term with internal sharing does not fit this layout
                    if subtree_shares(self.dag, term, &uses, &self.names) {
                        return None;
                    }
                    self.inline(term, 0)
                }
            };
            statements.push(format!("{res} {op} {rhs};"));
        }
        statements.push(String::new());
        statements.push(format!("return {res};"));
        self.locals.push(res);
        if power_used {
            self.locals.push(power_var);
        }
        Some(statements)
    }

    /// Make `p` (a power of `x` built by repeated multiplication by `x`)
    /// available as a C operand, emitting `_x = x*x;` / `_x *= x;` as needed.
    fn materialize_power(
        &self,
        p: NodeId,
        x: NodeId,
        var: &str,
        state: &mut Option<NodeId>,
        out: &mut Vec<String>,
    ) -> Option<String> {
        if p == x {
            return Some(self.sig.variable.clone());
        }
        if *state == Some(p) {
            return Some(var.to_string());
        }
        let Node::Mul(a, b) = *self.dag.node(p) else {
            return None;
        };
        let prev = match (a == x, b == x) {
            (_, true) => a,
            (true, false) => b,
            _ => return None,
        };
        if prev == x {
            out.push(format!("{var} = {v}*{v};", v = self.sig.variable));
        } else {
            let held = self.materialize_power(prev, x, var, state, out)?;
            if held != var {
                return None;
            }
            out.push(format!("{var} *= {};", self.sig.variable));
        }
        *state = Some(p);
        Some(var.to_string())
    }

    fn render(&self, statements: Vec<String>) -> String {
        let mut body = String::from("\n");
        for c in &self.consts {
            body.push_str(&format!("  {c}\n"));
        }
        if !self.locals.is_empty() {
            body.push_str(&format!("  {} {};\n\n", self.ty, self.locals.join(", ")));
        }
        for s in statements {
            if s.is_empty() {
                body.push('\n');
            } else {
                body.push_str(&format!("  {s}\n"));
            }
        }
        body
    }
}

fn subtree_shares(dag: &EvalDag, id: NodeId, uses: &[usize], names: &[Option<String>]) -> bool {
    match *dag.node(id) {
        Node::Add(a, b) | Node::Mul(a, b) => {
            let shared = |c: NodeId| names[c].is_none() && dag.node(c).is_arithmetic() && uses[c] > 1;
            shared(a) || shared(b) || subtree_shares(dag, a, uses, names) || subtree_shares(dag, b, uses, names)
        }
        _ => false,
    }
}

/// Identifiers and literals print bare; negated ones in parentheses.
fn simple_constant(e: &Expression) -> Option<String> {
    match e {
        Expression::Coefficient(_) | Expression::Variable(_) | Expression::Literal(_) if e.is_atomic() => {
            Some(e.to_string())
        }
        Expression::Literal(v) => Some(format!("({v})")),
        Expression::Negation(c) if c.is_atomic() => Some(format!("(-{c})")),
        _ => None,
    }
}

/// C rendering of a variable-free expression; powers become products.
fn c_constant(e: &Expression) -> String {
    fn go(e: &Expression, min: u8) -> String {
        let (text, prec) = match e {
            Expression::Coefficient(n) | Expression::Variable(n) => (n.clone(), 3),
            Expression::Literal(v) if e.is_atomic() => (v.to_string(), 3),
            Expression::Literal(v) => (format!("({v})"), 3),
            Expression::Sum(l, r) => match r.as_ref() {
                Expression::Negation(c) => (format!("{} - {}", go(l, 0), go(c, 1)), 0),
                _ => (format!("{} + {}", go(l, 0), go(r, 1)), 0),
            },
            Expression::Product(l, r) => (format!("{}*{}", go(l, 1), go(r, 2)), 1),
            Expression::Negation(c) => (format!("-{}", go(c, 3)), 2),
            Expression::Power(_, 0) => ("1".to_string(), 3),
            Expression::Power(b, n) => {
                let base = go(b, 2);
                (vec![base; *n as usize].join("*"), if *n == 1 { 2 } else { 1 })
            }
        };
        if prec < min {
            format!("({text})")
        } else {
            text
        }
    }
    go(e, 0)
}
