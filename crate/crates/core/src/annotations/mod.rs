//! Binding `ring_prop` / `math_exp` pragmas to the function definition that
//! follows them.

mod lexer;
mod pragma;

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{normalize, Expression, Polynomial, RingSpec};

pub use pragma::{parse_expression, parse_math_exp, parse_ring_prop, pragma_payload, MATH_EXP, RING_PROP};

use lexer::{Kind, Token};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Parameter {
    #[serde(rename = "type")]
    pub ty: String,
    pub name: String,
}

/// Return type, name and parameters of a C function, plus the parameter
/// that plays the polynomial variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub return_type: String,
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub variable: String,
}

impl Signature {
    /// `ret name(ty var)` for a single-parameter function.
    pub fn unary(return_type: &str, name: &str, param_type: &str, variable: &str) -> Self {
        Signature {
            return_type: return_type.into(),
            name: name.into(),
            parameters: vec![Parameter {
                ty: param_type.into(),
                name: variable.into(),
            }],
            variable: variable.into(),
        }
    }

    pub fn header(&self) -> String {
        let params = if self.parameters.is_empty() {
            "void".to_string()
        } else {
            self.parameters
                .iter()
                .map(|p| format!("{} {}", p.ty, p.name))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("{} {}({})", self.return_type, self.name, params)
    }
}

/// A function definition carrying both annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedFunction {
    pub ring: RingSpec,
    /// Payload of the `ring_prop` line as written.
    pub ring_text: String,
    pub math: Expression,
    /// Payload of the `math_exp` line as written.
    pub math_text: String,
    pub signature: Signature,
    /// Byte range of the first pragma through the closing brace.
    pub span: Range<usize>,
    /// Byte range strictly between the body's outer braces.
    pub body_span: Range<usize>,
}

impl AnnotatedFunction {
    pub fn function_name(&self) -> &str {
        &self.signature.name
    }

    pub fn variable(&self) -> &str {
        &self.signature.variable
    }

    pub fn polynomial(&self) -> Result<Polynomial> {
        normalize(&self.math, &self.ring, &self.signature.variable)
    }

    pub fn body<'a>(&self, src: &'a str) -> &'a str {
        &src[self.body_span.clone()]
    }
}

#[derive(Default)]
struct Pending {
    first: Option<usize>,
    ring: Option<(RingSpec, String)>,
    math: Option<(String, usize)>,
}

impl Pending {
    fn is_empty(&self) -> bool {
        self.first.is_none()
    }
}

/// Find every annotated function in `src`.
///
/// Pragmas are only recognized outside braces. Between the pragmas and the
/// function header only whitespace and comments may appear; anything else
/// (another directive, a declaration) orphans the pragmas.
pub fn scan_source(src: &str) -> Result<Vec<AnnotatedFunction>> {
    let tokens = lexer::tokenize(src)?;
    let mut out = Vec::new();
    let mut pending = Pending::default();
    let mut open_braces: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        if !open_braces.is_empty() {
            if tok.is_punct(b'{') {
                open_braces.push(tok.start);
            } else if tok.is_punct(b'}') {
                open_braces.pop();
            }
            i += 1;
            continue;
        }
        if tok.kind == Kind::Directive {
            let line = tok.text(src);
            if let Some(payload) = pragma_payload(line, RING_PROP) {
                if pending.ring.is_some() {
                    return Err(Error::DuplicatePragma {
                        offset: tok.start,
                        kind: RING_PROP.into(),
                    });
                }
                let ring = parse_ring_prop(line).map_err(|e| e.rebased(tok.start))?;
                pending.first.get_or_insert(tok.start);
                pending.ring = Some((ring, line[payload..].trim().to_string()));
            } else if let Some(payload) = pragma_payload(line, MATH_EXP) {
                if pending.math.is_some() {
                    return Err(Error::DuplicatePragma {
                        offset: tok.start,
                        kind: MATH_EXP.into(),
                    });
                }
                pending.first.get_or_insert(tok.start);
                pending.math = Some((line[payload..].to_string(), tok.start + payload));
            } else if let Some(first) = pending.first {
                return Err(Error::OrphanPragma {
                    offset: first,
                    reason: "another directive intervenes before the function".into(),
                });
            }
            i += 1;
            continue;
        }
        if tok.is_punct(b'}') {
            return Err(Error::UnbalancedBraces { offset: tok.start });
        }
        if !pending.is_empty() {
            let (function, next) = bind_function(src, &tokens, i, std::mem::take(&mut pending))?;
            out.push(function);
            i = next;
            continue;
        }
        if tok.is_punct(b'{') {
            open_braces.push(tok.start);
        }
        i += 1;
    }
    if let Some(first) = pending.first {
        return Err(Error::OrphanPragma {
            offset: first,
            reason: "end of file reached".into(),
        });
    }
    if let Some(&offset) = open_braces.last() {
        return Err(Error::UnbalancedBraces { offset });
    }
    Ok(out)
}

/// Parse the definition starting at `tokens[start]` and attach the pending
/// pragmas. Returns the function and the index after its closing brace.
fn bind_function(src: &str, tokens: &[Token], start: usize, pending: Pending) -> Result<(AnnotatedFunction, usize)> {
    let first = pending.first.expect("pending pragmas");
    let orphan = |reason: &str| Error::OrphanPragma {
        offset: first,
        reason: reason.into(),
    };

    // header runs up to the first `{` outside parentheses
    let mut depth = 0usize;
    let mut open = None;
    for (j, t) in tokens.iter().enumerate().skip(start) {
        match t.kind {
            Kind::Punct(b'(') => depth += 1,
            Kind::Punct(b')') => depth = depth.saturating_sub(1),
            Kind::Punct(b'{') if depth == 0 => {
                open = Some(j);
                break;
            }
            Kind::Punct(b';') | Kind::Punct(b'=') | Kind::Directive if depth == 0 => {
                return Err(orphan("next item is not a function definition"));
            }
            Kind::Punct(b'}') => return Err(orphan("next item is not a function definition")),
            _ => {}
        }
    }
    let open = open.ok_or_else(|| orphan("end of file reached"))?;
    let header = parse_header(src, &tokens[start..open]).ok_or_else(|| orphan("unsupported function header"))?;

    let mut depth = 0usize;
    let mut close = None;
    for (j, t) in tokens.iter().enumerate().skip(open) {
        if t.is_punct(b'{') {
            depth += 1;
        } else if t.is_punct(b'}') {
            depth -= 1;
            if depth == 0 {
                close = Some(j);
                break;
            }
        }
    }
    let close = close.ok_or(Error::UnbalancedBraces {
        offset: tokens[open].start,
    })?;

    let (Some((ring, ring_text)), Some((math_text, math_offset))) = (pending.ring, pending.math) else {
        return Err(orphan("both ring_prop and math_exp are required"));
    };

    let (return_type, name, parameters) = header;
    let variable = select_variable(&name, &parameters, &math_text, math_offset)?;
    let math = parse_expression(&math_text, &variable).map_err(|e| e.rebased(math_offset))?;
    let function = AnnotatedFunction {
        ring,
        ring_text,
        math,
        math_text: math_text.trim().to_string(),
        signature: Signature {
            return_type,
            name,
            parameters,
            variable,
        },
        span: first..tokens[close].end,
        body_span: tokens[open].end..tokens[close].start,
    };
    Ok((function, close + 1))
}

type Header = (String, String, Vec<Parameter>);

fn parse_header(src: &str, toks: &[Token]) -> Option<Header> {
    let paren = toks.iter().position(|t| t.is_punct(b'('))?;
    if paren < 2 || !toks.last()?.is_punct(b')') {
        return None;
    }
    let name_tok = toks[paren - 1];
    if name_tok.kind != Kind::Ident {
        return None;
    }
    let type_toks = &toks[..paren - 1];
    if !type_toks.iter().all(|t| t.kind == Kind::Ident || t.is_punct(b'*')) {
        return None;
    }
    let return_type = span_text(src, type_toks);

    let inner = &toks[paren + 1..toks.len() - 1];
    if inner.iter().any(|t| t.is_punct(b'(') || t.is_punct(b')')) {
        return None;
    }
    let mut params = Vec::new();
    if !(inner.is_empty() || (inner.len() == 1 && inner[0].text(src) == "void")) {
        for piece in inner.split(|t| t.is_punct(b',')) {
            let (last, ty) = piece.split_last()?;
            if last.kind != Kind::Ident || ty.is_empty() {
                return None;
            }
            if !ty.iter().all(|t| t.kind == Kind::Ident || t.is_punct(b'*')) {
                return None;
            }
            params.push(Parameter {
                ty: span_text(src, ty),
                name: last.text(src).to_string(),
            });
        }
    }
    Some((return_type, name_tok.text(src).to_string(), params))
}

fn span_text(src: &str, toks: &[Token]) -> String {
    let start = toks.first().map_or(0, |t| t.start);
    let end = toks.last().map_or(0, |t| t.end);
    src[start..end].split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A lone parameter is the variable. With several, the one named in the
/// expression wins; zero or multiple matches are rejected.
fn select_variable(function: &str, params: &[Parameter], math_text: &str, math_offset: usize) -> Result<String> {
    let err = |reason: String| Error::VariableSelection {
        function: function.into(),
        reason,
    };
    match params {
        [] => Err(err(
            "function has no parameter to serve as the polynomial variable".into()
        )),
        [only] => Ok(only.name.clone()),
        _ => {
            let names = parse_expression(math_text, "")
                .map_err(|e| e.rebased(math_offset))?
                .coefficient_names();
            let hits: Vec<&Parameter> = params.iter().filter(|p| names.contains(&p.name)).collect();
            match hits.as_slice() {
                [one] => Ok(one.name.clone()),
                [] => Err(err("no parameter appears in math_exp".into())),
                many => Err(err(format!(
                    "several parameters appear in math_exp: {}",
                    many.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(", ")
                ))),
            }
        }
    }
}
