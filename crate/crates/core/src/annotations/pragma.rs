//! `#pragma ring_prop` and `#pragma math_exp` line parsers.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::expr::{is_integer_carrier, Expression, RingSpec};

pub const RING_PROP: &str = "ring_prop";
pub const MATH_EXP: &str = "math_exp";

/// Offset of the text following `#pragma <name>` in `line`, or `None` when the
/// line is a different directive.
pub fn pragma_payload(line: &str, name: &str) -> Option<usize> {
    let bytes = line.as_bytes();
    let mut i = skip_ws(bytes, 0);
    if bytes.get(i) != Some(&b'#') {
        return None;
    }
    i = skip_ws(bytes, i + 1);
    i = eat_word(line, i, "pragma")?;
    let after_pragma = i;
    i = skip_ws(bytes, i);
    if i == after_pragma {
        return None;
    }
    let end = eat_word(line, i, name)?;
    Some(end)
}

fn skip_ws(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && (bytes[i] == b' ' || bytes[i] == b'\t') {
        i += 1;
    }
    i
}

fn eat_word(line: &str, i: usize, word: &str) -> Option<usize> {
    let rest = line.get(i..)?;
    if !rest.starts_with(word) {
        return None;
    }
    let end = i + word.len();
    match line.as_bytes().get(end) {
        Some(c) if c.is_ascii_alphanumeric() || *c == b'_' => None,
        _ => Some(end),
    }
}

/// Parse `#pragma ring_prop (add, zero, neg, mul, one) carrier`.
pub fn parse_ring_prop(line: &str) -> Result<RingSpec> {
    let start = pragma_payload(line, RING_PROP).ok_or_else(|| Error::MalformedRingProp {
        offset: 0,
        reason: "line is not a `#pragma ring_prop` directive".into(),
    })?;
    let malformed = |offset: usize, reason: &str| Error::MalformedRingProp {
        offset,
        reason: reason.into(),
    };
    let bytes = line.as_bytes();
    let open = skip_ws(bytes, start);
    if bytes.get(open) != Some(&b'(') {
        return Err(malformed(open, "expected `(`"));
    }
    let close = match line[open + 1..].find([')', '(']) {
        Some(rel) if bytes[open + 1 + rel] == b')' => open + 1 + rel,
        Some(rel) => return Err(malformed(open + 1 + rel, "nested `(`")),
        None => return Err(malformed(open, "unbalanced parentheses")),
    };

    let mut tokens = Vec::new();
    let mut field_start = open + 1;
    for field in line[open + 1..close].split(',') {
        let token = field.trim();
        let token_offset = field_start + (field.len() - field.trim_start().len());
        if token.is_empty() {
            return Err(malformed(token_offset, "empty ring token"));
        }
        if token.contains(char::is_whitespace) {
            return Err(malformed(token_offset, "ring token contains whitespace"));
        }
        tokens.push(token.to_string());
        field_start += field.len() + 1;
    }
    if tokens.len() != 5 {
        return Err(malformed(
            open,
            &format!(
                "expected 5 tokens (add, zero, negate, mul, one), found {}",
                tokens.len()
            ),
        ));
    }

    let tail = strip_line_comment(&line[close + 1..]);
    if tail.contains([')', '(']) {
        return Err(malformed(close + 1, "unbalanced parentheses"));
    }
    let carrier = tail.split_whitespace().collect::<Vec<_>>().join(" ");
    if carrier.is_empty() {
        return Err(malformed(close + 1, "missing carrier type"));
    }
    if !is_integer_carrier(&carrier) {
        return Err(Error::UnsupportedCarrier { carrier });
    }
    let mut it = tokens.into_iter();
    let ring = RingSpec {
        add_op: it.next().unwrap(),
        add_identity: it.next().unwrap(),
        add_inverse: it.next().unwrap(),
        mul_op: it.next().unwrap(),
        mul_identity: it.next().unwrap(),
        carrier,
    };
    ring.validate().map_err(|e| match e {
        Error::InvalidRing { reason } => Error::MalformedRingProp { offset: open, reason },
        other => other,
    })?;
    Ok(ring)
}

fn strip_line_comment(text: &str) -> &str {
    let cut = [text.find("//"), text.find("/*")].into_iter().flatten().min();
    match cut {
        Some(i) => &text[..i],
        None => text,
    }
}

/// Parse `#pragma math_exp (<expression>)`.
///
/// Identifiers equal to `variable` become `Variable` nodes, all others
/// `Coefficient` atoms.
pub fn parse_math_exp(line: &str, variable: &str) -> Result<Expression> {
    let start = pragma_payload(line, MATH_EXP).ok_or_else(|| Error::Syntax {
        offset: 0,
        message: "line is not a `#pragma math_exp` directive".into(),
    })?;
    parse_expression(&line[start..], variable).map_err(|e| e.rebased(start))
}

/// Parse a bare ring expression. Offsets in errors are relative to `text`.
///
/// Precedence, loosest first: binary `+`/`-`, `*`, unary `-`, `^`.
/// `^` is right-associative and its exponent must fold to a non-negative
/// integer constant.
pub fn parse_expression(text: &str, variable: &str) -> Result<Expression> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::EmptyExpression);
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
        variable,
    };
    let expr = parser.sum()?;
    if let Some(t) = parser.peek() {
        return Err(Error::Syntax {
            offset: t.offset,
            message: format!("unexpected {}", t.kind),
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(v) => write!(f, "literal `{v}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let offset = i;
        let simple = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::Open),
            b')' => Some(Tok::Close),
            _ => None,
        };
        if let Some(kind) = simple {
            out.push(Token { kind, offset });
            i += 1;
            continue;
        }
        match c {
            b'/' if bytes.get(i + 1) == Some(&b'/') => break,
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let close = text[i + 2..].find("*/").ok_or_else(|| Error::Syntax {
                    offset,
                    message: "unterminated comment".into(),
                })?;
                i += 2 + close + 2;
            }
            b'/' | b'%' => {
                return Err(Error::NonPolynomial {
                    offset,
                    reason: "rings have no division".into(),
                })
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'.' || bytes[i].is_ascii_alphabetic()) {
                    let reason = if bytes[i] == b'.' {
                        "fractional literals are not ring elements"
                    } else {
                        "only decimal integer literals are supported"
                    };
                    return Err(Error::NonPolynomial {
                        offset,
                        reason: reason.into(),
                    });
                }
                let value = text[offset..i].parse::<BigInt>().expect("digits");
                out.push(Token {
                    kind: Tok::Int(value),
                    offset,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Ident(text[offset..i].to_string()),
                    offset,
                });
            }
            b'.' => {
                return Err(Error::NonPolynomial {
                    offset,
                    reason: "fractional literals are not ring elements".into(),
                })
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(Error::Syntax {
                    offset,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    end: usize,
    variable: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn sum(&mut self) -> Result<Expression> {
        let mut left = self.product()?;
        loop {
            match self.peek_kind() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    left = Expression::sum(left, self.product()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    left = Expression::sum(left, Expression::neg(self.product()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn product(&mut self) -> Result<Expression> {
        let mut left = self.unary()?;
        while self.peek_kind() == Some(&Tok::Star) {
            self.pos += 1;
            left = Expression::product(left, self.unary()?);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.peek_kind() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expression::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if self.peek_kind() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent_offset = self.offset();
        let exponent = self.unary()?;
        let e = fold_exponent(&exponent, exponent_offset)?;
        Ok(Expression::pow(base, e))
    }

    fn primary(&mut self) -> Result<Expression> {
        let offset = self.offset();
        let Some(token) = self.peek().cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of expression".into(),
            });
        };
        self.pos += 1;
        match token.kind {
            Tok::Ident(name) if name == self.variable => Ok(Expression::Variable(name)),
            Tok::Ident(name) => Ok(Expression::Coefficient(name)),
            Tok::Int(v) => Ok(Expression::Literal(v)),
            Tok::Open => {
                if self.peek_kind() == Some(&Tok::Close) {
                    if self.tokens.len() == 2 {
                        return Err(Error::EmptyExpression);
                    }
                    return Err(Error::Syntax {
                        offset,
                        message: "empty parentheses".into(),
                    });
                }
                let inner = self.sum()?;
                match self.peek_kind() {
                    Some(Tok::Close) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Syntax {
                        offset: self.offset(),
                        message: format!("expected `)` to close `(` at byte {offset}"),
                    }),
                }
            }
            other => Err(Error::Syntax {
                offset,
                message: format!("unexpected {other}"),
            }),
        }
    }
}

fn fold_exponent(exponent: &Expression, offset: usize) -> Result<u32> {
    fn eval(e: &Expression, offset: usize) -> Result<BigInt> {
        Ok(match e {
            Expression::Variable(_) => return Err(Error::VariableInExponent { offset }),
            Expression::Coefficient(name) => {
                return Err(Error::NonPolynomial {
                    offset,
                    reason: format!("exponent must be an integer constant, found `{name}`"),
                })
            }
            Expression::Literal(v) => v.clone(),
            Expression::Sum(l, r) => eval(l, offset)? + eval(r, offset)?,
            Expression::Product(l, r) => eval(l, offset)? * eval(r, offset)?,
            Expression::Negation(c) => -eval(c, offset)?,
            Expression::Power(b, e) => num_traits::pow(eval(b, offset)?, *e as usize),
        })
    }
    let value = eval(exponent, offset)?;
    if value.is_negative() {
        return Err(Error::NonPolynomial {
            offset,
            reason: "negative exponent".into(),
        });
    }
    value.to_u32().ok_or_else(|| Error::NonPolynomial {
        offset,
        reason: format!("exponent {value} is too large"),
    })
}
