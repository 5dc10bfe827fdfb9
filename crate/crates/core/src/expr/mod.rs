//! Ring expressions, the declared ring, and canonical polynomial form.

mod poly;
mod ring;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub use poly::{degree, normalize, Polynomial, MAX_DEGREE};
pub use ring::{is_integer_carrier, RingSpec};

/// Expression tree of a `math_exp` annotation.
///
/// `Variable` is the runtime input of the annotated function; every other
/// identifier is a `Coefficient` atom (a compile-time constant such as a
/// `#define`d `A3`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Variable(String),
    Coefficient(String),
    Literal(BigInt),
    Sum(Box<Expression>, Box<Expression>),
    Product(Box<Expression>, Box<Expression>),
    Negation(Box<Expression>),
    Power(Box<Expression>, u32),
}

impl Expression {
    pub fn var(name: impl Into<String>) -> Self {
        Expression::Variable(name.into())
    }

    pub fn coef(name: impl Into<String>) -> Self {
        Expression::Coefficient(name.into())
    }

    pub fn lit(value: impl Into<BigInt>) -> Self {
        Expression::Literal(value.into())
    }

    pub fn sum(left: Expression, right: Expression) -> Self {
        Expression::Sum(Box::new(left), Box::new(right))
    }

    pub fn product(left: Expression, right: Expression) -> Self {
        Expression::Product(Box::new(left), Box::new(right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(child: Expression) -> Self {
        Expression::Negation(Box::new(child))
    }

    pub fn pow(base: Expression, exponent: u32) -> Self {
        Expression::Power(Box::new(base), exponent)
    }

    /// True when no `Variable` node occurs anywhere in the tree.
    pub fn is_variable_free(&self) -> bool {
        match self {
            Expression::Variable(_) => false,
            Expression::Coefficient(_) | Expression::Literal(_) => true,
            Expression::Sum(l, r) | Expression::Product(l, r) => l.is_variable_free() && r.is_variable_free(),
            Expression::Negation(c) | Expression::Power(c, _) => c.is_variable_free(),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expression::Literal(v) if v.is_zero())
    }

    /// A single identifier or a non-negative literal.
    pub fn is_atomic(&self) -> bool {
        match self {
            Expression::Variable(_) | Expression::Coefficient(_) => true,
            Expression::Literal(v) => !v.is_negative(),
            _ => false,
        }
    }

    /// Coefficient atom names in order of first appearance.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_coefficients(&mut out);
        out
    }

    fn collect_coefficients(&self, out: &mut Vec<String>) {
        match self {
            Expression::Coefficient(name) => {
                if !out.iter().any(|n| n == name) {
                    out.push(name.clone());
                }
            }
            Expression::Variable(_) | Expression::Literal(_) => {}
            Expression::Sum(l, r) | Expression::Product(l, r) => {
                l.collect_coefficients(out);
                r.collect_coefficients(out);
            }
            Expression::Negation(c) | Expression::Power(c, _) => c.collect_coefficients(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Sum(..) => 1,
            Expression::Product(..) => 2,
            Expression::Negation(_) => 3,
            Expression::Literal(v) if v.is_negative() => 3,
            Expression::Power(..) => 4,
            _ => 5,
        }
    }

    fn starts_with_minus(&self) -> bool {
        match self {
            Expression::Negation(_) => true,
            Expression::Literal(v) => v.is_negative(),
            Expression::Product(l, _) | Expression::Sum(l, _) => l.starts_with_minus(),
            _ => false,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expression::Variable(n) | Expression::Coefficient(n) => f.write_str(n),
            Expression::Literal(v) => write!(f, "{v}"),
            Expression::Sum(l, r) => {
                l.fmt_at(f, 1)?;
                match r.as_ref() {
                    Expression::Negation(c) => {
                        f.write_str(" - ")?;
                        c.fmt_after_minus(f, 2)
                    }
                    _ => {
                        f.write_str(" + ")?;
                        r.fmt_at(f, 2)
                    }
                }
            }
            Expression::Product(l, r) => {
                l.fmt_at(f, 2)?;
                f.write_str("*")?;
                r.fmt_at(f, 3)
            }
            Expression::Negation(c) => {
                f.write_str("-")?;
                c.fmt_after_minus(f, 3)
            }
            Expression::Power(b, e) => {
                b.fmt_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }

    // `a - -b` and `--a` are avoided so the text reads unambiguously.
    fn fmt_after_minus(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.starts_with_minus() && self.precedence() >= min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            f.write_str(")")
        } else {
            self.fmt_at(f, min)
        }
    }
}

/// Canonically spaced infix text (`A0 + A1*x + A2*x^2`) that re-parses to the
/// same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
