use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Expression, RingSpec};
use crate::error::{Error, Result};

/// Largest degree `normalize` will produce.
pub const MAX_DEGREE: usize = 1024;

/// Dense univariate polynomial: `terms[i]` is the coefficient of `variable^i`.
///
/// Coefficients are variable-free expressions. The leading coefficient is
/// never the literal 0 except for the zero polynomial, which is stored as a
/// single `0` term of degree 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    variable: String,
    terms: Vec<Expression>,
}

impl Polynomial {
    pub fn new(variable: impl Into<String>, terms: Vec<Expression>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyExpression);
        }
        if let Some(bad) = terms.iter().find(|t| !t.is_variable_free()) {
            return Err(Error::NonPolynomial {
                offset: 0,
                reason: format!("coefficient `{bad}` depends on a variable"),
            });
        }
        if terms.len() > 1 && terms.last().is_some_and(Expression::is_zero_literal) {
            return Err(Error::NonPolynomial {
                offset: 0,
                reason: "leading coefficient is the literal 0".into(),
            });
        }
        if terms.len() - 1 > MAX_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree: terms.len() - 1,
                max: MAX_DEGREE,
            });
        }
        Ok(Polynomial {
            variable: variable.into(),
            terms,
        })
    }

    /// `A0 + A1*x + ... + An*x^n` with coefficient atoms named `{prefix}{i}`.
    pub fn with_atoms(variable: impl Into<String>, prefix: &str, degree: usize) -> Result<Self> {
        let terms = (0..=degree).map(|i| Expression::coef(format!("{prefix}{i}"))).collect();
        Polynomial::new(variable, terms)
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn terms(&self) -> &[Expression] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn coefficient(&self, exponent: usize) -> Option<&Expression> {
        self.terms.get(exponent)
    }

    /// Coefficient atoms across all terms, first appearance first.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for name in self.terms.iter().flat_map(Expression::coefficient_names) {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }

    /// `sum(terms[i] * variable^i)` in ascending order, skipping zero terms.
    pub fn to_expression(&self) -> Expression {
        let x = || Expression::var(self.variable.clone());
        let mut acc: Option<Expression> = None;
        for (i, c) in self.terms.iter().enumerate() {
            if c.is_zero_literal() && self.terms.len() > 1 {
                continue;
            }
            let term = match i {
                0 => c.clone(),
                1 => Expression::product(c.clone(), x()),
                _ => Expression::product(c.clone(), Expression::pow(x(), i as u32)),
            };
            acc = Some(match acc {
                None => term,
                Some(a) => Expression::sum(a, term),
            });
        }
        acc.unwrap_or_else(|| Expression::lit(0))
    }
}

pub fn degree(poly: &Polynomial) -> usize {
    poly.degree()
}

/// Expand `expr` by distributivity and collect like powers of `variable`.
///
/// Integer literals are folded exactly. Within each coefficient, like
/// monomials (same multiset of atoms) are merged; monomial order follows
/// first appearance during expansion.
pub fn normalize(expr: &Expression, ring: &RingSpec, variable: &str) -> Result<Polynomial> {
    ring.validate()?;
    if !ring.uses_standard_symbols() {
        return Err(Error::InvalidRing {
            reason: format!("expressions are written with (+, 0, -, *, 1); ring declares {ring}"),
        });
    }
    let mut dense = expand(expr, variable)?;
    while dense.len() > 1 && dense.last().is_some_and(Coeff::is_zero) {
        dense.pop();
    }
    let terms = dense.iter().map(Coeff::to_expression).collect();
    Polynomial::new(variable, terms)
}

#[derive(Debug, Clone)]
struct Monomial {
    factor: BigInt,
    atoms: Vec<String>,
}

/// Linear combination of atom products, keyed by the sorted atom list.
#[derive(Debug, Clone, Default)]
struct Coeff(IndexMap<Vec<String>, Monomial>);

impl Coeff {
    fn constant(value: BigInt) -> Self {
        let mut c = Coeff::default();
        c.add_monomial(Monomial {
            factor: value,
            atoms: Vec::new(),
        });
        c
    }

    fn atom(name: &str) -> Self {
        let mut c = Coeff::default();
        c.add_monomial(Monomial {
            factor: BigInt::one(),
            atoms: vec![name.to_string()],
        });
        c
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_monomial(&mut self, m: Monomial) {
        if m.factor.is_zero() {
            return;
        }
        let mut key = m.atoms.clone();
        key.sort();
        if let Some(existing) = self.0.get_mut(&key) {
            existing.factor += m.factor;
            if existing.factor.is_zero() {
                self.0.shift_remove(&key);
            }
        } else {
            self.0.insert(key, m);
        }
    }

    fn add(&mut self, other: &Coeff) {
        for m in other.0.values() {
            self.add_monomial(m.clone());
        }
    }

    fn mul(&self, other: &Coeff) -> Coeff {
        let mut out = Coeff::default();
        for a in self.0.values() {
            for b in other.0.values() {
                let mut atoms = a.atoms.clone();
                atoms.extend(b.atoms.iter().cloned());
                out.add_monomial(Monomial {
                    factor: &a.factor * &b.factor,
                    atoms,
                });
            }
        }
        out
    }

    fn negated(&self) -> Coeff {
        let mut out = self.clone();
        for m in out.0.values_mut() {
            m.factor = -m.factor.clone();
        }
        out
    }

    fn to_expression(&self) -> Expression {
        let mut acc: Option<Expression> = None;
        for m in self.0.values() {
            let (negative, term) = monomial_expression(m);
            acc = Some(match (acc, negative) {
                (None, false) => term,
                (None, true) => Expression::neg(term),
                (Some(a), false) => Expression::sum(a, term),
                (Some(a), true) => Expression::sum(a, Expression::neg(term)),
            });
        }
        acc.unwrap_or_else(|| Expression::lit(0))
    }
}

/// Magnitude expression of a monomial plus its sign.
fn monomial_expression(m: &Monomial) -> (bool, Expression) {
    let magnitude = m.factor.abs();
    let mut parts = Vec::with_capacity(m.atoms.len() + 1);
    if !magnitude.is_one() || m.atoms.is_empty() {
        parts.push(Expression::Literal(magnitude));
    }
    parts.extend(m.atoms.iter().map(|a| Expression::coef(a.clone())));
    let term = parts.into_iter().reduce(Expression::product).expect("non-empty");
    (m.factor.is_negative(), term)
}

type Dense = Vec<Coeff>;

fn dense_add(mut a: Dense, b: &Dense) -> Dense {
    if a.len() < b.len() {
        a.resize_with(b.len(), Coeff::default);
    }
    for (slot, c) in a.iter_mut().zip(b) {
        slot.add(c);
    }
    a
}

fn dense_mul(a: &Dense, b: &Dense) -> Result<Dense> {
    let degree = (a.len() - 1) + (b.len() - 1);
    if degree > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree,
            max: MAX_DEGREE,
        });
    }
    let mut out: Dense = vec![Coeff::default(); degree + 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let product = ca.mul(cb);
            out[i + j].add(&product);
        }
    }
    Ok(out)
}

fn effective_degree(d: &Dense) -> usize {
    d.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

fn expand(expr: &Expression, variable: &str) -> Result<Dense> {
    Ok(match expr {
        Expression::Variable(name) | Expression::Coefficient(name) if name == variable => {
            vec![Coeff::default(), Coeff::constant(BigInt::one())]
        }
        Expression::Variable(name) => return Err(Error::Multivariate { name: name.clone() }),
        Expression::Coefficient(name) => vec![Coeff::atom(name)],
        Expression::Literal(v) => vec![Coeff::constant(v.clone())],
        Expression::Sum(l, r) => dense_add(expand(l, variable)?, &expand(r, variable)?),
        Expression::Product(l, r) => dense_mul(&expand(l, variable)?, &expand(r, variable)?)?,
        Expression::Negation(c) => expand(c, variable)?.iter().map(Coeff::negated).collect(),
        Expression::Power(base, e) => {
            let base = expand(base, variable)?;
            let degree = effective_degree(&base).saturating_mul(*e as usize);
            if degree > MAX_DEGREE {
                return Err(Error::DegreeTooLarge {
                    degree,
                    max: MAX_DEGREE,
                });
            }
            let mut acc: Dense = vec![Coeff::constant(BigInt::one())];
            for _ in 0..*e {
                acc = dense_mul(&acc, &base)?;
                let keep = effective_degree(&acc) + 1;
                acc.truncate(keep);
            }
            acc
        }
    })
}
