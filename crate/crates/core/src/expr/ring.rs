use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The algebraic structure declared by a `ring_prop` annotation.
///
/// Positional order matches the pragma: addition, additive identity, additive
/// inverse, multiplication, multiplicative identity, then the carrier type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub add_op: String,
    pub add_identity: String,
    pub add_inverse: String,
    pub mul_op: String,
    pub mul_identity: String,
    pub carrier: String,
}

impl RingSpec {
    /// `(+, 0, -, *, 1)` over the given carrier.
    pub fn integer(carrier: impl Into<String>) -> Self {
        RingSpec {
            add_op: "+".into(),
            add_identity: "0".into(),
            add_inverse: "-".into(),
            mul_op: "*".into(),
            mul_identity: "1".into(),
            carrier: carrier.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tokens = [
            &self.add_op,
            &self.add_identity,
            &self.add_inverse,
            &self.mul_op,
            &self.mul_identity,
            &self.carrier,
        ];
        if tokens.iter().any(|t| t.trim().is_empty()) {
            return Err(Error::InvalidRing {
                reason: "empty token".into(),
            });
        }
        if self.add_op == self.mul_op {
            return Err(Error::InvalidRing {
                reason: format!("addition and multiplication share the symbol `{}`", self.add_op),
            });
        }
        if self.add_identity == self.mul_identity {
            return Err(Error::InvalidRing {
                reason: format!("identities are both `{}`", self.add_identity),
            });
        }
        if !is_integer_carrier(&self.carrier) {
            return Err(Error::UnsupportedCarrier {
                carrier: self.carrier.clone(),
            });
        }
        Ok(())
    }

    /// Whether the symbols are the ones the expression grammar understands.
    pub fn uses_standard_symbols(&self) -> bool {
        self.add_op == "+"
            && self.add_identity == "0"
            && self.add_inverse == "-"
            && self.mul_op == "*"
            && self.mul_identity == "1"
    }

    pub fn to_pragma(&self) -> String {
        format!("#pragma ring_prop {self}")
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {}) {}",
            self.add_op, self.add_identity, self.add_inverse, self.mul_op, self.mul_identity, self.carrier
        )
    }
}

const SIZED_INTEGERS: &[&str] = &[
    "int8_t",
    "int16_t",
    "int32_t",
    "int64_t",
    "uint8_t",
    "uint16_t",
    "uint32_t",
    "uint64_t",
    "intmax_t",
    "uintmax_t",
    "intptr_t",
    "uintptr_t",
    "size_t",
    "ptrdiff_t",
];

const INTEGER_WORDS: &[&str] = &["signed", "unsigned", "char", "short", "int", "long"];

/// Integer type spellings accepted as a ring carrier: C integer keywords in
/// any valid combination (`unsigned long long`, `short int`, ...) and the
/// `<stdint.h>` names.
pub fn is_integer_carrier(carrier: &str) -> bool {
    let words: Vec<&str> = carrier.split_whitespace().collect();
    match words.as_slice() {
        [] => false,
        [single] if SIZED_INTEGERS.contains(single) => true,
        _ => {
            if !words.iter().all(|w| INTEGER_WORDS.contains(w)) {
                return false;
            }
            let count = |w: &str| words.iter().filter(|&&x| x == w).count();
            let signs = count("signed") + count("unsigned");
            let chars = count("char");
            let shorts = count("short");
            let longs = count("long");
            let ints = count("int");
            signs <= 1
                && ints <= 1
                && longs <= 2
                && chars + shorts + usize::from(longs > 0) <= 1
                && !(chars == 1 && ints == 1)
        }
    }
}
