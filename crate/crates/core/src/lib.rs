//! Polynomial evaluation planning driven by `ring_prop` / `math_exp`
//! annotations.
//!
//! The pipeline: [`annotations::scan_source`] finds annotated C functions,
//! [`expr::normalize`] turns the annotated expression into a dense
//! [`Polynomial`], [`schemes`] derive evaluation plans, [`analysis`] counts
//! their cost, [`oracle`] checks them against the polynomial over wrapping
//! integers, and [`codegen`] writes them back out as C.

pub mod analysis;
pub mod annotations;
pub mod cli;
pub mod codegen;
pub mod dag;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod schemes;

pub use analysis::{compare_schemes, count_ops, critical_path, llvm_fixture_deg4, CostReport};
pub use annotations::{parse_math_exp, parse_ring_prop, scan_source, AnnotatedFunction, Signature};
pub use dag::{EvalDag, Node, NodeId};
pub use error::{Error, Result};
pub use expr::{normalize, Expression, Polynomial, RingSpec};
pub use oracle::{eval_dag, eval_poly_reference, verify_equivalence, Binding, VerificationReport, VerifyMode, Width};
pub use schemes::{Scheme, SchemeOptions};
