//! C ABI over `ringopt`.
//!
//! Every fallible call returns a [`RingoptStatus`]; on failure a message is
//! available from [`ringopt_last_error_message`] on the same thread. Results
//! come back through out-pointers. Handles and strings returned by the
//! library are released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ringopt::analysis::{cost_report, plans};
use ringopt::annotations::parse_expression;
use ringopt::cli::analyze_source;
use ringopt::codegen::{emit_benchmark, emit_function, transform_source, BenchmarkConfig, EmitStyle};
use ringopt::oracle::{eval_dag, verify_equivalence, Binding, VerifyMode, Width};
use ringopt::{normalize, Error, EvalDag, Polynomial, RingSpec, Scheme, SchemeOptions, Signature};

/// Result of every fallible call. Values from 10 upward match the library's
/// error codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingoptStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Panic = 3,
    MalformedRingProp = 10,
    UnsupportedCarrier = 11,
    InvalidRing = 12,
    Syntax = 20,
    NonPolynomial = 21,
    VariableInExponent = 22,
    EmptyExpression = 23,
    Multivariate = 24,
    DegreeTooLarge = 25,
    OrphanPragma = 30,
    DuplicatePragma = 31,
    UnbalancedBraces = 32,
    VariableSelection = 33,
    InvalidDag = 40,
    UnboundName = 50,
    DomainTooLarge = 51,
    UnsupportedWidth = 52,
    SignatureMismatch = 60,
    NoAnnotatedFunctions = 61,
    UnsupportedDegree = 62,
    EmptySchemeList = 63,
    InvalidIterations = 64,
    UnknownScheme = 65,
}

impl From<&Error> for RingoptStatus {
    fn from(e: &Error) -> Self {
        use RingoptStatus as S;
        match e {
            Error::MalformedRingProp { .. } => S::MalformedRingProp,
            Error::UnsupportedCarrier { .. } => S::UnsupportedCarrier,
            Error::InvalidRing { .. } => S::InvalidRing,
            Error::Syntax { .. } => S::Syntax,
            Error::NonPolynomial { .. } => S::NonPolynomial,
            Error::VariableInExponent { .. } => S::VariableInExponent,
            Error::EmptyExpression => S::EmptyExpression,
            Error::Multivariate { .. } => S::Multivariate,
            Error::DegreeTooLarge { .. } => S::DegreeTooLarge,
            Error::OrphanPragma { .. } => S::OrphanPragma,
            Error::DuplicatePragma { .. } => S::DuplicatePragma,
            Error::UnbalancedBraces { .. } => S::UnbalancedBraces,
            Error::VariableSelection { .. } => S::VariableSelection,
            Error::InvalidDag { .. } => S::InvalidDag,
            Error::UnboundName { .. } => S::UnboundName,
            Error::DomainTooLarge { .. } => S::DomainTooLarge,
            Error::UnsupportedWidth { .. } => S::UnsupportedWidth,
            Error::SignatureMismatch { .. } => S::SignatureMismatch,
            Error::NoAnnotatedFunctions => S::NoAnnotatedFunctions,
            Error::UnsupportedDegree { .. } => S::UnsupportedDegree,
            Error::EmptySchemeList => S::EmptySchemeList,
            Error::InvalidIterations => S::InvalidIterations,
            Error::UnknownScheme { .. } => S::UnknownScheme,
        }
    }
}

/// A normalized univariate polynomial.
pub struct RingoptPolynomial {
    inner: Polynomial,
}

/// An evaluation plan built from a polynomial.
pub struct RingoptPlan {
    name: String,
    degree: usize,
    variable: String,
    reference: Polynomial,
    dag: EvalDag,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RingoptCost {
    pub degree: usize,
    pub adds: usize,
    pub muls: usize,
    pub total_ops: usize,
    pub critical_path: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RingoptVerification {
    pub passed: bool,
    pub points_checked: u64,
    /// The remaining fields are meaningful only when `passed` is false.
    pub counterexample_x: u64,
    pub expected: u64,
    pub actual: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

enum Fail {
    Status(RingoptStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> RingoptStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RingoptStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            RingoptStatus::from(&e)
        }
        Ok(Err(Fail::Status(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RingoptStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(RingoptStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(RingoptStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Status(RingoptStatus::InvalidUtf8, "output contains NUL".into()))?;
    put(out, c.into_raw(), "out")
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ringopt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ringopt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Release a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ringopt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and normalize `expression` over `variable` in the `int` ring.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_polynomial_parse(
    expression: *const c_char,
    variable: *const c_char,
    out: *mut *mut RingoptPolynomial,
) -> RingoptStatus {
    guard(|| {
        let expression = text(expression, "expression")?;
        let variable = text(variable, "variable")?;
        let expr = parse_expression(expression, variable)?;
        let inner = normalize(&expr, &RingSpec::integer("int"), variable)?;
        put(out, Box::into_raw(Box::new(RingoptPolynomial { inner })), "out")
    })
}

/// # Safety
/// `p` must come from [`ringopt_polynomial_parse`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ringopt_polynomial_free(p: *mut RingoptPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_polynomial_degree(p: *const RingoptPolynomial, out: *mut usize) -> RingoptStatus {
    guard(|| put(out, deref(p, "polynomial")?.inner.degree(), "out"))
}

/// Coefficient of `x^exponent` as printed text; free with
/// [`ringopt_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_polynomial_coefficient(
    p: *const RingoptPolynomial,
    exponent: usize,
    out: *mut *mut c_char,
) -> RingoptStatus {
    guard(|| {
        let poly = &deref(p, "polynomial")?.inner;
        let c = poly.coefficient(exponent).ok_or_else(|| {
            Fail::Status(
                RingoptStatus::DegreeTooLarge,
                format!("exponent {exponent} exceeds degree {}", poly.degree()),
            )
        })?;
        put_string(out, c.to_string())
    })
}

/// Build the plan named `scheme`: `naive`, `incremental`, `horner`,
/// `balanced`, or `llvm-f0` for degree-4 polynomials.
///
/// # Safety
/// `p` must be a live handle; `scheme` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_build(
    p: *const RingoptPolynomial,
    scheme: *const c_char,
    sparse: bool,
    out: *mut *mut RingoptPlan,
) -> RingoptStatus {
    guard(|| {
        let poly = &deref(p, "polynomial")?.inner;
        let name = text(scheme, "scheme")?;
        let (_, dag) = plans(poly, SchemeOptions { sparse })
            .into_iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownScheme { name: name.to_string() })?;
        let plan = RingoptPlan {
            name: name.to_string(),
            degree: poly.degree(),
            variable: poly.variable().to_string(),
            reference: poly.clone(),
            dag,
        };
        put(out, Box::into_raw(Box::new(plan)), "out")
    })
}

/// # Safety
/// `plan` must come from [`ringopt_plan_build`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_free(plan: *mut RingoptPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_cost(plan: *const RingoptPlan, out: *mut RingoptCost) -> RingoptStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let r = cost_report(&plan.name, plan.degree, &plan.dag)?;
        let cost = RingoptCost {
            degree: r.degree,
            adds: r.adds,
            muls: r.muls,
            total_ops: r.total_ops,
            critical_path: r.critical_path,
        };
        put(out, cost, "out")
    })
}

/// Evaluate the plan at `x` modulo `2^width_bits`, with `count` coefficient
/// atoms bound by name.
///
/// # Safety
/// `names` and `values` must each point to `count` valid elements (or be
/// NULL when `count` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_eval(
    plan: *const RingoptPlan,
    width_bits: u32,
    x: u64,
    names: *const *const c_char,
    values: *const u64,
    count: usize,
    out: *mut u64,
) -> RingoptStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let width = Width::from_bits(width_bits)?;
        let mut b = Binding::new(width, x);
        if count > 0 {
            if names.is_null() || values.is_null() {
                return Err(null("names/values"));
            }
            let names = std::slice::from_raw_parts(names, count);
            let values = std::slice::from_raw_parts(values, count);
            for (&n, &v) in names.iter().zip(values) {
                b = b.with(text(n, "name")?, v);
            }
        }
        put(out, eval_dag(&plan.dag, &b)?, "out")
    })
}

/// Check the plan against its polynomial. `samples == 0` sweeps every value
/// of the variable for `draws` coefficient assignments; otherwise `samples`
/// random points are checked. A failed check still returns `Ok`; inspect
/// `out->passed`.
///
/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_verify(
    plan: *const RingoptPlan,
    width_bits: u32,
    samples: usize,
    draws: usize,
    seed: u64,
    out: *mut RingoptVerification,
) -> RingoptStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let width = Width::from_bits(width_bits)?;
        let mode = if samples == 0 {
            VerifyMode::Exhaustive {
                coefficient_draws: draws,
                seed,
            }
        } else {
            VerifyMode::Sampled { count: samples, seed }
        };
        let r = verify_equivalence(&plan.dag, &plan.reference, width, mode)?;
        let mut v = RingoptVerification {
            passed: r.passed,
            points_checked: r.points_checked,
            ..Default::default()
        };
        if let Some(cex) = r.counterexample {
            v.counterexample_x = cex.binding.variable_value;
            v.expected = cex.expected;
            v.actual = cex.actual;
        }
        put(out, v, "out")
    })
}

/// C definition `return_type function_name(param_type <variable>)` for the
/// plan.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_plan_emit_c(
    plan: *const RingoptPlan,
    return_type: *const c_char,
    function_name: *const c_char,
    param_type: *const c_char,
    out: *mut *mut c_char,
) -> RingoptStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let sig = Signature::unary(
            text(return_type, "return_type")?,
            text(function_name, "function_name")?,
            text(param_type, "param_type")?,
            &plan.variable,
        );
        let style = match plan.name.parse::<Scheme>() {
            Ok(s) => EmitStyle::from(s),
            Err(_) => EmitStyle::Expression,
        };
        let unit = emit_function(&plan.dag, &plan.name, style, &sig)?;
        put_string(out, unit.text)
    })
}

/// Rewrite every annotated function in `source` with `scheme`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_transform_source(
    source: *const c_char,
    scheme: *const c_char,
    sparse: bool,
    out: *mut *mut c_char,
) -> RingoptStatus {
    guard(|| {
        let source = text(source, "source")?;
        let scheme: Scheme = text(scheme, "scheme")?.parse()?;
        put_string(out, transform_source(source, scheme, SchemeOptions { sparse })?)
    })
}

/// JSON analysis report for the annotated functions in `source`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_analyze_json(
    source: *const c_char,
    input_name: *const c_char,
    sparse: bool,
    out: *mut *mut c_char,
) -> RingoptStatus {
    guard(|| {
        let source = text(source, "source")?;
        let name = if input_name.is_null() {
            "<memory>"
        } else {
            text(input_name, "input_name")?
        };
        let doc = analyze_source(name, source, SchemeOptions { sparse })?;
        put_string(out, serde_json::to_string_pretty(&doc).expect("report serializes"))
    })
}

/// Benchmark program for `schemes`, a comma-separated list of scheme names.
///
/// # Safety
/// `schemes` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ringopt_emit_benchmark(
    degree: usize,
    schemes: *const c_char,
    iterations: usize,
    width_bits: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> RingoptStatus {
    guard(|| {
        let list = text(schemes, "schemes")?;
        let schemes = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Scheme>, Error>>()?;
        let config = BenchmarkConfig {
            degree,
            schemes,
            iterations,
            width: Width::from_bits(width_bits)?,
            seed,
            ..BenchmarkConfig::default()
        };
        put_string(out, emit_benchmark(&config)?.source)
    })
}
