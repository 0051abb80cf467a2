//! C interface to the `ratbs` engine.
//!
//! Every function returns a [`RatbsStatus`]. On failure the message is kept
//! per thread and can be read with [`ratbs_last_error`]. Strings handed out
//! by the library must be released with [`ratbs_string_free`], handles with
//! [`ratbs_rational_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ratbs::annihilator::global_b;
use ratbs::error::Error;
use ratbs::fixture::{CertificateFile, Fixture};
use ratbs::groebner::GbOptions;
use ratbs::parse::parse_comm;
use ratbs::poly::CommPoly;
use ratbs::rational::{BsValue, RationalFunction, StepMode};
use ratbs::weyl::AlgebraSignature;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatbsStatus {
    Ok = 0,
    Error = 1,
    InvalidInput = 2,
    ResourceLimit = 3,
    Inconclusive = 4,
    VerificationFailed = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatbsMethod {
    Linear = 0,
    Elimination = 1,
}

/// A rational function `f/g` with its pair annihilator.
pub struct RatbsRational {
    inner: RationalFunction,
    vars: Vec<String>,
    f: String,
    g: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RatbsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Syntax { .. } | Error::InvalidInput(_) | Error::TooManyVariables(_) => RatbsStatus::InvalidInput,
            ref e if e.is_resource_limit() => RatbsStatus::ResourceLimit,
            _ => RatbsStatus::Error,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RatbsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RatbsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            RatbsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(RatbsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RatbsStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(RatbsStatus::NullPointer, "output pointer is null".into()));
    }
    let c = CString::new(s).map_err(|_| Failure(RatbsStatus::Error, "result contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn handle<'a>(h: *const RatbsRational) -> Result<&'a RatbsRational, Failure> {
    h.as_ref()
        .ok_or_else(|| Failure(RatbsStatus::NullPointer, "handle is null".into()))
}

fn split_vars(vars: &str) -> Vec<String> {
    vars.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn ratbs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ratbs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computes the annihilator of `f^s1 g^s2`. `vars` is a comma-separated list
/// of variable names.
///
/// # Safety
/// The strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ratbs_rational_new(
    vars: *const c_char,
    f: *const c_char,
    g: *const c_char,
    out: *mut *mut RatbsRational,
) -> RatbsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(RatbsStatus::NullPointer, "output pointer is null".into()));
        }
        let vars = split_vars(text(vars, "vars")?);
        let (f, g) = (text(f, "f")?, text(g, "g")?);
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let fp = parse_comm(f, &names)?;
        let gp = parse_comm(g, &names)?;
        let inner = RationalFunction::new(&names, &fp, &gp, &GbOptions::default())?;
        *out = Box::into_raw(Box::new(RatbsRational {
            inner,
            vars,
            f: f.to_string(),
            g: g.to_string(),
        }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a handle from [`ratbs_rational_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ratbs_rational_free(h: *mut RatbsRational) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Computes the Bernstein-Sato ideal of the pair, or, when `fixture` is not
/// null, validates and uses the generators it lists (one per line, in `s1`,
/// `s2`).
///
/// # Safety
/// `h` must be a live handle; `fixture` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ratbs_rational_prepare(h: *mut RatbsRational, fixture: *const c_char) -> RatbsStatus {
    guard(|| {
        let r = h
            .as_mut()
            .ok_or_else(|| Failure(RatbsStatus::NullPointer, "handle is null".into()))?;
        if fixture.is_null() {
            r.inner.compute_bs_ideal()?;
        } else {
            let gens = Fixture::parse(text(fixture, "fixture")?).polynomials(&["s1", "s2"])?;
            r.inner.supply_bs_ideal(gens)?;
        }
        Ok(())
    })
}

/// Generators of `I_m(s)`, one per line.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ratbs_ann_rational(h: *const RatbsRational, m: u32, out: *mut *mut c_char) -> RatbsStatus {
    guard(|| {
        let a = handle(h)?.inner.ann_rational(m, StepMode::Direct)?;
        let lines: Vec<String> = a.basis.elements().iter().map(|e| e.to_string()).collect();
        put_string(out, lines.join("\n"))
    })
}

/// `b^{(N)}_{f/g,m}(s)` as a polynomial in `s`, or `0` for the zero ideal.
/// The linear method returns [`RatbsStatus::Inconclusive`] past `max_degree`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ratbs_bs_rational(
    h: *const RatbsRational,
    m: u32,
    n: u32,
    method: RatbsMethod,
    max_degree: u32,
    out: *mut *mut c_char,
) -> RatbsStatus {
    guard(|| {
        let r = &handle(h)?.inner;
        if n == 0 {
            return Err(Failure(RatbsStatus::InvalidInput, "N must be at least 1".into()));
        }
        let res = match method {
            RatbsMethod::Linear => r.bs_rational_linear(m, n, max_degree, None)?,
            RatbsMethod::Elimination => r.bs_rational_elim(m, n)?,
        };
        match res.value {
            BsValue::Poly(b) => put_string(out, b.to_string_in("s")),
            BsValue::Zero => put_string(out, "0".into()),
            BsValue::Inconclusive { max_degree } => Err(Failure(
                RatbsStatus::Inconclusive,
                format!("no relation up to degree {max_degree}"),
            )),
        }
    })
}

/// A certificate for `b` at `(m, N)` in the certificate file format.
///
/// # Safety
/// `h` must be a live handle; `b` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ratbs_certificate(
    h: *const RatbsRational,
    m: u32,
    n: u32,
    b: *const c_char,
    out: *mut *mut c_char,
) -> RatbsStatus {
    guard(|| {
        let r = handle(h)?;
        let bu = parse_comm(text(b, "b")?, &["s"])?.to_univariate(0)?;
        let ops = r.inner.certificate(m, n, &bu)?;
        let file = CertificateFile {
            vars: r.vars.clone(),
            f: r.f.clone(),
            g: r.g.clone(),
            m,
            n,
            b: bu.to_string_in("s"),
            operators: ops.iter().map(|p| p.to_string()).collect(),
        };
        put_string(out, file.to_text())
    })
}

/// Checks a certificate file against its own `f`, `g`, `m`, `N` and `b`.
/// Returns [`RatbsStatus::VerificationFailed`] when either check fails.
/// `bs_fixture` may be null.
///
/// # Safety
/// `certificate` must be NUL-terminated; `bs_fixture` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ratbs_verify(certificate: *const c_char, bs_fixture: *const c_char) -> RatbsStatus {
    guard(|| {
        let cert = CertificateFile::parse(text(certificate, "certificate")?)?;
        let (f, g) = cert.parse_f_g()?;
        let mut r = RationalFunction::new(&cert.var_refs(), &f, &g, &GbOptions::default())?;
        if bs_fixture.is_null() {
            r.compute_bs_ideal()?;
        } else {
            r.supply_bs_ideal(Fixture::parse(text(bs_fixture, "fixture")?).polynomials(&["s1", "s2"])?)?;
        }
        let ops = cert.parse_operators(&r)?;
        let v = r.verify_certificate(cert.m, cert.n, &cert.parse_b()?, &ops)?;
        if v.passed() {
            Ok(())
        } else {
            Err(Failure(
                RatbsStatus::VerificationFailed,
                format!("normal form check {}, action check {}", v.normal_form, v.action),
            ))
        }
    })
}

/// The Bernstein-Sato polynomial of `f`.
///
/// # Safety
/// The strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ratbs_global_b(vars: *const c_char, f: *const c_char, out: *mut *mut c_char) -> RatbsStatus {
    guard(|| {
        let vars = split_vars(text(vars, "vars")?);
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let fp: CommPoly = parse_comm(text(f, "f")?, &names)?;
        let sig = std::sync::Arc::new(AlgebraSignature::weyl(&names, &["s"])?);
        let b = global_b(&sig, &fp, &GbOptions::default())?;
        put_string(out, b.to_string_in("s"))
    })
}
