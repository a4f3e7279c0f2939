//! C ABI over `fanbw`. Objects cross the boundary as opaque handles; every
//! call returns a [`FanbwStatus`] and leaves a message for
//! [`fanbw_last_error`] on failure. Panics are caught and reported as
//! `FANBW_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fanbw::certificate::{verify_certificate, FanCertificate};
use fanbw::graph::Graph;
use fanbw::io::{parse_graph, parse_product};
use fanbw::oracles::{exact_bandwidth, exhaustive_local_density};
use fanbw::pipeline::{planar_pipeline, product_pipeline, PipelineOptions};
use fanbw::product::ProductInstance;
use fanbw::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FanbwStatus {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
    NullPointer = 3,
    Panic = 4,
}

enum Source {
    Plain(Graph),
    Product(ProductInstance),
}

/// A plain graph or a graph placed in a strong product.
pub struct FanbwGraph(Source);

impl FanbwGraph {
    fn graph(&self) -> &Graph {
        match &self.0 {
            Source::Plain(g) => g,
            Source::Product(p) => &p.g,
        }
    }
}

pub struct FanbwCertificate(FanCertificate);

/// Pipeline parameters; `k = 0` and `dims_cap = 0` mean "default" and
/// "full dimension".
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct FanbwOptions {
    pub d: f64,
    pub k: u32,
    pub a: f64,
    pub seed: u64,
    pub restarts: u32,
    pub dims_cap: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).expect("no interior nul"));
}

fn guard(f: impl FnOnce() -> Result<FanbwStatus, (FanbwStatus, String)>) -> FanbwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == FanbwStatus::Ok {
                set_error("");
            }
            s
        }
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("panic: {msg}"));
            FanbwStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (FanbwStatus, String) {
    (FanbwStatus::InputError, e.to_string())
}

fn null(what: &str) -> (FanbwStatus, String) {
    (FanbwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn utf8<'a>(p: *const c_char) -> Result<&'a str, (FanbwStatus, String)> {
    if p.is_null() {
        return Err(null("text"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (FanbwStatus::InputError, "text is not UTF-8".into()))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<FanbwStatus, (FanbwStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(FanbwStatus::Ok)
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fanbw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn fanbw_options_default(d: f64) -> FanbwOptions {
    FanbwOptions {
        d,
        k: 0,
        a: 193.0,
        seed: 0,
        restarts: 5,
        dims_cap: 0,
    }
}

/// Graph on `n` vertices with `m` edges given as `2m` endpoints.
///
/// # Safety
/// `edges` must point to `2 * m` readable values (or be null when `m = 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_graph_new(
    n: usize,
    edges: *const usize,
    m: usize,
    out: *mut *mut FanbwGraph,
) -> FanbwStatus {
    guard(|| {
        let list: &[usize] = if m == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * m)
        };
        let g = Graph::new(n, list.chunks(2).map(|e| (e[0], e[1]))).map_err(lib_err)?;
        put(out, FanbwGraph(Source::Plain(g)))
    })
}

/// Parses the plain graph text format.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_graph_parse(
    text: *const c_char,
    out: *mut *mut FanbwGraph,
) -> FanbwStatus {
    guard(|| {
        let g = parse_graph(utf8(text)?).map_err(lib_err)?;
        put(out, FanbwGraph(Source::Plain(g)))
    })
}

/// Parses a product document.
///
/// # Safety
/// As [`fanbw_graph_parse`].
#[no_mangle]
pub unsafe extern "C" fn fanbw_product_parse(
    text: *const c_char,
    out: *mut *mut FanbwGraph,
) -> FanbwStatus {
    guard(|| {
        let p = parse_product(utf8(text)?).map_err(lib_err)?;
        put(out, FanbwGraph(Source::Product(p)))
    })
}

/// # Safety
/// `g` must come from this library and not be freed twice; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fanbw_graph_free(g: *mut FanbwGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_graph_vertex_count(
    g: *const FanbwGraph,
    out: *mut usize,
) -> FanbwStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.graph().vertex_count();
        Ok(FanbwStatus::Ok)
    })
}

/// Exact bandwidth, at most 12 vertices.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_exact_bandwidth(
    g: *const FanbwGraph,
    out: *mut usize,
) -> FanbwStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = exact_bandwidth(g.graph()).map_err(lib_err)?;
        Ok(FanbwStatus::Ok)
    })
}

/// Exact local density as a reduced fraction.
///
/// # Safety
/// `g` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_local_density(
    g: *const FanbwGraph,
    num: *mut u64,
    den: *mut u64,
) -> FanbwStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let (num, den) = (
            num.as_mut().ok_or_else(|| null("num"))?,
            den.as_mut().ok_or_else(|| null("den"))?,
        );
        let d = exhaustive_local_density(g.graph(), &[]).map_err(lib_err)?;
        *num = *d.numer();
        *den = *d.denom();
        Ok(FanbwStatus::Ok)
    })
}

/// Runs the pipeline matching the handle (layered for plain graphs,
/// product otherwise) and builds a certificate with the default `b`.
///
/// # Safety
/// `g` must be a live handle; `opts` readable; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certify(
    g: *const FanbwGraph,
    opts: *const FanbwOptions,
    out: *mut *mut FanbwCertificate,
) -> FanbwStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let o = opts.as_ref().ok_or_else(|| null("options"))?;
        let po = PipelineOptions {
            k: (o.k > 0).then_some(o.k as usize),
            a: o.a,
            seed: o.seed,
            restarts: o.restarts.max(1) as usize,
            dims_cap: (o.dims_cap > 0).then_some(o.dims_cap as usize),
        };
        let res = match &g.0 {
            Source::Plain(pg) => planar_pipeline(pg, o.d, &po).map(|r| r.result),
            Source::Product(p) => product_pipeline(p, o.d, &po).map(|r| r.result),
        }
        .map_err(lib_err)?;
        let mut cert = res.certificate(g.graph(), None).map_err(lib_err)?;
        cert.seeds = vec![o.seed];
        put(out, FanbwCertificate(cert))
    })
}

/// # Safety
/// `text` nul-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certificate_parse(
    text: *const c_char,
    out: *mut *mut FanbwCertificate,
) -> FanbwStatus {
    guard(|| {
        let c = FanCertificate::from_text(utf8(text)?).map_err(lib_err)?;
        put(out, FanbwCertificate(c))
    })
}

/// Serialized certificate; release with [`fanbw_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certificate_to_text(
    c: *const FanbwCertificate,
    out: *mut *mut c_char,
) -> FanbwStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = CString::new(c.0.to_text()).expect("no nul").into_raw();
        Ok(FanbwStatus::Ok)
    })
}

/// `b` and the measured bandwidth of a certificate.
///
/// # Safety
/// `c` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certificate_summary(
    c: *const FanbwCertificate,
    b: *mut usize,
    bandwidth: *mut usize,
    x_size: *mut usize,
) -> FanbwStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        *b.as_mut().ok_or_else(|| null("b"))? = c.0.b;
        *bandwidth.as_mut().ok_or_else(|| null("bandwidth"))? = c.0.measured_bandwidth;
        *x_size.as_mut().ok_or_else(|| null("x_size"))? = c.0.x.len();
        Ok(FanbwStatus::Ok)
    })
}

/// Sets vertex `v`'s `(node, slot)`; meant for building test cases.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certificate_set_mapping(
    c: *mut FanbwCertificate,
    v: usize,
    node: usize,
    slot: usize,
) -> FanbwStatus {
    guard(|| {
        let c = c.as_mut().ok_or_else(|| null("certificate"))?;
        let entry =
            c.0.mapping
                .get_mut(v)
                .ok_or_else(|| (FanbwStatus::InputError, format!("vertex {v} out of range")))?;
        *entry = (node, slot);
        Ok(FanbwStatus::Ok)
    })
}

/// `FANBW_STATUS_OK` when valid, `FANBW_STATUS_VERIFICATION_FAILED` with
/// the first violation in [`fanbw_last_error`] otherwise.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn fanbw_verify(
    g: *const FanbwGraph,
    c: *const FanbwCertificate,
) -> FanbwStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("graph"))?;
        let c = c.as_ref().ok_or_else(|| null("certificate"))?;
        match verify_certificate(g.graph(), &c.0).first() {
            None => Ok(FanbwStatus::Ok),
            Some(v) => Err((FanbwStatus::VerificationFailed, v.to_string())),
        }
    })
}

/// # Safety
/// `c` must come from this library; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fanbw_certificate_free(c: *mut FanbwCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `s` must come from [`fanbw_certificate_to_text`]; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fanbw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
