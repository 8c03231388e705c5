//! C ABI over `arcinterp`.
//!
//! Every fallible call returns an [`AiStatus`]; on failure the message is kept
//! per thread and read with [`ai_last_error_message`]. Objects are opaque
//! handles released by their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use arcinterp::arc::{make_arc, ArcSpec, JordanArc};
use arcinterp::bounds::{bound_theorem, lemma_sequence_bound, minimize_pivot_product, EstimationConfig};
use arcinterp::config::{ArcEntry, FunctionEntry};
use arcinterp::divided_difference::{dd_lagrange, NodeSet};
use arcinterp::error::Error;
use arcinterp::function::ArcFunction;
use arcinterp::interpolation::{newton_build, NewtonInterpolant, NodeOrdering};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for AiComplex {
    fn from(z: Complex64) -> Self {
        AiComplex { re: z.re, im: z.im }
    }
}

impl From<AiComplex> for Complex64 {
    fn from(z: AiComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DegenerateArc = 3,
    NodesTooClose = 4,
    InsufficientOrder = 5,
    NotApplicable = 6,
    EstimationUnstable = 7,
    NoConvergence = 8,
    Computation = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AiOrdering {
    AsGiven = 0,
    Leja = 1,
    Auto = 2,
}

/// Opaque arc handle.
pub struct AiArc(JordanArc);

/// Opaque handle to a function composed with an arc.
pub struct AiFunction {
    arc: JordanArc,
    f: ArcFunction,
}

/// Opaque Newton interpolant handle.
pub struct AiInterpolant(NewtonInterpolant);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AiStatus {
    match e {
        Error::InvalidArgument(_) | Error::Config { .. } | Error::Io(_) => AiStatus::InvalidArgument,
        Error::DegenerateArc(_) | Error::NonAdmissiblePoint { .. } => AiStatus::DegenerateArc,
        Error::NodesTooClose { .. } | Error::ConfluenceRegion { .. } => AiStatus::NodesTooClose,
        Error::InsufficientJetOrder { .. } | Error::UnsupportedOrder(_) => AiStatus::InsufficientOrder,
        Error::NotApplicable(_) | Error::HypothesisViolated(_) => AiStatus::NotApplicable,
        Error::EstimationUnstable { .. } => AiStatus::EstimationUnstable,
        Error::NoConvergence { .. } => AiStatus::NoConvergence,
        Error::SingularJet => AiStatus::Computation,
    }
}

/// Runs `body`, mapping errors and panics to a status and recording the message.
fn guard<F>(body: F) -> AiStatus
where
    F: FnOnce() -> Result<(), (AiStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            AiStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AiStatus::Panic
        }
    }
}

fn lib<T>(r: arcinterp::error::Result<T>) -> Result<T, (AiStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (AiStatus, String) {
    (AiStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (AiStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (AiStatus::InvalidArgument, format!("`{name}` is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (AiStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Result<(), (AiStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn arc_out(spec: Result<JordanArc, (AiStatus, String)>, out: *mut *mut AiArc) -> Result<(), (AiStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    let arc = spec?;
    out.write(Box::into_raw(Box::new(AiArc(arc))));
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ai_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Arc by name (`segment`, `circle`, `half-circle`, `ellipse-arc`) or JSON spec.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_from_text(name: *const c_char, out: *mut *mut AiArc) -> AiStatus {
    guard(|| {
        let name = text(name, "name")?;
        let arc = lib(ArcEntry::parse(name).and_then(|e| e.build()));
        arc_out(arc, out)
    })
}

/// Segment from `a` to `b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_segment(a: AiComplex, b: AiComplex, out: *mut *mut AiArc) -> AiStatus {
    guard(|| {
        arc_out(
            lib(make_arc(&ArcSpec::Segment {
                a: a.into(),
                b: b.into(),
            })),
            out,
        )
    })
}

/// Full circle, counter-clockwise from `center + radius`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_circle(center: AiComplex, radius: f64, out: *mut *mut AiArc) -> AiStatus {
    guard(|| {
        arc_out(
            lib(make_arc(&ArcSpec::Circle {
                center: center.into(),
                radius,
            })),
            out,
        )
    })
}

/// Circular arc over the angles `[angle_start, angle_end]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_circular(
    center: AiComplex,
    radius: f64,
    angle_start: f64,
    angle_end: f64,
    out: *mut *mut AiArc,
) -> AiStatus {
    guard(|| {
        arc_out(
            lib(make_arc(&ArcSpec::CircularArc {
                center: center.into(),
                radius,
                angle_range: [angle_start, angle_end],
            })),
            out,
        )
    })
}

/// Ellipse arc `center + a cos(s) + i b sin(s)` over `s` in `[angle_start, angle_end]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_ellipse(
    center: AiComplex,
    semi_a: f64,
    semi_b: f64,
    angle_start: f64,
    angle_end: f64,
    out: *mut *mut AiArc,
) -> AiStatus {
    guard(|| {
        arc_out(
            lib(make_arc(&ArcSpec::EllipseArc {
                center: center.into(),
                semi_axes: [semi_a, semi_b],
                angle_range: [angle_start, angle_end],
            })),
            out,
        )
    })
}

/// `phi(t)`.
///
/// # Safety
/// `arc` must come from an `ai_arc_*` constructor; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_point(arc: *const AiArc, t: f64, out: *mut AiComplex) -> AiStatus {
    guard(|| {
        let arc = arc.as_ref().ok_or_else(|| null("arc"))?;
        if !(0.0..=1.0).contains(&t) {
            return Err((AiStatus::InvalidArgument, format!("parameter {t} outside [0, 1]")));
        }
        put(out, arc.0.point(t).into(), "out")
    })
}

/// # Safety
/// `arc` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ai_arc_free(arc: *mut AiArc) {
    if !arc.is_null() {
        drop(Box::from_raw(arc));
    }
}

/// Built-in function (`exp`, `sin`, `conj`, `abs2`, `z3+conj`, ... or JSON spec)
/// composed with `arc`. The handle keeps its own copy of the arc.
///
/// # Safety
/// `arc` must be a live handle, `name` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ai_function_builtin(
    arc: *const AiArc,
    name: *const c_char,
    out: *mut *mut AiFunction,
) -> AiStatus {
    guard(|| {
        let arc = arc.as_ref().ok_or_else(|| null("arc"))?;
        let name = text(name, "name")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = lib(FunctionEntry::parse(name).and_then(|e| e.spec()))?;
        let f = spec.on_arc(&arc.0);
        out.write(Box::into_raw(Box::new(AiFunction { arc: arc.0.clone(), f })));
        Ok(())
    })
}

/// # Safety
/// `f` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ai_function_free(f: *mut AiFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

unsafe fn nodes_of(f: &AiFunction, params: *const f64, count: usize) -> Result<NodeSet, (AiStatus, String)> {
    let params = slice(params, count, "params")?;
    lib(NodeSet::new(&f.arc, params.to_vec()))
}

/// Divided difference `d_n` at the nodes `phi(params[k])`, `n = count - 1`.
///
/// # Safety
/// `params` must hold `count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_divided_difference(
    f: *const AiFunction,
    params: *const f64,
    count: usize,
    out: *mut AiComplex,
) -> AiStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("f"))?;
        let nodes = nodes_of(f, params, count)?;
        let dd = lib(dd_lagrange(&f.f, &nodes))?;
        put(out, dd.value.into(), "out")
    })
}

/// # Safety
/// `params` must hold `count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_interp_build(
    f: *const AiFunction,
    params: *const f64,
    count: usize,
    ordering: AiOrdering,
    out: *mut *mut AiInterpolant,
) -> AiStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("f"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let nodes = nodes_of(f, params, count)?;
        let ordering = match ordering {
            AiOrdering::AsGiven => NodeOrdering::AsGiven,
            AiOrdering::Leja => NodeOrdering::Leja,
            AiOrdering::Auto => NodeOrdering::Auto,
        };
        let p = lib(newton_build(&f.f, &nodes, ordering))?;
        out.write(Box::into_raw(Box::new(AiInterpolant(p))));
        Ok(())
    })
}

/// `p_n(z)` for any complex `z`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_interp_eval(p: *const AiInterpolant, z: AiComplex, out: *mut AiComplex) -> AiStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("p"))?;
        put(out, p.0.eval(z.into()).into(), "out")
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ai_interp_free(p: *mut AiInterpolant) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Bound certificate as JSON. `grid = 0` selects the default constant grid.
/// Release the string with [`ai_string_free`].
///
/// # Safety
/// `params` must hold `count` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_bound_certificate_json(
    f: *const AiFunction,
    params: *const f64,
    count: usize,
    grid: usize,
    out: *mut *mut c_char,
) -> AiStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null("f"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let nodes = nodes_of(f, params, count)?;
        let mut cfg = EstimationConfig::default();
        if grid > 0 {
            cfg.constant_grid = grid;
        }
        let cert = lib(bound_theorem(&f.f, &f.arc, &nodes, &cfg))?;
        let json = serde_json::to_string(&cert).map_err(|e| (AiStatus::Computation, e.to_string()))?;
        let c = CString::new(json).map_err(|e| (AiStatus::Computation, e.to_string()))?;
        out.write(c.into_raw());
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ai_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `min_{i != j} prod_{m not in {i,j}} (1 + |z_i - z_m|)` and its minimizing pair.
///
/// # Safety
/// `points` must hold `count` values; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_minimize_pivot_product(
    points: *const AiComplex,
    count: usize,
    pivot_index: *mut usize,
    excluded_index: *mut usize,
    value: *mut f64,
) -> AiStatus {
    guard(|| {
        let pts: Vec<Complex64> = slice(points, count, "points")?.iter().map(|&z| z.into()).collect();
        if pivot_index.is_null() || excluded_index.is_null() || value.is_null() {
            return Err(null("output"));
        }
        let r = lib(minimize_pivot_product(&pts))?;
        pivot_index.write(r.pivot_index);
        excluded_index.write(r.excluded_index);
        value.write(r.value);
        Ok(())
    })
}

/// Recursion value and closed form of the sequence bound; `l` holds `L_2..L_n`.
///
/// # Safety
/// `l` must hold `count` doubles; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ai_lemma_sequence_bound(
    c: f64,
    l: *const f64,
    count: usize,
    n: usize,
    i_hat: *mut f64,
    closed_form: *mut f64,
) -> AiStatus {
    guard(|| {
        let l = slice(l, count, "l")?;
        if i_hat.is_null() || closed_form.is_null() {
            return Err(null("output"));
        }
        let r = lib(lemma_sequence_bound(c, l, n))?;
        i_hat.write(r.i_hat_n0);
        closed_form.write(r.closed_form);
        Ok(())
    })
}
