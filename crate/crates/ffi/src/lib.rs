//! C ABI over the `wopn` pipeline.
//!
//! Every object crosses the boundary as an opaque heap handle created by a
//! `wopn_*_new`/`_compute` call and released by the matching `_free`.
//! Functions return a [`WopnStatus`]; on failure the message is available
//! from [`wopn_last_error`] on the same thread. Panics are caught and
//! reported as [`WopnStatus::Panic`] instead of unwinding into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wopn::diagmetric::bottleneck;
use wopn::dynsys::{self, add_noise, DynamicState, NoiseSpec, Signal};
use wopn::experiment::t_for;
use wopn::graph::WeightedGraph;
use wopn::graphdist::{normalize, DistanceMatrix, DistanceMethod};
use wopn::opn::{build_network, embed};
use wopn::persistence::{max_lifetime, rips_persistence, PersistenceDiagram};
use wopn::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WopnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Length = 3,
    Degenerate = 4,
    Disconnected = 5,
    NotFound = 6,
    Divergence = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WopnState {
    Periodic = 0,
    Chaotic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WopnMethod {
    Supd = 0,
    Swpd = 1,
    Wspd = 2,
    Dd = 3,
}

impl From<WopnMethod> for DistanceMethod {
    fn from(m: WopnMethod) -> Self {
        match m {
            WopnMethod::Supd => DistanceMethod::Supd,
            WopnMethod::Swpd => DistanceMethod::Swpd,
            WopnMethod::Wspd => DistanceMethod::Wspd,
            WopnMethod::Dd => DistanceMethod::Dd,
        }
    }
}

/// Sampled scalar signal.
pub struct WopnSignal(Signal);

/// Weighted transition graph, from a signal or an explicit edge list.
pub struct WopnNetwork(WeightedGraph);

/// Symmetric vertex distance matrix.
pub struct WopnDistance(DistanceMatrix);

/// H0/H1 persistence diagram.
pub struct WopnDiagram(PersistenceDiagram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WopnStatus {
    match e {
        Error::Length(_) => WopnStatus::Length,
        Error::DegenerateSignal(_) | Error::DegenerateNetwork { .. } | Error::Degenerate(_) => WopnStatus::Degenerate,
        Error::Disconnected { .. } | Error::ZeroRow(_) => WopnStatus::Disconnected,
        Error::NotFound { .. } => WopnStatus::NotFound,
        Error::Divergence { .. } => WopnStatus::Divergence,
        _ => WopnStatus::InvalidInput,
    }
}

struct Fail(WopnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WopnStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WopnStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WopnStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            WopnStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn fill(dst: *mut f64, cap: usize, src: impl ExactSizeIterator<Item = f64>, what: &str) -> Result<(), Fail> {
    if src.len() > cap {
        return Err(Fail(
            WopnStatus::BufferTooSmall,
            format!("{what} needs {} values, buffer holds {cap}", src.len()),
        ));
    }
    if src.len() == 0 {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null(what));
    }
    for (i, v) in src.enumerate() {
        *dst.add(i) = v;
    }
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next `wopn_*` call on the same thread.
#[no_mangle]
pub extern "C" fn wopn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wopn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy `len` samples taken at `fs` Hz into a new signal.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_new(samples: *const f64, len: usize, fs: f64, out: *mut *mut WopnSignal) -> WopnStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let s = Signal::new(slice(samples, len, "samples")?.to_vec(), fs, None)?;
        *out = boxed(WopnSignal(s));
        Ok(())
    })
}

/// Simulate a registry system with its default protocol.
///
/// # Safety
/// `system` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_simulate(system: *const c_char, state: WopnState, out: *mut *mut WopnSignal) -> WopnStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if system.is_null() {
            return Err(null("system"));
        }
        let name = CStr::from_ptr(system)
            .to_str()
            .map_err(|_| Fail(WopnStatus::InvalidInput, "system name is not UTF-8".into()))?;
        let state = match state {
            WopnState::Periodic => DynamicState::Periodic,
            WopnState::Chaotic => DynamicState::Chaotic,
        };
        let s = dynsys::simulate_default(&dynsys::lookup(name)?, state)?;
        *out = boxed(WopnSignal(s));
        Ok(())
    })
}

/// Standardize and add truncated Gaussian noise; `snr_db` may be +inf.
///
/// # Safety
/// `signal` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_add_noise(
    signal: *const WopnSignal,
    snr_db: f64,
    seed: u64,
    out: *mut *mut WopnSignal,
) -> WopnStatus {
    guard(|| {
        let s = handle(signal, "signal")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(WopnSignal(add_noise(&s.0, &NoiseSpec::new(snr_db, seed))?));
        Ok(())
    })
}

/// Number of samples, 0 for a null handle.
///
/// # Safety
/// `signal` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_len(signal: *const WopnSignal) -> usize {
    signal.as_ref().map_or(0, |s| s.0.len())
}

/// Copy the samples into `buf`, which must hold at least `wopn_signal_len`.
///
/// # Safety
/// `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_copy(signal: *const WopnSignal, buf: *mut f64, cap: usize) -> WopnStatus {
    guard(|| {
        let s = handle(signal, "signal")?;
        fill(buf, cap, s.0.samples.iter().copied(), "signal")
    })
}

/// # Safety
/// `signal` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wopn_signal_free(signal: *mut WopnSignal) {
    free(signal)
}

/// Ordinal partition network of `signal` with dimension `n` and delay `tau`.
///
/// # Safety
/// `signal` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_network_from_signal(
    signal: *const WopnSignal,
    n: usize,
    tau: usize,
    out: *mut *mut WopnNetwork,
) -> WopnStatus {
    guard(|| {
        let s = handle(signal, "signal")?;
        let out = out_ptr(out, "out")?;
        let net = build_network(&embed(&s.0, n, tau)?)?;
        *out = boxed(WopnNetwork(net.graph));
        Ok(())
    })
}

/// Graph on `vertices` vertices from parallel arrays of endpoints and
/// positive weights. Repeated edges accumulate.
///
/// # Safety
/// `us`, `vs` and `ws` must each point to `edges` readable values.
#[no_mangle]
pub unsafe extern "C" fn wopn_network_from_edges(
    vertices: usize,
    us: *const usize,
    vs: *const usize,
    ws: *const u64,
    edges: usize,
    out: *mut *mut WopnNetwork,
) -> WopnStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let (us, vs, ws) = (slice(us, edges, "us")?, slice(vs, edges, "vs")?, slice(ws, edges, "ws")?);
        let list: Vec<_> = (0..edges).map(|i| (us[i], vs[i], ws[i])).collect();
        *out = boxed(WopnNetwork(WeightedGraph::from_edges(vertices, &list)?));
        Ok(())
    })
}

/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wopn_network_vertex_count(network: *const WopnNetwork) -> usize {
    network.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wopn_network_edge_count(network: *const WopnNetwork) -> usize {
    network.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `network` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wopn_network_free(network: *mut WopnNetwork) {
    free(network)
}

/// Vertex distances of `network`. For DD, `t_steps == 0` selects twice the
/// graph diameter.
///
/// # Safety
/// `network` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_distance_compute(
    network: *const WopnNetwork,
    method: WopnMethod,
    t_steps: usize,
    normalized: bool,
    out: *mut *mut WopnDistance,
) -> WopnStatus {
    guard(|| {
        let g = &handle(network, "network")?.0;
        let out = out_ptr(out, "out")?;
        let t = if t_steps == 0 { t_for(g.diameter()?, 2.0) } else { t_steps };
        let raw = DistanceMethod::from(method).compute(g, Some(t))?;
        let d = if normalized { normalize(&raw)? } else { raw };
        *out = boxed(WopnDistance(d));
        Ok(())
    })
}

/// Wrap a row-major `size × size` matrix, which must be symmetric, finite
/// and zero on the diagonal.
///
/// # Safety
/// `values` must point to `size * size` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn wopn_distance_from_matrix(values: *const f64, size: usize, out: *mut *mut WopnDistance) -> WopnStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let len = size
            .checked_mul(size)
            .ok_or_else(|| Fail(WopnStatus::InvalidInput, format!("matrix size {size} overflows")))?;
        let v = slice(values, len, "values")?.to_vec();
        let arr = ndarray::Array2::from_shape_vec((size, size), v).map_err(|e| Fail(WopnStatus::InvalidInput, e.to_string()))?;
        *out = boxed(WopnDistance(DistanceMatrix::from_array(arr)?));
        Ok(())
    })
}

/// Matrix side length, 0 for a null handle.
///
/// # Safety
/// `distance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wopn_distance_size(distance: *const WopnDistance) -> usize {
    distance.as_ref().map_or(0, |d| d.0.values.nrows())
}

/// Copy the matrix row-major into `buf` (`size * size` values).
///
/// # Safety
/// `buf` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wopn_distance_copy(distance: *const WopnDistance, buf: *mut f64, cap: usize) -> WopnStatus {
    guard(|| {
        let d = handle(distance, "distance")?;
        fill(buf, cap, d.0.values.iter().copied(), "distance")
    })
}

/// # Safety
/// `distance` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wopn_distance_free(distance: *mut WopnDistance) {
    free(distance)
}

/// Rips persistence in dimensions 0 and 1.
///
/// # Safety
/// `distance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_diagram_compute(distance: *const WopnDistance, out: *mut *mut WopnDiagram) -> WopnStatus {
    guard(|| {
        let d = handle(distance, "distance")?;
        let out = out_ptr(out, "out")?;
        *out = boxed(WopnDiagram(rips_persistence(&d.0, 1)?));
        Ok(())
    })
}

/// Number of pairs in dimension `dim`, including essential ones.
///
/// # Safety
/// `diagram` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wopn_diagram_len(diagram: *const WopnDiagram, dim: usize) -> usize {
    diagram.as_ref().map_or(0, |d| d.0.points(dim).len())
}

/// Copy the `dim` pairs into parallel birth/death arrays. Essential pairs
/// have death `+inf`.
///
/// # Safety
/// `births` and `deaths` must each point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wopn_diagram_copy(
    diagram: *const WopnDiagram,
    dim: usize,
    births: *mut f64,
    deaths: *mut f64,
    cap: usize,
) -> WopnStatus {
    guard(|| {
        let pts = handle(diagram, "diagram")?.0.points(dim);
        fill(births, cap, pts.iter().map(|p| p.0), "births")?;
        fill(deaths, cap, pts.iter().map(|p| p.1), "deaths")
    })
}

/// Largest finite lifetime in dimension `dim` (0 when there is none).
///
/// # Safety
/// `diagram` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_diagram_max_lifetime(diagram: *const WopnDiagram, dim: usize, out: *mut f64) -> WopnStatus {
    guard(|| {
        let d = handle(diagram, "diagram")?;
        *out_ptr(out, "out")? = max_lifetime(&d.0, dim);
        Ok(())
    })
}

/// # Safety
/// `diagram` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wopn_diagram_free(diagram: *mut WopnDiagram) {
    free(diagram)
}

/// Bottleneck distance between the finite `dim` pairs of two diagrams.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wopn_bottleneck(a: *const WopnDiagram, b: *const WopnDiagram, dim: usize, out: *mut f64) -> WopnStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        let out = out_ptr(out, "out")?;
        *out = bottleneck(&a.0.finite_in(dim), &b.0.finite_in(dim))?;
        Ok(())
    })
}
