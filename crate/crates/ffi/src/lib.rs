//! C ABI over the geocascade library.
//!
//! Networks are opaque heap handles released with [`gc_network_free`].
//! Every fallible call returns a [`GcStatus`]; on failure the message is
//! available from [`gc_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geocascade::cascade::{self, CascadeParams, Schedule, SeedSpec};
use geocascade::geom::{self, BoundaryMode};
use geocascade::graph::{self, Network};
use geocascade::io::{parse_config, ConfigDoc};
use geocascade::smallworld::{self, LinkScheme};
use geocascade::{energy, montecarlo, EnergyModel, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Parse = 3,
    Infeasible = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcBoundary {
    Torus = 0,
    Planar = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcLinkKind {
    Uniform = 0,
    /// `param` is the exponent `delta`.
    PowerLaw = 1,
    /// `param` is the cutoff distance `d_c`.
    Cutoff = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcSchedule {
    Synchronous = 0,
    Asynchronous = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcSeedKind {
    SingleNode = 0,
    ConnectedTriple = 1,
}

/// Cascade settings. `max_steps == 0` selects the default budget.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct GcCascadeParams {
    pub phi: f64,
    pub schedule: GcSchedule,
    pub seed: GcSeedKind,
    pub cutoff_fraction: f64,
    pub max_steps: usize,
}

/// Outcome and energy of one cascade. `time_to_cutoff` is -1 when the
/// cutoff fraction was never reached.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GcCascadeResult {
    pub final_fraction: f64,
    pub active_count: usize,
    pub time: usize,
    pub time_to_cutoff: i64,
    pub is_global: bool,
    pub stalled: bool,
    pub e_local: f64,
    pub e_long: f64,
    pub e_total: f64,
    pub e_predicted: f64,
}

/// Replicate aggregates. Means over successful cascades are NaN when
/// there were none.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GcExperimentStats {
    pub n_runs: usize,
    pub n_success: usize,
    pub n_infeasible: usize,
    pub p_global: f64,
    pub p_global_se: f64,
    pub mean_time: f64,
    pub mean_time_se: f64,
    pub mean_energy: f64,
    pub mean_energy_se: f64,
    pub mean_predicted_energy: f64,
}

/// Opaque network handle.
pub struct GcNetwork {
    inner: Network,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GcStatus {
    match e {
        Error::InvalidParameter { .. } => GcStatus::InvalidParameter,
        Error::Parse { .. } => GcStatus::Parse,
        Error::Io(_) => GcStatus::Io,
        _ => GcStatus::Infeasible,
    }
}

struct Failure(GcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(GcStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GcStatus {
    let status = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            GcStatus::Panic
        }
    };
    if status == GcStatus::Ok {
        set_last_error("");
    }
    status
}

unsafe fn network_ref<'a>(net: *const GcNetwork) -> Result<&'a Network, Failure> {
    // SAFETY: non-null handles come from this library and are live per the
    // caller contract.
    unsafe { net.as_ref() }.map(|n| &n.inner).ok_or_else(|| null("net"))
}

fn into_handle(net: Network) -> *mut GcNetwork {
    Box::into_raw(Box::new(GcNetwork { inner: net }))
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Cascade settings with the library defaults for threshold `phi`.
#[no_mangle]
pub extern "C" fn gc_cascade_params_default(phi: f64) -> GcCascadeParams {
    let d = CascadeParams::new(phi);
    GcCascadeParams {
        phi,
        schedule: GcSchedule::Synchronous,
        seed: GcSeedKind::SingleNode,
        cutoff_fraction: d.cutoff_fraction,
        max_steps: 0,
    }
}

/// Samples `n` uniform points in the `side` square and connects pairs
/// within `range`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gc_network_new(
    n: usize,
    side: f64,
    range: f64,
    boundary: GcBoundary,
    seed: u64,
    out: *mut *mut GcNetwork,
) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let boundary = match boundary {
            GcBoundary::Torus => BoundaryMode::Torus,
            GcBoundary::Planar => BoundaryMode::Planar,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = geom::sample_points(n, side, &mut rng)?;
        let net = graph::build_rgg(pts, range, side, boundary)?;
        // SAFETY: checked non-null above.
        unsafe { *out = into_handle(net) };
        Ok(())
    })
}

/// Returns a new handle holding a copy of `net` plus `round(p_r * N)`
/// long-range links. `param` is ignored for uniform links.
///
/// # Safety
/// `net` must be a live handle and `out` valid for one handle write.
#[no_mangle]
pub unsafe extern "C" fn gc_network_add_links(
    net: *const GcNetwork,
    kind: GcLinkKind,
    p_r: f64,
    param: f64,
    seed: u64,
    out: *mut *mut GcNetwork,
) -> GcStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let net = unsafe { network_ref(net) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let scheme = match kind {
            GcLinkKind::Uniform => LinkScheme::uniform(p_r),
            GcLinkKind::PowerLaw => LinkScheme::power_law(p_r, param),
            GcLinkKind::Cutoff => LinkScheme::cutoff(p_r, param),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let augmented = smallworld::add_long_range_links(net, &scheme, &mut rng)?;
        // SAFETY: checked non-null above.
        unsafe { *out = into_handle(augmented) };
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_network_free(net: *mut GcNetwork) {
    if !net.is_null() {
        // SAFETY: handle was created by `into_handle` and is freed once.
        drop(unsafe { Box::from_raw(net) });
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_network_node_count(net: *const GcNetwork) -> usize {
    unsafe { network_ref(net) }.map_or(0, Network::node_count)
}

/// Number of local (geometric) edges, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_network_local_edge_count(net: *const GcNetwork) -> usize {
    unsafe { network_ref(net) }.map_or(0, Network::local_edge_count)
}

/// Number of long-range links, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_network_long_link_count(net: *const GcNetwork) -> usize {
    unsafe { network_ref(net) }.map_or(0, |n| n.long_links().len())
}

/// Mean local degree, NaN for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_network_mean_degree(net: *const GcNetwork) -> f64 {
    unsafe { network_ref(net) }.map_or(f64::NAN, Network::mean_local_degree)
}

/// Fraction of nodes in the largest connected component.
///
/// # Safety
/// `net` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gc_network_giant_fraction(net: *const GcNetwork, out: *mut f64) -> GcStatus {
    guard(|| {
        let net = unsafe { network_ref(net) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let labels = graph::components(net);
        let fraction = graph::giant_fraction(&labels, net.node_count())?;
        // SAFETY: checked non-null above.
        unsafe { *out = fraction };
        Ok(())
    })
}

/// Runs one cascade with energy coefficient `energy_c`. When `active_out`
/// is non-null it receives `active_len` final node states (1 active, 0
/// idle); `active_len` must then equal the node count.
///
/// # Safety
/// `net` must be a live handle, `params` and `out` valid pointers, and
/// `active_out` null or valid for `active_len` writes.
#[no_mangle]
pub unsafe extern "C" fn gc_run_cascade(
    net: *const GcNetwork,
    params: *const GcCascadeParams,
    energy_c: f64,
    seed: u64,
    out: *mut GcCascadeResult,
    active_out: *mut u8,
    active_len: usize,
) -> GcStatus {
    guard(|| {
        let net = unsafe { network_ref(net) }?;
        // SAFETY: forwarded caller contract.
        let p = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !active_out.is_null() && active_len != net.node_count() {
            return Err(Error::invalid(
                "active_len",
                format!("buffer holds {active_len} states, network has {} nodes", net.node_count()),
            )
            .into());
        }
        let mut cp = CascadeParams::new(p.phi);
        cp.schedule = match p.schedule {
            GcSchedule::Synchronous => Schedule::Synchronous,
            GcSchedule::Asynchronous => Schedule::Asynchronous,
        };
        cp.seed = match p.seed {
            GcSeedKind::SingleNode => SeedSpec::SingleNode,
            GcSeedKind::ConnectedTriple => SeedSpec::ConnectedTriple,
        };
        cp.cutoff_fraction = p.cutoff_fraction;
        cp.max_steps = (p.max_steps > 0).then_some(p.max_steps);
        let model = EnergyModel::new(energy_c, net.range())?;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let outcome = cascade::run_cascade(net, &cp, &mut rng)?;
        let report = energy::account_cascade(net, &outcome, &model);
        let result = GcCascadeResult {
            final_fraction: outcome.final_fraction,
            active_count: outcome.active_count,
            time: outcome.time,
            time_to_cutoff: outcome.time_to_cutoff.map_or(-1, |t| t as i64),
            is_global: outcome.is_global,
            stalled: outcome.stalled,
            e_local: report.e_local,
            e_long: report.e_long,
            e_total: report.e_total,
            e_predicted: report.e_predicted,
        };
        // SAFETY: `out` checked non-null; `active_out` checked for length.
        unsafe {
            *out = result;
            if !active_out.is_null() {
                for v in 0..active_len {
                    *active_out.add(v) = u8::from(outcome.is_activated(v));
                }
            }
        }
        Ok(())
    })
}

/// Runs all replicates of the experiment described by a TOML document
/// (a `[sweep]` table is not accepted here).
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn gc_run_experiment(config_toml: *const c_char, out: *mut GcExperimentStats) -> GcStatus {
    guard(|| {
        if config_toml.is_null() {
            return Err(null("config_toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let text = unsafe { CStr::from_ptr(config_toml) }
            .to_str()
            .map_err(|e| Failure(GcStatus::Parse, format!("config is not UTF-8: {e}")))?;
        let cfg = match parse_config(text)? {
            ConfigDoc::Experiment(cfg) => cfg,
            ConfigDoc::Sweep(_) => {
                return Err(Error::invalid("sweep", "sweeps are not supported through this call").into())
            }
        };
        let s = montecarlo::run_replicates(&cfg)?;
        let mean = |e: Option<montecarlo::Estimate>| e.map_or((f64::NAN, f64::NAN), |e| (e.mean, e.se));
        let (mean_time, mean_time_se) = mean(s.time);
        let (mean_energy, mean_energy_se) = mean(s.energy);
        // SAFETY: checked non-null above.
        unsafe {
            *out = GcExperimentStats {
                n_runs: s.n_runs,
                n_success: s.n_success,
                n_infeasible: s.n_infeasible,
                p_global: s.p_global,
                p_global_se: s.p_global_se,
                mean_time,
                mean_time_se,
                mean_energy,
                mean_energy_se,
                mean_predicted_energy: mean(s.predicted_energy).0,
            }
        };
        Ok(())
    })
}
