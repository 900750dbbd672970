//! C ABI over `netsir`.
//!
//! Every fallible function returns a [`NetsirStatus`]; on failure a message is
//! available from [`netsir_last_error_message`] on the calling thread.
//! Handles are opaque and must be released with their `_free` function.
//! Array arguments are `n` doubles unless stated otherwise; matrices are
//! row-major `n * n`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use netsir::curves::observed_shape;
use netsir::integrate::{integrate, IntegratorConfig, Trajectory};
use netsir::model::{vector_field, EpidemicParams, Matrix, State};
use netsir::rank1::{classify_node_curve, epsilon_bar, invariants_h, limit_state, solve_phi};
use netsir::spectral::{dominant_eig, scalar_final_size};
use netsir::{CurveShape, ShapeTag, SirError, Stability};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetsirStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    NotRankOne = 5,
    NoConvergence = 6,
    NumericalFailure = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetsirShape {
    Constant = 0,
    MonotoneDecreasing = 1,
    Unimodal = 2,
    Bimodal = 3,
    /// Either monotone decreasing or bimodal.
    Undetermined = 4,
    Multimodal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetsirStability {
    Stable = 0,
    Unstable = 1,
    Marginal = 2,
}

/// Integrator settings; obtain defaults from [`netsir_integrator_defaults`].
/// A non-positive `t_max` selects `500 / gamma`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NetsirIntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub sample_dt: f64,
    pub t_max: f64,
    pub y_extinction_tol: f64,
}

/// Model parameters: interaction structure and recovery rate.
pub struct NetsirParams(EpidemicParams);

/// Sampled trajectory with its parameters.
pub struct NetsirTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SirError) -> NetsirStatus {
    match e {
        SirError::DimensionMismatch { .. } | SirError::NodeOutOfRange { .. } => {
            NetsirStatus::DimensionMismatch
        }
        SirError::OutOfSimplex { .. }
        | SirError::InvalidInitialState(_)
        | SirError::NonpositiveSusceptibles(_) => NetsirStatus::InvalidState,
        SirError::NotRankOne | SirError::NotSpecialForm => NetsirStatus::NotRankOne,
        SirError::NoConvergence { .. } => NetsirStatus::NoConvergence,
        SirError::StepSizeUnderflow { .. } | SirError::NoSignChange { .. } => {
            NetsirStatus::NumericalFailure
        }
        _ => NetsirStatus::InvalidArgument,
    }
}

enum Fail {
    Null,
    Sir(SirError),
}

impl From<SirError> for Fail {
    fn from(e: SirError) -> Self {
        Fail::Sir(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NetsirStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NetsirStatus::Ok,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            NetsirStatus::NullPointer
        }
        Ok(Err(Fail::Sir(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            NetsirStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(p: *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    p.write(v);
    Ok(())
}

unsafe fn params<'a>(p: *const NetsirParams) -> Result<&'a EpidemicParams, Fail> {
    p.as_ref().map(|p| &p.0).ok_or(Fail::Null)
}

unsafe fn traj<'a>(t: *const NetsirTrajectory) -> Result<&'a Trajectory, Fail> {
    t.as_ref().map(|t| &t.0).ok_or(Fail::Null)
}

unsafe fn state(p: &EpidemicParams, x: *const f64, y: *const f64) -> Result<State, Fail> {
    let n = p.n();
    Ok(State::new(input(x, n)?.to_vec(), input(y, n)?.to_vec())?)
}

fn shape_code(s: &CurveShape) -> NetsirShape {
    match s.tag() {
        ShapeTag::Constant => NetsirShape::Constant,
        ShapeTag::MonotoneDecreasing => NetsirShape::MonotoneDecreasing,
        ShapeTag::Unimodal => NetsirShape::Unimodal,
        ShapeTag::Bimodal => NetsirShape::Bimodal,
        ShapeTag::Undetermined => NetsirShape::Undetermined,
        ShapeTag::Multimodal => NetsirShape::Multimodal,
    }
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn netsir_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `a` and `b` point to `n` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_params_new_rank_one(
    n: usize,
    a: *const f64,
    b: *const f64,
    gamma: f64,
    out: *mut *mut NetsirParams,
) -> NetsirStatus {
    guard(|| {
        let p = EpidemicParams::rank_one(input(a, n)?.to_vec(), input(b, n)?.to_vec(), gamma)?;
        put(out, Box::into_raw(Box::new(NetsirParams(p))))
    })
}

/// # Safety
/// `matrix` points to `n * n` doubles in row-major order; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_params_new_dense(
    n: usize,
    matrix: *const f64,
    gamma: f64,
    out: *mut *mut NetsirParams,
) -> NetsirStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or(SirError::InvalidParams("size overflow".into()))?;
        let m = Matrix::from_row_major(n, input(matrix, len)?.to_vec())?;
        let p = EpidemicParams::dense(m, gamma)?;
        put(out, Box::into_raw(Box::new(NetsirParams(p))))
    })
}

/// # Safety
/// `p` is null or a handle from a `netsir_params_new_*` call, freed once.
#[no_mangle]
pub unsafe extern "C" fn netsir_params_free(p: *mut NetsirParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `p` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn netsir_params_n(p: *const NetsirParams) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

/// Whether the interaction matrix is rank one (declared or detected).
///
/// # Safety
/// `p` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn netsir_params_is_rank_one(p: *const NetsirParams) -> bool {
    p.as_ref().is_some_and(|p| p.0.is_rank_one())
}

/// # Safety
/// `x`, `y`, `dx`, `dy` point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn netsir_vector_field(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    dx: *mut f64,
    dy: *mut f64,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        let d = vector_field(p, &state(p, x, y)?);
        output(dx, p.n())?.copy_from_slice(&d.dx);
        output(dy, p.n())?.copy_from_slice(&d.dy);
        Ok(())
    })
}

/// Conserved quantities `h_i` of a rank-1 network.
///
/// # Safety
/// `x`, `y`, `h` point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn netsir_invariants(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    h: *mut f64,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        let inv = invariants_h(p, &state(p, x, y)?)?;
        output(h, p.n())?.copy_from_slice(&inv.h);
        Ok(())
    })
}

/// Limit value of `xbar = sum_j b_j x_j` for a rank-1 network.
///
/// # Safety
/// `x`, `y` point to `n` doubles; `phi` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_solve_phi(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    phi: *mut f64,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        put(phi, solve_phi(p, &state(p, x, y)?)?)
    })
}

/// Limit susceptible fractions, `xtilde` at the limit and its stability.
///
/// # Safety
/// `x`, `y`, `x_star` point to `n` doubles; the scalar outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_limit_state(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    x_star: *mut f64,
    xtilde_star: *mut f64,
    stability: *mut NetsirStability,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        let rep = limit_state(p, &state(p, x, y)?)?;
        output(x_star, p.n())?.copy_from_slice(&rep.x_star);
        put(xtilde_star, rep.xtilde_star)?;
        put(
            stability,
            match rep.tag {
                Stability::Stable => NetsirStability::Stable,
                Stability::Unstable => NetsirStability::Unstable,
                Stability::Marginal => NetsirStability::Marginal,
            },
        )
    })
}

/// Predicted shape of node `i`'s infection curve from the initial state.
///
/// # Safety
/// `x`, `y` point to `n` doubles; `shape` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_classify_node(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    i: usize,
    shape: *mut NetsirShape,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        let s = classify_node_curve(p, &state(p, x, y)?, i)?;
        put(shape, shape_code(&s))
    })
}

#[no_mangle]
pub extern "C" fn netsir_integrator_defaults() -> NetsirIntegratorConfig {
    let d = IntegratorConfig::default();
    NetsirIntegratorConfig {
        abs_tol: d.abs_tol,
        rel_tol: d.rel_tol,
        max_step: d.max_step,
        sample_dt: d.sample_dt,
        t_max: d.t_max.unwrap_or(0.0),
        y_extinction_tol: d.y_extinction_tol,
    }
}

/// Integrates to `horizon`. `config` may be null for defaults.
///
/// # Safety
/// `x`, `y` point to `n` doubles; `config` is null or readable; `out` is
/// writable. Free the result with [`netsir_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn netsir_integrate(
    p: *const NetsirParams,
    x: *const f64,
    y: *const f64,
    horizon: f64,
    config: *const NetsirIntegratorConfig,
    out: *mut *mut NetsirTrajectory,
) -> NetsirStatus {
    guard(|| {
        let p = params(p)?;
        let cfg = match config.as_ref() {
            None => IntegratorConfig::default(),
            Some(c) => IntegratorConfig {
                abs_tol: c.abs_tol,
                rel_tol: c.rel_tol,
                max_step: c.max_step,
                sample_dt: c.sample_dt,
                t_max: (c.t_max > 0.0).then_some(c.t_max),
                y_extinction_tol: c.y_extinction_tol,
            },
        };
        let t = integrate(p, &state(p, x, y)?, horizon, &cfg)?;
        put(out, Box::into_raw(Box::new(NetsirTrajectory(t))))
    })
}

/// # Safety
/// `t` is null or a handle from [`netsir_integrate`], freed once.
#[no_mangle]
pub unsafe extern "C" fn netsir_trajectory_free(t: *mut NetsirTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn netsir_trajectory_len(t: *const NetsirTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Copies the sample times into `times`, which holds `len` doubles.
///
/// # Safety
/// `times` points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn netsir_trajectory_times(
    t: *const NetsirTrajectory,
    times: *mut f64,
    len: usize,
) -> NetsirStatus {
    guard(|| {
        let t = traj(t)?;
        if len != t.len() {
            return Err(SirError::DimensionMismatch {
                expected: t.len(),
                got: len,
            }
            .into());
        }
        output(times, len)?.copy_from_slice(&t.times);
        Ok(())
    })
}

/// State at sample `k`.
///
/// # Safety
/// `x`, `y` point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn netsir_trajectory_state(
    t: *const NetsirTrajectory,
    k: usize,
    x: *mut f64,
    y: *mut f64,
) -> NetsirStatus {
    guard(|| {
        let t = traj(t)?;
        let s = t.states.get(k).ok_or(SirError::NodeOutOfRange {
            index: k,
            n: t.len(),
        })?;
        output(x, t.n())?.copy_from_slice(s.x());
        output(y, t.n())?.copy_from_slice(s.y());
        Ok(())
    })
}

/// Observed shape of node `i`'s infection curve along the trajectory.
///
/// # Safety
/// `t` is a live handle; `shape` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_observed_shape(
    t: *const NetsirTrajectory,
    i: usize,
    shape: *mut NetsirShape,
) -> NetsirStatus {
    guard(|| {
        let t = traj(t)?;
        if i >= t.n() {
            return Err(SirError::NodeOutOfRange { index: i, n: t.n() }.into());
        }
        put(shape, shape_code(&observed_shape(t, i)?))
    })
}

/// Dominant eigenvalue and left eigenvector (unit sum) of a nonnegative
/// row-major `n * n` matrix.
///
/// # Safety
/// `matrix` points to `n * n` doubles, `v` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn netsir_dominant_eig(
    n: usize,
    matrix: *const f64,
    lambda: *mut f64,
    v: *mut f64,
) -> NetsirStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or(SirError::InvalidParams("size overflow".into()))?;
        let m = Matrix::from_row_major(n, input(matrix, len)?.to_vec())?;
        let pair = dominant_eig(&m)?;
        put(lambda, pair.lambda_max)?;
        output(v, n)?.copy_from_slice(&pair.v_max);
        Ok(())
    })
}

/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_scalar_final_size(
    beta: f64,
    gamma: f64,
    x0: f64,
    y0: f64,
    out: *mut f64,
) -> NetsirStatus {
    guard(|| put(out, scalar_final_size(beta, gamma, x0, y0)?))
}

/// Threshold on `y_i(0)` below which bimodality is guaranteed.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn netsir_epsilon_bar(
    beta: f64,
    gamma: f64,
    b_i: f64,
    out: *mut f64,
) -> NetsirStatus {
    guard(|| put(out, epsilon_bar(beta, gamma, b_i)?))
}
