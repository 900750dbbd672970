//! Time integration of the network SIR system.
//!
//! Trajectories are produced by an embedded Dormand-Prince 5(4) pair with PI
//! step-size control. Steps are clipped so that every point of the output grid
//! is hit exactly; samples therefore carry integrator-accurate states and
//! derivatives evaluated analytically from the vector field. Event times are
//! refined by bisection, re-integrating from the left bracket sample.

use crate::error::{Result, SirError};
use crate::model::{vector_field, vector_field_into, EpidemicParams, State, StateDerivative};
use serde::{Deserialize, Serialize};

/// Time resolution of [`refine_crossing`].
pub const REFINE_TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    /// Spacing of the output grid.
    pub sample_dt: f64,
    /// Hard horizon for [`integrate_until_extinction`]; `None` means `500 / gamma`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    pub y_extinction_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_step: 1.0,
            sample_dt: 0.05,
            t_max: None,
            y_extinction_tol: 1e-10,
        }
    }
}

impl IntegratorConfig {
    pub fn t_max_for(&self, gamma: f64) -> f64 {
        self.t_max.unwrap_or(500.0 / gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("max_step", self.max_step),
            ("sample_dt", self.sample_dt),
            ("t_max", self.t_max.unwrap_or(1.0)),
            ("y_extinction_tol", self.y_extinction_tol),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(SirError::InvalidParams(format!(
                    "integrator {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Why an integration run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The requested horizon was reached.
    Horizon,
    /// `max_i y_i` fell below the extinction tolerance.
    Extinction,
    /// `t_max` was reached before extinction.
    HorizonExceeded,
}

/// Sampled solution of the ODE system.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub derivs: Vec<StateDerivative>,
    pub params: EpidemicParams,
    pub config: IntegratorConfig,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn last_state(&self) -> &State {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    /// Series `y_i(t)` over the samples.
    pub fn y_series(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.y[i]).collect()
    }

    /// State at an arbitrary time in `[0, end_time]`, re-integrated from the
    /// closest sample at or before `t`.
    pub fn state_at(&self, t: f64) -> Result<State> {
        let k = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            k => k - 1,
        };
        if self.times[k] == t {
            return Ok(self.states[k].clone());
        }
        let mut stepper = Stepper::new(&self.params, &self.config);
        let mut z = pack(&self.states[k]);
        stepper.advance(&mut z, self.times[k], t)?;
        unpack(z, self.n())
    }
}

// Dormand-Prince 5(4) tableau. The field is autonomous, so the nodes c_i are unused.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;
const PI_ALPHA: f64 = 0.2 - 0.75 * PI_BETA;

fn pack(s: &State) -> Vec<f64> {
    let mut z = Vec::with_capacity(2 * s.n());
    z.extend_from_slice(&s.x);
    z.extend_from_slice(&s.y);
    z
}

fn unpack(mut z: Vec<f64>, n: usize) -> Result<State> {
    let y = z.split_off(n);
    State::new(z, y)
}

/// Adaptive Dormand-Prince stepper over the packed state `[x; y]`.
struct Stepper<'a> {
    p: &'a EpidemicParams,
    n: usize,
    atol: f64,
    rtol: f64,
    max_step: f64,
    h: Option<f64>,
    err_old: f64,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    z_new: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a EpidemicParams, cfg: &IntegratorConfig) -> Self {
        let m = 2 * p.n();
        Self {
            p,
            n: p.n(),
            atol: cfg.abs_tol,
            rtol: cfg.rel_tol,
            max_step: cfg.max_step,
            h: None,
            err_old: 1e-4,
            k: std::array::from_fn(|_| vec![0.0; m]),
            tmp: vec![0.0; m],
            z_new: vec![0.0; m],
        }
    }

    fn rhs(p: &EpidemicParams, n: usize, z: &[f64], out: &mut [f64]) {
        let (x, y) = z.split_at(n);
        let (dx, dy) = out.split_at_mut(n);
        vector_field_into(p, x, y, dx, dy);
    }

    fn initial_step(&mut self, z: &[f64]) -> f64 {
        Self::rhs(self.p, self.n, z, &mut self.k[0]);
        let scale = |v: f64| self.atol + self.rtol * v.abs();
        let d0 = rms(z.iter().map(|&v| v / scale(v)));
        let d1 = rms(z.iter().zip(&self.k[0]).map(|(&v, &f)| f / scale(v)));
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(self.max_step)
    }

    /// Integrates `z` from `t0` to exactly `t1`.
    fn advance(&mut self, z: &mut Vec<f64>, t0: f64, t1: f64) -> Result<()> {
        let mut t = t0;
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(z),
        };
        while t < t1 {
            let remaining = t1 - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(SirError::StepSizeUnderflow { t });
            }
            let err = self.try_step(z, step);
            if err <= 1.0 {
                let fac = (err.max(1e-10).powf(-PI_ALPHA) * self.err_old.powf(PI_BETA) * SAFETY)
                    .clamp(FAC_MIN, FAC_MAX);
                self.err_old = err.max(1e-4);
                std::mem::swap(z, &mut self.z_new);
                clamp_packed(z, self.n)?;
                t = if last { t1 } else { t + step };
                // clipped final steps must not shrink the proposal for the next interval
                h = if last { h.max(step * fac) } else { step * fac };
                h = h.min(self.max_step);
            } else {
                let fac = (err.powf(-PI_ALPHA) * SAFETY).max(FAC_MIN);
                h = step * fac;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(SirError::StepSizeUnderflow { t });
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }

    /// One trial step of size `h`; writes the 5th-order solution into
    /// `z_new` and returns the scaled error norm.
    fn try_step(&mut self, z: &[f64], h: f64) -> f64 {
        let (p, n) = (self.p, self.n);
        let m = z.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        Self::rhs(p, n, z, k1);
        for i in 0..m {
            tmp[i] = z[i] + h * A21 * k1[i];
        }
        Self::rhs(p, n, tmp, k2);
        for i in 0..m {
            tmp[i] = z[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        Self::rhs(p, n, tmp, k3);
        for i in 0..m {
            tmp[i] = z[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        Self::rhs(p, n, tmp, k4);
        for i in 0..m {
            tmp[i] = z[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        Self::rhs(p, n, tmp, k5);
        for i in 0..m {
            tmp[i] = z[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        Self::rhs(p, n, tmp, k6);
        let z_new = &mut self.z_new;
        for i in 0..m {
            z_new[i] =
                z[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        Self::rhs(p, n, z_new, k7);
        let mut acc = 0.0;
        for i in 0..m {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * z[i].abs().max(z_new[i].abs());
            acc += (e / sc).powi(2);
        }
        let err = (acc / m as f64).sqrt();
        if err.is_finite() {
            err
        } else {
            f64::INFINITY
        }
    }
}

fn rms(it: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = it.fold((0.0, 0usize), |(s, c), v| (s + v * v, c + 1));
    (s / c.max(1) as f64).sqrt()
}

fn clamp_packed(z: &mut [f64], n: usize) -> Result<()> {
    let mut s = State {
        x: z[..n].to_vec(),
        y: z[n..].to_vec(),
    };
    s.clamp_checked()?;
    z[..n].copy_from_slice(&s.x);
    z[n..].copy_from_slice(&s.y);
    Ok(())
}

fn check_dims(p: &EpidemicParams, s0: &State) -> Result<()> {
    if s0.n() != p.n() {
        return Err(SirError::DimensionMismatch {
            expected: p.n(),
            got: s0.n(),
        });
    }
    Ok(())
}

/// Shared sampling loop. Advances sample by sample until `t_end` or until
/// `stop_early` fires on a freshly stored state.
fn run(
    p: &EpidemicParams,
    s0: &State,
    t_end: f64,
    cfg: &IntegratorConfig,
    stop_early: impl Fn(&State) -> bool,
) -> Result<(Trajectory, bool)> {
    cfg.validate()?;
    check_dims(p, s0)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![s0.clone()],
        derivs: vec![vector_field(p, s0)],
        params: p.clone(),
        config: cfg.clone(),
        stop: StopReason::Horizon,
    };
    if stop_early(s0) {
        return Ok((traj, true));
    }
    let mut stepper = Stepper::new(p, cfg);
    let mut z = pack(s0);
    let mut k: u64 = 0;
    let mut t = 0.0;
    while t < t_end {
        k += 1;
        let next = (k as f64 * cfg.sample_dt).min(t_end);
        stepper.advance(&mut z, t, next)?;
        t = next;
        let s = State {
            x: z[..p.n()].to_vec(),
            y: z[p.n()..].to_vec(),
        };
        traj.derivs.push(vector_field(p, &s));
        traj.times.push(t);
        let stop = stop_early(&s);
        traj.states.push(s);
        if stop {
            return Ok((traj, true));
        }
    }
    Ok((traj, false))
}

/// Integrates over `[0, horizon]`, sampling every `cfg.sample_dt`.
pub fn integrate(
    p: &EpidemicParams,
    s0: &State,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SirError::InvalidParams(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let (traj, _) = run(p, s0, horizon, cfg, |_| false)?;
    Ok(traj)
}

/// Integrates until `max_i y_i < y_extinction_tol` or `t_max`, whichever
/// comes first. The trajectory's [`StopReason`] tells which.
pub fn integrate_until_extinction(
    p: &EpidemicParams,
    s0: &State,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory, State)> {
    let tol = cfg.y_extinction_tol;
    let extinct = |s: &State| s.y.iter().all(|&v| v < tol);
    let (mut traj, fired) = run(p, s0, cfg.t_max_for(p.gamma()), cfg, extinct)?;
    traj.stop = if fired {
        StopReason::Extinction
    } else {
        StopReason::HorizonExceeded
    };
    let last = traj.last_state().clone();
    Ok((traj, last))
}

/// Fixed-step classical RK4, for cross-checking the adaptive integrator.
pub fn integrate_rk4(p: &EpidemicParams, s0: &State, horizon: f64, dt: f64) -> Result<Trajectory> {
    check_dims(p, s0)?;
    let n = p.n();
    let steps = (horizon / dt).ceil().max(1.0) as usize;
    let h = horizon / steps as f64;
    let mut z = pack(s0);
    let m = z.len();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
        vec![0.0; m],
    );
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![s0.clone()],
        derivs: vec![vector_field(p, s0)],
        params: p.clone(),
        config: IntegratorConfig {
            sample_dt: h,
            max_step: h,
            ..IntegratorConfig::default()
        },
        stop: StopReason::Horizon,
    };
    for step in 1..=steps {
        Stepper::rhs(p, n, &z, &mut k1);
        for i in 0..m {
            tmp[i] = z[i] + 0.5 * h * k1[i];
        }
        Stepper::rhs(p, n, &tmp, &mut k2);
        for i in 0..m {
            tmp[i] = z[i] + 0.5 * h * k2[i];
        }
        Stepper::rhs(p, n, &tmp, &mut k3);
        for i in 0..m {
            tmp[i] = z[i] + h * k3[i];
        }
        Stepper::rhs(p, n, &tmp, &mut k4);
        for i in 0..m {
            z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        clamp_packed(&mut z, n)?;
        let s = State {
            x: z[..n].to_vec(),
            y: z[n..].to_vec(),
        };
        traj.derivs.push(vector_field(p, &s));
        traj.states.push(s);
        traj.times.push(step as f64 * h);
    }
    Ok(traj)
}

/// Locates a zero of `f(t, state)` between two samples of `traj` by bisection,
/// re-integrating from the left sample, to [`REFINE_TIME_TOL`].
pub fn refine_crossing<F>(traj: &Trajectory, f: F, bracket: (usize, usize)) -> Result<f64>
where
    F: Fn(f64, &State) -> f64,
{
    let (i0, i1) = bracket;
    let (t0, t1) = (traj.times[i0], traj.times[i1]);
    let f0 = f(t0, &traj.states[i0]);
    let f1 = f(t1, &traj.states[i1]);
    if f0 == 0.0 {
        return Ok(t0);
    }
    if f1 == 0.0 {
        return Ok(t1);
    }
    if f0.signum() == f1.signum() || f0.is_nan() || f1.is_nan() {
        return Err(SirError::NoSignChange { t0, t1 });
    }
    let sign0 = f0.signum();
    let (mut lo, mut hi) = (t0, t1);
    let z0 = pack(&traj.states[i0]);
    while hi - lo > REFINE_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        let mut stepper = Stepper::new(&traj.params, &traj.config);
        let mut z = z0.clone();
        stepper.advance(&mut z, t0, mid)?;
        let s = unpack(z, traj.n())?;
        let fm = f(mid, &s);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sign0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
