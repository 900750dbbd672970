//! Observed shapes of infection curves, read off sampled trajectories.
//!
//! Extrema are located from sign changes of the analytic derivative
//! `dy_i/dt` stored with every sample, never from comparing `y_i` values.

use crate::error::{Result, SirError};
use crate::integrate::{refine_crossing, Trajectory, REFINE_TIME_TOL};
use crate::model::{aggregates_with, vector_field, State};
use crate::rank1::{CurveShape, ShapeTag};

/// Default dead band on `dy_i/dt`, relative to its maximum magnitude.
pub const DERIV_BAND_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    LocalMin,
    LocalMax,
    /// Curve starts decreasing: `t = 0` is a boundary maximum.
    BoundaryMax,
    /// Curve starts increasing: `t = 0` is a boundary minimum.
    BoundaryMin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub time: f64,
    pub kind: ExtremumKind,
    /// `y_i` at `time`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaList {
    pub node: usize,
    pub events: Vec<Extremum>,
}

impl ExtremaList {
    pub fn interior(&self) -> impl Iterator<Item = &Extremum> {
        self.events
            .iter()
            .filter(|e| matches!(e.kind, ExtremumKind::LocalMin | ExtremumKind::LocalMax))
    }

    pub fn minima(&self) -> impl Iterator<Item = &Extremum> {
        self.events.iter().filter(|e| e.kind == ExtremumKind::LocalMin)
    }

    pub fn maxima(&self) -> impl Iterator<Item = &Extremum> {
        self.events.iter().filter(|e| e.kind == ExtremumKind::LocalMax)
    }
}

/// Scans the sign of `dy_i/dt` across samples and refines every sign change.
///
/// Samples with `|dy_i/dt| <= deriv_tol` carry no sign; the default band is
/// [`DERIV_BAND_REL`] times the largest derivative magnitude. Adjacent events
/// closer than `10 * REFINE_TIME_TOL` are dropped as round-off pairs.
pub fn detect_extrema(traj: &Trajectory, i: usize, deriv_tol: Option<f64>) -> Result<ExtremaList> {
    if i >= traj.n() {
        return Err(SirError::NodeOutOfRange {
            index: i,
            n: traj.n(),
        });
    }
    let rates: Vec<f64> = traj.derivs.iter().map(|d| d.dy[i]).collect();
    let params = &traj.params;
    let events = scan(
        traj,
        &rates,
        deriv_tol,
        |s| vector_field(params, s).dy[i],
        |s| s.y()[i],
    )?;
    Ok(ExtremaList { node: i, events })
}

/// Extrema of `ybar = sum_j b_j y_j` for a rank-one trajectory.
pub fn aggregate_extrema(traj: &Trajectory, deriv_tol: Option<f64>) -> Result<Vec<Extremum>> {
    let f = traj.params.factors()?;
    let weighted = |v: &[f64]| f.b.iter().zip(v).map(|(b, v)| b * v).sum::<f64>();
    let rates: Vec<f64> = traj.derivs.iter().map(|d| weighted(&d.dy)).collect();
    let params = &traj.params;
    scan(
        traj,
        &rates,
        deriv_tol,
        |s| weighted(&vector_field(params, s).dy),
        |s| weighted(s.y()),
    )
}

fn scan<R, V>(
    traj: &Trajectory,
    rates: &[f64],
    deriv_tol: Option<f64>,
    rate: R,
    value: V,
) -> Result<Vec<Extremum>>
where
    R: Fn(&State) -> f64,
    V: Fn(&State) -> f64,
{
    let mut events = Vec::new();
    let peak_rate = rates.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if peak_rate == 0.0 {
        return Ok(events);
    }
    let tol = deriv_tol.unwrap_or(DERIV_BAND_REL * peak_rate);
    let signed: Vec<(usize, f64)> = rates
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() > tol)
        .map(|(k, r)| (k, r.signum()))
        .collect();
    let Some(&(_, first)) = signed.first() else {
        return Ok(events);
    };
    events.push(Extremum {
        time: 0.0,
        kind: if first < 0.0 {
            ExtremumKind::BoundaryMax
        } else {
            ExtremumKind::BoundaryMin
        },
        value: value(&traj.states[0]),
    });
    let mut interior: Vec<Extremum> = Vec::new();
    for w in signed.windows(2) {
        let ((k0, s0), (k1, s1)) = (w[0], w[1]);
        if s0 == s1 {
            continue;
        }
        let time = refine_crossing(traj, |_, s| rate(s), (k0, k1))?;
        let kind = if s0 < 0.0 {
            ExtremumKind::LocalMin
        } else {
            ExtremumKind::LocalMax
        };
        if let Some(prev) = interior.last() {
            if time - prev.time < 10.0 * REFINE_TIME_TOL {
                interior.pop();
                continue;
            }
        }
        let value = value(&traj.state_at(time)?);
        interior.push(Extremum { time, kind, value });
    }
    events.extend(interior);
    Ok(events)
}

fn shape_from_extrema(list: &ExtremaList) -> CurveShape {
    use ExtremumKind::*;
    let Some(start) = list.events.first() else {
        return CurveShape::Constant;
    };
    let rest: Vec<&Extremum> = list.events[1..].iter().collect();
    match (start.kind, rest.as_slice()) {
        (BoundaryMax, []) => CurveShape::MonotoneDecreasing,
        (BoundaryMin, []) => CurveShape::Unimodal { peak_time: None },
        (BoundaryMin, [p]) if p.kind == LocalMax => CurveShape::Unimodal {
            peak_time: Some(p.time),
        },
        (BoundaryMax, [m]) if m.kind == LocalMin => CurveShape::Bimodal {
            min_time: Some(m.time),
            peak_time: None,
        },
        (BoundaryMax, [m, p]) if m.kind == LocalMin && p.kind == LocalMax => CurveShape::Bimodal {
            min_time: Some(m.time),
            peak_time: Some(p.time),
        },
        _ => CurveShape::Multimodal {
            min_times: list.minima().map(|e| e.time).collect(),
            peak_times: list.maxima().map(|e| e.time).collect(),
        },
    }
}

/// Shape of `y_i` along the trajectory. More monotonicity changes than a
/// bimodal curve has are reported as [`CurveShape::Multimodal`].
pub fn observed_shape(traj: &Trajectory, i: usize) -> Result<CurveShape> {
    Ok(shape_from_extrema(&detect_extrema(traj, i, None)?))
}

/// First time `xtilde(t) <= gamma`: the peak time of `ybar`. Zero when
/// `xtilde(0) <= gamma`; `None` when the crossing lies beyond the trajectory.
pub fn aggregate_peak_time(traj: &Trajectory) -> Result<Option<f64>> {
    let f = traj.params.factors()?;
    let gamma = traj.params.gamma();
    let excess = |_: f64, s: &State| aggregates_with(f, s.x(), s.y()).xtilde - gamma;
    if excess(0.0, &traj.states[0]) <= 0.0 {
        return Ok(Some(0.0));
    }
    match traj.states.iter().position(|s| excess(0.0, s) <= 0.0) {
        Some(k) => refine_crossing(traj, excess, (k - 1, k)).map(Some),
        None => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail {
        predicted: CurveShape,
        observed: CurveShape,
        reason: String,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Compares a static prediction with an observed shape, ignoring event times.
pub fn verify_prediction(predicted: &CurveShape, observed: &CurveShape) -> Verdict {
    let (p, o) = (predicted.tag(), observed.tag());
    let ok = match predicted {
        CurveShape::Undetermined { admissible } => admissible.contains(&o),
        _ => p == o && o != ShapeTag::Undetermined,
    };
    if ok {
        return Verdict::Pass;
    }
    let reason = match predicted {
        CurveShape::Undetermined { admissible } => {
            let names: Vec<_> = admissible.iter().map(|t| t.as_str()).collect();
            format!("observed {o} not in admissible set {{{}}}", names.join(","))
        }
        _ => format!("predicted {p}, observed {o}"),
    };
    Verdict::Fail {
        predicted: predicted.clone(),
        observed: observed.clone(),
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig};
    use crate::model::{EpidemicParams, Matrix};

    fn example1_traj() -> Trajectory {
        let p = EpidemicParams::rank_one(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let s = State::new(vec![0.85, 1.0], vec![0.15, 0.0]).unwrap();
        integrate(&p, &s, 40.0, &IntegratorConfig::default()).unwrap()
    }

    #[test]
    fn example1_node1_is_bimodal() {
        let traj = example1_traj();
        let ex = detect_extrema(&traj, 0, None).unwrap();
        let kinds: Vec<_> = ex.events.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                ExtremumKind::BoundaryMax,
                ExtremumKind::LocalMin,
                ExtremumKind::LocalMax
            ]
        );
        assert!(ex.events[1].time < ex.events[2].time);
        match observed_shape(&traj, 0).unwrap() {
            CurveShape::Bimodal {
                min_time: Some(m),
                peak_time: Some(p),
            } => assert!(0.0 < m && m < p),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(observed_shape(&traj, 1).unwrap().tag(), ShapeTag::Unimodal);
    }

    #[test]
    fn constant_trajectory_has_no_events() {
        let p = EpidemicParams::rank_one(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let s = State::disease_free(vec![0.5, 0.5]).unwrap();
        let traj = integrate(&p, &s, 5.0, &IntegratorConfig::default()).unwrap();
        assert!(detect_extrema(&traj, 0, None).unwrap().events.is_empty());
        assert_eq!(observed_shape(&traj, 0).unwrap(), CurveShape::Constant);
    }

    #[test]
    fn scalar_subcritical_is_decreasing() {
        let p = EpidemicParams::rank_one(vec![1.0], vec![1.0], 1.0).unwrap();
        let s = State::new(vec![0.8], vec![0.1]).unwrap();
        let traj = integrate(&p, &s, 30.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(observed_shape(&traj, 0).unwrap(), CurveShape::MonotoneDecreasing);
    }

    #[test]
    fn example1_aggregate_peak() {
        let traj = example1_traj();
        let t_hat = aggregate_peak_time(&traj).unwrap().unwrap();
        let s = traj.state_at(t_hat).unwrap();
        let ybar = s.y()[0] + s.y()[1];
        assert!((ybar - (1.0 - 1.85f64.ln())).abs() < 1e-6);
        assert!((s.x()[1] - 1.0 / 1.85).abs() < 1e-6);
    }

    #[test]
    fn subcritical_aggregate_peak_at_zero() {
        let p = EpidemicParams::rank_one(vec![1.0, 1.0], vec![0.25, 0.25], 1.0).unwrap();
        let s = State::new(vec![0.85, 1.0], vec![0.15, 0.0]).unwrap();
        let traj = integrate(&p, &s, 5.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(aggregate_peak_time(&traj).unwrap(), Some(0.0));
    }

    #[test]
    fn aggregate_peak_requires_rank_one() {
        let m = Matrix::from_rows(&[vec![1.0, 0.2], vec![0.0, 1.0]]).unwrap();
        let p = EpidemicParams::dense(m, 1.0).unwrap();
        let s = State::new(vec![0.9, 1.0], vec![0.1, 0.0]).unwrap();
        let traj = integrate(&p, &s, 1.0, &IntegratorConfig::default()).unwrap();
        assert!(aggregate_peak_time(&traj).is_err());
    }

    #[test]
    fn verdicts() {
        let uni = CurveShape::Unimodal { peak_time: None };
        let uni_t = CurveShape::Unimodal {
            peak_time: Some(3.0),
        };
        let bi = CurveShape::Bimodal {
            min_time: Some(1.0),
            peak_time: Some(4.0),
        };
        assert!(verify_prediction(&uni, &uni_t).is_pass());
        assert!(verify_prediction(&CurveShape::decreasing_or_bimodal(), &bi).is_pass());
        assert!(verify_prediction(
            &CurveShape::decreasing_or_bimodal(),
            &CurveShape::MonotoneDecreasing
        )
        .is_pass());
        assert!(!verify_prediction(&CurveShape::MonotoneDecreasing, &bi).is_pass());
        assert!(!verify_prediction(&CurveShape::decreasing_or_bimodal(), &uni_t).is_pass());
    }
}
