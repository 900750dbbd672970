//! Analysis specific to rank-1 interaction `A = a b^T`.
//!
//! Covers the `n` invariants of motion, the final-size fixed point and the
//! limit map, stability of equilibria, static classification of node infection
//! curves from initial data, and the sufficient conditions for bimodality in
//! the uniform-susceptibility case `A = beta 1 b^T`.

use crate::error::{Result, SirError};
use crate::integrate::{refine_crossing, Trajectory};
use crate::model::{aggregates_with, EpidemicParams, RankOneFactors, State};

/// Width of the band around zero inside which sign tests are treated as ties.
pub const CLASSIFY_BAND: f64 = 1e-10;

/// Grid step of the scan that brackets the smallest root of the bimodality
/// margin function.
const EPS_SCAN_STEP: f64 = 1e-3;

/// Tolerance on `x + y = 1` when checking for an initially recovered-free state.
const NO_RECOVERED_TOL: f64 = 1e-12;

/// Values of the invariants `h_i = x_i exp(-a_i (xbar + ybar) / gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVector {
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// `xtilde* = gamma` within [`CLASSIFY_BAND`]; undecided by theory.
    Marginal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub x_star: Vec<f64>,
    pub xtilde_star: f64,
    pub tag: Stability,
}

/// Shape tag without event times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeTag {
    Constant,
    MonotoneDecreasing,
    Unimodal,
    Bimodal,
    Undetermined,
    Multimodal,
}

impl ShapeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ShapeTag::Constant => "Constant",
            ShapeTag::MonotoneDecreasing => "MonotoneDecreasing",
            ShapeTag::Unimodal => "Unimodal",
            ShapeTag::Bimodal => "Bimodal",
            ShapeTag::Undetermined => "Undetermined",
            ShapeTag::Multimodal => "Multimodal",
        }
    }
}

impl std::fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Shape of a node's infection curve `t -> y_i(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    Constant,
    MonotoneDecreasing,
    /// Increasing up to a single peak, decreasing afterwards.
    Unimodal { peak_time: Option<f64> },
    /// Decreasing to a local minimum, then up to a peak, then decreasing.
    Bimodal {
        min_time: Option<f64>,
        peak_time: Option<f64>,
    },
    /// Prediction only: initial data does not decide between the listed shapes.
    Undetermined { admissible: Vec<ShapeTag> },
    /// Observation only: more monotonicity changes than a rank-1 network allows.
    Multimodal {
        min_times: Vec<f64>,
        peak_times: Vec<f64>,
    },
}

impl CurveShape {
    pub fn tag(&self) -> ShapeTag {
        match self {
            CurveShape::Constant => ShapeTag::Constant,
            CurveShape::MonotoneDecreasing => ShapeTag::MonotoneDecreasing,
            CurveShape::Unimodal { .. } => ShapeTag::Unimodal,
            CurveShape::Bimodal { .. } => ShapeTag::Bimodal,
            CurveShape::Undetermined { .. } => ShapeTag::Undetermined,
            CurveShape::Multimodal { .. } => ShapeTag::Multimodal,
        }
    }

    pub fn decreasing_or_bimodal() -> Self {
        CurveShape::Undetermined {
            admissible: vec![ShapeTag::MonotoneDecreasing, ShapeTag::Bimodal],
        }
    }
}

impl std::fmt::Display for CurveShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let opt = |t: &Option<f64>| t.map_or("-".to_string(), |v| format!("{v:.6}"));
        match self {
            CurveShape::Unimodal { peak_time } => write!(f, "Unimodal(peak={})", opt(peak_time)),
            CurveShape::Bimodal {
                min_time,
                peak_time,
            } => write!(f, "Bimodal(min={}, peak={})", opt(min_time), opt(peak_time)),
            CurveShape::Undetermined { admissible } => {
                let names: Vec<_> = admissible.iter().map(|t| t.as_str()).collect();
                write!(f, "Undetermined{{{}}}", names.join(","))
            }
            CurveShape::Multimodal {
                min_times,
                peak_times,
            } => write!(
                f,
                "Multimodal(minima={}, peaks={})",
                min_times.len(),
                peak_times.len()
            ),
            other => f.write_str(other.tag().as_str()),
        }
    }
}

/// Outcome of the sufficient-condition check for bimodality at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodalityReport {
    /// `x(0) + y(0) = 1`
    pub no_recovered: bool,
    /// `beta x_i(0) ybar(0) - gamma y_i(0) < 0`
    pub initially_decreasing: bool,
    /// `beta xbar(0) > gamma`
    pub aggregate_supercritical: bool,
    /// `0 < y_i(0) < epsilon_bar_i`
    pub small_initial_infection: bool,
    /// Smallest root of the margin function; `None` when `beta <= gamma`.
    pub epsilon_bar: Option<f64>,
    pub guaranteed: bool,
    /// `Bimodal` whenever the conditions guarantee it.
    pub prediction: Option<CurveShape>,
}

/// Parameters in the form `A = beta 1 b^T` with `sum(b) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialForm {
    pub beta: f64,
    pub b: Vec<f64>,
}

fn check_node(p: &EpidemicParams, i: usize) -> Result<()> {
    if i >= p.n() {
        return Err(SirError::NodeOutOfRange { index: i, n: p.n() });
    }
    Ok(())
}

fn check_state(p: &EpidemicParams, s: &State) -> Result<()> {
    if s.n() != p.n() {
        return Err(SirError::DimensionMismatch {
            expected: p.n(),
            got: s.n(),
        });
    }
    Ok(())
}

pub fn invariants_h(p: &EpidemicParams, s: &State) -> Result<InvariantVector> {
    check_state(p, s)?;
    let f = p.factors()?;
    let agg = aggregates_with(f, s.x(), s.y());
    let g = p.gamma();
    let h = f
        .a
        .iter()
        .zip(s.x())
        .map(|(ai, xi)| xi * (-ai * (agg.xbar + agg.ybar) / g).exp())
        .collect();
    Ok(InvariantVector { h })
}

/// `g(xi) = sum_j b_j x_j exp(a_j (xi - xbar - ybar) / gamma) - xi`.
fn fixed_point_residual(f: &RankOneFactors, gamma: f64, s: &State, offset: f64, xi: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..s.n() {
        acc += f.b[j] * s.x()[j] * (f.a[j] * (xi - offset) / gamma).exp();
    }
    acc - xi
}

/// The unique root in `[0, xbar]` of the final-size fixed-point equation,
/// equal to the limit of `xbar(t)`.
pub fn solve_phi(p: &EpidemicParams, s: &State) -> Result<f64> {
    check_state(p, s)?;
    let f = p.factors()?;
    let gamma = p.gamma();
    let agg = aggregates_with(f, s.x(), s.y());
    if s.is_susceptible_free() {
        return Ok(0.0);
    }
    if s.is_infection_free() {
        if agg.xtilde >= gamma {
            return Err(SirError::DomainExcluded);
        }
        return Ok(agg.xbar);
    }
    let offset = agg.xbar + agg.ybar;
    let g = |xi: f64| fixed_point_residual(f, gamma, s, offset, xi);
    // g(0) > 0 and g(xbar) < 0; g is convex so the bracketed root is unique
    let (mut lo, mut hi) = (0.0, agg.xbar);
    if g(hi) >= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if g(lo).abs() <= g(hi).abs() { lo } else { hi })
}

pub fn classify_equilibrium(p: &EpidemicParams, x_star: &[f64]) -> Result<Stability> {
    if x_star.len() != p.n() {
        return Err(SirError::DimensionMismatch {
            expected: p.n(),
            got: x_star.len(),
        });
    }
    let f = p.factors()?;
    let xtilde: f64 = (0..p.n()).map(|j| f.a[j] * f.b[j] * x_star[j]).sum();
    Ok(stability_of(xtilde, p.gamma()))
}

fn stability_of(xtilde: f64, gamma: f64) -> Stability {
    if xtilde < gamma - CLASSIFY_BAND {
        Stability::Stable
    } else if xtilde > gamma + CLASSIFY_BAND {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Limit of `x(t)` from `s0`, with its weighted aggregate and stability.
pub fn limit_state(p: &EpidemicParams, s0: &State) -> Result<EquilibriumReport> {
    let phi = solve_phi(p, s0)?;
    let f = p.factors()?;
    let agg = aggregates_with(f, s0.x(), s0.y());
    let gamma = p.gamma();
    let x_star: Vec<f64> = (0..p.n())
        .map(|i| s0.x()[i] * (f.a[i] * (phi - agg.xbar - agg.ybar) / gamma).exp())
        .collect();
    let xtilde_star = (0..p.n()).map(|j| f.a[j] * f.b[j] * x_star[j]).sum();
    Ok(EquilibriumReport {
        x_star,
        xtilde_star,
        tag: stability_of(xtilde_star, gamma),
    })
}

/// Predicts the shape of `y_i` from the signs of `dy_i/dt(0)` and `w_i(0)`.
///
/// Never simulates: when the two signs admit both a monotone decrease and a
/// bimodal curve the result is [`CurveShape::Undetermined`].
pub fn classify_node_curve(p: &EpidemicParams, s0: &State, i: usize) -> Result<CurveShape> {
    check_state(p, s0)?;
    check_node(p, i)?;
    let f = p.factors()?;
    if s0.is_infection_free() {
        return Ok(CurveShape::Constant);
    }
    let (xi, yi) = (s0.x()[i], s0.y()[i]);
    if xi == 0.0 {
        // no inflow: y_i decays exponentially or stays at zero
        return Ok(if yi == 0.0 {
            CurveShape::Constant
        } else {
            CurveShape::MonotoneDecreasing
        });
    }
    let agg = aggregates_with(f, s0.x(), s0.y());
    let gamma = p.gamma();
    let d0 = f.a[i] * xi * agg.ybar - gamma * yi;
    let w0 = agg.xtilde - gamma - f.a[i] * agg.ybar;
    let w_pos = w0 > CLASSIFY_BAND;
    let shape = if d0 > CLASSIFY_BAND {
        CurveShape::Unimodal { peak_time: None }
    } else if d0 >= -CLASSIFY_BAND {
        if w_pos {
            CurveShape::Unimodal { peak_time: None }
        } else {
            CurveShape::MonotoneDecreasing
        }
    } else if w_pos {
        CurveShape::decreasing_or_bimodal()
    } else {
        CurveShape::MonotoneDecreasing
    };
    Ok(shape)
}

/// Rescales factors to `sum(b) = 1` and checks that `a` is constant.
pub fn special_form(p: &EpidemicParams) -> Result<SpecialForm> {
    let f = p.factors()?.normalized();
    let beta = f.a[0];
    if f.a.iter().any(|&v| (v - beta).abs() > 1e-12 * beta) {
        return Err(SirError::NotSpecialForm);
    }
    Ok(SpecialForm { beta, b: f.b })
}

/// Margin function whose smallest root in `[0, 1]` bounds the initial
/// infection for guaranteed bimodality.
pub fn bimodality_margin(beta: f64, gamma: f64, b_i: f64, eps: f64) -> f64 {
    let r = gamma / beta;
    let shrink = 1.0 - b_i * eps;
    (1.0 - eps) / shrink * (1.0 - r + r * (r / shrink).ln()) - eps
}

/// Smallest root in `[0, 1]` of [`bimodality_margin`].
pub fn epsilon_bar(beta: f64, gamma: f64, b_i: f64) -> Result<f64> {
    if !(beta > gamma) {
        return Err(SirError::SupercriticalityRequired { beta, gamma });
    }
    if !(b_i > 0.0 && b_i <= 1.0) {
        return Err(SirError::InvalidParams(format!(
            "b_i must lie in (0, 1], got {b_i}"
        )));
    }
    let g = |e: f64| {
        if e >= 1.0 {
            -1.0
        } else {
            bimodality_margin(beta, gamma, b_i, e)
        }
    };
    let steps = (1.0 / EPS_SCAN_STEP).round() as usize;
    let mut lo = 0.0;
    let mut g_lo = g(lo);
    let mut hi = 1.0;
    for k in 1..=steps {
        let e = k as f64 * EPS_SCAN_STEP;
        let ge = g(e);
        if ge <= 0.0 {
            hi = e;
            break;
        }
        lo = e;
        g_lo = ge;
    }
    debug_assert!(g_lo > 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn check_multimodality_conditions(
    p: &EpidemicParams,
    s0: &State,
    i: usize,
) -> Result<MultimodalityReport> {
    check_state(p, s0)?;
    check_node(p, i)?;
    let sf = special_form(p)?;
    let gamma = p.gamma();
    let xbar: f64 = sf.b.iter().zip(s0.x()).map(|(b, x)| b * x).sum();
    let ybar: f64 = sf.b.iter().zip(s0.y()).map(|(b, y)| b * y).sum();
    let no_recovered = s0
        .x()
        .iter()
        .zip(s0.y())
        .all(|(x, y)| (x + y - 1.0).abs() <= NO_RECOVERED_TOL);
    let initially_decreasing = sf.beta * s0.x()[i] * ybar - gamma * s0.y()[i] < 0.0;
    let aggregate_supercritical = sf.beta * xbar > gamma;
    let epsilon_bar = if sf.beta > gamma {
        Some(epsilon_bar(sf.beta, gamma, sf.b[i])?)
    } else {
        None
    };
    let yi = s0.y()[i];
    let small_initial_infection = epsilon_bar.is_some_and(|e| yi > 0.0 && yi < e);
    let guaranteed =
        no_recovered && initially_decreasing && aggregate_supercritical && small_initial_infection;
    Ok(MultimodalityReport {
        no_recovered,
        initially_decreasing,
        aggregate_supercritical,
        small_initial_infection,
        epsilon_bar,
        guaranteed,
        prediction: guaranteed.then_some(CurveShape::Bimodal {
            min_time: None,
            peak_time: None,
        }),
    })
}

/// Upper bound on any stationary peak value of `y_i` in the
/// uniform-susceptibility case, from the peak of `ybar`:
/// `(beta x_i(0) / gamma) (1 - r + r ln(r / xbar(0)))` with `r = gamma / beta`.
pub fn peak_upper_bound(p: &EpidemicParams, s0: &State, i: usize) -> Result<f64> {
    check_state(p, s0)?;
    check_node(p, i)?;
    let sf = special_form(p)?;
    let gamma = p.gamma();
    if !s0
        .x()
        .iter()
        .zip(s0.y())
        .all(|(x, y)| (x + y - 1.0).abs() <= NO_RECOVERED_TOL)
    {
        return Err(SirError::InvalidInitialState(
            "peak bound requires x(0) + y(0) = 1".into(),
        ));
    }
    let xbar: f64 = sf.b.iter().zip(s0.x()).map(|(b, x)| b * x).sum();
    if !(sf.beta * xbar > gamma) {
        return Err(SirError::SubcriticalAggregate {
            value: sf.beta * xbar,
            gamma,
        });
    }
    let r = gamma / sf.beta;
    let ybar_peak = 1.0 - r + r * (r / xbar).ln();
    Ok(sf.beta * s0.x()[i] / gamma * ybar_peak)
}

/// First time `w_i <= 0` for every node, refined between samples. `None`
/// when `w_i` stays positive over the whole trajectory.
pub fn tbar_times(traj: &Trajectory) -> Result<Vec<Option<f64>>> {
    let f = traj.params.factors()?;
    let gamma = traj.params.gamma();
    let w = |i: usize, s: &State| {
        let agg = aggregates_with(f, s.x(), s.y());
        agg.xtilde - gamma - f.a[i] * agg.ybar
    };
    (0..traj.n())
        .map(|i| {
            if w(i, &traj.states[0]) <= 0.0 {
                return Ok(Some(0.0));
            }
            match traj.states.iter().position(|s| w(i, s) <= 0.0) {
                Some(k) => refine_crossing(traj, |_, s| w(i, s), (k - 1, k)).map(Some),
                None => Ok(None),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> (EpidemicParams, State) {
        let p = EpidemicParams::rank_one(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let s = State::new(vec![0.85, 1.0], vec![0.15, 0.0]).unwrap();
        (p, s)
    }

    fn fig2() -> (EpidemicParams, State) {
        let p = EpidemicParams::rank_one(
            vec![0.1, 0.25, 0.6, 1.0, 0.2],
            vec![0.45, 0.4, 0.6, 0.65, 0.01],
            0.6,
        )
        .unwrap();
        let x = vec![0.85, 0.999, 0.8, 1.0, 0.75];
        let y = x.iter().map(|v| 1.0 - v).collect();
        (p, State::new(x, y).unwrap())
    }

    /// Independent oracle: bisection on `1.85 exp(xi - 2) - xi` over [0, 1].
    fn example1_phi_oracle() -> f64 {
        let g = |xi: f64| 1.85 * (xi - 2.0).exp() - xi;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if g(m) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        lo
    }

    #[test]
    fn invariants_example1() {
        let (p, s) = example1();
        let h = invariants_h(&p, &s).unwrap().h;
        assert!((h[0] - 0.85 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((h[1] - (-2.0f64).exp()).abs() < 1e-15);
        let zero = State::new(vec![0.0, 0.0], vec![0.3, 0.1]).unwrap();
        assert_eq!(invariants_h(&p, &zero).unwrap().h, vec![0.0, 0.0]);
    }

    #[test]
    fn phi_cases() {
        let (p, s) = example1();
        let phi = solve_phi(&p, &s).unwrap();
        assert!((phi - example1_phi_oracle()).abs() < 1e-12);
        assert!((phi - 0.358_227_588_550_4).abs() < 1e-12);

        let none = State::new(vec![0.0, 0.0], vec![0.5, 0.2]).unwrap();
        assert_eq!(solve_phi(&p, &none).unwrap(), 0.0);

        let sub = State::disease_free(vec![0.3, 0.4]).unwrap();
        assert_eq!(solve_phi(&p, &sub).unwrap(), 0.7);

        let sup = State::disease_free(vec![0.8, 0.4]).unwrap();
        assert_eq!(solve_phi(&p, &sup), Err(SirError::DomainExcluded));
    }

    #[test]
    fn limit_example1() {
        let (p, s) = example1();
        let rep = limit_state(&p, &s).unwrap();
        let total = rep.x_star[0] + rep.x_star[1];
        assert!((total - example1_phi_oracle()).abs() < 1e-10);
        assert!((rep.x_star[1] / rep.x_star[0] - 1.0 / 0.85).abs() < 1e-12);
        assert_eq!(rep.tag, Stability::Stable);
    }

    #[test]
    fn limit_fixes_equilibria() {
        let (p, _) = example1();
        let s = State::disease_free(vec![0.3, 0.4]).unwrap();
        assert_eq!(limit_state(&p, &s).unwrap().x_star, vec![0.3, 0.4]);
    }

    #[test]
    fn equilibrium_tags() {
        let (p, _) = example1();
        assert_eq!(classify_equilibrium(&p, &[0.0, 0.0]).unwrap(), Stability::Stable);
        assert_eq!(classify_equilibrium(&p, &[1.0, 1.0]).unwrap(), Stability::Unstable);
        assert_eq!(classify_equilibrium(&p, &[0.5, 0.5]).unwrap(), Stability::Marginal);
    }

    #[test]
    fn classify_examples() {
        let (p, s) = example1();
        assert_eq!(classify_node_curve(&p, &s, 0).unwrap().tag(), ShapeTag::Undetermined);
        assert_eq!(classify_node_curve(&p, &s, 1).unwrap().tag(), ShapeTag::Unimodal);
        let free = State::disease_free(vec![1.0, 1.0]).unwrap();
        assert_eq!(classify_node_curve(&p, &free, 0).unwrap(), CurveShape::Constant);
        let (p2, s2) = fig2();
        assert_eq!(classify_node_curve(&p2, &s2, 3).unwrap().tag(), ShapeTag::Unimodal);
        assert!(classify_node_curve(&p2, &s2, 7).is_err());
    }

    #[test]
    fn classify_subcritical_node() {
        // d0 < 0 and w0 < 0
        let p = EpidemicParams::rank_one(vec![1.0, 1.0], vec![0.5, 0.5], 1.0).unwrap();
        let s = State::new(vec![0.5, 0.5], vec![0.3, 0.0]).unwrap();
        assert_eq!(classify_node_curve(&p, &s, 0).unwrap(), CurveShape::MonotoneDecreasing);
    }

    /// Independent oracle: plain bisection on the two-node all-ones margin
    /// `(1 - e)/(2 - e) (1 - ln(2 - e)) - e`, bracketed by a coarse scan.
    fn eps_bar_oracle() -> f64 {
        let g = |e: f64| (1.0 - e) / (2.0 - e) * (1.0 - (2.0 - e).ln()) - e;
        let mut lo = 0.0;
        while g(lo + 0.01) > 0.0 {
            lo += 0.01;
        }
        let mut hi = lo + 0.01;
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if g(m) > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        lo
    }

    #[test]
    fn epsilon_bar_reference() {
        let g0 = bimodality_margin(2.0, 1.0, 0.5, 0.0);
        assert!((g0 - 0.5 * (1.0 - 2f64.ln())).abs() < 1e-15);
        let e = epsilon_bar(2.0, 1.0, 0.5).unwrap();
        assert!((e - eps_bar_oracle()).abs() < 1e-11);
        assert!((e - 0.180_851_548_814_18).abs() < 1e-11);
    }

    #[test]
    fn epsilon_bar_requires_supercritical() {
        assert!(matches!(
            epsilon_bar(1.0, 1.0, 0.5),
            Err(SirError::SupercriticalityRequired { .. })
        ));
    }

    #[test]
    fn margin_at_one_is_minus_one() {
        for (beta, gamma, b) in [(2.0, 1.0, 0.5), (5.0, 0.3, 0.1), (1.5, 1.0, 0.99)] {
            assert!((bimodality_margin(beta, gamma, b, 1.0) + 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn multimodality_example1() {
        let (p, s) = example1();
        let rep = check_multimodality_conditions(&p, &s, 0).unwrap();
        assert!(rep.no_recovered && rep.initially_decreasing);
        assert!(rep.aggregate_supercritical && rep.small_initial_infection);
        assert!(rep.guaranteed);
        assert_eq!(rep.prediction.unwrap().tag(), ShapeTag::Bimodal);
        let rep2 = check_multimodality_conditions(&p, &s, 1).unwrap();
        assert!(!rep2.small_initial_infection && !rep2.guaranteed);
    }

    #[test]
    fn multimodality_requires_special_form() {
        let (p, s) = fig2();
        assert_eq!(
            check_multimodality_conditions(&p, &s, 0),
            Err(SirError::NotSpecialForm)
        );
    }

    #[test]
    fn peak_bound_example1() {
        let (p, s) = example1();
        let bound = peak_upper_bound(&p, &s, 0).unwrap();
        let expected = 0.85 * (1.0 + (1.0f64 / 1.85).ln());
        assert!((bound - expected).abs() < 1e-14);
        assert!((bound - 0.327_092_206_773_3).abs() < 1e-12);
    }

    #[test]
    fn peak_bound_zero_susceptibles() {
        let p = EpidemicParams::uniform_susceptibility(3.0, vec![0.5, 0.5], 1.0).unwrap();
        let s = State::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(peak_upper_bound(&p, &s, 0).unwrap(), 0.0);
    }

    #[test]
    fn peak_bound_subcritical() {
        let p = EpidemicParams::uniform_susceptibility(1.0, vec![0.5, 0.5], 1.0).unwrap();
        let s = State::new(vec![0.9, 1.0], vec![0.1, 0.0]).unwrap();
        assert!(matches!(
            peak_upper_bound(&p, &s, 0),
            Err(SirError::SubcriticalAggregate { .. })
        ));
    }
}
