//! Full-analysis runs over scenarios and parameter sweeps.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::curves::{
    aggregate_extrema, aggregate_peak_time, detect_extrema, observed_shape, verify_prediction,
    ExtremaList, Extremum, ExtremumKind, Verdict,
};
use crate::error::{Result, SirError};
use crate::integrate::{integrate, StopReason, Trajectory};
use crate::model::{aggregates_with, EpidemicParams, State};
use crate::rank1::{
    check_multimodality_conditions, classify_node_curve, invariants_h, limit_state,
    peak_upper_bound, solve_phi, special_form, tbar_times, CurveShape, EquilibriumReport,
    MultimodalityReport,
};
use crate::scenario::{Analysis, Scenario, SweepSpec};
use crate::spectral::{dominant_eig, instability_check};
use crate::svg::{line_chart, Series};

/// Slack for ordering checks between refined event times.
pub const EVENT_ORDER_TOL: f64 = 1e-6;
/// Slack for the stationary-peak bound.
pub const PEAK_BOUND_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub svg: bool,
    /// Integrate even when only static analyses were requested, so that
    /// undetermined predictions are resolved by observation.
    pub resolve_undetermined: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport {
    pub node: usize,
    pub predicted: Option<CurveShape>,
    pub observed: Option<CurveShape>,
    pub verdict: Option<Verdict>,
    pub extrema: Option<ExtremaList>,
    /// First time `w_i <= 0`.
    pub tbar: Option<f64>,
    pub multimodality: Option<MultimodalityReport>,
    pub peak_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub lambda_initial: f64,
    pub irreducible: bool,
    pub initially_unstable: bool,
    /// `lambda_max([x(T)] A)` at the end of the trajectory.
    pub lambda_final: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub name: String,
    pub rank_one: bool,
    pub notices: Vec<String>,
    pub failures: Vec<String>,
    pub trajectory: Option<Trajectory>,
    pub nodes: Vec<NodeReport>,
    pub t_hat: Option<f64>,
    pub ybar_extrema: Vec<Extremum>,
    pub limit: Option<EquilibriumReport>,
    pub phi: Option<f64>,
    /// `max_i max_t |h_i(t) - h_i(0)| / (1 + |h_i(0)|)` over the samples.
    pub invariant_drift: Option<f64>,
    pub spectral: Option<SpectralSummary>,
}

impl AnalysisReport {
    /// True when any theory check failed.
    pub fn has_failures(&self) -> bool {
        !self.failures.is_empty()
    }
}

/// Runs every analysis requested by `sc` without touching the filesystem.
pub fn analyze(sc: &Scenario, opts: &RunOptions) -> Result<AnalysisReport> {
    let p = &sc.params;
    let s0 = &sc.initial;
    let n = p.n();
    let rank_one = p.is_rank_one();
    let mut rep = AnalysisReport {
        name: sc.name.clone(),
        rank_one,
        notices: Vec::new(),
        failures: Vec::new(),
        trajectory: None,
        nodes: (0..n)
            .map(|node| NodeReport {
                node,
                predicted: None,
                observed: None,
                verdict: None,
                extrema: None,
                tbar: None,
                multimodality: None,
                peak_bound: None,
            })
            .collect(),
        t_hat: None,
        ybar_extrema: Vec::new(),
        limit: None,
        phi: None,
        invariant_drift: None,
        spectral: None,
    };
    let rank1_wanted = [Analysis::Classify, Analysis::Limit, Analysis::Multimodality]
        .iter()
        .any(|a| sc.wants(*a));
    if !rank_one && rank1_wanted {
        rep.notices.push(format!(
            "{}: rank-1 analyses skipped",
            SirError::NotRankOne
        ));
    }

    if sc.wants(Analysis::Simulate) || opts.resolve_undetermined {
        let traj = integrate(p, s0, sc.horizon, &sc.integrator)?;
        if traj.stop == StopReason::HorizonExceeded {
            rep.notices
                .push("integration stopped before the requested horizon".into());
        }
        for node in &mut rep.nodes {
            let ex = detect_extrema(&traj, node.node, None)?;
            node.observed = Some(observed_shape(&traj, node.node)?);
            node.extrema = Some(ex);
        }
        if rank_one {
            observe_rank_one(&traj, &mut rep)?;
        }
        rep.trajectory = Some(traj);
    }

    if rank_one && sc.wants(Analysis::Classify) {
        for i in 0..n {
            let predicted = classify_node_curve(p, s0, i)?;
            let node = &mut rep.nodes[i];
            if let Some(obs) = &node.observed {
                let v = verify_prediction(&predicted, obs);
                if let Verdict::Fail { reason, .. } = &v {
                    rep.failures.push(format!("node {}: {reason}", i + 1));
                }
                node.verdict = Some(v);
            }
            node.predicted = Some(predicted);
        }
    }

    if rank_one && sc.wants(Analysis::Limit) {
        rep.limit = Some(limit_state(p, s0)?);
        rep.phi = Some(solve_phi(p, s0)?);
    }

    if rank_one && sc.wants(Analysis::Multimodality) {
        match special_form(p) {
            Ok(_) => multimodality(p, s0, &mut rep)?,
            Err(e) => rep
                .notices
                .push(format!("{e}: multimodality conditions skipped")),
        }
    }

    if sc.wants(Analysis::Spectral) {
        let pair = dominant_eig(&p.to_dense().scale_rows(s0.x()))?;
        let lambda_final = match &rep.trajectory {
            Some(t) => Some(dominant_eig(&p.to_dense().scale_rows(t.last_state().x()))?.lambda_max),
            None => None,
        };
        rep.spectral = Some(SpectralSummary {
            lambda_initial: pair.lambda_max,
            irreducible: pair.irreducible,
            initially_unstable: instability_check(p, s0.x())?,
            lambda_final,
        });
    }
    Ok(rep)
}

fn observe_rank_one(traj: &Trajectory, rep: &mut AnalysisReport) -> Result<()> {
    let p = &traj.params;
    let t_hat = aggregate_peak_time(traj)?;
    let tbars = tbar_times(traj)?;
    rep.ybar_extrema = aggregate_extrema(traj, None)?;
    rep.t_hat = t_hat;

    let h0 = invariants_h(p, &traj.states[0])?.h;
    let mut drift = 0.0f64;
    for s in &traj.states {
        let h = invariants_h(p, s)?.h;
        for (a, b) in h.iter().zip(&h0) {
            drift = drift.max((a - b).abs() / (1.0 + b.abs()));
        }
    }
    rep.invariant_drift = Some(drift);

    let ybar_peaks = rep
        .ybar_extrema
        .iter()
        .filter(|e| e.kind == ExtremumKind::LocalMax)
        .count();
    let ybar_minima = rep
        .ybar_extrema
        .iter()
        .filter(|e| e.kind == ExtremumKind::LocalMin)
        .count();
    if ybar_peaks > 1 || ybar_minima > 0 {
        rep.failures.push(format!(
            "ybar has {ybar_peaks} interior maxima and {ybar_minima} interior minima"
        ));
    }

    for (node, tbar) in rep.nodes.iter_mut().zip(tbars) {
        node.tbar = tbar;
        let Some(ex) = &node.extrema else { continue };
        let minima: Vec<f64> = ex.minima().map(|e| e.time).collect();
        if minima.len() > 1 {
            rep.failures.push(format!(
                "node {}: {} interior minima",
                node.node + 1,
                minima.len()
            ));
        }
        for m in minima {
            let bound = tbar.or(t_hat);
            if bound.is_some_and(|b| m > b + EVENT_ORDER_TOL) {
                rep.failures.push(format!(
                    "node {}: local minimum at {m} after tbar {:?}",
                    node.node + 1,
                    bound
                ));
            }
        }
        if let (Some(tb), Some(th)) = (tbar, t_hat) {
            if tb > th + EVENT_ORDER_TOL {
                rep.failures.push(format!(
                    "node {}: tbar {tb} after aggregate peak {th}",
                    node.node + 1
                ));
            }
        }
    }
    Ok(())
}

fn multimodality(p: &EpidemicParams, s0: &State, rep: &mut AnalysisReport) -> Result<()> {
    for node in &mut rep.nodes {
        let i = node.node;
        let mm = check_multimodality_conditions(p, s0, i)?;
        if mm.guaranteed {
            if let Some(obs) = &node.observed {
                if !matches!(obs, CurveShape::Bimodal { .. }) {
                    rep.failures.push(format!(
                        "node {}: bimodality guaranteed, observed {obs}",
                        i + 1
                    ));
                }
            }
        }
        node.peak_bound = peak_upper_bound(p, s0, i).ok();
        if let (Some(bound), Some(ex)) = (node.peak_bound, &node.extrema) {
            for e in ex.maxima() {
                if e.value > bound + PEAK_BOUND_TOL {
                    rep.failures.push(format!(
                        "node {}: peak {} at t = {} exceeds bound {bound}",
                        i + 1,
                        e.value,
                        e.time
                    ));
                }
            }
        }
        node.multimodality = Some(mm);
    }
    Ok(())
}

/// Trajectory table: `t, x_1..x_n, y_1..y_n` plus `xbar, xtilde, ybar` for
/// rank-1 parameters. Numbers use shortest round-trip formatting.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.n();
    let factors = traj.params.factors().ok();
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",y_{i}");
    }
    if factors.is_some() {
        out.push_str(",xbar,xtilde,ybar");
    }
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let _ = write!(out, "{t}");
        for v in s.x().iter().chain(s.y()) {
            let _ = write!(out, ",{v}");
        }
        if let Some(f) = factors {
            let agg = aggregates_with(f, s.x(), s.y());
            let _ = write!(out, ",{},{},{}", agg.xbar, agg.xtilde, agg.ybar);
        }
        out.push('\n');
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v}"))
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("[{}]", items.join(", "))
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.name)?;
        writeln!(f, "rank_one: {}", self.rank_one)?;
        for n in &self.notices {
            writeln!(f, "notice: {n}")?;
        }
        if let Some(t) = &self.trajectory {
            writeln!(
                f,
                "trajectory: {} samples, t_end = {}, stop = {:?}",
                t.len(),
                t.end_time(),
                t.stop
            )?;
        }
        if self.rank_one && self.trajectory.is_some() {
            writeln!(f, "aggregate_peak_time: {}", opt(self.t_hat))?;
            let peaks: Vec<f64> = self
                .ybar_extrema
                .iter()
                .filter(|e| e.kind == ExtremumKind::LocalMax)
                .map(|e| e.time)
                .collect();
            let shape = match self.ybar_extrema.first().map(|e| e.kind) {
                None => "Constant",
                Some(ExtremumKind::BoundaryMax) if peaks.is_empty() => "MonotoneDecreasing",
                Some(ExtremumKind::BoundaryMin) if peaks.len() <= 1 => "Unimodal",
                _ => "Irregular",
            };
            writeln!(f, "ybar_shape: {shape} peaks={}", list(&peaks))?;
            writeln!(f, "invariant_drift_max: {}", opt(self.invariant_drift))?;
        }
        for node in &self.nodes {
            writeln!(f, "[node {}]", node.node + 1)?;
            if let Some(p) = &node.predicted {
                writeln!(f, "  predicted: {p}")?;
            }
            if let Some(o) = &node.observed {
                writeln!(f, "  observed: {o}")?;
                if matches!(node.predicted, Some(CurveShape::Undetermined { .. })) {
                    writeln!(f, "  resolved: {}", o.tag())?;
                }
            }
            if let Some(v) = &node.verdict {
                match v {
                    Verdict::Pass => writeln!(f, "  verdict: PASS")?,
                    Verdict::Fail { reason, .. } => writeln!(f, "  verdict: FAIL ({reason})")?,
                }
            }
            if let Some(ex) = &node.extrema {
                let min: Vec<f64> = ex.minima().map(|e| e.time).collect();
                let max: Vec<f64> = ex.maxima().map(|e| e.time).collect();
                writeln!(f, "  local_min_times: {}", list(&min))?;
                writeln!(f, "  local_max_times: {}", list(&max))?;
            }
            if self.rank_one && self.trajectory.is_some() {
                writeln!(f, "  tbar: {}", opt(node.tbar))?;
            }
            if let Some(mm) = &node.multimodality {
                writeln!(
                    f,
                    "  multimodality: guaranteed={} no_recovered={} initially_decreasing={} \
                     aggregate_supercritical={} small_initial_infection={} epsilon_bar={}",
                    mm.guaranteed,
                    mm.no_recovered,
                    mm.initially_decreasing,
                    mm.aggregate_supercritical,
                    mm.small_initial_infection,
                    opt(mm.epsilon_bar)
                )?;
            }
            if let Some(b) = node.peak_bound {
                writeln!(f, "  peak_upper_bound: {b}")?;
            }
        }
        if let Some(l) = &self.limit {
            writeln!(f, "limit_x: {}", list(&l.x_star))?;
            writeln!(f, "limit_xtilde: {}", l.xtilde_star)?;
            writeln!(f, "limit_stability: {:?}", l.tag)?;
            writeln!(f, "phi: {}", opt(self.phi))?;
        }
        if let Some(s) = &self.spectral {
            writeln!(f, "lambda_max_initial: {}", s.lambda_initial)?;
            writeln!(f, "irreducible: {}", s.irreducible)?;
            writeln!(f, "initially_unstable: {}", s.initially_unstable)?;
            writeln!(f, "lambda_max_final: {}", opt(s.lambda_final))?;
        }
        if self.failures.is_empty() {
            writeln!(f, "result: PASS")
        } else {
            for fl in &self.failures {
                writeln!(f, "failure: {fl}")?;
            }
            writeln!(f, "result: FAIL")
        }
    }
}

/// Writes the outputs of a report; returns the written paths.
pub fn write_outputs(rep: &AnalysisReport, out_dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(format!("{}_report.txt", rep.name), &rep.to_string())?;
    if let Some(traj) = &rep.trajectory {
        put(format!("{}.csv", rep.name), &trajectory_csv(traj))?;
        if svg {
            let ys: Vec<Vec<f64>> = (0..traj.n()).map(|i| traj.y_series(i)).collect();
            let series: Vec<Series> = ys
                .iter()
                .enumerate()
                .map(|(i, v)| Series {
                    label: format!("y_{}", i + 1),
                    values: v,
                })
                .collect();
            let title = format!("{}: infected fraction per node", rep.name);
            put(
                format!("{}_y.svg", rep.name),
                &line_chart(&title, &traj.times, &series),
            )?;
            if let Ok(f) = traj.params.factors() {
                let ybar: Vec<f64> = traj
                    .states
                    .iter()
                    .map(|s| aggregates_with(f, s.x(), s.y()).ybar)
                    .collect();
                let title = format!("{}: aggregate ybar", rep.name);
                let series = [Series {
                    label: "ybar".into(),
                    values: &ybar,
                }];
                put(
                    format!("{}_ybar.svg", rep.name),
                    &line_chart(&title, &traj.times, &series),
                )?;
            }
        }
    }
    Ok(written)
}

/// [`analyze`] followed by [`write_outputs`] when an output directory is set.
pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<AnalysisReport> {
    let rep = analyze(sc, opts)?;
    if let Some(dir) = &opts.out_dir {
        write_outputs(&rep, dir, opts.svg)?;
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub shapes: Vec<String>,
    pub t_hat: Option<f64>,
    pub peaks: Vec<f64>,
    pub xtilde_star: Option<f64>,
    pub phi: Option<f64>,
    pub error: Option<String>,
}

fn sweep_row(spec: &SweepSpec, value: f64) -> SweepRow {
    let mut row = SweepRow {
        value,
        shapes: Vec::new(),
        t_hat: None,
        peaks: Vec::new(),
        xtilde_star: None,
        phi: None,
        error: None,
    };
    let mut go = || -> Result<()> {
        let sc = spec.instantiate(value)?;
        let traj = integrate(&sc.params, &sc.initial, sc.horizon, &sc.integrator)?;
        for i in 0..sc.params.n() {
            let ex = detect_extrema(&traj, i, None)?;
            let peak = ex
                .events
                .iter()
                .filter(|e| matches!(e.kind, ExtremumKind::LocalMax | ExtremumKind::BoundaryMax))
                .map(|e| e.value)
                .fold(sc.initial.y()[i], f64::max);
            row.peaks.push(peak);
            row.shapes.push(observed_shape(&traj, i)?.tag().to_string());
        }
        if sc.params.is_rank_one() {
            row.t_hat = aggregate_peak_time(&traj)?;
            row.xtilde_star = Some(limit_state(&sc.params, &sc.initial)?.xtilde_star);
            row.phi = Some(solve_phi(&sc.params, &sc.initial)?);
        }
        Ok(())
    };
    if let Err(e) = go() {
        row.error = Some(e.to_string());
    }
    row
}

/// Worker count from `NETSIR_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("NETSIR_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|n: &usize| *n > 0)
}

/// Evaluates every sweep value independently, in parallel.
pub fn sweep_rows(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| SirError::Scenario(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        spec.values
            .par_iter()
            .map(|v| sweep_row(spec, *v))
            .collect()
    }))
}

pub fn sweep_csv(n: usize, rows: &[SweepRow]) -> String {
    let mut out = String::from("value");
    for i in 1..=n {
        let _ = write!(out, ",shape_{i}");
    }
    out.push_str(",t_hat");
    for i in 1..=n {
        let _ = write!(out, ",peak_{i}");
    }
    out.push_str(",xtilde_star,phi,error\n");
    let cell = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for r in rows {
        let _ = write!(out, "{}", r.value);
        for i in 0..n {
            let _ = write!(out, ",{}", r.shapes.get(i).map_or("", String::as_str));
        }
        let _ = write!(out, ",{}", cell(r.t_hat));
        for i in 0..n {
            let _ = write!(out, ",{}", cell(r.peaks.get(i).copied()));
        }
        let err = r
            .error
            .as_deref()
            .unwrap_or("")
            .replace([',', '\n', '\r'], ";");
        let _ = writeln!(out, ",{},{},{err}", cell(r.xtilde_star), cell(r.phi));
    }
    out
}

/// Runs the sweep and writes `<name>_sweep.csv` when an output directory is
/// set. Per-value failures land in the `error` column.
pub fn run_sweep(spec: &SweepSpec, opts: &RunOptions) -> Result<(Vec<SweepRow>, String)> {
    let rows = sweep_rows(spec)?;
    let csv = sweep_csv(spec.base.params.n(), &rows);
    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}_sweep.csv", spec.base.name)), &csv)?;
    }
    Ok((rows, csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank1::ShapeTag;
    use crate::scenario::Axis;

    #[test]
    fn example1_report() {
        let rep = analyze(&Scenario::example1(), &RunOptions::default()).unwrap();
        assert!(!rep.has_failures(), "{rep}");
        assert_eq!(
            rep.nodes[0].observed.as_ref().unwrap().tag(),
            ShapeTag::Bimodal
        );
        assert_eq!(
            rep.nodes[1].observed.as_ref().unwrap().tag(),
            ShapeTag::Unimodal
        );
        let text = rep.to_string();
        assert!(text.contains("ybar_shape: Unimodal"));
        assert!(text.contains("result: PASS"));
    }

    #[test]
    fn csv_header_and_rows() {
        let rep = analyze(&Scenario::example1(), &RunOptions::default()).unwrap();
        let traj = rep.trajectory.unwrap();
        let csv = trajectory_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,x_1,x_2,y_1,y_2,xbar,xtilde,ybar");
        assert_eq!(lines.next().unwrap(), "0,0.85,1,0.15,0,1.85,1.85,0.15");
        assert_eq!(csv.lines().count(), traj.len() + 1);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn dense_full_rank_skips_rank_one_analyses() {
        let mut sc = Scenario::fig5();
        sc.horizon = 5.0;
        let rep = analyze(&sc, &RunOptions::default()).unwrap();
        assert!(rep.notices.iter().any(|n| n.contains("rank")));
        assert!(rep.nodes.iter().all(|n| n.predicted.is_none()));
        assert!(rep.limit.is_none());
        assert!(rep.spectral.is_some());
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let spec = SweepSpec {
            base: Scenario::example1(),
            axis: Axis::InitialY(0),
            values: vec![],
            preserve_total: true,
        };
        let (rows, csv) = run_sweep(&spec, &RunOptions::default()).unwrap();
        assert!(rows.is_empty());
        assert_eq!(
            csv,
            "value,shape_1,shape_2,t_hat,peak_1,peak_2,xtilde_star,phi,error\n"
        );
    }

    #[test]
    fn sweep_records_row_errors() {
        let spec = SweepSpec {
            base: Scenario::example1(),
            axis: Axis::Gamma,
            values: vec![1.0, -1.0],
            preserve_total: true,
        };
        let rows = sweep_rows(&spec).unwrap();
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.is_some());
        assert_eq!(rows[0].shapes, vec!["Bimodal", "Unimodal"]);
    }
}
