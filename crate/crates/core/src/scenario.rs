//! Scenario files, built-in scenarios and parameter sweeps.
//!
//! Scenarios are TOML documents:
//!
//! ```toml
//! name = "example1"
//! horizon = 40.0
//! analyses = ["simulate", "classify", "limit"]
//!
//! [params]
//! gamma = 1.0
//! a = [1.0, 1.0]      # rank-one factors, or a dense row-major matrix:
//! b = [1.0, 1.0]      # A = [[1.0, 1.0], [1.0, 1.0]]
//!
//! [initial]
//! x = [0.85, 1.0]
//! y = [0.15, 0.0]
//!
//! [integrator]        # optional, every field has a default
//! sample_dt = 0.05
//! ```
//!
//! A sweep file is a scenario file plus a `[sweep]` table with `axis`,
//! `values` and optionally `preserve_total`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SirError};
use crate::integrate::IntegratorConfig;
use crate::model::{validate_state, EpidemicParams, Interaction, Matrix, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Simulate,
    Classify,
    Limit,
    Multimodality,
    Spectral,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::Simulate,
        Analysis::Classify,
        Analysis::Limit,
        Analysis::Multimodality,
        Analysis::Spectral,
    ];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: EpidemicParams,
    pub initial: State,
    pub horizon: f64,
    pub integrator: IntegratorConfig,
    pub analyses: BTreeSet<Analysis>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<f64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    horizon: f64,
    #[serde(default = "all_analyses")]
    analyses: BTreeSet<Analysis>,
    params: ParamsFile,
    initial: InitialFile,
    #[serde(default)]
    integrator: IntegratorConfig,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepTable {
    axis: String,
    values: Vec<f64>,
    #[serde(default = "yes")]
    preserve_total: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    #[serde(flatten)]
    base: ScenarioFile,
    sweep: SweepTable,
}

fn all_analyses() -> BTreeSet<Analysis> {
    Analysis::ALL.into_iter().collect()
}

fn yes() -> bool {
    true
}

fn parse_err(e: impl fmt::Display) -> SirError {
    SirError::Scenario(e.to_string())
}

impl ScenarioFile {
    fn build(self) -> Result<Scenario> {
        let ParamsFile { gamma, a, b, matrix } = self.params;
        let params = match (a, b, matrix) {
            (Some(a), Some(b), None) => EpidemicParams::rank_one(a, b, gamma)?,
            (None, None, Some(rows)) => EpidemicParams::dense(Matrix::from_rows(&rows)?, gamma)?,
            _ => {
                return Err(SirError::Scenario(
                    "params need either both `a` and `b`, or `A`".into(),
                ))
            }
        };
        let initial = validate_state(&params, self.initial.x, self.initial.y)?;
        Scenario::new(
            self.name,
            params,
            initial,
            self.horizon,
            self.integrator,
            self.analyses,
        )
    }

    fn from_scenario(sc: &Scenario) -> Self {
        let params = match sc.params.interaction() {
            Interaction::RankOne(f) => ParamsFile {
                gamma: sc.params.gamma(),
                a: Some(f.a.clone()),
                b: Some(f.b.clone()),
                matrix: None,
            },
            Interaction::Dense(m) => ParamsFile {
                gamma: sc.params.gamma(),
                a: None,
                b: None,
                matrix: Some(m.to_rows()),
            },
        };
        ScenarioFile {
            name: sc.name.clone(),
            horizon: sc.horizon,
            analyses: sc.analyses.clone(),
            params,
            initial: InitialFile {
                x: sc.initial.x().to_vec(),
                y: sc.initial.y().to_vec(),
            },
            integrator: sc.integrator.clone(),
        }
    }
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        params: EpidemicParams,
        initial: State,
        horizon: f64,
        integrator: IntegratorConfig,
        analyses: BTreeSet<Analysis>,
    ) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SirError::Scenario(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        integrator.validate()?;
        if initial.n() != params.n() {
            return Err(SirError::DimensionMismatch {
                expected: params.n(),
                got: initial.n(),
            });
        }
        Ok(Self {
            name: name.into(),
            params,
            initial,
            horizon,
            integrator,
            analyses,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&ScenarioFile::from_scenario(self)).map_err(parse_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    pub fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    /// Two-node all-ones network with a small infection at node 1.
    pub fn example1() -> Self {
        Self::with_epsilon(0.15)
    }

    /// [`Scenario::example1`] with `y_1(0) = eps`, `x_1(0) = 1 - eps`.
    pub fn with_epsilon(eps: f64) -> Self {
        let params = EpidemicParams::rank_one(vec![1.0, 1.0], vec![1.0, 1.0], 1.0)
            .expect("built-in parameters are valid");
        let initial = State::new(vec![1.0 - eps, 1.0], vec![eps, 0.0]).expect("valid state");
        Self::new("example1", params, initial, 40.0, Default::default(), all_analyses())
            .expect("built-in scenario is valid")
    }

    /// Five-node rank-one network with one bimodal node.
    pub fn fig2() -> Self {
        let params = EpidemicParams::rank_one(
            vec![0.1, 0.25, 0.6, 1.0, 0.2],
            vec![0.45, 0.4, 0.6, 0.65, 0.01],
            0.6,
        )
        .expect("built-in parameters are valid");
        let x = vec![0.85, 0.999, 0.8, 1.0, 0.75];
        let y = x.iter().map(|v| 1.0 - v).collect();
        let initial = State::new(x, y).expect("valid state");
        Self::new("fig2", params, initial, 120.0, Default::default(), all_analyses())
            .expect("built-in scenario is valid")
    }

    /// Four-node full-rank network whose first node shows three peaks.
    pub fn fig5() -> Self {
        let m = Matrix::from_rows(&[
            vec![0.05, 0.07, 0.05, 0.05],
            vec![0.0001, 0.8, 0.0001, 0.0001],
            vec![0.0001, 0.0001, 0.1, 0.0001],
            vec![0.01, 0.01, 0.01, 0.9],
        ])
        .expect("built-in matrix is valid");
        let params = EpidemicParams::dense(m, 0.5).expect("built-in parameters are valid");
        let initial =
            State::new(vec![1.0, 1.0, 0.9, 1.0], vec![0.0, 0.0, 0.1, 0.0]).expect("valid state");
        Self::new("fig5", params, initial, 400.0, Default::default(), all_analyses())
            .expect("built-in scenario is valid")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "example1" => Some(Self::example1()),
            "fig2" => Some(Self::fig2()),
            "fig5" => Some(Self::fig5()),
            _ => None,
        }
    }
}

impl FromStr for Scenario {
    type Err = SirError;

    fn from_str(s: &str) -> Result<Self> {
        toml::from_str::<ScenarioFile>(s).map_err(parse_err)?.build()
    }
}

/// Scenario field addressed by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Gamma,
    Horizon,
    FactorA(usize),
    FactorB(usize),
    Entry(usize, usize),
    InitialX(usize),
    InitialY(usize),
}

impl FromStr for Axis {
    type Err = SirError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || SirError::Scenario(format!("unknown sweep axis `{s}`"));
        let (head, rest) = s.split_once('[').unwrap_or((s, ""));
        let idx: Vec<usize> = if rest.is_empty() {
            Vec::new()
        } else {
            format!("[{rest}")
                .split(']')
                .filter(|p| !p.is_empty())
                .map(|p| p.strip_prefix('[').and_then(|v| v.trim().parse().ok()))
                .collect::<Option<_>>()
                .ok_or_else(bad)?
        };
        match (head.trim(), idx.as_slice()) {
            ("params.gamma", []) => Ok(Axis::Gamma),
            ("horizon", []) => Ok(Axis::Horizon),
            ("params.a", [i]) => Ok(Axis::FactorA(*i)),
            ("params.b", [i]) => Ok(Axis::FactorB(*i)),
            ("params.A", [i, j]) => Ok(Axis::Entry(*i, *j)),
            ("initial.x", [i]) => Ok(Axis::InitialX(*i)),
            ("initial.y", [i]) => Ok(Axis::InitialY(*i)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Gamma => write!(f, "params.gamma"),
            Axis::Horizon => write!(f, "horizon"),
            Axis::FactorA(i) => write!(f, "params.a[{i}]"),
            Axis::FactorB(i) => write!(f, "params.b[{i}]"),
            Axis::Entry(i, j) => write!(f, "params.A[{i}][{j}]"),
            Axis::InitialX(i) => write!(f, "initial.x[{i}]"),
            Axis::InitialY(i) => write!(f, "initial.y[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: Axis,
    pub values: Vec<f64>,
    /// When sweeping `initial.x[i]` or `initial.y[i]`, adjust the other
    /// compartment of node `i` so that `x_i + y_i` is unchanged.
    pub preserve_total: bool,
}

fn set(v: &mut [f64], i: usize, value: f64) -> Result<()> {
    let n = v.len();
    *v.get_mut(i)
        .ok_or(SirError::NodeOutOfRange { index: i, n })? = value;
    Ok(())
}

impl SweepSpec {
    pub fn load(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    /// Base scenario with the swept field set to `value`.
    pub fn instantiate(&self, value: f64) -> Result<Scenario> {
        let mut sc = self.base.clone();
        let gamma = sc.params.gamma();
        match self.axis {
            Axis::Gamma => sc.params = sc.params.with_gamma(value)?,
            Axis::Horizon => sc.horizon = value,
            Axis::FactorA(i) | Axis::FactorB(i) => {
                let f = sc.params.factors()?.clone();
                let (mut a, mut b) = (f.a, f.b);
                if matches!(self.axis, Axis::FactorA(_)) {
                    set(&mut a, i, value)?;
                } else {
                    set(&mut b, i, value)?;
                }
                sc.params = EpidemicParams::rank_one(a, b, gamma)?;
            }
            Axis::Entry(i, j) => {
                let mut rows = sc.params.to_dense().to_rows();
                let row = rows.get_mut(i).ok_or(SirError::NodeOutOfRange {
                    index: i,
                    n: sc.params.n(),
                })?;
                set(row, j, value)?;
                sc.params = EpidemicParams::dense(Matrix::from_rows(&rows)?, gamma)?;
            }
            Axis::InitialX(i) | Axis::InitialY(i) => {
                let (mut x, mut y) = sc.initial.clone().into_parts();
                let total = x.get(i).zip(y.get(i)).map(|(a, b)| a + b);
                let (target, other) = match self.axis {
                    Axis::InitialX(_) => (&mut x, &mut y),
                    _ => (&mut y, &mut x),
                };
                set(target, i, value)?;
                if self.preserve_total {
                    if let Some(total) = total {
                        other[i] = (total - value).max(0.0);
                    }
                }
                sc.initial = validate_state(&sc.params, x, y)?;
            }
        }
        Scenario::new(
            format!("{}_{}", sc.name, value),
            sc.params,
            sc.initial,
            sc.horizon,
            sc.integrator,
            sc.analyses,
        )
    }

    pub fn to_toml(&self) -> Result<String> {
        let file = SweepFile {
            base: ScenarioFile::from_scenario(&self.base),
            sweep: SweepTable {
                axis: self.axis.to_string(),
                values: self.values.clone(),
                preserve_total: self.preserve_total,
            },
        };
        toml::to_string(&file).map_err(parse_err)
    }
}

impl FromStr for SweepSpec {
    type Err = SirError;

    fn from_str(s: &str) -> Result<Self> {
        let file: SweepFile = toml::from_str(s).map_err(parse_err)?;
        Ok(SweepSpec {
            base: file.base.build()?,
            axis: file.sweep.axis.parse()?,
            values: file.sweep.values,
            preserve_total: file.sweep.preserve_total,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip() {
        for sc in [Scenario::example1(), Scenario::fig2(), Scenario::fig5()] {
            let text = sc.to_toml().unwrap();
            let back: Scenario = text.parse().unwrap();
            assert_eq!(back, sc, "{text}");
        }
    }

    #[test]
    fn parses_minimal_file() {
        let text = r#"
            name = "tiny"
            horizon = 10.0
            [params]
            gamma = 1.0
            A = [[1.0, 1.0], [1.0, 1.0]]
            [initial]
            x = [0.85, 1.0]
            y = [0.15, 0.0]
        "#;
        let sc: Scenario = text.parse().unwrap();
        assert_eq!(sc.analyses.len(), 5);
        assert!(sc.params.is_rank_one());
        assert_eq!(sc.integrator, IntegratorConfig::default());
    }

    #[test]
    fn rejects_bad_files() {
        let mixed = r#"
            name = "bad"
            horizon = 10.0
            [params]
            gamma = 1.0
            a = [1.0]
            A = [[1.0]]
            [initial]
            x = [0.9]
            y = [0.1]
        "#;
        assert!(matches!(mixed.parse::<Scenario>(), Err(SirError::Scenario(_))));
        let bad_state = mixed.replace("A = [[1.0]]", "b = [1.0]").replace("0.9", "1.9");
        assert!(matches!(
            bad_state.parse::<Scenario>(),
            Err(SirError::OutOfSimplex { .. })
        ));
        let zero_horizon = mixed
            .replace("A = [[1.0]]", "b = [1.0]")
            .replace("10.0", "0.0");
        assert!(zero_horizon.parse::<Scenario>().is_err());
    }

    #[test]
    fn axis_paths() {
        assert_eq!("params.gamma".parse::<Axis>().unwrap(), Axis::Gamma);
        assert_eq!("initial.y[0]".parse::<Axis>().unwrap(), Axis::InitialY(0));
        assert_eq!("params.A[1][2]".parse::<Axis>().unwrap(), Axis::Entry(1, 2));
        for s in ["params.A[1][2]", "initial.x[3]", "params.b[0]", "horizon"] {
            assert_eq!(s.parse::<Axis>().unwrap().to_string(), s);
        }
        assert!("params.delta".parse::<Axis>().is_err());
        assert!("initial.y[x]".parse::<Axis>().is_err());
    }

    #[test]
    fn sweep_preserves_node_total() {
        let spec = SweepSpec {
            base: Scenario::example1(),
            axis: Axis::InitialY(0),
            values: vec![0.05, 0.3],
            preserve_total: true,
        };
        let sc = spec.instantiate(0.05).unwrap();
        assert_eq!(sc.initial.y()[0], 0.05);
        assert_eq!(sc.initial.x()[0], 0.95);
        let text = spec.to_toml().unwrap();
        assert_eq!(text.parse::<SweepSpec>().unwrap(), spec);
    }

    #[test]
    fn sweep_rejects_invalid_instances() {
        let spec = SweepSpec {
            base: Scenario::example1(),
            axis: Axis::Gamma,
            values: vec![],
            preserve_total: true,
        };
        assert!(spec.instantiate(-1.0).is_err());
        assert_eq!(spec.instantiate(0.5).unwrap().params.gamma(), 0.5);
    }
}
