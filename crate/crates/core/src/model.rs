//! Domain types for the network SIR model and evaluation of its vector field.
//!
//! The state of node `i` is the pair `(x_i, y_i)` of susceptible and infected
//! fractions; the recovered fraction `1 - x_i - y_i` is never stored. Nodes
//! interact through a nonnegative matrix `A`, either dense or given as the
//! outer product `a b^T` of two positive vectors.

use crate::error::{Result, SirError};

/// Slack tolerated on the constraints `0 <= x, 0 <= y, x + y <= 1` before a
/// state is rejected. Smaller violations are clamped away.
pub const STATE_SLACK: f64 = 1e-12;

/// Relative tolerance used when detecting rank-1 structure in dense input.
pub const RANK1_TOL: f64 = 1e-10;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(SirError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(SirError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// The outer product `a b^T`.
    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        let n = a.len();
        let mut data = Vec::with_capacity(n * n);
        for &ai in a {
            data.extend(b.iter().map(|&bj| ai * bj));
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `[x] M`, i.e. row `i` scaled by `x_i`.
    pub fn scale_rows(&self, x: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, &xi) in x.iter().enumerate() {
            for v in &mut out.data[i * self.n..(i + 1) * self.n] {
                *v *= xi;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Positive factors of a rank-1 interaction matrix `A = a b^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneFactors {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl RankOneFactors {
    /// Rescales to `sum(b) = 1`, leaving `a b^T` unchanged.
    pub fn normalized(&self) -> Self {
        let s: f64 = self.b.iter().sum();
        Self {
            a: self.a.iter().map(|v| v * s).collect(),
            b: self.b.iter().map(|v| v / s).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Interaction {
    Dense(Matrix),
    RankOne(RankOneFactors),
}

/// Interaction structure plus the homogeneous recovery rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicParams {
    interaction: Interaction,
    gamma: f64,
    // rank-1 factors detected in dense input, if any
    detected: Option<RankOneFactors>,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(SirError::InvalidParams(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    Ok(())
}

impl EpidemicParams {
    pub fn dense(a: Matrix, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if a.n() == 0 {
            return Err(SirError::InvalidParams("empty interaction matrix".into()));
        }
        if let Some(v) = a.as_slice().iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(SirError::InvalidParams(format!(
                "interaction entries must be finite and nonnegative, got {v}"
            )));
        }
        let detected = rank1_factorize(&a, RANK1_TOL).ok().flatten();
        Ok(Self {
            interaction: Interaction::Dense(a),
            gamma,
            detected,
        })
    }

    pub fn rank_one(a: Vec<f64>, b: Vec<f64>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if a.is_empty() {
            return Err(SirError::InvalidParams("empty factor vectors".into()));
        }
        if a.len() != b.len() {
            return Err(SirError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if let Some(v) = a.iter().chain(&b).find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(SirError::InvalidParams(format!(
                "rank-1 factors must be finite and positive, got {v}"
            )));
        }
        Ok(Self {
            interaction: Interaction::RankOne(RankOneFactors { a, b }),
            gamma,
            detected: None,
        })
    }

    /// Special form `A = beta 1 b^T`.
    pub fn uniform_susceptibility(beta: f64, b: Vec<f64>, gamma: f64) -> Result<Self> {
        let a = vec![beta; b.len()];
        Self::rank_one(a, b, gamma)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        match &self.interaction {
            Interaction::Dense(m) => m.n(),
            Interaction::RankOne(f) => f.a.len(),
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    /// Rank-1 factors: the declared ones, or those detected in a dense matrix.
    pub fn factors(&self) -> Result<&RankOneFactors> {
        match &self.interaction {
            Interaction::RankOne(f) => Ok(f),
            Interaction::Dense(_) => self.detected.as_ref().ok_or(SirError::NotRankOne),
        }
    }

    pub fn is_rank_one(&self) -> bool {
        self.factors().is_ok()
    }

    pub fn to_dense(&self) -> Matrix {
        match &self.interaction {
            Interaction::Dense(m) => m.clone(),
            Interaction::RankOne(f) => Matrix::outer(&f.a, &f.b),
        }
    }
}

/// Point of the invariant set `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub(crate) x: Vec<f64>,
    pub(crate) y: Vec<f64>,
}

impl State {
    /// Validates against `S` for an `n`-node network. Violations up to
    /// [`STATE_SLACK`] are clamped.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if y.len() != n {
            return Err(SirError::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        let mut s = Self { x, y };
        s.clamp_checked()?;
        Ok(s)
    }

    /// Disease-free state with the given susceptibles.
    pub fn disease_free(x: Vec<f64>) -> Result<Self> {
        let n = x.len();
        Self::new(x, vec![0.0; n])
    }

    #[inline]
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.x, self.y)
    }

    pub fn is_infection_free(&self) -> bool {
        self.y.iter().all(|&v| v == 0.0)
    }

    pub fn is_susceptible_free(&self) -> bool {
        self.x.iter().all(|&v| v == 0.0)
    }

    pub(crate) fn clamp_checked(&mut self) -> Result<()> {
        for i in 0..self.x.len() {
            let (xi, yi) = (self.x[i], self.y[i]);
            if !xi.is_finite() || !yi.is_finite() {
                return Err(SirError::OutOfSimplex {
                    node: i,
                    reason: format!("non-finite entry (x = {xi}, y = {yi})"),
                });
            }
            if xi < -STATE_SLACK || yi < -STATE_SLACK {
                return Err(SirError::OutOfSimplex {
                    node: i,
                    reason: format!("negative fraction (x = {xi}, y = {yi})"),
                });
            }
            let (xi, yi) = (xi.max(0.0), yi.max(0.0));
            if xi + yi > 1.0 + STATE_SLACK {
                return Err(SirError::OutOfSimplex {
                    node: i,
                    reason: format!("x + y = {} > 1", xi + yi),
                });
            }
            let (xi, yi) = if xi + yi > 1.0 {
                // shave the excess off the larger component
                let excess = xi + yi - 1.0;
                if xi >= yi {
                    (xi - excess, yi)
                } else {
                    (xi, yi - excess)
                }
            } else {
                (xi, yi)
            };
            self.x[i] = xi;
            self.y[i] = yi;
        }
        Ok(())
    }
}

/// Time derivative of a [`State`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Weighted aggregates of a state under rank-1 interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    /// `sum_j b_j x_j`
    pub xbar: f64,
    /// `sum_j a_j b_j x_j`
    pub xtilde: f64,
    /// `sum_j b_j y_j`
    pub ybar: f64,
}

pub fn validate_state(p: &EpidemicParams, x: Vec<f64>, y: Vec<f64>) -> Result<State> {
    let n = p.n();
    for len in [x.len(), y.len()] {
        if len != n {
            return Err(SirError::DimensionMismatch { expected: n, got: len });
        }
    }
    State::new(x, y)
}

/// Evaluates the right-hand side into caller-provided buffers.
pub(crate) fn vector_field_into(
    p: &EpidemicParams,
    x: &[f64],
    y: &[f64],
    dx: &mut [f64],
    dy: &mut [f64],
) {
    let gamma = p.gamma();
    match p.interaction() {
        Interaction::RankOne(f) => {
            let ybar: f64 = f.b.iter().zip(y).map(|(b, y)| b * y).sum();
            for i in 0..x.len() {
                let inflow = f.a[i] * x[i] * ybar;
                dx[i] = -inflow;
                dy[i] = inflow - gamma * y[i];
            }
        }
        Interaction::Dense(m) => {
            for i in 0..x.len() {
                let force: f64 = m.row(i).iter().zip(y).map(|(a, y)| a * y).sum();
                let inflow = x[i] * force;
                dx[i] = -inflow;
                dy[i] = inflow - gamma * y[i];
            }
        }
    }
}

pub fn vector_field(p: &EpidemicParams, s: &State) -> StateDerivative {
    let n = s.n();
    let mut d = StateDerivative {
        dx: vec![0.0; n],
        dy: vec![0.0; n],
    };
    vector_field_into(p, &s.x, &s.y, &mut d.dx, &mut d.dy);
    d
}

pub(crate) fn aggregates_with(f: &RankOneFactors, x: &[f64], y: &[f64]) -> Aggregates {
    let mut agg = Aggregates {
        xbar: 0.0,
        xtilde: 0.0,
        ybar: 0.0,
    };
    for j in 0..x.len() {
        agg.xbar += f.b[j] * x[j];
        agg.xtilde += f.a[j] * f.b[j] * x[j];
        agg.ybar += f.b[j] * y[j];
    }
    agg
}

pub fn aggregates(p: &EpidemicParams, s: &State) -> Result<Aggregates> {
    Ok(aggregates_with(p.factors()?, &s.x, &s.y))
}

/// `w_i = xtilde - gamma - a_i ybar`, the logarithmic rate of change of the
/// new-infection rate at node `i`.
pub fn w_values(p: &EpidemicParams, s: &State) -> Result<Vec<f64>> {
    let f = p.factors()?;
    let agg = aggregates_with(f, &s.x, &s.y);
    Ok(f.a
        .iter()
        .map(|ai| agg.xtilde - p.gamma() - ai * agg.ybar)
        .collect())
}

/// Detects `A = a b^T` with `a, b > 0` and `sum(b) = 1`.
///
/// `a` is read off the column with the largest sum and each `b_j` is the
/// `a`-weighted least-squares ratio of column `j` against it. Returns `None`
/// when the residual exceeds `tol * max(A)` or a factor is not positive.
pub fn rank1_factorize(m: &Matrix, tol: f64) -> Result<Option<RankOneFactors>> {
    let n = m.n();
    let scale = m.max_abs();
    if scale == 0.0 {
        return Err(SirError::ZeroMatrix);
    }
    let col_sum = |j: usize| (0..n).map(|i| m.get(i, j)).sum::<f64>();
    let pivot = (0..n)
        .max_by(|&p, &q| col_sum(p).total_cmp(&col_sum(q)))
        .expect("n > 0");
    let a: Vec<f64> = (0..n).map(|i| m.get(i, pivot)).collect();
    if a.iter().any(|&v| v <= 0.0) {
        return Ok(None);
    }
    let aa: f64 = a.iter().map(|v| v * v).sum();
    let b: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| a[i] * m.get(i, j)).sum::<f64>() / aa)
        .collect();
    if b.iter().any(|&v| v <= 0.0) {
        return Ok(None);
    }
    let factors = RankOneFactors { a, b }.normalized();
    for i in 0..n {
        for j in 0..n {
            if (m.get(i, j) - factors.a[i] * factors.b[j]).abs() > tol * scale {
                return Ok(None);
            }
        }
    }
    Ok(Some(factors))
}
