//! Dominant eigenpairs of nonnegative matrices and the scalar SIR toolkit.

use crate::error::{Result, SirError};
use crate::model::{EpidemicParams, Matrix};
use crate::rank1::CLASSIFY_BAND;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 1_000_000;

/// Dominant eigenvalue and left eigenvector of a nonnegative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantPair {
    pub lambda_max: f64,
    /// Left eigenvector normalized to unit sum.
    pub v_max: Vec<f64>,
    /// False when the sparsity pattern is not strongly connected; the pair is
    /// then a dominant pair but not necessarily unique or positive.
    pub irreducible: bool,
}

/// Whether the directed graph of `m`'s positive entries is strongly connected.
pub fn is_irreducible(m: &Matrix) -> bool {
    let n = m.n();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { m.get(i, j) } else { m.get(j, i) };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(true) && reach(false)
}

/// Power iteration on `M + I` for the left eigenproblem `v^T M = lambda v^T`.
///
/// The identity shift makes the iteration matrix primitive for irreducible
/// `M`, so periodic structure cannot stall convergence.
pub fn dominant_eig(m: &Matrix) -> Result<DominantPair> {
    let n = m.n();
    if let Some(v) = m.as_slice().iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(SirError::InvalidParams(format!(
            "matrix entries must be finite and nonnegative, got {v}"
        )));
    }
    let irreducible = is_irreducible(m);
    let mut v = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITER {
        // next^T = v^T (M + I)
        next.copy_from_slice(&v);
        for i in 0..n {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for (j, nj) in next.iter_mut().enumerate() {
                *nj += vi * m.get(i, j);
            }
        }
        let mass: f64 = next.iter().sum();
        for nj in &mut next {
            *nj /= mass;
        }
        let diff: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        if diff < POWER_TOL {
            let lambda = rayleigh_left(m, &v);
            return Ok(DominantPair {
                lambda_max: lambda.max(0.0),
                v_max: v,
                irreducible,
            });
        }
    }
    Err(SirError::NoConvergence {
        iterations: POWER_MAX_ITER,
    })
}

fn rayleigh_left(m: &Matrix, v: &[f64]) -> f64 {
    let n = m.n();
    let mut total = 0.0;
    for i in 0..n {
        total += v[i] * m.row(i).iter().sum::<f64>();
    }
    total / v.iter().sum::<f64>()
}

/// True iff `lambda_max([x*] A) > gamma`, i.e. the equilibrium `(x*, 0)` is
/// known to be unstable.
pub fn instability_check(p: &EpidemicParams, x_star: &[f64]) -> Result<bool> {
    if x_star.len() != p.n() {
        return Err(SirError::DimensionMismatch {
            expected: p.n(),
            got: x_star.len(),
        });
    }
    let m = p.to_dense().scale_rows(x_star);
    let pair = dominant_eig(&m)?;
    Ok(pair.lambda_max > p.gamma() + CLASSIFY_BAND)
}

/// `beta (x + y) - gamma ln x`, conserved along scalar SIR trajectories.
pub fn scalar_invariant(beta: f64, gamma: f64, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(SirError::NonpositiveSusceptibles(x));
    }
    Ok(beta * (x + y) - gamma * x.ln())
}

/// Limit susceptible fraction of the scalar SIR model: the root in
/// `(0, gamma / beta]` of `beta x - gamma ln x = beta (x0 + y0) - gamma ln x0`.
///
/// With `y0 = 0` the initial state is an equilibrium and `x0` is returned.
pub fn scalar_final_size(beta: f64, gamma: f64, x0: f64, y0: f64) -> Result<f64> {
    if !(beta > 0.0 && gamma > 0.0 && beta.is_finite() && gamma.is_finite()) {
        return Err(SirError::InvalidParams(format!(
            "beta and gamma must be positive, got {beta}, {gamma}"
        )));
    }
    // aggregates of a network may exceed 1, so only positivity is required
    if !(x0 > 0.0 && y0 >= 0.0 && x0.is_finite() && y0.is_finite()) {
        return Err(SirError::InvalidInitialState(format!(
            "need x0 > 0 and y0 >= 0, got x0 = {x0}, y0 = {y0}"
        )));
    }
    if y0 == 0.0 {
        return Ok(x0);
    }
    let c0 = beta * (x0 + y0) - gamma * x0.ln();
    let h = |x: f64| beta * x - gamma * x.ln() - c0;
    let mut hi = gamma / beta;
    if h(hi) > 0.0 {
        // only reachable through round-off when the minimum value is ~0
        return Ok(hi);
    }
    let mut lo = x0.min(hi) * 1e-16;
    while h(lo) <= 0.0 {
        lo *= 1e-16;
        if lo == 0.0 {
            return Err(SirError::InvalidInitialState(
                "final size below representable range".into(),
            ));
        }
    }
    for _ in 0..400 {
        // geometric midpoints while the bracket spans decades
        let mid = if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
