#![allow(dead_code)]

use netsir::rank1::epsilon_bar;
use netsir::{EpidemicParams, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub params: EpidemicParams,
    pub state: State,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rank-1 network with `n <= 8` and some initial infection.
pub fn random_rank_one(rng: &mut ChaCha8Rng) -> Case {
    let n = rng.gen_range(1..=8);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let gamma = rng.gen_range(0.2..1.5);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
    let mut y: Vec<f64> = x
        .iter()
        .map(|xi| {
            if rng.gen_bool(0.4) {
                0.0
            } else {
                rng.gen_range(0.0..1.0 - xi)
            }
        })
        .collect();
    if y.iter().all(|v| *v == 0.0) {
        y[0] = rng.gen_range(0.001..1.0 - x[0]);
    }
    Case {
        params: EpidemicParams::rank_one(a, b, gamma).unwrap(),
        state: State::new(x, y).unwrap(),
    }
}

pub fn rank_one_suite(seed: u64, count: usize) -> Vec<Case> {
    let mut r = rng(seed);
    (0..count).map(|_| random_rank_one(&mut r)).collect()
}

/// Uniform-susceptibility network satisfying the bimodality recipe at
/// node 1: `beta > gamma`, `b_1 < min(gamma/beta, 1 - gamma/beta)`,
/// `0 < y_1(0) < epsilon_bar_1`, no other infection, nobody recovered.
pub fn recipe_case(rng: &mut ChaCha8Rng) -> (Case, f64) {
    let n = rng.gen_range(2..=8);
    let gamma: f64 = rng.gen_range(0.3..1.5);
    let beta = gamma * rng.gen_range(1.2..4.0);
    let r = gamma / beta;
    let b1 = rng.gen_range(0.05..0.95) * r.min(1.0 - r);
    let rest: Vec<f64> = (1..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = rest.iter().sum();
    let mut b = vec![b1];
    b.extend(rest.iter().map(|v| v / total * (1.0 - b1)));
    let eps = epsilon_bar(beta, gamma, b1).unwrap();
    let y1 = rng.gen_range(0.02..0.98) * eps;
    let mut y = vec![0.0; n];
    y[0] = y1;
    let x = y.iter().map(|v| 1.0 - v).collect();
    let case = Case {
        params: EpidemicParams::uniform_susceptibility(beta, b, gamma).unwrap(),
        state: State::new(x, y).unwrap(),
    };
    (case, eps)
}

pub fn recipe_suite(seed: u64, count: usize) -> Vec<(Case, f64)> {
    let mut r = rng(seed);
    (0..count).map(|_| recipe_case(&mut r)).collect()
}

/// Plain bisection on a sign change of `f` over `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest root of `f` on `[0, 1]` by a fine scan and bisection.
pub fn first_root_on_unit(f: impl Fn(f64) -> f64, step: f64) -> f64 {
    let mut lo = 0.0;
    let mut flo = f(lo);
    loop {
        let hi = (lo + step).min(1.0);
        let fhi = f(hi);
        if flo == 0.0 {
            return lo;
        }
        if flo * fhi <= 0.0 {
            return bisect(&f, lo, hi, 1e-13);
        }
        assert!(hi < 1.0, "no root on [0, 1]");
        lo = hi;
        flo = fhi;
    }
}

pub fn rank_one_h(a: &[f64], b: &[f64], gamma: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    let xbar: f64 = b.iter().zip(x).map(|(b, x)| b * x).sum();
    let ybar: f64 = b.iter().zip(y).map(|(b, y)| b * y).sum();
    x.iter()
        .zip(a)
        .map(|(xi, ai)| xi * (-ai * (xbar + ybar) / gamma).exp())
        .collect()
}
