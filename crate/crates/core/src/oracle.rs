//! Brute-force maximization of F and G over measurement directions.
//!
//! This is the independent check on [`crate::chsh`]: it never looks at the
//! singular value decomposition. F is bilinear in the a-side and b-side
//! directions, so each half-step of an alternating ascent has an exact
//! solution:
//!
//! * given `(n, n')`: `m ∝ β_Mᵀ(n + n')`, `m' ∝ β_Mᵀ(n − n')`;
//! * given `(m, m')`: `n ∝ β_M(m + m')`, `n' ∝ β_M(m − m')`.
//!
//! G reduces to power iteration on β_M. Restarts begin from uniform random
//! directions and run in parallel; the reduction is by restart index, so the
//! result does not depend on the thread count.

use std::f64::consts::PI;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::chsh::{chsh_value, g_value, GSettings, MeasurementSettings};
use crate::error::{Error, Result};
use crate::quantum::BlochDecomposition;
use crate::rng;

/// Restart values closer than this are ties; the lower index wins.
const TIE_TOLERANCE: f64 = 1e-15;

/// Slack for the per-sweep monotonicity assertion.
const MONOTONE_SLACK: f64 = 1e-12;

/// Upper bound on grid scan evaluations.
pub const MAX_GRID_EVALUATIONS: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_iterations: 500,
            convergence_tol: 1e-12,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig { seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 || !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "optimizer bounds must be positive (restarts {}, max_iterations {}, convergence_tol {})",
                self.restarts, self.max_iterations, self.convergence_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<S> {
    pub value: f64,
    pub settings: S,
    pub iterations_used: usize,
    pub restart_index_of_best: usize,
}

/// One restart of an ascent: final point plus the value after every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent<S> {
    pub settings: S,
    pub value: f64,
    pub history: Vec<f64>,
}

/// Normalizes `v`, falling back to `previous` when `v` vanishes.
fn direction_or(v: Vector3<f64>, previous: Vector3<f64>) -> Vector3<f64> {
    let norm = v.norm();
    if norm > 0.0 && norm.is_finite() {
        v / norm
    } else {
        previous
    }
}

fn run_sweeps<S: Copy>(
    mut settings: S,
    max_iterations: usize,
    tol: f64,
    mut sweep: impl FnMut(&S) -> S,
    objective: impl Fn(&S) -> f64,
) -> Ascent<S> {
    let mut value = objective(&settings);
    let mut history = Vec::with_capacity(max_iterations.min(64) + 1);
    history.push(value);
    for _ in 0..max_iterations {
        let next = sweep(&settings);
        let next_value = objective(&next);
        assert!(
            next_value >= value - MONOTONE_SLACK,
            "ascent decreased the objective: {value} -> {next_value}"
        );
        let change = next_value - value;
        settings = next;
        value = next_value;
        history.push(value);
        if change.abs() < tol {
            break;
        }
    }
    Ascent { settings, value, history }
}

/// Alternating ascent on F from the a-side directions `(n, n')`.
pub fn ascend_f(
    d: &BlochDecomposition,
    n: Vector3<f64>,
    n_prime: Vector3<f64>,
    max_iterations: usize,
    tol: f64,
) -> Ascent<MeasurementSettings> {
    let beta = d.beta;
    let beta_t = beta.transpose();
    let b_side = |s: &MeasurementSettings| {
        let m = direction_or(beta_t * (s.n + s.n_prime), s.m);
        let m_prime = direction_or(beta_t * (s.n - s.n_prime), s.m_prime);
        (m, m_prime)
    };
    let mut start = MeasurementSettings { n, n_prime, m: n, m_prime: n_prime };
    (start.m, start.m_prime) = b_side(&start);

    run_sweeps(
        start,
        max_iterations,
        tol,
        |s| {
            let n = direction_or(beta * (s.m + s.m_prime), s.n);
            let n_prime = direction_or(beta * (s.m - s.m_prime), s.n_prime);
            let mut next = MeasurementSettings { n, n_prime, ..*s };
            (next.m, next.m_prime) = b_side(&next);
            next
        },
        |s| chsh_value(d, s),
    )
}

/// Power iteration for G from the a-side direction `l`.
pub fn ascend_g(d: &BlochDecomposition, l: Vector3<f64>, max_iterations: usize, tol: f64) -> Ascent<GSettings> {
    let beta = d.beta;
    let beta_t = beta.transpose();
    let start = GSettings { l, h: direction_or(beta_t * l, l) };
    run_sweeps(
        start,
        max_iterations,
        tol,
        |s| {
            let l = direction_or(beta * s.h, s.l);
            let h = direction_or(beta_t * l, s.h);
            GSettings { l, h }
        },
        |s| g_value(d, s),
    )
}

fn best_of<S: Copy + Send>(
    cfg: &OptimizerConfig,
    run: impl Fn(&mut rng::StreamRng) -> Ascent<S> + Sync,
) -> OptimizationResult<S> {
    let ascents: Vec<Ascent<S>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| run(&mut rng::stream(cfg.seed, k as u64)))
        .collect();

    let mut best = 0;
    for (k, a) in ascents.iter().enumerate().skip(1) {
        if a.value > ascents[best].value + TIE_TOLERANCE {
            best = k;
        }
    }
    let winner = &ascents[best];
    OptimizationResult {
        value: winner.value,
        settings: winner.settings,
        iterations_used: winner.history.len() - 1,
        restart_index_of_best: best,
    }
}

pub fn maximize_f(d: &BlochDecomposition, cfg: &OptimizerConfig) -> OptimizationResult<MeasurementSettings> {
    best_of(cfg, |rng| {
        let n = rng::unit_vector(rng);
        let n_prime = rng::unit_vector(rng);
        ascend_f(d, n, n_prime, cfg.max_iterations, cfg.convergence_tol)
    })
}

pub fn maximize_g(d: &BlochDecomposition, cfg: &OptimizerConfig) -> OptimizationResult<GSettings> {
    best_of(cfg, |rng| ascend_g(d, rng::unit_vector(rng), cfg.max_iterations, cfg.convergence_tol))
}

fn spherical(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Grid lower bound on F_max.
///
/// `n` and `n'` range over a `resolution × resolution` grid of polar and
/// azimuthal angles each; for fixed `(n, n')` the b-side maximum of a linear
/// functional on the sphere is `|β_Mᵀ(n + n')| + |β_Mᵀ(n − n')|`. Every grid
/// value is attained by actual unit vectors, so the result never exceeds F_max.
pub fn grid_scan_f(d: &BlochDecomposition, resolution: usize) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::ResolutionTooLow(resolution));
    }
    let evaluations = (resolution as f64).powi(4);
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(Error::ResolutionTooHigh { evaluations });
    }
    let directions: Vec<Vector3<f64>> = (0..resolution)
        .flat_map(|i| {
            let theta = PI * i as f64 / (resolution - 1) as f64;
            (0..resolution).map(move |j| spherical(theta, 2.0 * PI * j as f64 / resolution as f64))
        })
        .collect();
    let beta_t = d.beta.transpose();
    let best = directions
        .par_iter()
        .map(|n| {
            directions
                .iter()
                .map(|n_prime| (beta_t * (n + n_prime)).norm() + (beta_t * (n - n_prime)).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::{f_max_analytic, g_max_analytic};
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix3;
    use std::f64::consts::SQRT_2;

    fn werner(alpha: f64) -> BlochDecomposition {
        BlochDecomposition::from_correlations(Matrix3::from_diagonal(&Vector3::new(alpha, alpha, -alpha)))
    }

    #[test]
    fn bell_state_reaches_tsirelson() {
        let r = maximize_f(&werner(1.0), &OptimizerConfig::default());
        assert_abs_diff_eq!(r.value, 2.0 * SQRT_2, epsilon = 1e-7);
        assert_eq!(r.value, chsh_value(&werner(1.0), &r.settings));
    }

    #[test]
    fn zero_beta_stays_at_zero() {
        let d = BlochDecomposition::from_correlations(Matrix3::zeros());
        assert_eq!(maximize_f(&d, &OptimizerConfig::default()).value, 0.0);
        assert_eq!(maximize_g(&d, &OptimizerConfig::default()).value, 0.0);
        assert_eq!(grid_scan_f(&d, 8).unwrap(), 0.0);
    }

    #[test]
    fn werner_values() {
        let r = maximize_f(&werner(0.7), &OptimizerConfig::default());
        assert_abs_diff_eq!(r.value, 1.4 * SQRT_2, epsilon = 1e-7);
        let g = maximize_g(&werner(0.4), &OptimizerConfig::default());
        assert_abs_diff_eq!(g.value, 0.8, epsilon = 1e-7);
        assert_eq!(g.value, g_value(&werner(0.4), &g.settings));
    }

    #[test]
    fn ascent_history_is_monotone() {
        let d = BlochDecomposition {
            u: Vector3::zeros(),
            v: Vector3::zeros(),
            beta: Matrix3::new(0.3, -0.1, 0.05, 0.2, 0.4, 0.0, -0.1, 0.1, -0.25),
        };
        let a = ascend_f(&d, Vector3::x(), Vector3::new(0.0, 0.6, 0.8), 500, 1e-14);
        assert!(a.history.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK));
        assert_abs_diff_eq!(a.value, f_max_analytic(&d).0, epsilon = 1e-9);
        let g = ascend_g(&d, Vector3::y(), 500, 1e-14);
        assert!(g.history.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK));
        assert_abs_diff_eq!(g.value, g_max_analytic(&d).0, epsilon = 1e-9);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let d = BlochDecomposition {
            u: Vector3::zeros(),
            v: Vector3::zeros(),
            beta: Matrix3::new(0.5, 0.1, 0.0, -0.2, 0.3, 0.1, 0.0, 0.05, -0.2),
        };
        let cfg = OptimizerConfig::with_seed(7);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (maximize_f(&d, &cfg), maximize_g(&d, &cfg)))
        };
        let serial = run(1);
        let parallel = run(4);
        assert_eq!(serial, parallel);
        assert_eq!(serial.0.value.to_bits(), parallel.0.value.to_bits());
    }

    #[test]
    fn grid_scan_bounds() {
        let bell = grid_scan_f(&werner(1.0), 24).unwrap();
        assert!(bell >= 2.78 && bell <= 2.0 * SQRT_2 + 1e-12, "{bell}");

        let w = Vector3::new(0.3, -0.4, 0.5);
        let r = Vector3::new(1.0, 1.0, -0.5).normalize();
        let rank_one = BlochDecomposition::from_correlations(w * r.transpose() / w.norm());
        assert!(grid_scan_f(&rank_one, 24).unwrap() <= 2.0 + 1e-12);
    }

    #[test]
    fn grid_scan_resolution_limits() {
        let d = werner(0.5);
        assert_eq!(grid_scan_f(&d, 7), Err(Error::ResolutionTooLow(7)));
        assert!(matches!(grid_scan_f(&d, 200), Err(Error::ResolutionTooHigh { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig { restarts: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
