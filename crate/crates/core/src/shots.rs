//! Finite-shot estimates of spin correlations, as a Bell experiment would
//! record them.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;

use crate::chsh::MeasurementSettings;
use crate::quantum::{kron, spin_operator, DensityMatrix, Matrix2c};
use crate::rng;

/// Outcome probabilities indexed `[(+,+), (+,−), (−,+), (−,−)]`.
pub type JointProbabilities = [f64; 4];

/// Products `a·b` for the outcomes in [`JointProbabilities`] order.
const OUTCOME_PRODUCTS: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

fn projector(dir: &Vector3<f64>, sign: f64) -> Matrix2c {
    (Matrix2c::identity() + spin_operator(dir) * Complex64::from(sign)) * Complex64::from(0.5)
}

/// Born-rule probabilities for measuring `σ·a_dir` on particle a and `σ·b_dir`
/// on particle b.
pub fn joint_probabilities(rho: &DensityMatrix, a_dir: &Vector3<f64>, b_dir: &Vector3<f64>) -> JointProbabilities {
    let mut p = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let op = kron(&projector(a_dir, sa), &projector(b_dir, sb));
        p[k] = (rho.matrix() * op).trace().re;
    }
    // Rounding can leave tiny negatives on boundary states.
    if p.iter().any(|&x| x < 0.0) {
        p.iter_mut().for_each(|x| *x = x.max(0.0));
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    pub shots: u64,
    pub standard_error: f64,
    pub seed: u64,
}

fn sample_outcome<R: Rng + ?Sized>(rng: &mut R, p: &JointProbabilities) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate().take(3) {
        acc += pk;
        if u < acc {
            return k;
        }
    }
    // Remaining mass; skip trailing zero-probability outcomes.
    (0..4).rev().find(|&k| p[k] > 0.0).unwrap_or(3)
}

/// Empirical `E(A, B)` from `shots` i.i.d. outcome pairs.
///
/// # Panics
/// If `shots` is zero.
pub fn estimate_correlation(
    rho: &DensityMatrix,
    a_dir: &Vector3<f64>,
    b_dir: &Vector3<f64>,
    shots: u64,
    seed: u64,
) -> ShotEstimate {
    assert!(shots >= 1, "need at least one shot");
    let p = joint_probabilities(rho, a_dir, b_dir);
    let mut rng = rng::stream(seed, 0);
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        counts[sample_outcome(&mut rng, &p)] += 1;
    }
    let sum: f64 = counts.iter().zip(OUTCOME_PRODUCTS).map(|(&c, s)| c as f64 * s).sum();
    let n = shots as f64;
    let mean = sum / n;
    // Outcomes are ±1, so the sample second moment is exactly 1.
    let standard_error = if shots > 1 {
        ((1.0 - mean * mean).max(0.0) * n / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    ShotEstimate { mean, shots, standard_error, seed }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshEstimate {
    /// Per-term estimates in the order `(A,B), (A,B'), (A',B), (A',B')`.
    pub terms: [ShotEstimate; 4],
    pub estimate: f64,
    pub standard_error: f64,
}

/// `Ê(A,B) + Ê(A,B') + Ê(A',B) − Ê(A',B')`; term `k` uses seed `seed ^ k`.
pub fn estimate_chsh(rho: &DensityMatrix, settings: &MeasurementSettings, shots_per_term: u64, seed: u64) -> ChshEstimate {
    let terms = settings.terms();
    let estimates: [ShotEstimate; 4] =
        std::array::from_fn(|k| estimate_correlation(rho, &terms[k].0, &terms[k].1, shots_per_term, seed ^ k as u64));
    let estimate = estimates.iter().zip(&terms).map(|(e, t)| t.2 * e.mean).sum();
    let standard_error = estimates.iter().map(|e| e.standard_error.powi(2)).sum::<f64>().sqrt();
    ChshEstimate {
        terms: estimates,
        estimate,
        standard_error,
    }
}
