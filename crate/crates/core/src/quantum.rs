//! Two-qubit density matrices and their Pauli (Bloch) decomposition.
//!
//! Basis order is `|00>, |01>, |10>, |11>` at indices 0..3, with the first
//! ket belonging to particle `a`. Tensor products are therefore
//! `A ⊗ B` with `A` acting on particle `a`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;

/// Default tolerance for Hermiticity, trace and positivity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrix by index: 0 is the identity, 1..=3 are σx, σy, σz.
pub fn pauli(index: usize) -> Matrix2c {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {index} out of range 0..=3"),
    }
}

pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

/// `σ_i ⊗ σ_j` with Pauli indices as in [`pauli`].
pub fn pauli_product(i: usize, j: usize) -> Matrix4c {
    kron(&pauli(i), &pauli(j))
}

/// Spin projection `σ·n`.
pub fn spin_operator(n: &Vector3<f64>) -> Matrix2c {
    pauli(1) * Complex64::from(n.x) + pauli(2) * Complex64::from(n.y) + pauli(3) * Complex64::from(n.z)
}

fn trace4(m: &Matrix4c) -> Complex64 {
    m[(0, 0)] + m[(1, 1)] + m[(2, 2)] + m[(3, 3)]
}

fn hermitian_deviation(m: &Matrix4c) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// A validated two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4c);

impl DensityMatrix {
    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4c {
        self.0
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = linalg::hermitian_eigenvalues(&self.0);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        trace4(&(self.0 * self.0)).re
    }

    /// Number of eigenvalues above `tolerance`.
    pub fn rank(&self, tolerance: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tolerance).count()
    }
}

/// Checks Hermiticity, trace and positivity within `tolerance`.
///
/// The returned state is the Hermitian part `(ρ + ρ†)/2` of the input, with
/// the trace rescaled to one unless it already equals one to rounding.
pub fn validate_density(matrix: &Matrix4c, tolerance: f64) -> Result<DensityMatrix> {
    let deviation = hermitian_deviation(matrix);
    if deviation > tolerance {
        return Err(Error::NotHermitian { deviation, tolerance });
    }
    let mut rho = (matrix + matrix.adjoint()) * Complex64::from(0.5);

    let trace = trace4(&rho).re;
    if (trace - 1.0).abs() > tolerance {
        return Err(Error::TraceNotOne { trace, tolerance });
    }
    // Leaves an already-normalized matrix untouched so validation is idempotent.
    if (trace - 1.0).abs() > 4.0 * f64::EPSILON {
        rho /= Complex64::from(trace);
    }

    let min_eigenvalue = linalg::hermitian_eigenvalues(&rho)[0];
    if min_eigenvalue < -tolerance {
        return Err(Error::NotPositive { min_eigenvalue, tolerance });
    }
    Ok(DensityMatrix(rho))
}

/// `|ψ⟩⟨ψ|` for the normalized amplitudes.
pub fn pure_density(amplitudes: &Vector4c) -> Result<DensityMatrix> {
    let norm = amplitudes.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let psi = amplitudes / Complex64::from(norm);
    validate_density(&(psi * psi.adjoint()), DEFAULT_TOLERANCE)
}

/// Bloch vectors of both particles and the 3x3 correlation matrix β_M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDecomposition {
    pub u: Vector3<f64>,
    pub v: Vector3<f64>,
    pub beta: Matrix3<f64>,
}

impl BlochDecomposition {
    pub fn from_correlations(beta: Matrix3<f64>) -> Self {
        BlochDecomposition {
            u: Vector3::zeros(),
            v: Vector3::zeros(),
            beta,
        }
    }

    /// β_M read row-major as the 9-component correlation vector.
    pub fn correlation_vector(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.beta[(i, j)];
            }
        }
        out
    }

    /// Frobenius norm |β|.
    pub fn beta_norm(&self) -> f64 {
        self.beta.norm()
    }

    /// Applies local rotations: `u → R_a u`, `v → R_b v`, `β → R_a β R_bᵀ`.
    pub fn rotated(&self, r_a: &Matrix3<f64>, r_b: &Matrix3<f64>) -> Self {
        BlochDecomposition {
            u: r_a * self.u,
            v: r_b * self.v,
            beta: r_a * self.beta * r_b.transpose(),
        }
    }
}

pub fn decompose_bloch(rho: &DensityMatrix) -> BlochDecomposition {
    let m = rho.matrix();
    let expect = |i: usize, j: usize| {
        let t = trace4(&(m * pauli_product(i, j)));
        debug_assert!(t.im.abs() <= 1e-10, "imaginary Pauli coefficient {}", t.im);
        t.re
    };
    BlochDecomposition {
        u: Vector3::from_fn(|i, _| expect(i + 1, 0)),
        v: Vector3::from_fn(|j, _| expect(0, j + 1)),
        beta: Matrix3::from_fn(|i, j| expect(i + 1, j + 1)),
    }
}

/// Assembles `¼(I⊗I + u·σ⊗I + I⊗v·σ + Σ β_ij σ_i⊗σ_j)` without validation.
pub fn assemble_density(d: &BlochDecomposition) -> Matrix4c {
    let mut m = pauli_product(0, 0);
    for i in 0..3 {
        m += pauli_product(i + 1, 0) * Complex64::from(d.u[i]);
        m += pauli_product(0, i + 1) * Complex64::from(d.v[i]);
        for j in 0..3 {
            m += pauli_product(i + 1, j + 1) * Complex64::from(d.beta[(i, j)]);
        }
    }
    m * Complex64::from(0.25)
}

/// Inverse of [`decompose_bloch`]; fails with `NotPositive` when the triple
/// `(u, v, β)` is not a physical state.
pub fn reconstruct_density(d: &BlochDecomposition) -> Result<DensityMatrix> {
    validate_density(&assemble_density(d), DEFAULT_TOLERANCE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    A,
    B,
}

/// Partial trace over the other particle.
pub fn reduced_state(rho: &DensityMatrix, particle: Particle) -> Matrix2c {
    let m = rho.matrix();
    Matrix2::from_fn(|r, c| match particle {
        Particle::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
        Particle::B => m[(r, c)] + m[(2 + r, 2 + c)],
    })
}

/// `Tr[ρ·op]` for a Hermitian operator.
pub fn operator_expectation(rho: &DensityMatrix, op: &Matrix4c) -> Result<f64> {
    let deviation = hermitian_deviation(op);
    if deviation > DEFAULT_TOLERANCE {
        return Err(Error::NotHermitianOperator { deviation });
    }
    let t = trace4(&(rho.matrix() * op));
    debug_assert!(t.im.abs() <= 1e-10 * op.norm().max(1.0));
    Ok(t.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn psi_plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        pure_density(&Vector4::new(c(0.0), c(h), c(h), c(0.0))).unwrap()
    }

    fn max_entry_diff(a: &Matrix4c, b: &Matrix4c) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = validate_density(&(Matrix4::identity() * c(0.25)), DEFAULT_TOLERANCE).unwrap();
        for ev in rho.eigenvalues() {
            assert_abs_diff_eq!(ev, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn bell_state_is_rank_one() {
        let rho = psi_plus();
        assert_eq!(rho.rank(1e-10), 1);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn negative_diagonal_is_rejected() {
        let m = Matrix4::from_diagonal(&Vector4::new(c(0.5), c(0.6), c(-0.1), c(0.0)));
        match validate_density(&m, DEFAULT_TOLERANCE) {
            Err(Error::NotPositive { min_eigenvalue, .. }) => assert_abs_diff_eq!(min_eigenvalue, -0.1, epsilon = 1e-15),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn non_hermitian_and_bad_trace_are_rejected() {
        let mut m = Matrix4::identity() * c(0.25);
        m[(0, 1)] = c(0.1);
        assert!(matches!(validate_density(&m, DEFAULT_TOLERANCE), Err(Error::NotHermitian { .. })));
        let m = Matrix4::identity() * c(0.3);
        assert!(matches!(validate_density(&m, DEFAULT_TOLERANCE), Err(Error::TraceNotOne { .. })));
    }

    #[test]
    fn validation_symmetrizes_rounded_input() {
        let mut m = psi_plus().into_matrix();
        m[(1, 2)] += c(3e-12);
        let rho = validate_density(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(rho.matrix()[(1, 2)], rho.matrix()[(2, 1)].conj());
        let again = validate_density(rho.matrix(), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(again, rho);
    }

    #[test]
    fn pure_density_normalizes() {
        let a = pure_density(&Vector4::new(c(0.0), c(1.0), c(0.0), c(0.0))).unwrap();
        let b = pure_density(&Vector4::new(c(0.0), c(2.0), c(0.0), c(0.0))).unwrap();
        assert_eq!(a, b);
        assert_eq!(*a.matrix(), Matrix4::from_diagonal(&Vector4::new(c(0.0), c(1.0), c(0.0), c(0.0))));
        assert_eq!(pure_density(&Vector4::zeros()), Err(Error::ZeroVector));
    }

    #[test]
    fn pure_density_ignores_global_phase() {
        let amps = Vector4::new(c(0.3), Complex64::new(0.1, 0.5), c(-0.2), Complex64::new(0.0, 0.7));
        let phase = Complex64::from_polar(1.0, 1.234);
        let a = pure_density(&amps).unwrap();
        let b = pure_density(&(amps * phase)).unwrap();
        assert!(max_entry_diff(a.matrix(), b.matrix()) < 1e-15);
    }

    #[test]
    fn bell_state_correlations() {
        let d = decompose_bloch(&psi_plus());
        assert_abs_diff_eq!(d.u, Vector3::zeros(), epsilon = 1e-15);
        assert_abs_diff_eq!(d.v, Vector3::zeros(), epsilon = 1e-15);
        assert_abs_diff_eq!(d.beta, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)), epsilon = 1e-15);
    }

    #[test]
    fn reconstruct_rejects_unphysical_correlations() {
        let d = BlochDecomposition::from_correlations(Matrix3::identity());
        match reconstruct_density(&d) {
            Err(Error::NotPositive { min_eigenvalue, .. }) => assert_abs_diff_eq!(min_eigenvalue, -0.5, epsilon = 1e-14),
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn reconstruct_known_states() {
        let d = BlochDecomposition::from_correlations(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)));
        let rho = reconstruct_density(&d).unwrap();
        assert!(max_entry_diff(rho.matrix(), psi_plus().matrix()) < 1e-15);
        let mixed = reconstruct_density(&BlochDecomposition::from_correlations(Matrix3::zeros())).unwrap();
        assert_eq!(*mixed.matrix(), Matrix4::identity() * c(0.25));
    }

    #[test]
    fn reduced_states() {
        let half = Matrix2::identity() * c(0.5);
        assert!((reduced_state(&psi_plus(), Particle::A) - half).norm() < 1e-15);
        let zz = validate_density(&Matrix4::from_diagonal(&Vector4::new(c(1.0), c(0.0), c(0.0), c(0.0))), 1e-12).unwrap();
        assert_eq!(reduced_state(&zz, Particle::A), Matrix2::new(c(1.0), c(0.0), c(0.0), c(0.0)));
        // |01>: particle a in |0>, particle b in |1>.
        let ket01 = pure_density(&Vector4::new(c(0.0), c(1.0), c(0.0), c(0.0))).unwrap();
        assert_eq!(reduced_state(&ket01, Particle::B), Matrix2::new(c(0.0), c(0.0), c(0.0), c(1.0)));
    }

    #[test]
    fn expectation_values() {
        let mixed = validate_density(&(Matrix4::identity() * c(0.25)), 1e-12).unwrap();
        assert_eq!(operator_expectation(&mixed, &pauli_product(3, 3)).unwrap(), 0.0);
        assert_abs_diff_eq!(operator_expectation(&psi_plus(), &pauli_product(1, 1)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(operator_expectation(&psi_plus(), &pauli_product(3, 3)).unwrap(), -1.0, epsilon = 1e-15);
        let mut bad = pauli_product(1, 1);
        bad[(0, 3)] = c(2.0);
        assert!(matches!(operator_expectation(&mixed, &bad), Err(Error::NotHermitianOperator { .. })));
    }

    #[test]
    fn pauli_products_are_orthogonal() {
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        if (i == 0 && j == 0) || (k == 0 && l == 0) {
                            continue;
                        }
                        let t = trace4(&(pauli_product(i, j) * pauli_product(k, l)));
                        let expected = if i == k && j == l { 4.0 } else { 0.0 };
                        assert_abs_diff_eq!(t.re, expected, epsilon = 1e-15);
                        assert_abs_diff_eq!(t.im, 0.0, epsilon = 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_order_puts_particle_a_first() {
        // σz ⊗ I is +1 on |0x> and -1 on |1x>.
        let zi = pauli_product(3, 0);
        let diag: Vec<f64> = (0..4).map(|k| zi[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }
}
