//! Fixed-size Jacobi kernels.
//!
//! Two routines live here: a cyclic complex Jacobi eigensolver for the 2x2 and
//! 4x4 Hermitian matrices that show up as density matrices and operators, and
//! a one-sided (Hestenes) Jacobi SVD for the 3x3 real correlation matrix.
//! The one-sided variant never forms `M^T M`, so tiny singular values keep
//! their absolute accuracy; a rank-one correlation matrix comes back with
//! trailing singular values at rounding level instead of `sqrt(eps)`.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use num_complex::Complex64;

/// Stop once the off-diagonal Frobenius mass drops below this (scaled by
/// `max(1, ||A||_F)`).
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-14;

/// One-sided Jacobi stops rotating a column pair once their cosine is below this.
const COLUMN_COSINE_TOL: f64 = 1e-15;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `A = V diag(values) V^H` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: SVector<f64, N>,
    pub vectors: SMatrix<Complex64, N, N>,
}

fn off_diagonal_mass<const N: usize>(a: &SMatrix<Complex64, N, N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix. Only the Hermitian part
/// of the input is meaningful; callers validate Hermiticity first.
pub fn hermitian_eigen<const N: usize>(m: &SMatrix<Complex64, N, N>) -> HermitianEigen<N> {
    let mut a = *m;
    let mut v = SMatrix::<Complex64, N, N>::identity();
    let scale = m.norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) < JACOBI_OFF_DIAGONAL_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Phase the (p, q) element real, then apply a real rotation.
                let mut g = SMatrix::<Complex64, N, N>::identity();
                g[(p, p)] = Complex64::new(c, 0.0);
                g[(p, q)] = Complex64::new(s, 0.0);
                g[(q, p)] = -phase.conj() * s;
                g[(q, q)] = phase.conj() * c;

                a = g.adjoint() * a * g;
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                v *= g;
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = SVector::<f64, N>::from_fn(|k, _| a[(order[k], order[k])].re);
    let vectors = SMatrix::<Complex64, N, N>::from_fn(|r, k| v[(r, order[k])]);
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<const N: usize>(m: &SMatrix<Complex64, N, N>) -> SVector<f64, N> {
    hermitian_eigen(m).values
}

/// Thin SVD of a 3x3 real matrix, `M = U diag(s) V^T`.
///
/// Singular values are sorted descending and signs are fixed so that
/// `u_i^T M v_i = s_i >= 0`. Left vectors for zero singular values are
/// completed to an orthonormal basis.
#[derive(Debug, Clone, Copy)]
pub struct Svd3 {
    pub u: Matrix3<f64>,
    pub singular_values: Vector3<f64>,
    pub v: Matrix3<f64>,
}

impl Svd3 {
    pub fn left(&self, i: usize) -> Vector3<f64> {
        self.u.column(i).into_owned()
    }

    pub fn right(&self, i: usize) -> Vector3<f64> {
        self.v.column(i).into_owned()
    }

    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.u * Matrix3::from_diagonal(&self.singular_values) * self.v.transpose()
    }
}

pub fn svd3(m: &Matrix3<f64>) -> Svd3 {
    let mut a = *m;
    let mut v = Matrix3::<f64>::identity();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let alpha = a.column(p).norm_squared();
            let beta = a.column(q).norm_squared();
            let gamma = a.column(p).dot(&a.column(q));
            if gamma == 0.0 || gamma.abs() <= COLUMN_COSINE_TOL * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            for k in 0..3 {
                let (ap, aq) = (a[(k, p)], a[(k, q)]);
                a[(k, p)] = c * ap - s * aq;
                a[(k, q)] = s * ap + c * aq;
                let (vp, vq) = (v[(k, p)], v[(k, q)]);
                v[(k, p)] = c * vp - s * vq;
                v[(k, q)] = s * vp + c * vq;
            }
        }
        if !rotated {
            break;
        }
    }

    let norms = Vector3::from_fn(|i, _| a.column(i).norm());
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let singular_values = Vector3::from_fn(|k, _| norms[order[k]]);
    let v_sorted = Matrix3::from_fn(|r, k| v[(r, order[k])]);

    let mut left: [Option<Vector3<f64>>; 3] = [None, None, None];
    for (k, &col) in order.iter().enumerate() {
        let s = norms[col];
        if s > f64::MIN_POSITIVE {
            left[k] = Some(a.column(col) / s);
        }
    }
    let u_sorted = complete_basis(left);

    Svd3 {
        u: u_sorted,
        singular_values,
        v: v_sorted,
    }
}

/// Fill in missing columns so the three vectors form an orthonormal basis.
/// Present columns come first (sorted by singular value), so only trailing
/// slots can be empty.
fn complete_basis(cols: [Option<Vector3<f64>>; 3]) -> Matrix3<f64> {
    let e = [Vector3::x(), Vector3::y(), Vector3::z()];
    let out = match cols {
        [Some(a), Some(b), Some(c)] => [a, b, c],
        [Some(a), Some(b), None] => [a, b, a.cross(&b).normalize()],
        [Some(a), None, None] => {
            // Pick the axis least aligned with `a` for Gram-Schmidt.
            let axis = e
                .iter()
                .min_by(|x, y| a.dot(x).abs().total_cmp(&a.dot(y).abs()))
                .copied()
                .unwrap();
            let b = (axis - a * a.dot(&axis)).normalize();
            [a, b, a.cross(&b)]
        }
        _ => e,
    };
    Matrix3::from_columns(&out)
}
