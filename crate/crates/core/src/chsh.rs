//! Analytic CHSH maximization from the singular values of β_M.
//!
//! With `β_M = Σ s_i a_i b_iᵀ` (s1 ≥ s2 ≥ s3 ≥ 0):
//!
//! * `F_max = 2√(s1² + s2²)`, reached at `n = a1`, `n' = a2`,
//!   `m, m' = cosθ·b1 ± sinθ·b2` with `tanθ = s2/s1`;
//! * `G_max = 2·s1`, reached at `l = a1`, `h = b1`;
//! * `P_E = √((F_max/2)² − (G_max/2)²)`, which works out to `s2`.
//!
//! The brute-force optimizer in [`crate::oracle`] checks all three.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{svd3, Svd3};
use crate::quantum::{decompose_bloch, kron, spin_operator, BlochDecomposition, DensityMatrix, Matrix4c};

/// Unit-norm tolerance for measurement directions.
pub const UNIT_TOLERANCE: f64 = 1e-12;
/// States with `p_e` above this are classified as entangled.
pub const DEFAULT_CLASSIFICATION_THRESHOLD: f64 = 1e-9;
/// Relative singular-value cutoff for the rank of β_M.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-9;
/// `f_max` must exceed `g_max` by this much to count as a violation of `|F| ≤ G_max`.
pub const VIOLATION_MARGIN: f64 = 1e-9;
/// Below this `f_max`, the commutator identity is undefined.
pub const DEGENERATE_F_MAX: f64 = 1e-12;

fn check_unit(name: &'static str, v: &Vector3<f64>) -> Result<()> {
    let norm = v.norm();
    if (norm - 1.0).abs() > UNIT_TOLERANCE || !norm.is_finite() {
        return Err(Error::NotUnitVector { name, norm });
    }
    Ok(())
}

/// Spin-projection axes `n, n'` for particle a and `m, m'` for particle b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    pub n: Vector3<f64>,
    pub n_prime: Vector3<f64>,
    pub m: Vector3<f64>,
    pub m_prime: Vector3<f64>,
}

impl MeasurementSettings {
    pub fn new(n: Vector3<f64>, n_prime: Vector3<f64>, m: Vector3<f64>, m_prime: Vector3<f64>) -> Result<Self> {
        check_unit("n", &n)?;
        check_unit("n'", &n_prime)?;
        check_unit("m", &m)?;
        check_unit("m'", &m_prime)?;
        Ok(MeasurementSettings { n, n_prime, m, m_prime })
    }

    /// The `(ê1, ê2, ê1, ê2)` fallback used when every setting is optimal.
    pub fn canonical() -> Self {
        MeasurementSettings {
            n: Vector3::x(),
            n_prime: Vector3::y(),
            m: Vector3::x(),
            m_prime: Vector3::y(),
        }
    }

    /// The four `(a-side, b-side, sign)` terms of the CHSH combination.
    pub fn terms(&self) -> [(Vector3<f64>, Vector3<f64>, f64); 4] {
        [
            (self.n, self.m, 1.0),
            (self.n, self.m_prime, 1.0),
            (self.n_prime, self.m, 1.0),
            (self.n_prime, self.m_prime, -1.0),
        ]
    }
}

/// Axes `l, h` of the single-term functional `G = 2E(σ·l, σ·h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSettings {
    pub l: Vector3<f64>,
    pub h: Vector3<f64>,
}

impl GSettings {
    pub fn new(l: Vector3<f64>, h: Vector3<f64>) -> Result<Self> {
        check_unit("l", &l)?;
        check_unit("h", &h)?;
        Ok(GSettings { l, h })
    }

    pub fn canonical() -> Self {
        GSettings {
            l: Vector3::x(),
            h: Vector3::x(),
        }
    }
}

/// A 9-vector indexed by `(i, j)`; both T (from CHSH settings) and D (from
/// G settings) have norm 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TVector(pub Matrix3<f64>);

impl TVector {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn components(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[(i, j)];
            }
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn dot(&self, other: &TVector) -> f64 {
        self.0.dot(&other.0)
    }

    /// `D_ij = 2 l_i h_j`.
    pub fn from_g_settings(s: &GSettings) -> Self {
        TVector(2.0 * s.l * s.h.transpose())
    }
}

/// `T_ij = (n_i + n'_i) m_j + (n_i − n'_i) m'_j`.
pub fn t_vector(s: &MeasurementSettings) -> TVector {
    TVector((s.n + s.n_prime) * s.m.transpose() + (s.n - s.n_prime) * s.m_prime.transpose())
}

/// `F = β·T`.
pub fn chsh_value(d: &BlochDecomposition, s: &MeasurementSettings) -> f64 {
    d.beta.dot(&t_vector(s).0)
}

/// `G = 2 lᵀ β_M h`.
pub fn g_value(d: &BlochDecomposition, s: &GSettings) -> f64 {
    2.0 * s.l.dot(&(d.beta * s.h))
}

/// `A⊗B + A⊗B' + A'⊗B − A'⊗B'` as a 4x4 operator.
pub fn chsh_operator(s: &MeasurementSettings) -> Matrix4c {
    s.terms()
        .iter()
        .fold(Matrix4c::zeros(), |acc, (a, b, sign)| {
            acc + kron(&spin_operator(a), &spin_operator(b)) * Complex64::from(*sign)
        })
}

pub fn singular_values_3x3(beta_m: &Matrix3<f64>) -> Svd3 {
    svd3(beta_m)
}

fn f_max_from_svd(svd: &Svd3) -> (f64, MeasurementSettings) {
    let s1 = svd.singular_values[0];
    let s2 = svd.singular_values[1];
    if s1 == 0.0 {
        return (0.0, MeasurementSettings::canonical());
    }
    let theta = s2.atan2(s1);
    let (sin, cos) = theta.sin_cos();
    let (b1, b2) = (svd.right(0), svd.right(1));
    let settings = MeasurementSettings {
        n: svd.left(0),
        n_prime: svd.left(1),
        m: cos * b1 + sin * b2,
        m_prime: cos * b1 - sin * b2,
    };
    (2.0 * s1.hypot(s2), settings)
}

fn g_max_from_svd(svd: &Svd3) -> (f64, GSettings) {
    let s1 = svd.singular_values[0];
    if s1 == 0.0 {
        return (0.0, GSettings::canonical());
    }
    (2.0 * s1, GSettings { l: svd.left(0), h: svd.right(0) })
}

/// `F_max = 2√(s1² + s2²)` and a maximizing setting.
pub fn f_max_analytic(d: &BlochDecomposition) -> (f64, MeasurementSettings) {
    f_max_from_svd(&svd3(&d.beta))
}

/// `G_max = 2·s1` and a maximizing `(l, h)`.
pub fn g_max_analytic(d: &BlochDecomposition) -> (f64, GSettings) {
    g_max_from_svd(&svd3(&d.beta))
}

/// `√((F_max/2)² − (G_max/2)²)`, clamped at zero.
///
/// Evaluated in factored form: when `F_max/2` and `G_max/2` agree to the last
/// bit the result is exactly zero.
pub fn degree_from_maxima(f_max: f64, g_max: f64) -> f64 {
    let (f, g) = (f_max / 2.0, g_max / 2.0);
    ((f - g) * (f + g)).max(0.0).sqrt()
}

pub fn entanglement_degree(d: &BlochDecomposition) -> f64 {
    let svd = svd3(&d.beta);
    degree_from_maxima(f_max_from_svd(&svd).0, g_max_from_svd(&svd).0)
}

/// `X = n × n'`, `Y = m × m'`; `[A, A'] = 2i σ·X` and `[B, B'] = 2i σ·Y`.
pub fn commutator_vectors(s: &MeasurementSettings) -> (Vector3<f64>, Vector3<f64>) {
    (s.n.cross(&s.n_prime), s.m.cross(&s.m_prime))
}

/// Number of singular values above `tolerance · s1` (absolute when `s1 = 0`).
pub fn correlation_rank(beta_m: &Matrix3<f64>, tolerance: f64) -> usize {
    rank_from_singular_values(&svd3(beta_m).singular_values, tolerance)
}

fn rank_from_singular_values(s: &Vector3<f64>, tolerance: f64) -> usize {
    let cutoff = if s[0] > 0.0 { tolerance * s[0] } else { tolerance };
    s.iter().filter(|&&x| x > cutoff).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub classification_threshold: f64,
    pub rank_tolerance: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            classification_threshold: DEFAULT_CLASSIFICATION_THRESHOLD,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }
}

/// Everything the analytic path knows about one state.
///
/// `gamma` and `delta` are the angles with `cos γ = F_max/(2|β|)` and
/// `cos δ = G_max/(2|β|)`; both are π/2 when β = 0. `eta` is the angle between
/// the optimal T and D vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshReport {
    pub f_max: f64,
    pub g_max: f64,
    pub p_e: f64,
    pub singular_values: [f64; 3],
    pub beta_norm: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub x_vec: Vector3<f64>,
    pub y_vec: Vector3<f64>,
    pub beta_rank: usize,
    pub entangled: bool,
    pub settings_f: MeasurementSettings,
    pub settings_g: GSettings,
}

impl ChshReport {
    pub fn x_norm(&self) -> f64 {
        self.x_vec.norm()
    }

    pub fn y_norm(&self) -> f64 {
        self.y_vec.norm()
    }
}

fn angle_from_cos(cos: f64) -> f64 {
    cos.clamp(-1.0, 1.0).acos()
}

pub fn report_for(d: &BlochDecomposition, options: &ClassifyOptions) -> ChshReport {
    let svd = svd3(&d.beta);
    let (f_max, settings_f) = f_max_from_svd(&svd);
    let (g_max, settings_g) = g_max_from_svd(&svd);
    let p_e = degree_from_maxima(f_max, g_max);
    let beta_norm = d.beta_norm();
    let (gamma, delta) = if beta_norm > 0.0 {
        (
            angle_from_cos(f_max / (2.0 * beta_norm)),
            angle_from_cos(g_max / (2.0 * beta_norm)),
        )
    } else {
        (FRAC_PI_2, FRAC_PI_2)
    };
    let t = t_vector(&settings_f);
    let dv = TVector::from_g_settings(&settings_g);
    let eta = angle_from_cos(t.dot(&dv) / (t.norm() * dv.norm()));
    let (x_vec, y_vec) = commutator_vectors(&settings_f);
    let s = svd.singular_values;

    ChshReport {
        f_max,
        g_max,
        p_e,
        singular_values: [s[0], s[1], s[2]],
        beta_norm,
        gamma,
        delta,
        eta,
        x_vec,
        y_vec,
        beta_rank: rank_from_singular_values(&s, options.rank_tolerance),
        entangled: p_e > options.classification_threshold,
        settings_f,
        settings_g,
    }
}

pub fn classify(rho: &DensityMatrix) -> ChshReport {
    classify_with(rho, &ClassifyOptions::default())
}

pub fn classify_with(rho: &DensityMatrix, options: &ClassifyOptions) -> ChshReport {
    report_for(&decompose_bloch(rho), options)
}

/// Residuals of `|X||Y| = 4·G_max·P_E / F_max² = sin(2η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// `| |X||Y| − 4·G_max·P_E/F_max² |`
    pub against_maxima: f64,
    /// `| |X||Y| − sin(2η) |`
    pub against_eta: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.against_maxima.max(self.against_eta)
    }
}

pub fn geometric_identity(report: &ChshReport) -> Result<IdentityResiduals> {
    if report.f_max <= DEGENERATE_F_MAX {
        return Err(Error::DegenerateState { f_max: report.f_max });
    }
    let product = report.x_norm() * report.y_norm();
    let from_maxima = 4.0 * report.g_max * report.p_e / (report.f_max * report.f_max);
    Ok(IdentityResiduals {
        against_maxima: (product - from_maxima).abs(),
        against_eta: (product - (2.0 * report.eta).sin()).abs(),
    })
}

/// The generalized bound `|F| ≤ G_max` and its maximal violation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub f_max: f64,
    pub g_max: f64,
    pub p_e: f64,
    pub violation: bool,
    /// `|F_max − 2√((G_max/2)² + P_E²)|`
    pub maximal_violation_residual: f64,
    /// Whether the ordinary CHSH bound `F_max ≤ 2` is exceeded.
    pub chsh_violation: bool,
}

pub fn inequality_report(rho: &DensityMatrix) -> InequalityReport {
    let d = decompose_bloch(rho);
    let svd = svd3(&d.beta);
    let f_max = f_max_from_svd(&svd).0;
    let g_max = g_max_from_svd(&svd).0;
    let p_e = degree_from_maxima(f_max, g_max);
    InequalityReport {
        f_max,
        g_max,
        p_e,
        violation: f_max > g_max + VIOLATION_MARGIN,
        maximal_violation_residual: (f_max - 2.0 * (g_max / 2.0).hypot(p_e)).abs(),
        chsh_violation: f_max > 2.0 + VIOLATION_MARGIN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{operator_expectation, pure_density, reconstruct_density, Vector4c};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn werner_beta(alpha: f64) -> BlochDecomposition {
        BlochDecomposition::from_correlations(Matrix3::from_diagonal(&Vector3::new(alpha, alpha, -alpha)))
    }

    fn pure_0110(k1: f64, k2: f64) -> DensityMatrix {
        let c = |x: f64| Complex64::new(x, 0.0);
        pure_density(&Vector4c::new(c(0.0), c(k1), c(k2), c(0.0))).unwrap()
    }

    fn unit(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z).normalize()
    }

    #[test]
    fn settings_reject_non_unit_vectors() {
        let e = Vector3::x();
        assert!(matches!(
            MeasurementSettings::new(e, e * 1.01, e, e),
            Err(Error::NotUnitVector { name: "n'", .. })
        ));
        assert!(GSettings::new(e, Vector3::zeros()).is_err());
    }

    #[test]
    fn t_vector_with_parallel_a_side() {
        let s = MeasurementSettings::new(Vector3::z(), Vector3::z(), Vector3::z(), Vector3::x()).unwrap();
        let t = t_vector(&s);
        let mut expected = [0.0; 9];
        expected[8] = 2.0;
        assert_eq!(t.components(), expected);
    }

    #[test]
    fn t_vector_direct_expansion() {
        let m = unit(1.0, 0.0, 1.0);
        let s = MeasurementSettings::new(Vector3::x(), Vector3::z(), m, m).unwrap();
        let t = t_vector(&s);
        assert_abs_diff_eq!(t.get(0, 0), SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(t.get(0, 2), SQRT_2, epsilon = 1e-15);
        assert_eq!(t.get(2, 0), 0.0);
        assert_eq!(t.get(2, 2), 0.0);
        assert_abs_diff_eq!(t.norm(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn chsh_value_matches_operator_trace() {
        let rho = pure_0110(0.6, 0.8);
        let d = decompose_bloch(&rho);
        let s = MeasurementSettings::new(unit(1.0, 2.0, -0.5), unit(0.0, 1.0, 1.0), unit(-1.0, 0.3, 0.2), Vector3::z()).unwrap();
        let direct = operator_expectation(&rho, &chsh_operator(&s)).unwrap();
        assert_abs_diff_eq!(chsh_value(&d, &s), direct, epsilon = 1e-14);
    }

    #[test]
    fn zero_correlations_give_zero() {
        let d = BlochDecomposition::from_correlations(Matrix3::zeros());
        assert_eq!(chsh_value(&d, &MeasurementSettings::canonical()), 0.0);
        assert_eq!(g_value(&d, &GSettings::canonical()), 0.0);
        assert_eq!(f_max_analytic(&d), (0.0, MeasurementSettings::canonical()));
        assert_eq!(g_max_analytic(&d), (0.0, GSettings::canonical()));
        assert_eq!(entanglement_degree(&d), 0.0);
    }

    #[test]
    fn g_value_on_bell_state() {
        let d = werner_beta(1.0);
        assert_eq!(g_value(&d, &GSettings::new(Vector3::z(), Vector3::z()).unwrap()), -2.0);
        assert_eq!(g_value(&d, &GSettings::new(Vector3::z(), -Vector3::z()).unwrap()), 2.0);
    }

    #[test]
    fn analytic_maxima_for_pure_state() {
        let d = decompose_bloch(&pure_0110(0.6, 0.8));
        let (f, s) = f_max_analytic(&d);
        assert_abs_diff_eq!(f, 2.0 * 1.9216f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(chsh_value(&d, &s), f, epsilon = 1e-12);
        let (g, gs) = g_max_analytic(&d);
        assert_abs_diff_eq!(g, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g_value(&d, &gs), g, epsilon = 1e-12);
        assert_abs_diff_eq!(entanglement_degree(&d), 0.96, epsilon = 1e-12);
    }

    #[test]
    fn analytic_maxima_for_werner() {
        let d = werner_beta(0.5);
        assert_abs_diff_eq!(f_max_analytic(&d).0, SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g_max_analytic(&d).0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(entanglement_degree(&d), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn commutators_of_parallel_axes_vanish() {
        let s = MeasurementSettings::new(Vector3::z(), Vector3::z(), Vector3::x(), Vector3::y()).unwrap();
        let (x, y) = commutator_vectors(&s);
        assert_eq!(x, Vector3::zeros());
        assert_eq!(y, Vector3::z());
    }

    #[test]
    fn bell_optimum_has_unit_commutators() {
        let r = report_for(&werner_beta(1.0), &ClassifyOptions::default());
        assert_abs_diff_eq!(r.x_norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.y_norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(correlation_rank(&Matrix3::zeros(), DEFAULT_RANK_TOLERANCE), 0);
        let w = Vector3::new(1.0, 2.0, 3.0) / 14f64.sqrt();
        assert_eq!(correlation_rank(&(w * Vector3::x().transpose()), DEFAULT_RANK_TOLERANCE), 1);
        assert_eq!(correlation_rank(&werner_beta(0.2).beta, DEFAULT_RANK_TOLERANCE), 3);
    }

    #[test]
    fn geometric_identity_on_werner() {
        let r = report_for(&werner_beta(0.4), &ClassifyOptions::default());
        assert_abs_diff_eq!(r.x_norm() * r.y_norm(), 1.0, epsilon = 1e-14);
        let res = geometric_identity(&r).unwrap();
        assert!(res.max() < 1e-12, "{res:?}");
    }

    #[test]
    fn geometric_identity_on_pure_state() {
        let r = classify(&pure_0110(0.6, 0.8));
        // 4·G·P/F² with G = 2, P = 0.96, F² = 4·1.9216.
        let expected = 4.0 * 2.0 * 0.96 / (4.0 * 1.9216);
        assert_abs_diff_eq!(r.x_norm() * r.y_norm(), expected, epsilon = 1e-12);
        assert!(geometric_identity(&r).unwrap().max() < 1e-10);
    }

    #[test]
    fn geometric_identity_product_state_and_degenerate() {
        let r = classify(&pure_0110(1.0, 0.0));
        assert_eq!(r.p_e, 0.0);
        assert!(r.y_norm() < 1e-12);
        assert!(geometric_identity(&r).unwrap().max() < 1e-12);

        let mixed = reconstruct_density(&BlochDecomposition::from_correlations(Matrix3::zeros())).unwrap();
        assert!(matches!(geometric_identity(&classify(&mixed)), Err(Error::DegenerateState { .. })));
    }

    #[test]
    fn classification_examples() {
        let werner = reconstruct_density(&werner_beta(0.2)).unwrap();
        let r = classify(&werner);
        assert!(r.entangled);
        assert_abs_diff_eq!(r.p_e, 0.2, epsilon = 1e-12);

        let r = classify(&pure_0110(1.0, 0.0));
        assert!(!r.entangled);
        assert_eq!(r.beta_rank, 1);

        let mixed = reconstruct_density(&BlochDecomposition::from_correlations(Matrix3::zeros())).unwrap();
        let r = classify(&mixed);
        assert!(!r.entangled);
        assert_eq!(r.beta_rank, 0);
        assert_eq!(r.gamma, FRAC_PI_2);
    }

    #[test]
    fn angles_match_maxima() {
        let r = classify(&pure_0110(0.6, 0.8));
        assert_abs_diff_eq!(r.gamma.cos(), r.f_max / (2.0 * r.beta_norm), epsilon = 1e-14);
        assert_abs_diff_eq!(r.delta.cos(), r.g_max / (2.0 * r.beta_norm), epsilon = 1e-14);
        assert_abs_diff_eq!(r.p_e, r.beta_norm * (r.gamma.cos().powi(2) - r.delta.cos().powi(2)).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn inequality_reports() {
        let bell = pure_0110(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let rep = inequality_report(&bell);
        assert_abs_diff_eq!(rep.g_max, 2.0, epsilon = 1e-12);
        assert!(rep.violation && rep.chsh_violation);

        let werner = reconstruct_density(&werner_beta(0.2)).unwrap();
        let rep = inequality_report(&werner);
        assert_abs_diff_eq!(rep.f_max, 0.4 * SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.g_max, 0.4, epsilon = 1e-12);
        assert!(rep.violation);
        assert!(!rep.chsh_violation);
        assert!(rep.maximal_violation_residual <= 1e-9);

        let rep = inequality_report(&pure_0110(0.0, 1.0));
        assert!(!rep.violation);
    }
}
