//! Constructors for the state families used throughout the crate.

use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::chsh::MeasurementSettings;
use crate::error::{Error, Result};
use crate::quantum::{
    kron, pure_density, spin_operator, validate_density, BlochDecomposition, DensityMatrix, Matrix2c, Matrix4c,
    Vector4c, DEFAULT_TOLERANCE,
};
use crate::rng;

/// Largest mixture size accepted by [`StateSpec::RandomMixed`].
pub const MAX_MIXTURE_SIZE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|01⟩ − |10⟩)/√2`
    PsiMinus,
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiPlus => "psi_plus",
            BellState::PsiMinus => "psi_minus",
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BellState::ALL.into_iter().find(|b| b.name() == name)
    }

    pub fn amplitudes(self) -> Vector4c {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellState::PsiPlus => Vector4::new(z, h, h, z),
            BellState::PsiMinus => Vector4::new(z, h, -h, z),
            BellState::PhiPlus => Vector4::new(h, z, z, h),
            BellState::PhiMinus => Vector4::new(h, z, z, -h),
        }
    }
}

/// A named state family with its parameters, or an explicit matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Bell(BellState),
    /// `k1|01⟩ + k2|10⟩`, normalized.
    Pure0110 { k1: f64, k2: f64 },
    /// `k1|00⟩ + k2|11⟩`, normalized.
    Pure0011 { k1: f64, k2: f64 },
    /// `(1 − α) I/4 + α |ψ⁺⟩⟨ψ⁺|`, α ∈ [0, 1].
    Werner { alpha: f64 },
    /// `(I + u·σ)/2 ⊗ (I + v·σ)/2`.
    Product { u: Vector3<f64>, v: Vector3<f64> },
    /// Mixture of `size` random pure states with flat simplex weights.
    RandomMixed { seed: u64, size: usize },
    Explicit(Matrix4c),
}

impl StateSpec {
    pub fn family(&self) -> &'static str {
        match self {
            StateSpec::Bell(BellState::PsiPlus) => "bell_psi_plus",
            StateSpec::Bell(BellState::PsiMinus) => "bell_psi_minus",
            StateSpec::Bell(BellState::PhiPlus) => "bell_phi_plus",
            StateSpec::Bell(BellState::PhiMinus) => "bell_phi_minus",
            StateSpec::Pure0110 { .. } => "pure_01_10",
            StateSpec::Pure0011 { .. } => "pure_00_11",
            StateSpec::Werner { .. } => "werner",
            StateSpec::Product { .. } => "product",
            StateSpec::RandomMixed { .. } => "random_mixed",
            StateSpec::Explicit(_) => "explicit",
        }
    }
}

fn normalized_pair(k1: f64, k2: f64) -> Result<(f64, f64)> {
    let norm = k1.hypot(k2);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidParameter(format!("k1 = {k1}, k2 = {k2}: need k1² + k2² > 0")));
    }
    Ok((k1 / norm, k2 / norm))
}

fn single_qubit(bloch: &Vector3<f64>) -> Matrix2c {
    (Matrix2c::identity() + spin_operator(bloch)) * Complex64::from(0.5)
}

pub fn build(spec: &StateSpec) -> Result<DensityMatrix> {
    let c = |x: f64| Complex64::new(x, 0.0);
    match *spec {
        StateSpec::Bell(b) => pure_density(&b.amplitudes()),
        StateSpec::Pure0110 { k1, k2 } => {
            let (k1, k2) = normalized_pair(k1, k2)?;
            pure_density(&Vector4::new(c(0.0), c(k1), c(k2), c(0.0)))
        }
        StateSpec::Pure0011 { k1, k2 } => {
            let (k1, k2) = normalized_pair(k1, k2)?;
            pure_density(&Vector4::new(c(k1), c(0.0), c(0.0), c(k2)))
        }
        StateSpec::Werner { alpha } => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::InvalidParameter(format!("werner alpha = {alpha} is outside [0, 1]")));
            }
            let bell = pure_density(&BellState::PsiPlus.amplitudes())?;
            let m = Matrix4c::identity() * c((1.0 - alpha) / 4.0) + bell.matrix() * c(alpha);
            validate_density(&m, DEFAULT_TOLERANCE)
        }
        StateSpec::Product { u, v } => {
            for (name, b) in [("u", u), ("v", v)] {
                if !(b.norm() <= 1.0 + 1e-12) {
                    return Err(Error::InvalidParameter(format!(
                        "product Bloch vector {name} has norm {} > 1",
                        b.norm()
                    )));
                }
            }
            validate_density(&kron(&single_qubit(&u), &single_qubit(&v)), DEFAULT_TOLERANCE)
        }
        StateSpec::RandomMixed { seed, size } => random_mixed(seed, size),
        StateSpec::Explicit(ref m) => validate_density(m, DEFAULT_TOLERANCE),
    }
}

fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R) -> Vector4c {
    Vector4::from_fn(|_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Mixture of `size` Gaussian-random pure states with Dirichlet(1, …, 1) weights.
pub fn random_mixed(seed: u64, size: usize) -> Result<DensityMatrix> {
    if size == 0 || size > MAX_MIXTURE_SIZE {
        return Err(Error::InvalidParameter(format!(
            "mixture size {size} is outside 1..={MAX_MIXTURE_SIZE}"
        )));
    }
    let mut rng = rng::stream(seed, 0);
    let weights: Vec<f64> = (0..size).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = Matrix4c::zeros();
    for w in weights {
        let psi = random_amplitudes(&mut rng);
        let psi = psi / Complex64::from(psi.norm());
        m += psi * psi.adjoint() * Complex64::from(w / total);
    }
    validate_density(&m, DEFAULT_TOLERANCE)
}

/// The seeded random physical state used by the property suites: seed `k`
/// mixes `1 + k % 8` pure states.
pub fn random_state(seed: u64) -> DensityMatrix {
    random_mixed(seed, 1 + (seed % 8) as usize).expect("random mixtures are physical")
}

/// Uniformly random rotation in SO(3).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let q = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from_vector(q));
    Rotation3::from(q).into_inner()
}

/// The explicit optimum for `k1|01⟩ + k2|10⟩` (after normalizing `k1, k2`):
/// all axes lie in the x-z plane with
/// `n = (sgn(k1k2), 0, 0)`, `n' = (0, 0, −1)`,
/// `m, m' = (2|k1k2|, 0, ±1)/√(1 + 4k1²k2²)`.
pub fn explicit_pure_optimum(k1: f64, k2: f64) -> Result<MeasurementSettings> {
    if k1 * k2 == 0.0 || !(k1 * k2).is_finite() {
        return Err(Error::FactorizableState);
    }
    let (k1, k2) = normalized_pair(k1, k2)?;
    let p = 2.0 * (k1 * k2).abs();
    let scale = 1.0 / (1.0 + p * p).sqrt();
    MeasurementSettings::new(
        Vector3::new((k1 * k2).signum(), 0.0, 0.0),
        Vector3::new(0.0, 0.0, -1.0),
        Vector3::new(p * scale, 0.0, scale),
        Vector3::new(p * scale, 0.0, -scale),
    )
}

/// A state with zero Bloch vectors and the given correlation matrix.
pub fn correlation_state(beta: Matrix3<f64>) -> Result<DensityMatrix> {
    crate::quantum::reconstruct_density(&BlochDecomposition::from_correlations(beta))
}
