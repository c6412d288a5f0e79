//! Bell/CHSH analysis of two-qubit density matrices.
//!
//! The crate computes the maximal CHSH value `F_max`, the single-term maximum
//! `G_max`, the entanglement degree `P_E = √((F_max/2)² − (G_max/2)²)`, the
//! optimal measurement axes with their commutator vectors, and the rank of
//! the correlation matrix β_M. The analytic path ([`chsh`]) goes through the
//! singular values of β_M; [`oracle`] maximizes over measurement directions
//! directly and is used to cross-check it.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩`; the first ket is particle `a`.

pub mod chsh;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod quantum;
pub mod rng;
pub mod shots;
pub mod states;

pub use chsh::{
    chsh_value, classify, classify_with, commutator_vectors, correlation_rank, entanglement_degree, f_max_analytic,
    g_max_analytic, g_value, geometric_identity, inequality_report, t_vector, ChshReport, ClassifyOptions, GSettings,
    IdentityResiduals, InequalityReport, MeasurementSettings, TVector,
};
pub use error::{Error, Result};
pub use oracle::{grid_scan_f, maximize_f, maximize_g, OptimizationResult, OptimizerConfig};
pub use quantum::{
    decompose_bloch, operator_expectation, pure_density, reconstruct_density, reduced_state, validate_density,
    BlochDecomposition, DensityMatrix, Matrix2c, Matrix4c, Particle, Vector4c,
};
pub use shots::{estimate_chsh, estimate_correlation, joint_probabilities, ChshEstimate, ShotEstimate};
pub use states::{build, explicit_pure_optimum, BellState, StateSpec};
