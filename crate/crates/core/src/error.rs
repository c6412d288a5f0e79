use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |rho_ij - conj(rho_ji)| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("trace is {trace} (|tr - 1| = {:e} exceeds {tolerance:e})", (trace - 1.0).abs())]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} is below -{tolerance:e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("operator is not Hermitian: max deviation {deviation:e}")]
    NotHermitianOperator { deviation: f64 },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("{name} is not a unit vector (norm {norm})")]
    NotUnitVector { name: &'static str, norm: f64 },

    #[error("state is degenerate: f_max = {f_max:e}, identity is undefined")]
    DegenerateState { f_max: f64 },

    #[error("grid scan needs {evaluations:e} evaluations, limit is 1e9")]
    ResolutionTooHigh { evaluations: f64 },

    #[error("grid resolution {0} is below the minimum of 8")]
    ResolutionTooLow(usize),

    #[error("factorizable state: k1*k2 = 0 has no noncommuting optimum")]
    FactorizableState,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for the errors that mean "this matrix is not a physical state".
    pub fn is_unphysical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. } | Error::TraceNotOne { .. } | Error::NotPositive { .. }
        )
    }
}
