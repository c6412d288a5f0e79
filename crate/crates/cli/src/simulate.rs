//! Finite-shot CHSH estimates at chosen or optimal settings.

use chsh_meter::{classify, decompose_bloch, shots, DensityMatrix, MeasurementSettings, StateSpec};
use chsh_meter::chsh::chsh_value;
use serde::Serialize;

use crate::document::SettingsF;
use crate::error::{CliError, Result};
use crate::input::StateFile;

#[derive(Debug, Clone, PartialEq)]
pub enum SettingsSource {
    /// The analytic F-maximizing settings of the state.
    OptimalF,
    Explicit(MeasurementSettings),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub input: StateFile,
    pub seed: u64,
    pub shots_per_term: u64,
    pub settings: SettingsF,
    /// `E(A,B), E(A,B'), E(A',B), E(A',B')`
    pub terms: [f64; 4],
    pub term_standard_errors: [f64; 4],
    pub estimate: f64,
    pub standard_error: f64,
    /// Exact F at the same settings.
    pub analytic: f64,
    pub p_e: f64,
}

pub fn simulate(
    spec: &StateSpec,
    rho: &DensityMatrix,
    source: &SettingsSource,
    shots_per_term: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if shots_per_term == 0 {
        return Err(CliError::input("--shots must be at least 1"));
    }
    let report = classify(rho);
    let settings = match source {
        SettingsSource::OptimalF => report.settings_f,
        SettingsSource::Explicit(s) => *s,
    };
    let est = shots::estimate_chsh(rho, &settings, shots_per_term, seed);
    Ok(SimulationReport {
        input: StateFile::from_spec(spec),
        seed,
        shots_per_term,
        settings: (&settings).into(),
        terms: est.terms.map(|t| t.mean),
        term_standard_errors: est.terms.map(|t| t.standard_error),
        estimate: est.estimate,
        standard_error: est.standard_error,
        analytic: chsh_value(&decompose_bloch(rho), &settings),
        p_e: report.p_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chsh_meter::build;

    #[test]
    fn werner_estimate_stays_below_two() {
        let spec = StateSpec::Werner { alpha: 0.2 };
        let rho = build(&spec).unwrap();
        let r = simulate(&spec, &rho, &SettingsSource::OptimalF, 200_000, 0).unwrap();
        assert!((r.analytic - 0.4 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((r.estimate - r.analytic).abs() < 6.0 * r.standard_error);
        assert!(r.estimate < 2.0);
    }

    #[test]
    fn zero_shots_rejected() {
        let spec = StateSpec::Werner { alpha: 0.5 };
        let rho = build(&spec).unwrap();
        assert!(simulate(&spec, &rho, &SettingsSource::OptimalF, 0, 0).is_err());
    }
}
