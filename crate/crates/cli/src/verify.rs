//! Cross-checks the analytic path against the optimizer on random states.

use chsh_meter::chsh::{self, report_for, ClassifyOptions};
use chsh_meter::oracle::{self, OptimizerConfig};
use chsh_meter::states::random_state;
use chsh_meter::decompose_bloch;
use rayon::prelude::*;
use serde::Serialize;

/// Default pass threshold for every check.
pub const DEFAULT_TOLERANCE: f64 = 1e-7;

/// The identity residuals are only checked above this F_max.
const IDENTITY_MIN_F_MAX: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|maximize_f − F_max|`
    OracleF,
    /// `|maximize_g − G_max|`
    OracleG,
    /// `|F(settings_f) − F_max|`
    SettingsF,
    /// `|P_E − s2|`
    DegreeVsSingularValue,
    /// Largest geometric identity residual.
    GeometricIdentity,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::OracleF,
        Check::OracleG,
        Check::SettingsF,
        Check::DegreeVsSingularValue,
        Check::GeometricIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::OracleF => "oracle_f",
            Check::OracleG => "oracle_g",
            Check::SettingsF => "settings_f",
            Check::DegreeVsSingularValue => "p_e_vs_s2",
            Check::GeometricIdentity => "geometric_identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub state_seed: u64,
    pub check: Check,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Worst {
    pub check: Check,
    pub delta: f64,
    pub state_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub count: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub worst: Vec<Worst>,
    pub failures: Vec<Failure>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Deltas for the state with the given seed, in [`Check::ALL`] order.
fn check_state(state_seed: u64, restarts: usize) -> Vec<(Check, f64)> {
    let d = decompose_bloch(&random_state(state_seed));
    let report = report_for(&d, &ClassifyOptions::default());
    let cfg = OptimizerConfig {
        restarts,
        seed: state_seed,
        ..Default::default()
    };
    let of = oracle::maximize_f(&d, &cfg).value;
    let og = oracle::maximize_g(&d, &cfg).value;

    let mut out = vec![
        (Check::OracleF, (of - report.f_max).abs()),
        (Check::OracleG, (og - report.g_max).abs()),
        (Check::SettingsF, (chsh::chsh_value(&d, &report.settings_f) - report.f_max).abs()),
        (Check::DegreeVsSingularValue, (report.p_e - report.singular_values[1]).abs()),
    ];
    if report.f_max > IDENTITY_MIN_F_MAX {
        if let Ok(res) = chsh::geometric_identity(&report) {
            out.push((Check::GeometricIdentity, res.max()));
        }
    }
    out
}

/// Checks `count` random states with seeds `seed, seed + 1, …`.
pub fn verify(count: usize, seed: u64, tolerance: f64, restarts: usize) -> VerifySummary {
    let per_state: Vec<(u64, Vec<(Check, f64)>)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            (s, check_state(s, restarts))
        })
        .collect();

    let mut worst: Vec<Worst> = Check::ALL
        .iter()
        .map(|&check| Worst { check, delta: 0.0, state_seed: seed })
        .collect();
    let mut failures = Vec::new();
    for (state_seed, deltas) in per_state {
        for (check, delta) in deltas {
            let w = worst.iter_mut().find(|w| w.check == check).unwrap();
            if delta > w.delta {
                *w = Worst { check, delta, state_seed };
            }
            if !(delta <= tolerance) {
                failures.push(Failure { state_seed, check, delta });
            }
        }
    }
    VerifySummary {
        count,
        seed,
        tolerance,
        worst,
        failures,
    }
}
