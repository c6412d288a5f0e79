//! The machine-readable analysis report.

use chsh_meter::chsh::{self, ChshReport};
use chsh_meter::oracle::{self, OptimizerConfig};
use chsh_meter::{decompose_bloch, shots, BlochDecomposition, DensityMatrix, StateSpec};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::input::{matrix_to_rows, MatrixRows, StateFile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn arr3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochSection {
    pub u: [f64; 3],
    pub v: [f64; 3],
    /// Row-major correlation matrix β_M.
    pub beta: [[f64; 3]; 3],
}

impl From<&BlochDecomposition> for BlochSection {
    fn from(d: &BlochDecomposition) -> Self {
        BlochSection {
            u: arr3(&d.u),
            v: arr3(&d.v),
            beta: std::array::from_fn(|i| std::array::from_fn(|j| d.beta[(i, j)])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsF {
    pub n: [f64; 3],
    pub n_prime: [f64; 3],
    pub m: [f64; 3],
    pub m_prime: [f64; 3],
}

impl From<&chsh_meter::MeasurementSettings> for SettingsF {
    fn from(s: &chsh_meter::MeasurementSettings) -> Self {
        SettingsF {
            n: arr3(&s.n),
            n_prime: arr3(&s.n_prime),
            m: arr3(&s.m),
            m_prime: arr3(&s.m_prime),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsG {
    pub l: [f64; 3],
    pub h: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSection {
    pub f_max: f64,
    pub g_max: f64,
    pub p_e: f64,
    pub singular_values: [f64; 3],
    pub beta_norm: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub x_vec: [f64; 3],
    pub y_vec: [f64; 3],
    pub x_norm: f64,
    pub y_norm: f64,
    pub beta_rank: usize,
    pub entangled: bool,
    pub chsh_violation: bool,
    /// `F_max > G_max`: the generalized bound `|F| ≤ G_max` is violated.
    pub generalized_violation: bool,
    pub maximal_violation_residual: f64,
    /// `[| |X||Y| − 4 G P / F² |, | |X||Y| − sin 2η |]`, absent when F_max ≈ 0.
    pub identity_residuals: Option<[f64; 2]>,
    pub settings_f: SettingsF,
    pub settings_g: SettingsG,
}

impl ReportSection {
    pub fn new(report: &ChshReport, rho: &DensityMatrix) -> Self {
        let ineq = chsh::inequality_report(rho);
        ReportSection {
            f_max: report.f_max,
            g_max: report.g_max,
            p_e: report.p_e,
            singular_values: report.singular_values,
            beta_norm: report.beta_norm,
            gamma: report.gamma,
            delta: report.delta,
            eta: report.eta,
            x_vec: arr3(&report.x_vec),
            y_vec: arr3(&report.y_vec),
            x_norm: report.x_norm(),
            y_norm: report.y_norm(),
            beta_rank: report.beta_rank,
            entangled: report.entangled,
            chsh_violation: ineq.chsh_violation,
            generalized_violation: ineq.violation,
            maximal_violation_residual: ineq.maximal_violation_residual,
            identity_residuals: chsh::geometric_identity(report)
                .ok()
                .map(|r| [r.against_maxima, r.against_eta]),
            settings_f: (&report.settings_f).into(),
            settings_g: SettingsG {
                l: arr3(&report.settings_g.l),
                h: arr3(&report.settings_g.h),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub restarts: usize,
    pub f_max: f64,
    pub g_max: f64,
    pub p_e: f64,
    pub delta_f: f64,
    pub delta_g: f64,
    pub iterations_f: usize,
    pub iterations_g: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotSection {
    pub shots_per_term: u64,
    /// `E(A,B), E(A,B'), E(A',B), E(A',B')`
    pub terms: [f64; 4],
    pub term_standard_errors: [f64; 4],
    pub estimate: f64,
    pub standard_error: f64,
    pub analytic: f64,
}

impl ShotSection {
    pub fn new(est: &shots::ChshEstimate, shots_per_term: u64, analytic: f64) -> Self {
        ShotSection {
            shots_per_term,
            terms: est.terms.map(|t| t.mean),
            term_standard_errors: est.terms.map(|t| t.standard_error),
            estimate: est.estimate,
            standard_error: est.standard_error,
            analytic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub tool_version: String,
    pub seed: u64,
    pub input: StateFile,
    /// The validated density matrix, in state-file matrix layout.
    pub density: MatrixRows,
    pub bloch: BlochSection,
    pub report: ReportSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<ShotSection>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyzeOptions {
    pub seed: u64,
    /// Restarts for the optimizer cross-check; `None` skips it.
    pub oracle_restarts: Option<usize>,
    /// Shots per CHSH term at the F-optimal settings; `None` skips sampling.
    pub shots: Option<u64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            oracle_restarts: None,
            shots: None,
        }
    }
}

pub fn analyze(spec: &StateSpec, rho: &DensityMatrix, options: &AnalyzeOptions) -> AnalysisDocument {
    let d = decompose_bloch(rho);
    let report = chsh::classify(rho);

    let oracle = options.oracle_restarts.map(|restarts| {
        let cfg = OptimizerConfig {
            restarts,
            seed: options.seed,
            ..Default::default()
        };
        let f = oracle::maximize_f(&d, &cfg);
        let g = oracle::maximize_g(&d, &cfg);
        OracleSection {
            restarts,
            f_max: f.value,
            g_max: g.value,
            p_e: chsh::degree_from_maxima(f.value, g.value),
            delta_f: (f.value - report.f_max).abs(),
            delta_g: (g.value - report.g_max).abs(),
            iterations_f: f.iterations_used,
            iterations_g: g.iterations_used,
        }
    });

    let shots = options.shots.map(|n| {
        let est = shots::estimate_chsh(rho, &report.settings_f, n, options.seed);
        ShotSection::new(&est, n, report.f_max)
    });

    AnalysisDocument {
        tool_version: TOOL_VERSION.to_string(),
        seed: options.seed,
        input: StateFile::from_spec(spec),
        density: matrix_to_rows(rho.matrix()),
        bloch: (&d).into(),
        report: ReportSection::new(&report, rho),
        oracle,
        shots,
    }
}

impl AnalysisDocument {
    /// Flattened scalar fields for CSV output, in a fixed order.
    pub fn csv_fields(&self) -> Vec<(&'static str, String)> {
        let r = &self.report;
        let mut out = vec![
            ("f_max", fmt17(r.f_max)),
            ("g_max", fmt17(r.g_max)),
            ("p_e", fmt17(r.p_e)),
            ("s1", fmt17(r.singular_values[0])),
            ("s2", fmt17(r.singular_values[1])),
            ("s3", fmt17(r.singular_values[2])),
            ("beta_norm", fmt17(r.beta_norm)),
            ("gamma", fmt17(r.gamma)),
            ("delta", fmt17(r.delta)),
            ("eta", fmt17(r.eta)),
            ("x_norm", fmt17(r.x_norm)),
            ("y_norm", fmt17(r.y_norm)),
            ("beta_rank", r.beta_rank.to_string()),
            ("entangled", r.entangled.to_string()),
            ("chsh_violation", r.chsh_violation.to_string()),
            ("generalized_violation", r.generalized_violation.to_string()),
        ];
        if let Some(o) = &self.oracle {
            out.push(("oracle_f_max", fmt17(o.f_max)));
            out.push(("oracle_g_max", fmt17(o.g_max)));
            out.push(("oracle_delta_f", fmt17(o.delta_f)));
            out.push(("oracle_delta_g", fmt17(o.delta_g)));
        }
        if let Some(s) = &self.shots {
            out.push(("shots_per_term", s.shots_per_term.to_string()));
            out.push(("shot_estimate", fmt17(s.estimate)));
            out.push(("shot_standard_error", fmt17(s.standard_error)));
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}
