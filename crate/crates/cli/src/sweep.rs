//! One-parameter sweeps over a state family.

use chsh_meter::{build, classify, StateSpec};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Werner states with α at or below this are separable (the cited bound).
pub const WERNER_SEPARABLE_BOUND: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// Parameter α.
    Werner,
    /// Parameter k1, with k2 = √(1 − k1²).
    Pure0110,
    /// Parameter k1, with k2 = √(1 − k1²).
    Pure0011,
}

impl SweepFamily {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "werner" => Ok(SweepFamily::Werner),
            "pure_01_10" => Ok(SweepFamily::Pure0110),
            "pure_00_11" => Ok(SweepFamily::Pure0011),
            other => Err(CliError::input(format!(
                "family '{other}' has no single sweep parameter (use werner, pure_01_10 or pure_00_11)"
            ))),
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            SweepFamily::Werner => "alpha",
            SweepFamily::Pure0110 | SweepFamily::Pure0011 => "k1",
        }
    }

    fn spec(self, x: f64) -> StateSpec {
        let k2 = || (1.0 - x * x).max(0.0).sqrt();
        match self {
            SweepFamily::Werner => StateSpec::Werner { alpha: x },
            SweepFamily::Pure0110 => StateSpec::Pure0110 { k1: x, k2: k2() },
            SweepFamily::Pure0011 => StateSpec::Pure0011 { k1: x, k2: k2() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub f_max: f64,
    pub g_max: f64,
    pub p_e: f64,
    pub beta_rank: usize,
    pub entangled: bool,
    /// Werner only: α ≤ 1/3.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable_per_cited_bound: Option<bool>,
}

/// Grid points `from + i·step` for `i = 0, 1, …` while the point stays within
/// `to` (up to a 1e-9 relative step slack).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !from.is_finite() || !to.is_finite() || !step.is_finite() || step <= 0.0 || to < from {
        return Err(CliError::input(format!("empty range: from {from} to {to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

pub fn sweep(family: SweepFamily, from: f64, to: f64, step: f64) -> Result<Vec<SweepRow>> {
    if family != SweepFamily::Werner && (from < 0.0 || to > 1.0) {
        return Err(CliError::input(format!("k1 range [{from}, {to}] must lie within [0, 1]")));
    }
    grid(from, to, step)?
        .into_iter()
        .map(|x| {
            let rho = build(&family.spec(x))?;
            let r = classify(&rho);
            Ok(SweepRow {
                param: x,
                f_max: r.f_max,
                g_max: r.g_max,
                p_e: r.p_e,
                beta_rank: r.beta_rank,
                entangled: r.entangled,
                separable_per_cited_bound: (family == SweepFamily::Werner).then_some(x <= WERNER_SEPARABLE_BOUND),
            })
        })
        .collect()
}
