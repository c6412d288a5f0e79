//! State input files.
//!
//! A state file is a JSON object in one of two shapes:
//!
//! ```json
//! {"family": "werner", "params": {"alpha": 0.5}}
//! {"matrix": [[[re, im], [re, im], [re, im], [re, im]], ...]}
//! ```
//!
//! Matrices are 4 rows of 4 complex entries, row-major, basis order
//! `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! | family | params |
//! |--------|--------|
//! | `bell_psi_plus`, `bell_psi_minus`, `bell_phi_plus`, `bell_phi_minus` | none |
//! | `bell` | `which`: `psi_plus` … `phi_minus` |
//! | `pure_01_10`, `pure_00_11` | `k1`, optional `k2` (defaults to `√(1 − k1²)`) |
//! | `werner` | `alpha` in [0, 1] |
//! | `product` | `u`, `v`: Bloch 3-vectors |
//! | `random_mixed` | `seed`, `size` |
//! | `explicit` | (uses `matrix`) |

use std::path::Path;

use chsh_meter::{BellState, Matrix4c, StateSpec};
use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

/// Row-major 4x4 complex matrix as `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixRows>,
}

pub fn matrix_to_rows(m: &Matrix4c) -> MatrixRows {
    (0..4)
        .map(|r| (0..4).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &MatrixRows) -> Result<Matrix4c> {
    if rows.len() != 4 {
        return Err(CliError::input(format!("matrix: expected 4 rows, found {}", rows.len())));
    }
    let mut m = Matrix4c::zeros();
    for (r, row) in rows.iter().enumerate() {
        if row.len() != 4 {
            return Err(CliError::input(format!("matrix[{r}]: expected 4 entries, found {}", row.len())));
        }
        for (c, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(CliError::input(format!("matrix[{r}][{c}]: entry is not finite")));
            }
            m[(r, c)] = Complex64::new(*re, *im);
        }
    }
    Ok(m)
}

fn empty_params() -> Map<String, Value> {
    Map::new()
}

fn param<'a>(params: &'a Map<String, Value>, family: &str, key: &str) -> Result<&'a Value> {
    params
        .get(key)
        .ok_or_else(|| CliError::input(format!("params.{key}: required for family '{family}'")))
}

fn param_f64(params: &Map<String, Value>, family: &str, key: &str) -> Result<f64> {
    param(params, family, key)?
        .as_f64()
        .ok_or_else(|| CliError::input(format!("params.{key}: expected a number")))
}

fn param_u64(params: &Map<String, Value>, family: &str, key: &str) -> Result<u64> {
    param(params, family, key)?
        .as_u64()
        .ok_or_else(|| CliError::input(format!("params.{key}: expected a non-negative integer")))
}

fn param_vec3(params: &Map<String, Value>, family: &str, key: &str) -> Result<Vector3<f64>> {
    let bad = || CliError::input(format!("params.{key}: expected an array of 3 numbers"));
    let arr = param(params, family, key)?.as_array().ok_or_else(bad)?;
    if arr.len() != 3 {
        return Err(bad());
    }
    let mut v = Vector3::zeros();
    for (i, x) in arr.iter().enumerate() {
        v[i] = x.as_f64().ok_or_else(bad)?;
    }
    Ok(v)
}

/// `k2` defaults to `√(1 − k1²)` for the one-parameter pure families.
fn pure_pair(params: &Map<String, Value>, family: &str) -> Result<(f64, f64)> {
    let k1 = param_f64(params, family, "k1")?;
    let k2 = match params.get("k2") {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| CliError::input("params.k2: expected a number"))?,
        None => {
            if !(-1.0..=1.0).contains(&k1) {
                return Err(CliError::input(format!("params.k1 = {k1}: must lie in [-1, 1] when k2 is omitted")));
            }
            (1.0 - k1 * k1).max(0.0).sqrt()
        }
    };
    Ok((k1, k2))
}

fn bell_from(which: &str) -> Result<BellState> {
    BellState::from_name(which).ok_or_else(|| {
        CliError::input(format!(
            "unknown Bell state '{which}' (expected psi_plus, psi_minus, phi_plus or phi_minus)"
        ))
    })
}

/// Resolves a family name and its parameters to a state spec.
pub fn family_spec(family: &str, params: &Map<String, Value>) -> Result<StateSpec> {
    if let Some(which) = family.strip_prefix("bell_") {
        return Ok(StateSpec::Bell(bell_from(which)?));
    }
    match family {
        "bell" => {
            let which = param(params, family, "which")?
                .as_str()
                .ok_or_else(|| CliError::input("params.which: expected a string"))?;
            Ok(StateSpec::Bell(bell_from(which)?))
        }
        "pure_01_10" => {
            let (k1, k2) = pure_pair(params, family)?;
            Ok(StateSpec::Pure0110 { k1, k2 })
        }
        "pure_00_11" => {
            let (k1, k2) = pure_pair(params, family)?;
            Ok(StateSpec::Pure0011 { k1, k2 })
        }
        "werner" => Ok(StateSpec::Werner { alpha: param_f64(params, family, "alpha")? }),
        "product" => Ok(StateSpec::Product {
            u: param_vec3(params, family, "u")?,
            v: param_vec3(params, family, "v")?,
        }),
        "random_mixed" => {
            let size = param_u64(params, family, "size")?;
            Ok(StateSpec::RandomMixed {
                seed: param_u64(params, family, "seed")?,
                size: usize::try_from(size).map_err(|_| CliError::input("params.size: too large"))?,
            })
        }
        other => Err(CliError::input(format!("unknown family '{other}'"))),
    }
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::input(format!("state file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Input(msg) => CliError::input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_spec(&self) -> Result<StateSpec> {
        match (&self.family, &self.matrix) {
            (None, Some(rows)) => Ok(StateSpec::Explicit(rows_to_matrix(rows)?)),
            (Some(f), Some(rows)) if f == "explicit" => Ok(StateSpec::Explicit(rows_to_matrix(rows)?)),
            (Some(f), Some(_)) => Err(CliError::input(format!("family '{f}' does not take a matrix"))),
            (Some(f), None) if f == "explicit" => Err(CliError::input("family 'explicit' needs a matrix")),
            (Some(f), None) => family_spec(f, self.params.as_ref().unwrap_or(&empty_params())),
            (None, None) => Err(CliError::input("state file needs either 'family' or 'matrix'")),
        }
    }

    pub fn from_spec(spec: &StateSpec) -> Self {
        let mut params = Map::new();
        let mut matrix = None;
        match spec {
            StateSpec::Bell(_) => {}
            StateSpec::Pure0110 { k1, k2 } | StateSpec::Pure0011 { k1, k2 } => {
                params.insert("k1".into(), (*k1).into());
                params.insert("k2".into(), (*k2).into());
            }
            StateSpec::Werner { alpha } => {
                params.insert("alpha".into(), (*alpha).into());
            }
            StateSpec::Product { u, v } => {
                params.insert("u".into(), Value::from(u.as_slice().to_vec()));
                params.insert("v".into(), Value::from(v.as_slice().to_vec()));
            }
            StateSpec::RandomMixed { seed, size } => {
                params.insert("seed".into(), (*seed).into());
                params.insert("size".into(), (*size as u64).into());
            }
            StateSpec::Explicit(m) => matrix = Some(matrix_to_rows(m)),
        }
        if matrix.is_some() {
            return StateFile { family: None, params: None, matrix };
        }
        StateFile {
            family: Some(spec.family().to_string()),
            params: (!params.is_empty()).then_some(params),
            matrix: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_files_parse() {
        let spec = StateFile::parse(r#"{"family": "werner", "params": {"alpha": 0.5}}"#).unwrap().to_spec().unwrap();
        assert_eq!(spec, StateSpec::Werner { alpha: 0.5 });
        let spec = StateFile::parse(r#"{"family": "bell", "params": {"which": "phi_minus"}}"#).unwrap().to_spec().unwrap();
        assert_eq!(spec, StateSpec::Bell(BellState::PhiMinus));
        let spec = StateFile::parse(r#"{"family": "bell_psi_plus"}"#).unwrap().to_spec().unwrap();
        assert_eq!(spec, StateSpec::Bell(BellState::PsiPlus));
        let spec = StateFile::parse(r#"{"family": "pure_01_10", "params": {"k1": 0.6}}"#).unwrap().to_spec().unwrap();
        match spec {
            StateSpec::Pure0110 { k1, k2 } => assert!((k1 - 0.6).abs() < 1e-15 && (k2 - 0.8).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matrix_file_parses() {
        let text = r#"{"matrix": [
            [[0.25,0],[0,0],[0,0],[0,0]],
            [[0,0],[0.25,0],[0,0],[0,0]],
            [[0,0],[0,0],[0.25,0],[0,0]],
            [[0,0],[0,0],[0,0],[0.25,0]]]}"#;
        match StateFile::parse(text).unwrap().to_spec().unwrap() {
            StateSpec::Explicit(m) => assert_eq!(m, Matrix4c::identity() * Complex64::from(0.25)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_context() {
        let err = StateFile::parse("{\"family\": \"werner\",\n \"params\": {\"alpha\": }}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = StateFile::parse(r#"{"family": "werner"}"#).unwrap().to_spec().unwrap_err();
        assert!(err.to_string().contains("params.alpha"), "{err}");
        let err = StateFile::parse(r#"{"matrix": [[[1,0]]]}"#).unwrap().to_spec().unwrap_err();
        assert!(err.to_string().contains("expected 4 rows"), "{err}");
        let err = StateFile::parse(r#"{"family": "werner", "colour": 1}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(StateFile::parse(r#"{"family": "ghz"}"#).unwrap().to_spec().is_err());
    }

    #[test]
    fn specs_round_trip_through_files() {
        let specs = [
            StateSpec::Bell(BellState::PsiMinus),
            StateSpec::Pure0011 { k1: 0.3, k2: 0.9 },
            StateSpec::Werner { alpha: 0.25 },
            StateSpec::Product { u: Vector3::new(0.1, 0.2, 0.3), v: Vector3::z() },
            StateSpec::RandomMixed { seed: 4, size: 3 },
            StateSpec::Explicit(Matrix4c::identity() * Complex64::from(0.25)),
        ];
        for spec in specs {
            let text = serde_json::to_string(&StateFile::from_spec(&spec)).unwrap();
            assert_eq!(StateFile::parse(&text).unwrap().to_spec().unwrap(), spec, "{text}");
        }
    }
}
