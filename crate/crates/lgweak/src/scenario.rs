//! Scenario documents: JSON in, validated [`ScenarioConfig`] out.
//!
//! A scenario file names the system pair, the pre/post states, the coupling
//! strength and the pointer parameters:
//!
//! ```json
//! {
//!   "a": "sigma_z⊗I",
//!   "b": "I⊗sigma_z",
//!   "pre": [[0.57735026918962584, 0.0], ...],
//!   "post": [[0.5, 0.0], [0.5, 0.0], [0.5, 0.0], [0.5, 0.0]],
//!   "g": 0.01,
//!   "l": 2,
//!   "sigma": 1.0,
//!   "hbar": 1.0,
//!   "grid": { "n": 256, "extent": 27.712812921102035 }
//! }
//! ```
//!
//! Observables are either preset names (`I`, `sigma_x`, `sigma_y`,
//! `sigma_z`, or tensor products of those joined with `⊗`) or explicit
//! Hermitian matrices as nested `[re, im]` pairs. States are complex
//! vectors; they must arrive normalized unless `"normalize_states": true`
//! asks the parser to rescale them. `hbar` defaults to 1 and the grid to
//! n = 256 with extent 16σ√(|l|+1).
//!
//! Every type invariant is enforced at parse time, so a `ScenarioConfig`
//! handed to the simulation is valid by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::{EvolutionError, ScenarioConfig};
use crate::probe::{GridSpec, DEFAULT_EXTENT_FACTOR, DEFAULT_GRID_N};
use crate::quantum::{tensor_product, Observable, QuantumError, SystemState};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    Validation(String),
}

fn validation(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ObservableDoc {
    Preset(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Serialize, Deserialize)]
struct GridDoc {
    n: Option<usize>,
    extent: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    a: ObservableDoc,
    b: ObservableDoc,
    pre: Vec<[f64; 2]>,
    post: Vec<[f64; 2]>,
    g: f64,
    l: i32,
    sigma: f64,
    hbar: Option<f64>,
    grid: Option<GridDoc>,
    normalize_states: Option<bool>,
}

fn preset_factor(name: &str) -> Option<Observable> {
    match name.trim() {
        "I" => Some(Observable::identity(2)),
        "sigma_x" => Some(Observable::pauli_x()),
        "sigma_y" => Some(Observable::pauli_y()),
        "sigma_z" => Some(Observable::pauli_z()),
        _ => None,
    }
}

fn build_observable(doc: &ObservableDoc, which: &str) -> Result<Observable, ScenarioError> {
    match doc {
        ObservableDoc::Preset(name) => {
            let mut acc: Option<Observable> = None;
            for part in name.split('⊗') {
                let factor = preset_factor(part).ok_or_else(|| {
                    validation(format!(
                        "observable.{which}: unknown preset {:?} (want I, sigma_x, sigma_y, \
                         sigma_z, or ⊗-products of those)",
                        part.trim()
                    ))
                })?;
                acc = Some(match acc {
                    None => factor,
                    Some(left) => tensor_product(&left, &factor),
                });
            }
            acc.ok_or_else(|| validation(format!("observable.{which}: empty preset")))
        }
        ObservableDoc::Matrix(rows) => {
            let dim = rows.len();
            if dim == 0 || rows.iter().any(|r| r.len() != dim) {
                return Err(validation(format!("observable.{which} matrix is not square")));
            }
            let mut m = DMatrix::zeros(dim, dim);
            for (j, row) in rows.iter().enumerate() {
                for (k, &[re, im]) in row.iter().enumerate() {
                    m[(j, k)] = Complex64::new(re, im);
                }
            }
            Observable::new(m).map_err(|e| match e {
                QuantumError::NotHermitian { .. } => {
                    validation(format!("observable.{which} not Hermitian"))
                }
                other => validation(format!("observable.{which}: {other}")),
            })
        }
    }
}

fn build_state(
    amps: &[[f64; 2]],
    which: &str,
    normalize: bool,
) -> Result<SystemState, ScenarioError> {
    let v = DVector::from_iterator(
        amps.len(),
        amps.iter().map(|&[re, im]| Complex64::new(re, im)),
    );
    let built = if normalize {
        SystemState::normalized(v)
    } else {
        SystemState::new(v)
    };
    built.map_err(|e| match e {
        QuantumError::NotNormalized { norm_sq } => validation(format!(
            "state.{which} not normalized (Σ|a|² = {norm_sq}); set \"normalize_states\": true \
             to rescale"
        )),
        other => validation(format!("state.{which}: {other}")),
    })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(text)?;
    let normalize = doc.normalize_states.unwrap_or(false);

    let a = build_observable(&doc.a, "a")?;
    let b = build_observable(&doc.b, "b")?;
    let pre = build_state(&doc.pre, "pre", normalize)?;
    let post = build_state(&doc.post, "post", normalize)?;

    let hbar = doc.hbar.unwrap_or(1.0);
    let grid_doc = doc.grid.unwrap_or(GridDoc {
        n: None,
        extent: None,
    });
    let n = grid_doc.n.unwrap_or(DEFAULT_GRID_N);
    let extent = grid_doc.extent.unwrap_or_else(|| {
        DEFAULT_EXTENT_FACTOR * doc.sigma * ((doc.l.unsigned_abs() + 1) as f64).sqrt()
    });
    let grid =
        GridSpec::new(n, extent, hbar).map_err(|e| validation(format!("grid: {e}")))?;

    ScenarioConfig::new(a, b, pre, post, doc.g, doc.l, doc.sigma, grid).map_err(|e| match e {
        EvolutionError::DimensionMismatch { left, right } => validation(format!(
            "dimension mismatch between observables and states: {left} vs {right}"
        )),
        other => validation(other.to_string()),
    })
}

/// Canonical serialization: presets expanded to explicit matrices, defaults
/// filled in. Parsing the output reproduces the same configuration, and
/// re-serializing it is a fixed point.
pub fn canonical_json(sc: &ScenarioConfig) -> String {
    #[derive(Serialize)]
    struct Canonical {
        a: Vec<Vec<[f64; 2]>>,
        b: Vec<Vec<[f64; 2]>>,
        pre: Vec<[f64; 2]>,
        post: Vec<[f64; 2]>,
        g: f64,
        l: i32,
        sigma: f64,
        hbar: f64,
        grid: CanonicalGrid,
    }
    #[derive(Serialize)]
    struct CanonicalGrid {
        n: usize,
        extent: f64,
    }

    let matrix = |o: &Observable| -> Vec<Vec<[f64; 2]>> {
        let m = o.matrix();
        (0..m.nrows())
            .map(|j| (0..m.ncols()).map(|k| [m[(j, k)].re, m[(j, k)].im]).collect())
            .collect()
    };
    let vector = |s: &SystemState| -> Vec<[f64; 2]> {
        s.vector().iter().map(|a| [a.re, a.im]).collect()
    };

    let canonical = Canonical {
        a: matrix(&sc.a),
        b: matrix(&sc.b),
        pre: vector(&sc.pre),
        post: vector(&sc.post),
        g: sc.g,
        l: sc.l,
        sigma: sc.sigma,
        hbar: sc.hbar(),
        grid: CanonicalGrid {
            n: sc.grid.n(),
            extent: sc.grid.extent(),
        },
    };
    serde_json::to_string_pretty(&canonical).expect("scenario serialization cannot fail")
}
