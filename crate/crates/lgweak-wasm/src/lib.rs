//! Browser playground for the LG weak-measurement lab.
//!
//! Three operations back a single static page:
//!
//! - mode explorer: intensity |φ_l|² and phase arg φ_l of the probe
//!   φ_l ∝ (x + i·sgn(l)·y)^{|l|} e^{−(x²+y²)/4σ²} as heatmap planes,
//! - measurement run: one preset scenario simulated end to end, returning
//!   the post-selected intensity map and the full report (displacements,
//!   weak-value oracle, every extraction route) as JSON,
//! - convergence sweep: first and second moment residuals against the
//!   perturbative closed forms over a log-spaced ladder of couplings.
//!
//! The same pure functions compile natively, so `cargo test` exercises the
//! demo logic without a wasm toolchain; `#[wasm_bindgen]` wrappers are
//! gated behind `target_arch = "wasm32"`. Heatmap planes are row-major
//! from the top-left screen pixel with x rightward and y upward, so a
//! positive ⟨X̂⟩fi shift moves the ring right and a positive ⟨Ŷ⟩fi shift
//! moves it up.

use lgweak::evolution::{couple_and_postselect, simulate_displacements, ScenarioConfig};
use lgweak::perturbative::analytic_displacements;
use lgweak::probe::{lg_mode, GridSpec, ProbeField, DEFAULT_EXTENT_FACTOR};
use lgweak::quantum::joint_weak_value_report;
use lgweak::scenario::parse_scenario;
use lgweak::sweep::{g_grid, run_once, DEFAULT_EQUAL_SQUARES_TOL};
use serde::Serialize;

/// Side length of the demo grid. 128² keeps a full run near 10 ms natively
/// and well under a frame budget in the browser, while the absolute moment
/// error stays below 1e−10 for |l| ≤ 6 at σ = 1.
pub const DEMO_N: usize = 128;

const MAX_L: i32 = 6;
const MAX_SWEEP_POINTS: usize = 16;

fn demo_grid(l: i32, sigma: f64) -> Result<GridSpec, String> {
    let extent = DEFAULT_EXTENT_FACTOR * sigma * ((l.unsigned_abs() + 1) as f64).sqrt();
    GridSpec::new(DEMO_N, extent, 1.0).map_err(|e| e.to_string())
}

fn check_l(l: i32) -> Result<(), String> {
    if l.abs() > MAX_L {
        return Err(format!("|l| = {} exceeds the demo cap {MAX_L}", l.abs()));
    }
    Ok(())
}

fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "pauli_zz" => Some(include_str!("../../../scenarios/pauli_zz.json")),
        "qubit_xy" => Some(include_str!("../../../scenarios/qubit_xy.json")),
        "identity" => Some(include_str!("../../../scenarios/identity.json")),
        _ => None,
    }
}

/// Parses one of the bundled scenarios and rebinds its coupling, OAM index
/// and grid to the demo values. σ and the system data stay as shipped.
fn preset_config(name: &str, g: f64, l: i32) -> Result<ScenarioConfig, String> {
    let text = preset_text(name).ok_or_else(|| {
        format!("unknown preset {name:?} (want pauli_zz, qubit_xy or identity)")
    })?;
    if !(g > 0.0 && g.is_finite()) {
        return Err(format!("g = {g}, need positive finite"));
    }
    check_l(l)?;
    let mut sc = parse_scenario(text).map_err(|e| e.to_string())?;
    sc.g = g;
    sc.l = l;
    sc.grid = demo_grid(l, sc.sigma)?;
    Ok(sc)
}

/// Reorders a position-space field into a screen plane: element
/// `row·n + col` sits at x = x(col), y = x(n−1−row), so row 0 is the top of
/// the picture and y grows upward.
fn screen_plane(field: &ProbeField, value: impl Fn(usize) -> f64) -> Vec<f64> {
    let n = field.grid().n();
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let iy = n - 1 - row;
        for col in 0..n {
            out.push(value(col * n + iy));
        }
    }
    out
}

/// Intensity and phase of the LG mode, concatenated: the first n² values
/// are |φ|² and the next n² are arg φ in (−π, π]. Fails on σ outside
/// (0, ∞) or |l| above the demo cap.
pub fn mode_maps(l: i32, sigma: f64) -> Result<Vec<f64>, String> {
    check_l(l)?;
    let grid = demo_grid(l, sigma)?;
    let field = lg_mode(l, sigma, grid).map_err(|e| e.to_string())?;
    let amps = field.amplitudes().to_vec();
    let mut out = screen_plane(&field, |k| amps[k].norm_sqr());
    out.extend(screen_plane(&field, |k| amps[k].arg()));
    Ok(out)
}

/// Physical half-extent of the demo grid for axis labels: x spans
/// [−extent/2, extent/2).
pub fn demo_extent(l: i32, sigma: f64) -> Result<f64, String> {
    check_l(l)?;
    Ok(demo_grid(l, sigma)?.extent())
}

/// Runs one preset at the given coupling and OAM index and returns the
/// report as JSON: both probe signs' displacements, post-selection
/// probabilities, the exact weak-value oracle and every applicable
/// extraction route with residuals.
pub fn measure(preset: &str, g: f64, l: i32) -> Result<String, String> {
    let sc = preset_config(preset, g, l)?;
    let report = run_once(&sc, DEFAULT_EQUAL_SQUARES_TOL).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Post-selected pointer intensity |ψ_f(x,y)|² as one screen plane of n²
/// values. The conditioned field is normalized, so the plane integrates to
/// one over the grid.
pub fn post_selected_intensity(preset: &str, g: f64, l: i32) -> Result<Vec<f64>, String> {
    let sc = preset_config(preset, g, l)?;
    let probe = couple_and_postselect(&sc).map_err(|e| e.to_string())?;
    let amps = probe.field.amplitudes().to_vec();
    Ok(screen_plane(&probe.field, |k| amps[k].norm_sqr()))
}

#[derive(Serialize)]
struct ConvergenceCurve {
    g: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
}

/// Sweeps g over a log-spaced ladder and reports, per point, the largest
/// absolute deviation of the simulated first moments (⟨X̂⟩fi, ⟨Ŷ⟩fi) and
/// second moments (⟨{X̂,Ŷ}/2⟩fi, ⟨(X̂²−Ŷ²)/2⟩fi) from the closed forms.
/// JSON shape: `{"g": [..], "first": [..], "second": [..]}`.
pub fn convergence_curve(preset: &str, l: i32, points: usize) -> Result<String, String> {
    if !(2..=MAX_SWEEP_POINTS).contains(&points) {
        return Err(format!("points = {points}, need 2..={MAX_SWEEP_POINTS}"));
    }
    let gs = g_grid(5e-3, 2e-1, points, true)?;
    let mut curve = ConvergenceCurve {
        g: gs.clone(),
        first: Vec::with_capacity(points),
        second: Vec::with_capacity(points),
    };
    let probe_sc = preset_config(preset, gs[0], l)?;
    let oracle = joint_weak_value_report(&probe_sc.pre, &probe_sc.post, &probe_sc.a, &probe_sc.b)
        .map_err(|e| e.to_string())?;
    for &g in &gs {
        let sc = preset_config(preset, g, l)?;
        let (d, _) = simulate_displacements(&sc).map_err(|e| e.to_string())?;
        let model = analytic_displacements(&oracle, l, g);
        curve
            .first
            .push((d.dx - model.dx).abs().max((d.dy - model.dy).abs()));
        curve
            .second
            .push((d.dxy - model.dxy).abs().max((d.dx2y2h - model.dx2y2h).abs()));
    }
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen(start)]
    fn start() {
        console_error_panic_hook::set_once();
    }

    #[wasm_bindgen]
    pub fn grid_side() -> usize {
        super::DEMO_N
    }

    #[wasm_bindgen]
    pub fn mode_maps(l: i32, sigma: f64) -> Result<Vec<f64>, JsValue> {
        super::mode_maps(l, sigma).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn demo_extent(l: i32, sigma: f64) -> Result<f64, JsValue> {
        super::demo_extent(l, sigma).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn measure(preset: &str, g: f64, l: i32) -> Result<String, JsValue> {
        super::measure(preset, g, l).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn post_selected_intensity(preset: &str, g: f64, l: i32) -> Result<Vec<f64>, JsValue> {
        super::post_selected_intensity(preset, g, l).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn convergence_curve(preset: &str, l: i32, points: usize) -> Result<String, JsValue> {
        super::convergence_curve(preset, l, points).map_err(|e| JsValue::from_str(&e))
    }
}
