//! Shared fixtures for the integration suites: reference scenarios, an
//! independent quadrature oracle for pointer moments, a log-log order
//! estimator, and a seeded generator of random weak-value reports.

#![allow(dead_code)]

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lgweak::evolution::ScenarioConfig;
use lgweak::probe::GridSpec;
use lgweak::quantum::{tensor_product, Observable, SystemState, WeakValueReport};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// a = σ_z⊗1, b = 1⊗σ_z, pre = (|00⟩+|01⟩+|10⟩)/√3, post = |++⟩.
/// Direct evaluation gives a_w = b_w = 1/3 and ⟨ÂB̂+B̂Â⟩w = −2/3 with
/// Â² = B̂² = 1, so every extraction route applies.
pub fn pauli_zz_scenario(g: f64, l: i32, grid: GridSpec) -> ScenarioConfig {
    let a = tensor_product(&Observable::pauli_z(), &Observable::identity(2));
    let b = tensor_product(&Observable::identity(2), &Observable::pauli_z());
    let s = 1.0 / 3.0f64.sqrt();
    let pre = SystemState::new(DVector::from_vec(vec![
        c(s, 0.0),
        c(s, 0.0),
        c(s, 0.0),
        c(0.0, 0.0),
    ]))
    .unwrap();
    let post = SystemState::normalized(DVector::from_element(4, c(0.5, 0.0))).unwrap();
    ScenarioConfig::new(a, b, pre, post, g, l, 1.0, grid).unwrap()
}

/// The grid pinned by the end-to-end reference runs: n = 256,
/// extent = 16σ√3 at σ = 1, ħ = 1.
pub fn pinned_grid() -> GridSpec {
    GridSpec::new(256, 16.0 * 3.0f64.sqrt(), 1.0).unwrap()
}

/// Same layout at n = 128 for tests where speed matters more than the
/// last digits.
pub fn coarse_grid() -> GridSpec {
    GridSpec::new(128, 16.0 * 3.0f64.sqrt(), 1.0).unwrap()
}

/// a = b = 1 on a qubit: the coupling is a rigid translation by (g, g),
/// so dx = dy = g, dxy = g² and dx2y2h = 0 hold exactly.
pub fn identity_scenario(g: f64, l: i32, grid: GridSpec) -> ScenarioConfig {
    let eye = Observable::identity(2);
    let pre = SystemState::basis(2, 0);
    ScenarioConfig::new(eye.clone(), eye, pre.clone(), pre, g, l, 1.0, grid).unwrap()
}

/// a = σ_x, b = σ_y, pre = |0⟩, post = |+⟩: a_w = 1, b_w = i,
/// ⟨ÂB̂+B̂Â⟩w = 0, Â² = B̂² = 1.
pub fn qubit_xy_scenario(g: f64, l: i32, grid: GridSpec) -> ScenarioConfig {
    let pre = SystemState::basis(2, 0);
    let post = SystemState::normalized(DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])).unwrap();
    ScenarioConfig::new(
        Observable::pauli_x(),
        Observable::pauli_y(),
        pre,
        post,
        g,
        l,
        1.0,
        grid,
    )
    .unwrap()
}

/// ⟨X²⟩ of the LG mode with azimuthal index l and width σ, from 1D radial
/// Simpson quadrature of |φ|² ∝ r^{2|l|} e^{−r²/2σ²}. Independent of both
/// the grid sampling and the closed form σ²(|l|+1).
pub fn radial_x2_moment(l: i32, sigma: f64) -> f64 {
    let m = 2 * l.unsigned_abs() as usize;
    let r_max = 20.0 * sigma * ((l.unsigned_abs() + 1) as f64).sqrt();
    let steps = 40_000usize;
    let h = r_max / steps as f64;
    let density = |r: f64| r.powi(m as i32) * (-r * r / (2.0 * sigma * sigma)).exp();
    let mut norm = 0.0;
    let mut second = 0.0;
    for i in 0..=steps {
        let r = i as f64 * h;
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        // Area element contributes one factor of r.
        norm += w * density(r) * r;
        second += w * density(r) * r * r * r;
    }
    // ⟨X²⟩ = ⟨r²⟩/2 by rotational symmetry of the intensity.
    0.5 * second / norm
}

/// Least-squares slope of ln(err) against ln(g): the empirical convergence
/// order of a residual sequence.
pub fn log_log_slope(gs: &[f64], errs: &[f64]) -> f64 {
    assert_eq!(gs.len(), errs.len());
    assert!(gs.len() >= 2);
    let xs: Vec<f64> = gs.iter().map(|g| g.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let num: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let den: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    num / den
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    Complex64::from_polar(r, theta)
}

/// A random but internally consistent report: every entry bounded by 2 in
/// modulus and diff_sq_half_w tied to (a2_w − b2_w)/2 by construction.
pub fn random_report(rng: &mut ChaCha8Rng) -> WeakValueReport {
    let a2_w = random_disk(rng, 2.0);
    let b2_w = random_disk(rng, 2.0);
    WeakValueReport {
        a_w: random_disk(rng, 2.0),
        b_w: random_disk(rng, 2.0),
        a2_w,
        b2_w,
        sym_ab_half_w: random_disk(rng, 2.0),
        diff_sq_half_w: (a2_w - b2_w) * 0.5,
        overlap: c(1.0, 0.0),
    }
}

/// Like [`random_report`] but with Â² = B̂² imposed, the regime of the
/// single-probe readout.
pub fn random_equal_squares_report(rng: &mut ChaCha8Rng) -> WeakValueReport {
    let mut r = random_report(rng);
    r.b2_w = r.a2_w;
    r.diff_sq_half_w = c(0.0, 0.0);
    r
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
