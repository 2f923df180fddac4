//! Second-order pointer response, evaluated two independent ways.
//!
//! Expanding the post-selected coupling to second order in g gives, for any
//! self-adjoint pointer observable M̂,
//!
//! ```text
//!     ⟨M̂⟩f − ⟨M̂⟩i ≈ (2g/ħ)·Im⟨M̂Ĥ₁⟩i
//!                  + (g²/ħ²)·(⟨Ĥ₁†M̂Ĥ₁⟩i − Re⟨M̂Ĥ₂⟩i),
//!
//!     Ĥ₁ = P̂ₓ⟨Â⟩w + P̂_y⟨B̂⟩w,
//!     Ĥ₂ = P̂ₓ²⟨Â²⟩w + P̂_y²⟨B̂²⟩w + P̂ₓP̂_y⟨ÂB̂+B̂Â⟩w,
//! ```
//!
//! with every expectation taken in the initial pointer state.
//! [`predict_displacement`] evaluates this generically from grid moments;
//! it knows nothing about Laguerre-Gauss structure. For LG pointers of
//! azimuthal index l the same expansion closes into the formulas
//! implemented by [`analytic_first_order`] and [`analytic_second_order`];
//! agreement between the two paths (at every l and for arbitrary complex
//! weak values) is what pins down all the coefficients, and disagreement
//! with the exact simulation beyond O(g³) would flag an expansion error.
//!
//! Both closed forms use the shorthand coefficients
//!
//! ```text
//!     c₁ = (l² − |l| − 2)/4,      c₂ = (l² − |l| + 2)/4,
//! ```
//!
//! i.e. c₁ vanishes at |l| = 2, which is what makes the |l| = 2 probe
//! special: products of single weak values drop out of the second-order
//! displacements entirely.

use crate::probe::{expectation_poly, DisplacementSet, Factor, OperatorPoly, ProbeField};
use crate::quantum::WeakValueReport;

/// Generic second-order displacement of the pointer observable `m`, from
/// grid moments of `probe` and the weak values in `report`.
///
/// `hbar` must match the probe grid's ħ: the momentum lattice is already
/// scaled by it, so the parameter only sets the coupling prefactors.
pub fn predict_displacement(
    m: &OperatorPoly,
    report: &WeakValueReport,
    probe: &ProbeField,
    g: f64,
    hbar: f64,
) -> f64 {
    assert!(
        (hbar / probe.grid().hbar() - 1.0).abs() < 1e-12,
        "hbar {hbar} disagrees with probe grid hbar {}",
        probe.grid().hbar()
    );
    let e = |poly: &OperatorPoly| expectation_poly(probe, poly);

    let a = report.a_w;
    let b = report.b_w;

    // First order: (2g/ħ)·Im(⟨M Pₓ⟩·a_w + ⟨M P_y⟩·b_w).
    let m_px = m.right_mul(Factor::Px);
    let m_py = m.right_mul(Factor::Py);
    let first = (2.0 * g / hbar) * (a * e(&m_px) + b * e(&m_py)).im;

    // Sandwich ⟨Ĥ₁†M̂Ĥ₁⟩: self-adjoint, so the imaginary part is round-off.
    let sandwich = a.conj() * a * e(&m_px.left_mul(Factor::Px))
        + a.conj() * b * e(&m_py.left_mul(Factor::Px))
        + b.conj() * a * e(&m_px.left_mul(Factor::Py))
        + b.conj() * b * e(&m_py.left_mul(Factor::Py));

    // ⟨M̂Ĥ₂⟩ with the unhalved joint value ⟨ÂB̂+B̂Â⟩w = 2·sym_ab_half_w.
    let h2 = report.a2_w * e(&m_px.right_mul(Factor::Px))
        + report.b2_w * e(&m_py.right_mul(Factor::Py))
        + 2.0 * report.sym_ab_half_w * e(&m_px.right_mul(Factor::Py));

    let second = (g / hbar) * (g / hbar) * (sandwich.re - h2.re);
    first + second
}

/// c₁ = (l² − |l| − 2)/4.
fn c1(l: i32) -> f64 {
    let la = l.unsigned_abs() as f64;
    (la * la - la - 2.0) / 4.0
}

/// c₂ = (l² − |l| + 2)/4.
fn c2(l: i32) -> f64 {
    let la = l.unsigned_abs() as f64;
    (la * la - la + 2.0) / 4.0
}

/// First-order mean displacements of an LG pointer of index l:
///
/// ```text
///     ⟨X̂⟩fi = g(Re⟨Â⟩w + l·Im⟨B̂⟩w),
///     ⟨Ŷ⟩fi = g(Re⟨B̂⟩w − l·Im⟨Â⟩w).
/// ```
///
/// The l-terms are the vortex cross-talk: the imaginary part of each weak
/// value shows up on the *other* axis, scaled by the topological charge.
pub fn analytic_first_order(report: &WeakValueReport, l: i32, g: f64) -> (f64, f64) {
    let lf = l as f64;
    let dx = g * (report.a_w.re + lf * report.b_w.im);
    let dy = g * (report.b_w.re - lf * report.a_w.im);
    (dx, dy)
}

/// Second-order displacements of an LG pointer of index l, in units where
/// S = ⟨(ÂB̂+B̂Â)/2⟩w and D = ⟨(Â²−B̂²)/2⟩w:
///
/// ```text
///     ⟨X̂Ŷ⟩fi       = g²(−c₁·Re(⟨Â⟩w⟨B̂⟩w*) + c₂·Re S − l·Im D),
///     ⟨(X̂²−Ŷ²)/2⟩fi = g²(−(c₁/2)·(|⟨Â⟩w|²−|⟨B̂⟩w|²) + c₂·Re D + l·Im S).
/// ```
pub fn analytic_second_order(report: &WeakValueReport, l: i32, g: f64) -> (f64, f64) {
    let lf = l as f64;
    let s = report.sym_ab_half_w;
    let d = report.diff_sq_half_w;
    let ab = report.a_w * report.b_w.conj();
    let mod_diff = report.a_w.norm_sqr() - report.b_w.norm_sqr();
    let dxy = g * g * (-c1(l) * ab.re + c2(l) * s.re - lf * d.im);
    let dx2y2h = g * g * (-(c1(l) / 2.0) * mod_diff + c2(l) * d.re + lf * s.im);
    (dxy, dx2y2h)
}

/// Convenience bundle of both closed-form orders.
pub fn analytic_displacements(report: &WeakValueReport, l: i32, g: f64) -> DisplacementSet {
    let (dx, dy) = analytic_first_order(report, l, g);
    let (dxy, dx2y2h) = analytic_second_order(report, l, g);
    DisplacementSet {
        dx,
        dy,
        dxy,
        dx2y2h,
    }
}
