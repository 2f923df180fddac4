//! Frozen reference values, each computable by hand or by quadrature
//! without running any of the machinery under test. These pin the code to
//! the physics rather than to itself.

mod common;

use common::*;
use lgweak::evolution::simulate_displacements;
use lgweak::perturbative::{analytic_first_order, analytic_second_order};
use lgweak::probe::{expectation, lg_mode, GridSpec, OperatorWord};
use lgweak::quantum::joint_weak_value_report;

/// pre = (|00⟩+|01⟩+|10⟩)/√3, post = |++⟩, A = σ_z⊗1, B = 1⊗σ_z:
///
///   ⟨post|pre⟩       = 3/(2√3) = √3/2,
///   ⟨post|A|pre⟩     = (1+1−1)/(2√3)   ⇒ a_w = 1/3,
///   ⟨post|B|pre⟩     = (1−1+1)/(2√3)   ⇒ b_w = 1/3,
///   ⟨post|AB|pre⟩    = (1−1−1)/(2√3)   ⇒ ⟨(AB+BA)/2⟩w = −1/3,
///   A² = B² = 1      ⇒ a2_w = b2_w = 1, diff = 0.
#[test]
fn pauli_zz_weak_values_match_hand_computation() {
    let sc = pauli_zz_scenario(0.01, 2, coarse_grid());
    let r = joint_weak_value_report(&sc.pre, &sc.post, &sc.a, &sc.b).unwrap();
    let third = 1.0 / 3.0;
    assert!((r.a_w - c(third, 0.0)).norm() < 1e-14);
    assert!((r.b_w - c(third, 0.0)).norm() < 1e-14);
    assert!((r.sym_ab_half_w - c(-third, 0.0)).norm() < 1e-14);
    assert!((r.a2_w - c(1.0, 0.0)).norm() < 1e-14);
    assert!((r.b2_w - c(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(r.diff_sq_half_w, c(0.0, 0.0));
    assert!((r.overlap - c(0.75f64.sqrt(), 0.0)).norm() < 1e-14);
}

/// pre = |0⟩, post = |+⟩, A = σ_x, B = σ_y:
/// a_w = ⟨+|1⟩/⟨+|0⟩ = 1, b_w = i⟨+|1⟩/⟨+|0⟩ = i, and σ_xσ_y + σ_yσ_x = 0.
#[test]
fn qubit_xy_weak_values_match_hand_computation() {
    let sc = qubit_xy_scenario(0.01, 2, coarse_grid());
    let r = joint_weak_value_report(&sc.pre, &sc.post, &sc.a, &sc.b).unwrap();
    assert!((r.a_w - c(1.0, 0.0)).norm() < 1e-14);
    assert!((r.b_w - c(0.0, 1.0)).norm() < 1e-14);
    assert!(r.sym_ab_half_w.norm() < 1e-14);
    assert!((r.a2_w - c(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(r.diff_sq_half_w, c(0.0, 0.0));
}

/// Grid moments of every synthesized mode agree with 1D radial quadrature
/// of the continuum intensity, an oracle that never touches the 2D grid.
#[test]
fn grid_moments_match_radial_quadrature() {
    for l in -4..=4i32 {
        for sigma in [0.7, 1.0, 1.9] {
            let grid = GridSpec::default_for(l, sigma, 1.0).unwrap();
            let field = lg_mode(l, sigma, grid).unwrap();
            let x2 = expectation(&field, &OperatorWord::of(&[lgweak::probe::Factor::X; 2])).re;
            let oracle = radial_x2_moment(l, sigma);
            assert!(
                (x2 / oracle - 1.0).abs() < 1e-9,
                "l = {l}, sigma = {sigma}: grid {x2} vs quadrature {oracle}"
            );
        }
    }
}

/// With a = b = 1 the evolution is exactly a translation by (g, g):
/// dx = dy = g, dxy = g², dx2y2h = 0, all free of perturbative error.
#[test]
fn identity_coupling_is_an_exact_translation() {
    let g = 0.05;
    let sc = identity_scenario(g, 1, coarse_grid());
    let (d, prob) = simulate_displacements(&sc).unwrap();
    assert!((prob - 1.0).abs() < 1e-12);
    assert!((d.dx - g).abs() < 1e-12);
    assert!((d.dy - g).abs() < 1e-12);
    assert!((d.dxy - g * g).abs() < 1e-12);
    assert!(d.dx2y2h.abs() < 1e-12);
}

/// One fully hand-evaluated displacement set. Take l = 1 (c₁ = −1/2,
/// c₂ = 1/2), a_w = 1 + 2i, b_w = −i, S = i, D = 3/2, g = 0.1:
///
///   dx      = g(Re a_w + l·Im b_w)  = 0.1(1 − 1)            = 0,
///   dy      = g(Re b_w − l·Im a_w)  = 0.1(0 − 2)            = −0.2,
///   dxy     = g²(−c₁Re(a_w b̄_w) + c₂Re S − l·Im D)
///           = 0.01(0.5·(−2) + 0 − 0)                        = −0.01,
///   dx2y2h  = g²(−(c₁/2)(|a_w|²−|b_w|²) + c₂Re D + l·Im S)
///           = 0.01(0.25·4 + 0.75 + 1)                       = 0.0275.
#[test]
fn closed_forms_match_a_hand_evaluated_case() {
    let r = lgweak::quantum::WeakValueReport {
        a_w: c(1.0, 2.0),
        b_w: c(0.0, -1.0),
        a2_w: c(3.0, 0.0),
        b2_w: c(0.0, 0.0),
        sym_ab_half_w: c(0.0, 1.0),
        diff_sq_half_w: c(1.5, 0.0),
        overlap: c(1.0, 0.0),
    };
    let g = 0.1;
    let (dx, dy) = analytic_first_order(&r, 1, g);
    let (dxy, dx2y2h) = analytic_second_order(&r, 1, g);
    assert!(dx.abs() < 1e-16);
    assert!((dy + 0.2).abs() < 1e-16);
    assert!((dxy + 0.01).abs() < 1e-17);
    assert!((dx2y2h - 0.0275).abs() < 1e-17);
}
