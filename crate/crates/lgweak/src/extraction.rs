//! Inverse maps: weak values back out of measured displacement sets.
//!
//! Three procedures, in decreasing generality:
//!
//! * **Two-probe, general l**: run the coupling twice with pointers of
//!   index +|l| and −|l|. The eight measured numbers (four displacements per
//!   sign) determine all eight real unknowns: Re/Im of ⟨Â⟩w, ⟨B̂⟩w from the
//!   first moments, then Re/Im of ⟨ÂB̂+B̂Â⟩w, ⟨Â²−B̂²⟩w from the second
//!   moments once the known single-value products are subtracted.
//! * **Two-probe, |l| = 2**: the single-value products drop out of the
//!   second-order displacements, so the joint values follow from sums and
//!   differences of the second moments alone.
//! * **Single-probe, Â² = B̂²**: one |l| = 2 pointer suffices:
//!   Re⟨ÂB̂+B̂Â⟩w = 2⟨X̂Ŷ⟩fi/g², Im⟨ÂB̂+B̂Â⟩w = sgn(l)·⟨X̂²−Ŷ²⟩fi/(2g²).
//!
//! Joint estimates follow the unhalved convention ⟨ÂB̂+B̂Â⟩w and ⟨Â²−B̂²⟩w
//! (twice the halved values carried by
//! [`WeakValueReport`](crate::quantum::WeakValueReport)); the displacement
//! sets store ⟨(X̂²−Ŷ²)/2⟩fi, and the factor-2 bridges live inside the
//! extractors, never in the data.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::complex_pair_opt;
use crate::numeric::complex_pair;
use crate::probe::DisplacementSet;
use crate::quantum::Observable;

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("coupling strength must be positive, got {g}")]
    ZeroCoupling { g: f64 },
    #[error("l = 0 probes cannot resolve imaginary parts; need |l| >= 1")]
    DegenerateL,
    #[error("sign_l must be +1 or -1, got {sign_l}")]
    InvalidSign { sign_l: i32 },
    #[error("joint solve is rank-deficient (min singular value {min_singular:.3e})")]
    SingularSystem { min_singular: f64 },
}

/// Which inversion produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    TwoProbeGeneral,
    TwoProbeL2,
    SingleProbeEqualSquares,
}

impl ExtractionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtractionMethod::TwoProbeGeneral => "two_probe_general",
            ExtractionMethod::TwoProbeL2 => "two_probe_l2",
            ExtractionMethod::SingleProbeEqualSquares => "single_probe_equal_squares",
        }
    }
}

impl std::str::FromStr for ExtractionMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_probe_general" => Ok(ExtractionMethod::TwoProbeGeneral),
            "two_probe_l2" => Ok(ExtractionMethod::TwoProbeL2),
            "single_probe_equal_squares" => Ok(ExtractionMethod::SingleProbeEqualSquares),
            other => Err(format!("unknown extraction method {other:?}")),
        }
    }
}

/// Joint weak values recovered by a linear solve, with the conditioning of
/// that solve surfaced rather than asserted against a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEstimate {
    /// ⟨ÂB̂+B̂Â⟩w (unhalved).
    pub sym_ab_w: Complex64,
    /// ⟨Â²−B̂²⟩w (unhalved).
    pub diff_sq_w: Complex64,
    /// Smallest singular value of the 4×4 inversion.
    pub min_singular_value: f64,
}

/// Weak values recovered from displacements, with fields the chosen method
/// cannot resolve left absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakValueEstimate {
    pub method: ExtractionMethod,
    #[serde(with = "complex_pair_opt")]
    pub a_w: Option<Complex64>,
    #[serde(with = "complex_pair_opt")]
    pub b_w: Option<Complex64>,
    /// ⟨ÂB̂+B̂Â⟩w, the one value every method recovers.
    #[serde(with = "complex_pair")]
    pub sym_ab_w: Complex64,
    #[serde(with = "complex_pair_opt")]
    pub diff_sq_w: Option<Complex64>,
    /// Conditioning of the joint solve, where one was performed.
    pub min_singular_value: Option<f64>,
}

impl WeakValueEstimate {
    pub fn two_probe_general(
        singles: (Complex64, Complex64),
        joints: JointEstimate,
    ) -> Self {
        Self {
            method: ExtractionMethod::TwoProbeGeneral,
            a_w: Some(singles.0),
            b_w: Some(singles.1),
            sym_ab_w: joints.sym_ab_w,
            diff_sq_w: Some(joints.diff_sq_w),
            min_singular_value: Some(joints.min_singular_value),
        }
    }

    pub fn two_probe_l2(sym_ab_w: Complex64, diff_sq_w: Complex64) -> Self {
        Self {
            method: ExtractionMethod::TwoProbeL2,
            a_w: None,
            b_w: None,
            sym_ab_w,
            diff_sq_w: Some(diff_sq_w),
            min_singular_value: None,
        }
    }

    pub fn single_probe_equal_squares(sym_ab_w: Complex64) -> Self {
        Self {
            method: ExtractionMethod::SingleProbeEqualSquares,
            a_w: None,
            b_w: None,
            sym_ab_w,
            diff_sq_w: None,
            min_singular_value: None,
        }
    }
}

fn check_g(g: f64) -> Result<(), ExtractionError> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(ExtractionError::ZeroCoupling { g })
    }
}

/// Inverts the first-order displacements measured at l = ±l_mag:
///
/// ```text
///     Re⟨Â⟩w = (dx⁺ + dx⁻)/(2g),    Im⟨B̂⟩w = (dx⁺ − dx⁻)/(2g·l),
///     Re⟨B̂⟩w = (dy⁺ + dy⁻)/(2g),    Im⟨Â⟩w = −(dy⁺ − dy⁻)/(2g·l).
/// ```
pub fn extract_singles_two_probe(
    dplus: &DisplacementSet,
    dminus: &DisplacementSet,
    l_mag: u32,
    g: f64,
) -> Result<(Complex64, Complex64), ExtractionError> {
    check_g(g)?;
    if l_mag == 0 {
        return Err(ExtractionError::DegenerateL);
    }
    let lf = l_mag as f64;
    let re_a = (dplus.dx + dminus.dx) / (2.0 * g);
    let im_b = (dplus.dx - dminus.dx) / (2.0 * g * lf);
    let re_b = (dplus.dy + dminus.dy) / (2.0 * g);
    let im_a = -(dplus.dy - dminus.dy) / (2.0 * g * lf);
    Ok((Complex64::new(re_a, im_a), Complex64::new(re_b, im_b)))
}

/// Inverts the second-order displacements at l = ±l_mag for the joint weak
/// values, given the singles recovered in the first step.
///
/// With c₁ = (l²−|l|−2)/4, c₂ = (l²−|l|+2)/4, S = ⟨(ÂB̂+B̂Â)/2⟩w and
/// D = ⟨(Â²−B̂²)/2⟩w, the forward model reads
///
/// ```text
///     dxy±/g²    + c₁·Re(⟨Â⟩w⟨B̂⟩w*)        = c₂·Re S ∓ l·Im D,
///     dx2y2h±/g² + (c₁/2)(|⟨Â⟩w|²−|⟨B̂⟩w|²) = c₂·Re D ± l·Im S,
/// ```
///
/// a 4×4 real linear system in (Re S, Im S, Re D, Im D), solved by SVD so
/// the conditioning is observable. The returned values are unhalved (2S,
/// 2D). The matrix is nonsingular for every l_mag ≥ 1 (c₂ ≥ 1/2); the
/// rank check is defensive.
pub fn extract_joints_two_probe(
    dplus: &DisplacementSet,
    dminus: &DisplacementSet,
    singles: (Complex64, Complex64),
    l_mag: u32,
    g: f64,
) -> Result<JointEstimate, ExtractionError> {
    check_g(g)?;
    if l_mag == 0 {
        return Err(ExtractionError::DegenerateL);
    }
    let lf = l_mag as f64;
    let c1 = (lf * lf - lf - 2.0) / 4.0;
    let c2 = (lf * lf - lf + 2.0) / 4.0;
    let (a_w, b_w) = singles;
    let ab = (a_w * b_w.conj()).re;
    let mod_diff = a_w.norm_sqr() - b_w.norm_sqr();
    let g2 = g * g;

    // Unknowns ordered (Re S, Im S, Re D, Im D).
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            c2, 0.0, 0.0, -lf, // u⁺
            c2, 0.0, 0.0, lf, // u⁻
            0.0, lf, c2, 0.0, // v⁺
            0.0, -lf, c2, 0.0, // v⁻
        ],
    );
    let rhs = DVector::from_row_slice(&[
        dplus.dxy / g2 + c1 * ab,
        dminus.dxy / g2 + c1 * ab,
        dplus.dx2y2h / g2 + (c1 / 2.0) * mod_diff,
        dminus.dx2y2h / g2 + (c1 / 2.0) * mod_diff,
    ]);

    let svd = m.svd(true, true);
    let min_singular = svd.singular_values.iter().fold(f64::INFINITY, |a, &s| a.min(s));
    let max_singular = svd.singular_values.iter().fold(0.0f64, |a, &s| a.max(s));
    if min_singular <= 1e-12 * max_singular {
        return Err(ExtractionError::SingularSystem { min_singular });
    }
    let w = svd
        .solve(&rhs, 0.0)
        .map_err(|_| ExtractionError::SingularSystem { min_singular })?;

    Ok(JointEstimate {
        sym_ab_w: Complex64::new(2.0 * w[0], 2.0 * w[1]),
        diff_sq_w: Complex64::new(2.0 * w[2], 2.0 * w[3]),
        min_singular_value: min_singular,
    })
}

/// Joint weak values from |l| = 2 probes alone: at that index the
/// single-value products vanish from the forward model, leaving
///
/// ```text
///     Re⟨ÂB̂+B̂Â⟩w = (dxy⁺ + dxy⁻)/g²,
///     Im⟨ÂB̂+B̂Â⟩w = (q⁺ − q⁻)/(4g²),
///     Re⟨Â²−B̂²⟩w  = (q⁺ + q⁻)/(2g²),
///     Im⟨Â²−B̂²⟩w  = −(dxy⁺ − dxy⁻)/(2g²),
/// ```
///
/// where q± = ⟨X̂²−Ŷ²⟩fi± = 2·dx2y2h± (the displacement sets carry the
/// halved moment).
pub fn extract_l2_sum_difference(
    dplus: &DisplacementSet,
    dminus: &DisplacementSet,
    g: f64,
) -> Result<(Complex64, Complex64), ExtractionError> {
    check_g(g)?;
    let g2 = g * g;
    let q_plus = 2.0 * dplus.dx2y2h;
    let q_minus = 2.0 * dminus.dx2y2h;
    let sym = Complex64::new(
        (dplus.dxy + dminus.dxy) / g2,
        (q_plus - q_minus) / (4.0 * g2),
    );
    let diff = Complex64::new(
        (q_plus + q_minus) / (2.0 * g2),
        -(dplus.dxy - dminus.dxy) / (2.0 * g2),
    );
    Ok((sym, diff))
}

/// ⟨ÂB̂+B̂Â⟩w from a single |l| = 2 probe of sign `sign_l`, valid when
/// Â² = B̂² (check with [`equal_squares_check`] first):
///
/// ```text
///     Re⟨ÂB̂+B̂Â⟩w = 2⟨X̂Ŷ⟩fi/g²,
///     Im⟨ÂB̂+B̂Â⟩w = sgn(l)·⟨X̂²−Ŷ²⟩fi/(2g²) = sgn(l)·dx2y2h/g².
/// ```
///
/// (⟨X̂Ŷ⟩fi = dxy and ⟨(X̂²−Ŷ²)/2⟩fi = dx2y2h; with Â² = B̂² the
/// difference weak value vanishes exactly, so at |l| = 2, where the
/// single-value cross terms also drop out, both mixed displacements are
/// pure sym signal.)
pub fn extract_single_probe_equal_squares(
    d: &DisplacementSet,
    sign_l: i32,
    g: f64,
) -> Result<Complex64, ExtractionError> {
    check_g(g)?;
    if sign_l != 1 && sign_l != -1 {
        return Err(ExtractionError::InvalidSign { sign_l });
    }
    let g2 = g * g;
    Ok(Complex64::new(
        2.0 * d.dxy / g2,
        sign_l as f64 * d.dx2y2h / g2,
    ))
}

/// True iff ‖Â² − B̂²‖_max ≤ tol. Dimension mismatch counts as unequal.
pub fn equal_squares_check(a: &Observable, b: &Observable, tol: f64) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let a2 = a.matrix() * a.matrix();
    let b2 = b.matrix() * b.matrix();
    let mut worst = 0.0f64;
    for j in 0..a2.nrows() {
        for k in 0..a2.ncols() {
            worst = worst.max((a2[(j, k)] - b2[(j, k)]).norm());
        }
    }
    worst <= tol
}
