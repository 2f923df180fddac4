//! Discretized 2D pointer states: Laguerre-Gauss synthesis, position and
//! momentum representations, and grid moments of operator words.
//!
//! The pointer lives on an n×n grid of cell centers,
//!
//! ```text
//!     x_j = (j + 1/2 − n/2)·h,   h = extent/n,   j = 0..n−1,
//! ```
//!
//! so no sample sits on the axis origin where the LG phase factor is
//! singular, and the lattice is symmetric under (x,y) → (−x,−y). The
//! momentum lattice is the Fourier dual with the same centered layout,
//! p_k = (k + 1/2 − n/2)·Δp and Δp = 2πħ/extent. [`transform`] implements
//! the unitary continuum convention
//!
//! ```text
//!     φ̃(p) = (2πħ)^{−1/2} ∫ e^{−ipx/ħ} φ(x) dx      (per axis)
//! ```
//!
//! via a standard FFT with pre/post phase twiddles; because h·Δp = 2πħ/n
//! the round trip is exact to machine precision, and P̂ₓ = −iħ∂ₓ acts as
//! multiplication by p on the transformed amplitudes.
//!
//! All grid reductions go through the pairwise trees in [`crate::numeric`],
//! so every moment is reproducible bit for bit.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{fmt_g17, pairwise_map_sum, pairwise_map_sum_complex};

/// Norm tolerance for constructed fields.
pub const FIELD_NORM_TOL: f64 = 1e-10;
/// Containment rule: an LG mode of index l needs extent ≥ 8σ√(|l|+1) or the
/// truncated tails bias the moments beyond quadrature tolerance.
pub const CONTAINMENT_FACTOR: f64 = 8.0;
/// Default grid: 256 points per axis, extent 16σ√(|l|+1) (twice containment).
pub const DEFAULT_GRID_N: usize = 256;
pub const DEFAULT_EXTENT_FACTOR: f64 = 16.0;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("invalid sigma {sigma}: must be positive and finite")]
    InvalidSigma { sigma: f64 },
    #[error("grid too small for LG mode: extent {extent} < required {required} (= 8·sigma·sqrt(|l|+1))")]
    GridTooSmall { required: f64, extent: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file at line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

/// Square cell-centered grid shared by both representations.
///
/// `hbar` rides along because the momentum lattice spacing 2πħ/extent is a
/// property of the discretization, not of any one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    extent: f64,
    hbar: f64,
}

impl GridSpec {
    pub fn new(n: usize, extent: f64, hbar: f64) -> Result<Self, ProbeError> {
        if n < 16 || n % 2 != 0 {
            return Err(ProbeError::InvalidGrid {
                reason: format!("n = {n}, need even n >= 16"),
            });
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(ProbeError::InvalidGrid {
                reason: format!("extent = {extent}, need positive finite"),
            });
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(ProbeError::InvalidGrid {
                reason: format!("hbar = {hbar}, need positive finite"),
            });
        }
        Ok(Self { n, extent, hbar })
    }

    /// Default lab grid for an LG mode: n = 256, extent = 16σ√(|l|+1).
    pub fn default_for(l: i32, sigma: f64, hbar: f64) -> Result<Self, ProbeError> {
        let extent = DEFAULT_EXTENT_FACTOR * sigma * ((l.unsigned_abs() + 1) as f64).sqrt();
        Self::new(DEFAULT_GRID_N, extent, hbar)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn momentum_spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.extent
    }

    /// Position coordinate of index j (cell center).
    pub fn x(&self, j: usize) -> f64 {
        (j as f64 + 0.5 - self.n as f64 / 2.0) * self.spacing()
    }

    /// Momentum coordinate of index k (cell center).
    pub fn p(&self, k: usize) -> f64 {
        (k as f64 + 0.5 - self.n as f64 / 2.0) * self.momentum_spacing()
    }

    fn coord(&self, idx: usize, rep: Representation) -> f64 {
        match rep {
            Representation::Position => self.x(idx),
            Representation::Momentum => self.p(idx),
        }
    }

    /// Quadrature cell area in the given representation.
    pub fn cell_area(&self, rep: Representation) -> f64 {
        let s = match rep {
            Representation::Position => self.spacing(),
            Representation::Momentum => self.momentum_spacing(),
        };
        s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Position,
    Momentum,
}

/// A 2D complex amplitude grid, row-major with x on the slow index:
/// `amp[ix·n + iy]` sits at (x(ix), y(iy)) or (pₓ(ix), p_y(iy)).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeField {
    grid: GridSpec,
    rep: Representation,
    l: i32,
    sigma: f64,
    amp: Vec<Complex64>,
}

impl ProbeField {
    /// Wraps raw amplitudes; no normalization is applied.
    pub fn from_amplitudes(
        grid: GridSpec,
        rep: Representation,
        l: i32,
        sigma: f64,
        amp: Vec<Complex64>,
    ) -> Result<Self, ProbeError> {
        if amp.len() != grid.n * grid.n {
            return Err(ProbeError::InvalidGrid {
                reason: format!("amplitude count {} != n² = {}", amp.len(), grid.n * grid.n),
            });
        }
        Ok(Self {
            grid,
            rep,
            l,
            sigma,
            amp,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    /// In-place amplitude access for the evolution loop; the buffer length
    /// is fixed, only values change.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut Vec<Complex64> {
        &mut self.amp
    }

    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.amp[ix * self.grid.n + iy]
    }

    /// √(Σ|amp|²·cellArea) in the current representation.
    pub fn norm(&self) -> f64 {
        let area = self.grid.cell_area(self.rep);
        (pairwise_map_sum(0, self.amp.len(), &|i| self.amp[i].norm_sqr()) * area).sqrt()
    }

    /// Rescales to unit norm in place.
    pub fn normalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            let inv = Complex64::new(1.0 / norm, 0.0);
            for a in &mut self.amp {
                *a *= inv;
            }
        }
    }

    /// Writes the textual interchange format: one header line
    /// `n extent rep l sigma`, then n² lines `re im` in row-major order.
    pub fn write_text(&self, w: &mut impl Write) -> Result<(), ProbeError> {
        let rep = match self.rep {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        };
        writeln!(
            w,
            "{} {} {} {} {}",
            self.grid.n,
            fmt_g17(self.grid.extent),
            rep,
            self.l,
            fmt_g17(self.sigma)
        )?;
        for a in &self.amp {
            writeln!(w, "{} {}", fmt_g17(a.re), fmt_g17(a.im))?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Self::write_text`]. The header does
    /// not carry ħ, so the caller supplies it.
    pub fn read_text(r: &mut impl BufRead, hbar: f64) -> Result<Self, ProbeError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or(ProbeError::Malformed {
                line: 1,
                reason: "empty input".into(),
            })??;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 5 {
            return Err(ProbeError::Malformed {
                line: 1,
                reason: format!("header has {} fields, expected 5", parts.len()),
            });
        }
        let bad = |what: &str| ProbeError::Malformed {
            line: 1,
            reason: format!("unreadable {what} in header"),
        };
        let n: usize = parts[0].parse().map_err(|_| bad("n"))?;
        let extent: f64 = parts[1].parse().map_err(|_| bad("extent"))?;
        let rep = match parts[2] {
            "position" => Representation::Position,
            "momentum" => Representation::Momentum,
            other => {
                return Err(ProbeError::Malformed {
                    line: 1,
                    reason: format!("unknown representation {other:?}"),
                })
            }
        };
        let l: i32 = parts[3].parse().map_err(|_| bad("l"))?;
        let sigma: f64 = parts[4].parse().map_err(|_| bad("sigma"))?;
        let grid = GridSpec::new(n, extent, hbar)?;

        let mut amp = Vec::with_capacity(n * n);
        for (idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<f64, ProbeError> {
                tok.and_then(|t| t.parse().ok()).ok_or(ProbeError::Malformed {
                    line: idx + 2,
                    reason: "expected `re im`".into(),
                })
            };
            let re = parse(it.next())?;
            let im = parse(it.next())?;
            amp.push(Complex64::new(re, im));
            if amp.len() > n * n {
                break;
            }
        }
        if amp.len() != n * n {
            return Err(ProbeError::Malformed {
                line: amp.len() + 2,
                reason: format!("read {} amplitudes, expected {}", amp.len(), n * n),
            });
        }
        Self::from_amplitudes(grid, rep, l, sigma, amp)
    }

    /// CSV of |amp|² with coordinates, for plotting: `x,y,intensity` (or
    /// `px,py,intensity` in momentum representation).
    pub fn write_intensity_csv(&self, w: &mut impl Write) -> Result<(), ProbeError> {
        match self.rep {
            Representation::Position => writeln!(w, "x,y,intensity")?,
            Representation::Momentum => writeln!(w, "px,py,intensity")?,
        }
        let n = self.grid.n;
        for ix in 0..n {
            let u = self.grid.coord(ix, self.rep);
            for iy in 0..n {
                let v = self.grid.coord(iy, self.rep);
                let i = self.amp[ix * n + iy].norm_sqr();
                writeln!(w, "{},{},{}", fmt_g17(u), fmt_g17(v), fmt_g17(i))?;
            }
        }
        Ok(())
    }
}

/// Laguerre-Gauss mode with radial index 0 and azimuthal index l:
///
/// ```text
///     φ(x,y) ∝ (x + i·sgn(l)·y)^{|l|} · exp(−(x²+y²)/(4σ²)),
/// ```
///
/// sampled at cell centers and normalized numerically on the grid (the
/// closed-form normalization constant is deliberately not used, so the
/// discrete norm is exactly 1 regardless of truncation). For l = 0 the
/// phase-factor power is skipped entirely rather than evaluating sgn(0).
///
/// Negating l conjugates the analytic expression, and the sampled arithmetic
/// mirrors exactly, so `lg_mode(-l, ..)` is the bitwise conjugate of
/// `lg_mode(l, ..)`.
pub fn lg_mode(l: i32, sigma: f64, grid: GridSpec) -> Result<ProbeField, ProbeError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(ProbeError::InvalidSigma { sigma });
    }
    let required = CONTAINMENT_FACTOR * sigma * ((l.unsigned_abs() + 1) as f64).sqrt();
    if grid.extent < required {
        return Err(ProbeError::GridTooSmall {
            required,
            extent: grid.extent,
        });
    }

    let n = grid.n;
    let sgn = if l >= 0 { 1.0 } else { -1.0 };
    let power = l.unsigned_abs();
    let inv_4s2 = 1.0 / (4.0 * sigma * sigma);
    let mut amp = Vec::with_capacity(n * n);
    for ix in 0..n {
        let x = grid.x(ix);
        for iy in 0..n {
            let y = grid.x(iy);
            let envelope = (-(x * x + y * y) * inv_4s2).exp();
            let a = if power == 0 {
                Complex64::new(envelope, 0.0)
            } else {
                Complex64::new(x, sgn * y).powu(power) * envelope
            };
            amp.push(a);
        }
    }
    let mut field = ProbeField::from_amplitudes(grid, Representation::Position, l, sigma, amp)?;
    field.normalize();
    Ok(field)
}

/// Cached FFT plans keyed by (length, forward).
fn fft_plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = plans.lock().unwrap();
    map.entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// One 1D centered-DFT pass over every line along `axis` (0 = x/slow,
/// 1 = y/fast). With c = 1/2 − n/2 and s = ∓1 (forward/inverse):
///
/// ```text
///     out[k] = scale · e^{s·2πi·c²/n} · e^{s·2πi·ck/n}
///              · Σ_j e^{s·2πi·kj/n} (e^{s·2πi·cj/n} · in[j])
/// ```
///
/// which is exactly Σ_j e^{s·i·p_k·x_j/ħ}·in[j] rescaled, i.e. the centered
/// lattice transform.
fn dft_axis(amp: &mut [Complex64], n: usize, axis: usize, forward: bool, scale: f64) {
    let c = 0.5 - n as f64 / 2.0;
    let s = if forward { -1.0 } else { 1.0 };
    let tau = 2.0 * std::f64::consts::PI;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::cis(s * tau * c * j as f64 / n as f64))
        .collect();
    let constant = Complex64::cis(s * tau * c * c / n as f64) * scale;
    let plan = fft_plan(n, forward);

    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for other in 0..n {
        // Gather the line, pre-twiddle, transform, post-twiddle, scatter.
        let index = |j: usize| -> usize {
            if axis == 0 {
                j * n + other
            } else {
                other * n + j
            }
        };
        for j in 0..n {
            line[j] = amp[index(j)] * twiddle[j];
        }
        plan.process(&mut line);
        for k in 0..n {
            amp[index(k)] = line[k] * twiddle[k] * constant;
        }
    }
}

/// Unitary centered Fourier transform between representations. Returns a
/// clone when the field is already in the target representation. Norm is
/// preserved to machine precision and the round trip is exact.
pub fn transform(field: &ProbeField, target: Representation) -> ProbeField {
    if field.rep == target {
        return field.clone();
    }
    let grid = field.grid;
    let n = grid.n;
    let forward = target == Representation::Momentum;
    // Per-axis scale: forward h/√(2πħ), inverse Δp/√(2πħ). The product over
    // a round trip is h·Δp/(2πħ) = 1/n per axis, cancelling the
    // unnormalized FFT·IFFT factor of n.
    let scale = if forward {
        grid.spacing() / (tau_hbar(grid.hbar)).sqrt()
    } else {
        grid.momentum_spacing() / (tau_hbar(grid.hbar)).sqrt()
    };
    let mut amp = field.amp.clone();
    dft_axis(&mut amp, n, 1, forward, scale);
    dft_axis(&mut amp, n, 0, forward, scale);
    ProbeField {
        grid,
        rep: target,
        l: field.l,
        sigma: field.sigma,
        amp,
    }
}

fn tau_hbar(hbar: f64) -> f64 {
    2.0 * std::f64::consts::PI * hbar
}

/// One multiplicative factor of an operator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    X,
    Y,
    Px,
    Py,
}

impl Factor {
    fn rep(self) -> Representation {
        match self {
            Factor::X | Factor::Y => Representation::Position,
            Factor::Px | Factor::Py => Representation::Momentum,
        }
    }

    /// Whether the factor multiplies by the slow-axis (x/pₓ) coordinate.
    fn slow_axis(self) -> bool {
        matches!(self, Factor::X | Factor::Px)
    }
}

/// A product of up to four position/momentum factors with a complex
/// coefficient, e.g. ½·X̂Ŷ or ⟨Â⟩w·X̂P̂ₓ. Degree 2 covers every displacement
/// observable; the headroom to 4 exists for sandwich moments like P̂ₓM̂P̂ₓ.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWord {
    factors: Vec<Factor>,
    coeff: Complex64,
}

/// Hard cap on word length; nothing in the displacement algebra exceeds it.
pub const MAX_WORD_LEN: usize = 4;

impl OperatorWord {
    pub fn new(factors: Vec<Factor>, coeff: Complex64) -> Self {
        assert!(
            factors.len() <= MAX_WORD_LEN,
            "operator word of degree {} exceeds {}",
            factors.len(),
            MAX_WORD_LEN
        );
        Self { factors, coeff }
    }

    /// Unit-coefficient word.
    pub fn of(factors: &[Factor]) -> Self {
        Self::new(factors.to_vec(), Complex64::new(1.0, 0.0))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn coeff(&self) -> Complex64 {
        self.coeff
    }
}

/// A sum of operator words. Needed because the measured observables
/// (X̂Ŷ+ŶX̂)/2 and (X̂²−Ŷ²)/2 are not single products.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPoly {
    words: Vec<OperatorWord>,
}

impl OperatorPoly {
    pub fn new(words: Vec<OperatorWord>) -> Self {
        Self { words }
    }

    pub fn words(&self) -> &[OperatorWord] {
        &self.words
    }

    /// X̂.
    pub fn x() -> Self {
        Self::new(vec![OperatorWord::of(&[Factor::X])])
    }

    /// Ŷ.
    pub fn y() -> Self {
        Self::new(vec![OperatorWord::of(&[Factor::Y])])
    }

    /// (X̂Ŷ + ŶX̂)/2. The factors commute, so this equals X̂Ŷ; it is stored
    /// symmetrized anyway so the self-adjointness is explicit in the data.
    pub fn xy_symmetrized() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self::new(vec![
            OperatorWord::new(vec![Factor::X, Factor::Y], half),
            OperatorWord::new(vec![Factor::Y, Factor::X], half),
        ])
    }

    /// (X̂² − Ŷ²)/2.
    pub fn x2_minus_y2_half() -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self::new(vec![
            OperatorWord::new(vec![Factor::X, Factor::X], half),
            OperatorWord::new(vec![Factor::Y, Factor::Y], -half),
        ])
    }

    /// Multiplies every word by `f` on the right (f acts first on a ket).
    pub fn right_mul(&self, f: Factor) -> Self {
        Self::new(
            self.words
                .iter()
                .map(|w| {
                    let mut factors = w.factors.clone();
                    factors.push(f);
                    OperatorWord::new(factors, w.coeff)
                })
                .collect(),
        )
    }

    /// Multiplies every word by `f` on the left (f acts last on a ket).
    pub fn left_mul(&self, f: Factor) -> Self {
        Self::new(
            self.words
                .iter()
                .map(|w| {
                    let mut factors = Vec::with_capacity(w.factors.len() + 1);
                    factors.push(f);
                    factors.extend_from_slice(&w.factors);
                    OperatorWord::new(factors, w.coeff)
                })
                .collect(),
        )
    }
}

/// Multiplies amplitudes in place by the coordinate along one axis.
fn apply_factor(amp: &mut [Complex64], grid: &GridSpec, rep: Representation, slow_axis: bool) {
    let n = grid.n;
    for ia in 0..n {
        let coord = grid.coord(ia, rep);
        for ib in 0..n {
            let idx = if slow_axis { ia * n + ib } else { ib * n + ia };
            amp[idx] *= coord;
        }
    }
}

/// ⟨field| word |field⟩ by grid quadrature.
///
/// Factors apply right to left, transforming the working copy between
/// representations as needed; X̂/Ŷ multiply by coordinates in position
/// representation, P̂ₓ/P̂_y by momenta in momentum representation. The bra is
/// brought to the ket's final representation for the inner product (the
/// transform is unitary, so the value is representation-independent).
pub fn expectation(field: &ProbeField, word: &OperatorWord) -> Complex64 {
    let mut ket = field.clone();
    for factor in word.factors.iter().rev() {
        let want = factor.rep();
        if ket.rep != want {
            ket = transform(&ket, want);
        }
        apply_factor(&mut ket.amp, &ket.grid, want, factor.slow_axis());
    }
    let bra = transform(field, ket.rep);
    let area = field.grid.cell_area(ket.rep);
    let raw = pairwise_map_sum_complex(0, ket.amp.len(), &|i| bra.amp[i].conj() * ket.amp[i]);
    word.coeff * raw * area
}

/// Sum of [`expectation`] over the words of a polynomial.
pub fn expectation_poly(field: &ProbeField, poly: &OperatorPoly) -> Complex64 {
    poly.words
        .iter()
        .map(|w| expectation(field, w))
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc + v)
}

/// The four measured pointer displacements: first moments along each axis
/// and the two second-moment combinations that carry the joint weak values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSet {
    /// ⟨X̂⟩f − ⟨X̂⟩i
    pub dx: f64,
    /// ⟨Ŷ⟩f − ⟨Ŷ⟩i
    pub dy: f64,
    /// ⟨X̂Ŷ⟩f − ⟨X̂Ŷ⟩i (symmetrized)
    pub dxy: f64,
    /// ⟨(X̂²−Ŷ²)/2⟩f − ⟨(X̂²−Ŷ²)/2⟩i
    pub dx2y2h: f64,
}

/// Differences of the four displacement moments between an initial and a
/// final field on the same grid. The observables are self-adjoint, so the
/// imaginary parts of the grid moments are pure round-off and dropped.
pub fn displacement_set(
    field_i: &ProbeField,
    field_f: &ProbeField,
) -> Result<DisplacementSet, ProbeError> {
    if field_i.grid != field_f.grid {
        return Err(ProbeError::GridMismatch);
    }
    let polys = [
        OperatorPoly::x(),
        OperatorPoly::y(),
        OperatorPoly::xy_symmetrized(),
        OperatorPoly::x2_minus_y2_half(),
    ];
    let mut vals = [0.0f64; 4];
    for (slot, poly) in vals.iter_mut().zip(polys.iter()) {
        *slot = expectation_poly(field_f, poly).re - expectation_poly(field_i, poly).re;
    }
    Ok(DisplacementSet {
        dx: vals[0],
        dy: vals[1],
        dxy: vals[2],
        dx2y2h: vals[3],
    })
}
