//! Numerical laboratory for weak measurements with Laguerre-Gauss pointers.
//!
//! A pair of system observables (Â, B̂) couples impulsively to the transverse
//! momenta of a two-dimensional pointer wavefunction,
//!
//! ```text
//!     Ĥ = g δ(t − t₀) (Â ⊗ P̂ₓ + B̂ ⊗ P̂_y),
//! ```
//!
//! after which the system is post-selected onto a final state. For weak
//! coupling the surviving pointer is displaced: the mean position shifts
//! pick up the single weak values ⟨Â⟩w, ⟨B̂⟩w at first order in g, while the
//! mixed moments ⟨X̂Ŷ⟩ and ⟨(X̂²−Ŷ²)/2⟩ pick up the joint weak values
//! ⟨(ÂB̂+B̂Â)/2⟩w and ⟨(Â²−B̂²)/2⟩w at second order. With Laguerre-Gauss
//! pointers of azimuthal index l, the displacement formulas close over l,
//! and running the same coupling with l = ±|l| probes (or a single |l| = 2
//! probe when Â² = B̂²) makes the full set of weak values recoverable from
//! spatial displacements alone.
//!
//! The crate verifies that procedure end to end, with three independent
//! layers that must agree:
//!
//! * [`evolution`]: exact post-selected dynamics, with the coupling unitary
//!   evaluated at every momentum grid point by Hermitian eigendecomposition
//!   and no expansion in g.
//! * [`perturbative`]: the second-order pointer response evaluated two
//!   ways, generically from grid moments of the pointer and from the
//!   closed-form displacement expressions in l.
//! * [`extraction`]: the inverse maps that reconstruct single and joint
//!   weak values from measured displacement sets.
//!
//! [`probe`] supplies the discretized pointer (LG synthesis, centered
//! unitary Fourier transforms, operator-word moments), [`quantum`] the
//! finite-dimensional system side, and [`scenario`]/[`report`]/[`sweep`]
//! the file formats and orchestration used by the `lgweak` binary.
//!
//! Determinism is a design constraint throughout: grid reductions use a
//! fixed pairwise summation tree and the evolution loop is ordered, so a
//! given scenario file reproduces its report byte for byte.

pub mod evolution;
pub mod extraction;
pub mod numeric;
pub mod perturbative;
pub mod probe;
pub mod quantum;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use evolution::{
    couple_and_postselect, simulate_displacements, EvolutionError, PostSelectedProbe,
    ScenarioConfig,
};
pub use extraction::{
    equal_squares_check, extract_joints_two_probe, extract_l2_sum_difference,
    extract_single_probe_equal_squares, extract_singles_two_probe, ExtractionError,
    ExtractionMethod, JointEstimate, WeakValueEstimate,
};
pub use perturbative::{
    analytic_displacements, analytic_first_order, analytic_second_order, predict_displacement,
};
pub use probe::{
    displacement_set, expectation, expectation_poly, lg_mode, transform, DisplacementSet, Factor,
    GridSpec, OperatorPoly, OperatorWord, ProbeError, ProbeField, Representation,
};
pub use quantum::{
    joint_weak_value_report, tensor_product, unitary_exp, weak_value, Observable, QuantumError,
    SystemState, WeakValueReport,
};
pub use report::{
    emit_report, extract_rows, parse_report_csv, rows_to_csv, CsvRow, MethodResult, ReportError,
    ReportFormat, RunReport,
};
pub use scenario::{parse_scenario, ScenarioError};
pub use sweep::{g_grid, run_once, run_sweep, RowResult, DEFAULT_EQUAL_SQUARES_TOL};
