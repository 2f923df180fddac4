//! Orchestration: one full two-probe run, and sweeps over coupling
//! strength.
//!
//! A "run" at coupling g simulates the exact dynamics twice, with pointer
//! indices +|l| and −|l| (the mirror pair the two-probe inversions need),
//! evaluates the direct weak values as oracle, and applies every extraction
//! method the probe index admits. A sweep repeats that over a g grid;
//! a run whose post-selection vanishes is flagged and the sweep continues.

use serde::{Deserialize, Serialize};

use crate::evolution::{simulate_displacements, EvolutionError, ScenarioConfig};
use crate::quantum::joint_weak_value_report;
use crate::report::{build_methods, RunReport};

/// Default tolerance for the Â² = B̂² eligibility check.
pub const DEFAULT_EQUAL_SQUARES_TOL: f64 = 1e-12;

/// One sweep row: a completed report, or the reason this coupling strength
/// produced none.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowResult {
    Ok(RunReport),
    Failed { g: f64, l_mag: u32, error: String },
}

impl RowResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowResult::Ok(_))
    }

    pub fn report(&self) -> Option<&RunReport> {
        match self {
            RowResult::Ok(r) => Some(r),
            RowResult::Failed { .. } => None,
        }
    }
}

/// Simulates both probe signs at the scenario's g and assembles the full
/// report. `equal_squares_tol` gates the single-probe method's eligibility.
pub fn run_once(
    sc: &ScenarioConfig,
    equal_squares_tol: f64,
) -> Result<RunReport, EvolutionError> {
    let l_mag = sc.l.unsigned_abs();
    let sc_plus = sc.with_l(l_mag as i32);
    let sc_minus = sc.with_l(-(l_mag as i32));

    let (dplus, prob_plus) = simulate_displacements(&sc_plus)?;
    let (dminus, prob_minus) = if l_mag == 0 {
        // l = 0 has no mirror pair; the minus slot repeats the plus run.
        (dplus, prob_plus)
    } else {
        simulate_displacements(&sc_minus)?
    };

    let oracle = joint_weak_value_report(&sc.pre, &sc.post, &sc.a, &sc.b)?;
    let methods = build_methods(sc, &dplus, &dminus, &oracle, equal_squares_tol)
        .map_err(|e| EvolutionError::InvalidParameter(e.to_string()))?;

    Ok(RunReport {
        g: sc.g,
        l_mag,
        sigma: sc.sigma,
        hbar: sc.hbar(),
        grid_n: sc.grid.n(),
        grid_extent: sc.grid.extent(),
        prob_plus,
        prob_minus,
        displacements_plus: dplus,
        displacements_minus: dminus,
        oracle,
        methods,
    })
}

/// Runs [`run_once`] at each coupling strength. `g_values` must be positive
/// and ascending. Vanishing post-selection flags the row and the sweep goes
/// on; any other failure aborts, since it would affect every row alike.
pub fn run_sweep(
    sc: &ScenarioConfig,
    g_values: &[f64],
    equal_squares_tol: f64,
) -> Result<Vec<RowResult>, EvolutionError> {
    for pair in g_values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(EvolutionError::InvalidParameter(format!(
                "g values must be ascending, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(&g) = g_values.first() {
        if !(g > 0.0) {
            return Err(EvolutionError::InvalidParameter(format!(
                "g values must be positive, got {g}"
            )));
        }
    }

    let mut rows = Vec::with_capacity(g_values.len());
    for &g in g_values {
        let sc_g = sc.with_g(g);
        match run_once(&sc_g, equal_squares_tol) {
            Ok(report) => rows.push(RowResult::Ok(report)),
            Err(EvolutionError::PostSelectionVanished { prob, .. }) => {
                rows.push(RowResult::Failed {
                    g,
                    l_mag: sc.l.unsigned_abs(),
                    error: format!("post-selection probability {prob:.3e} below floor"),
                });
            }
            Err(other) => return Err(other),
        }
    }
    Ok(rows)
}

/// Log- or linearly-spaced coupling grid for the sweep subcommand.
pub fn g_grid(g_min: f64, g_max: f64, points: usize, log: bool) -> Result<Vec<f64>, String> {
    if !(g_min > 0.0 && g_min.is_finite()) || !(g_max > g_min) || points < 2 {
        return Err(format!(
            "need 0 < g_min < g_max and points >= 2, got [{g_min}, {g_max}] x{points}"
        ));
    }
    let n = points as f64 - 1.0;
    Ok((0..points)
        .map(|i| {
            // Endpoints are pinned exactly so a requested g reappears
            // verbatim in the report.
            if i == 0 {
                g_min
            } else if i + 1 == points {
                g_max
            } else {
                let t = i as f64 / n;
                if log {
                    (g_min.ln() + t * (g_max.ln() - g_min.ln())).exp()
                } else {
                    g_min + t * (g_max - g_min)
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::GridSpec;
    use crate::quantum::{Observable, SystemState};
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn identity_scenario(g: f64, l: i32) -> ScenarioConfig {
        let c = |re: f64| Complex64::new(re, 0.0);
        let grid = GridSpec::new(128, 16.0 * ((l.unsigned_abs() + 1) as f64).sqrt(), 1.0).unwrap();
        ScenarioConfig::new(
            Observable::identity(2),
            Observable::identity(2),
            SystemState::basis(2, 0),
            SystemState::normalized(DVector::from_row_slice(&[c(1.0), c(1.0)])).unwrap(),
            g,
            l,
            1.0,
            grid,
        )
        .unwrap()
    }

    #[test]
    fn empty_g_list_gives_empty_rows() {
        let sc = identity_scenario(0.05, 2);
        let rows = run_sweep(&sc, &[], DEFAULT_EQUAL_SQUARES_TOL).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn descending_g_list_is_rejected() {
        let sc = identity_scenario(0.05, 2);
        assert!(run_sweep(&sc, &[0.2, 0.1], DEFAULT_EQUAL_SQUARES_TOL).is_err());
    }

    #[test]
    fn identity_sweep_recovers_sym_two_everywhere() {
        let sc = identity_scenario(0.05, 2);
        let rows = run_sweep(&sc, &[0.02, 0.05], DEFAULT_EQUAL_SQUARES_TOL).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            let report = row.report().expect("identity scenario cannot fail");
            // Identity pair: all three methods apply at |l| = 2.
            assert_eq!(report.methods.len(), 3);
            for m in &report.methods {
                assert!(
                    (m.estimate.sym_ab_w.re - 2.0).abs() < 1e-6,
                    "{:?}: {}",
                    m.estimate.method,
                    m.estimate.sym_ab_w
                );
            }
        }
    }

    #[test]
    fn g_grid_shapes() {
        let lin = g_grid(0.01, 0.05, 5, false).unwrap();
        assert_eq!(lin.len(), 5);
        assert!((lin[1] - 0.02).abs() < 1e-15);
        let log = g_grid(0.01, 0.04, 3, true).unwrap();
        assert!((log[1] - 0.02).abs() < 1e-15);
        assert!(g_grid(0.05, 0.01, 3, false).is_err());
    }
}
