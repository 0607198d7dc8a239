//! Verdicts on correct solvability, decay in whole (the ε-strip property) and
//! compactness of the inverse operator, together with the cross-check between the
//! two equivalent limit conditions `d(x) → 0` and `∫_{x-a}^{x+a} q → ∞`.
//!
//! Every "for all x" and "for all a" is replaced by a finite window or ladder, so
//! each verdict is three-valued and carries the numbers it was decided on.

mod limits;

use serde::Serialize;

pub use limits::{
    compactness_verdict, equivalence_crosscheck, strip_verdict, Compactness, CompactnessVerdict, EquivalenceCheck,
    LadderTrend, StripClass, StripVerdict, DEFAULT_STRIP_THRESHOLD, DECAY_RATIO,
};

use crate::coefficient::{q0_estimate, Coefficient, Q0Estimate};
use crate::error::{invalid, Result};
use crate::green::MASS_THRESHOLD;
use crate::quadrature::integrate;

/// `NotSolvable` needs scans on a window at least this many times `max(a)`.
pub const NOT_SOLVABLE_WINDOW_FACTOR: f64 = 8.0;
/// Windowed infima at or below this are read as exact zero-mass gaps.
const ZERO_GAP: f64 = 1e-12;
/// Tail probes sit at `±W (1 + k)` for `k < TAIL_PROBES`.
const TAIL_PROBES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Solvability {
    Solvable,
    NotSolvable,
    Inconclusive,
}

/// Evidence that `‖q‖₁` is finite: the mass on `[-W, W]` and the masses of unit
/// half-width windows at growing distances on each side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassProbe {
    pub window: f64,
    pub central_mass: f64,
    /// `(t, ∫_{t-1}^{t+1} q)`, left side first, each side ordered outward.
    pub tail_masses: Vec<(f64, f64)>,
    /// Both tails nonincreasing outward and ending below the mass threshold.
    pub finite_mass: bool,
    /// Every windowed infimum of the ladder is at or below `1e-12`.
    pub zero_mass_gaps: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityVerdict {
    pub verdict: Solvability,
    pub witness_a: Option<f64>,
    pub q0_at_witness: Option<f64>,
    pub evidence: Vec<Q0Estimate>,
    pub mass_probe: Option<MassProbe>,
}

/// Scans `q0(a)` for `a` along the ladder and stops at the first estimate above
/// `1e-6`. When none clears it, the ladder is rescanned on a window of at least
/// `8 max(a)` and the verdict is `NotSolvable` only if a mass probe also points at
/// finite total mass or exact zero-mass gaps.
pub fn solvability_verdict(c: &Coefficient, a_ladder: &[f64], window: f64, grid_step: f64) -> Result<SolvabilityVerdict> {
    if a_ladder.is_empty() {
        return Err(invalid("a_ladder is empty"));
    }
    if a_ladder.windows(2).any(|w| w[1] <= w[0]) || !(a_ladder[0] > 0.0) {
        return Err(invalid(format!("a_ladder must be positive and increasing, got {a_ladder:?}")));
    }
    let mut evidence = Vec::with_capacity(a_ladder.len());
    for &a in a_ladder {
        let est = q0_estimate(c, a, window, grid_step)?;
        evidence.push(est);
        if est.inf_value > MASS_THRESHOLD {
            return Ok(SolvabilityVerdict {
                verdict: Solvability::Solvable,
                witness_a: Some(a),
                q0_at_witness: Some(est.inf_value),
                evidence,
                mass_probe: None,
            });
        }
    }

    let a_max = a_ladder[a_ladder.len() - 1];
    let wide = window.max(NOT_SOLVABLE_WINDOW_FACTOR * a_max);
    if wide > window {
        for &a in a_ladder {
            evidence.push(q0_estimate(c, a, wide, grid_step)?);
        }
    }
    let probe = mass_probe(c, wide, &evidence)?;
    let verdict = if probe.finite_mass || probe.zero_mass_gaps {
        Solvability::NotSolvable
    } else {
        Solvability::Inconclusive
    };
    Ok(SolvabilityVerdict {
        verdict,
        witness_a: None,
        q0_at_witness: None,
        evidence,
        mass_probe: Some(probe),
    })
}

fn mass_probe(c: &Coefficient, window: f64, evidence: &[Q0Estimate]) -> Result<MassProbe> {
    let spec = c.integrand();
    let central_mass = integrate(&spec, -window, window, 1e-10)?.value;
    let mut tail_masses = Vec::with_capacity(2 * TAIL_PROBES);
    let mut finite_mass = true;
    for side in [-1.0, 1.0] {
        let mut last = f64::INFINITY;
        for k in 0..TAIL_PROBES {
            let t = side * window * (1 + k) as f64;
            let m = integrate(&spec, t - 1.0, t + 1.0, 1e-12)?.value;
            finite_mass &= m <= last;
            last = m;
            tail_masses.push((t, m));
        }
        finite_mass &= last < MASS_THRESHOLD;
    }
    let zero_mass_gaps = evidence.iter().all(|e| e.inf_value <= ZERO_GAP);
    Ok(MassProbe {
        window,
        central_mass,
        tail_masses,
        finite_mass,
        zero_mass_gaps,
    })
}
