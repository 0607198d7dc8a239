//! Phase-driven pre-partition: panels no wider than one eighth of the local
//! oscillation wavelength `2π / |g'(ξ)|`.

use std::f64::consts::PI;

use super::PhaseHint;
use crate::error::{Error, Result};

/// Smallest local wavelength over the panel `[lo, hi]`, sampled at both ends and
/// the midpoint. Infinite when the phase is stationary there.
fn min_wavelength(hint: &PhaseHint, lo: f64, hi: f64) -> Result<f64> {
    let mut lam = f64::INFINITY;
    for t in [lo, 0.5 * (lo + hi), hi] {
        let slope = hint.slope(t);
        if !slope.is_finite() {
            return Err(Error::NonFiniteEvaluation { at: t, value: slope });
        }
        if slope > 0.0 {
            lam = lam.min(2.0 * PI / slope);
        }
    }
    Ok(lam)
}

/// Width of the next panel starting at `start` and moving in direction `dir`
/// (`+1.0` or `-1.0`), capped at `max_width`.
pub(crate) fn next_width(
    hint: Option<&PhaseHint>,
    start: f64,
    dir: f64,
    max_width: f64,
) -> Result<f64> {
    let Some(hint) = hint else {
        return Ok(max_width);
    };
    // start from the local wavelength so a wide trial panel reaching into a
    // faster region does not shrink the step far below what is needed here
    let mut w = max_width.min(min_wavelength(hint, start, start)? / 8.0);
    for _ in 0..200 {
        let end = start + dir * w;
        let (lo, hi) = if dir > 0.0 { (start, end) } else { (end, start) };
        let cap = min_wavelength(hint, lo, hi)? / 8.0;
        if w <= cap {
            return Ok(w);
        }
        w = cap.min(0.9 * w);
        if w <= f64::EPSILON * start.abs().max(1.0) {
            break;
        }
    }
    Err(Error::NonFiniteEvaluation {
        at: start,
        value: f64::INFINITY,
    })
}

/// Splits `[a, b]` into panels respecting the wavelength rule. Without a hint the
/// interval is returned whole.
pub fn pre_partition(
    hint: Option<&PhaseHint>,
    a: f64,
    b: f64,
    max_panels: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut panels = Vec::new();
    if b <= a {
        return Ok(panels);
    }
    let mut t = a;
    while t < b {
        let w = next_width(hint, t, 1.0, b - t)?;
        let end = if b - (t + w) <= 1e-15 * b.abs().max(1.0) { b } else { t + w };
        panels.push((t, end));
        if panels.len() > max_panels {
            return Err(Error::PanelBudgetExceeded {
                evaluations: panels.len() * super::kronrod::EVALS_PER_PANEL,
                cap: max_panels * super::kronrod::EVALS_PER_PANEL,
            });
        }
        t = end;
    }
    Ok(panels)
}
