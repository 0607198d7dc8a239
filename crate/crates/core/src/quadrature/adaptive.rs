//! Error-driven refinement on top of the phase pre-partition.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::kronrod::{gauss_kronrod_15, PanelEstimate, EVALS_PER_PANEL};
use super::partition::pre_partition;
use super::{IntegralResult, PhaseHint, QuadratureConfig};
use crate::error::{invalid, Error, Result};

struct Panel {
    a: f64,
    b: f64,
    est: PanelEstimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error.total_cmp(&other.est.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Compensated (Neumaier) summation.
#[derive(Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.c
    }
}

/// A panel whose Kronrod/Gauss gap is at the level of rounding in the panel's
/// own magnitude cannot be improved by splitting.
fn at_roundoff(p: &Panel) -> bool {
    p.est.error <= 64.0 * f64::EPSILON * p.est.abs_value
        || (p.b - p.a) <= 8.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE)
}

/// Integrates a fallible integrand over `[a, b]`.
///
/// Internal breakpoints are honoured exactly; each piece is pre-partitioned by the
/// phase hint before adaptive bisection of the worst panel starts.
pub(crate) fn integrate_fallible<F>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    hint: Option<&PhaseHint>,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid(format!("interval [{a}, {b}] must be finite")));
    }
    if a > b {
        return Err(invalid(format!("interval [{a}, {b}] has a > b")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: 0,
            truncated_at: None,
        });
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let max_panels = cfg.max_evaluations / EVALS_PER_PANEL;
    let mut initial = Vec::new();
    let mut lo = a;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        initial.extend(pre_partition(hint, lo, hi, max_panels)?);
        lo = hi;
    }
    if initial.len() > max_panels {
        return Err(Error::PanelBudgetExceeded {
            evaluations: initial.len() * EVALS_PER_PANEL,
            cap: cfg.max_evaluations,
        });
    }

    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::with_capacity(initial.len());
    let mut settled: Vec<Panel> = Vec::new();
    let mut total_err = 0.0;
    let mut total = Neumaier::default();
    for (pa, pb) in initial {
        let est = gauss_kronrod_15(f, pa, pb)?;
        evaluations += EVALS_PER_PANEL;
        total_err += est.error;
        total.add(est.value);
        heap.push(Panel { a: pa, b: pb, est });
    }

    let target = |value: f64| tol.max(cfg.rel_tol * value.abs());
    let mut steps = 0usize;
    while total_err > target(total.total()) {
        let Some(worst) = heap.pop() else { break };
        if at_roundoff(&worst) {
            let mut worst = worst;
            let floor = 64.0 * f64::EPSILON * worst.est.abs_value;
            if floor > worst.est.error {
                total_err += floor - worst.est.error;
                worst.est.error = floor;
            }
            settled.push(worst);
            continue;
        }
        if evaluations + 2 * EVALS_PER_PANEL > cfg.max_evaluations {
            return Err(Error::PanelBudgetExceeded {
                evaluations: evaluations + 2 * EVALS_PER_PANEL,
                cap: cfg.max_evaluations,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gauss_kronrod_15(f, worst.a, mid)?;
        let right = gauss_kronrod_15(f, mid, worst.b)?;
        evaluations += 2 * EVALS_PER_PANEL;
        total_err += left.error + right.error - worst.est.error;
        total.add(left.value);
        total.add(right.value);
        total.add(-worst.est.value);
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });

        // the running error total drifts; refresh it now and then
        steps += 1;
        if steps % 1024 == 0 {
            total_err = heap.iter().chain(settled.iter()).map(|p| p.est.error).sum();
        }
    }

    let mut value = Neumaier::default();
    let mut err = 0.0;
    let panels_used = heap.len() + settled.len();
    for p in heap.iter().chain(settled.iter()) {
        value.add(p.est.value);
        err += p.est.error;
    }
    Ok(IntegralResult {
        value: value.total(),
        abs_error_estimate: err,
        panels_used,
        truncated_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> IntegralResult {
        let g = |t| Ok(f(t));
        integrate_fallible(&g, a, b, tol, None, &[], &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn neumaier_recovers_cancelled_bits() {
        let mut s = Neumaier::default();
        for v in [1.0, 1e100, 1.0, -1e100] {
            s.add(v);
        }
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = run(|t: f64| t.sqrt(), 0.0, 1.0, 1e-10);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
        assert!(r.panels_used > 1);
    }

    #[test]
    fn breakpoint_at_kink() {
        let g = |t: f64| Ok((t - 0.3).abs());
        let r = integrate_fallible(&g, 0.0, 1.0, 1e-13, None, &[0.3], &QuadratureConfig::default())
            .unwrap();
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
        assert_eq!(r.panels_used, 2);
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let g = |t: f64| Ok((1.0 / t).sin() / t);
        let cfg = QuadratureConfig {
            max_evaluations: 3_000,
            ..QuadratureConfig::default()
        };
        let err = integrate_fallible(&g, 1e-6, 1.0, 1e-12, None, &[], &cfg).unwrap_err();
        assert!(matches!(err, Error::PanelBudgetExceeded { cap: 3_000, .. }));
    }
}
