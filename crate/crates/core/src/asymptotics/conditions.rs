//! Probe-ladder checks of the five sufficient conditions on `(q1, q2, s)`:
//!
//! - a) `s(x) → ∞`
//! - b) `1/s(x) ≥ |q1'(x)| / q1(x)²`
//! - c) `s(x) / (x q1(x)) → 0`
//! - d) `ν⁻¹ ≤ s(t)/s(x) ≤ ν` for `t ∈ Δ(x)`
//! - e) `ϰ̃(x) → 0`
//!
//! Limits are read as strict monotone trends along the probes, and pointwise
//! inequalities are tested at the probes and on a 16-point grid over each `Δ(x)`.

use serde::Serialize;

use super::{delta_interval, kappa_tilde};
use crate::coefficient::Coefficient;
use crate::error::{invalid, Result};

const DELTA_GRID: usize = 16;
const KAPPA_PROBES: usize = 64;
const KAPPA_TOL: f64 = 1e-10;
/// `ϰ̃` values at or below this count as identically zero.
const KAPPA_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    pub name: &'static str,
    pub statement: &'static str,
    pub probes: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub conditions: Vec<ConditionRecord>,
    /// Largest `max(s(t)/s(x), s(x)/s(t))` seen in condition d).
    pub empirical_nu: f64,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.verdict == Verdict::Holds)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn trend_verdict(values: &[f64], ok: bool) -> Verdict {
    if values.len() < 3 {
        Verdict::Inconclusive
    } else if ok {
        Verdict::Holds
    } else {
        Verdict::Fails
    }
}

fn record(name: &'static str, statement: &'static str, probes: Vec<f64>, values: Vec<f64>, ok: bool) -> ConditionRecord {
    let verdict = trend_verdict(&values, ok);
    ConditionRecord {
        name,
        statement,
        probes,
        values,
        verdict,
    }
}

/// Evaluates a)–e) at `probe_xs`, which must be sorted by increasing `|x|`.
/// Fewer than three probes make every verdict inconclusive.
pub fn check_conditions(c: &Coefficient, probe_xs: &[f64]) -> Result<ConditionReport> {
    let split = c.split()?;
    let s = c.weight()?;
    if probe_xs.windows(2).any(|w| w[1].abs() < w[0].abs()) {
        return Err(invalid("probes must be sorted by increasing |x|"));
    }
    let xs = probe_xs.to_vec();

    let a_vals: Vec<f64> = xs.iter().map(|&x| s(x)).collect();
    let a_ok = a_vals.windows(2).all(|w| w[1] > w[0]) && a_vals.iter().all(|v| v.is_finite());

    // b) as |q1'| s / q1² ≤ 1, worst case over the probe and its Δ grid
    let b_at = |t: f64| -> Result<f64> {
        let q1 = (split.q1)(t);
        if !(q1 > 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(c.q1_prime(t)?.abs() * s(t) / (q1 * q1))
    };
    let grids: Vec<Option<Vec<f64>>> = xs
        .iter()
        .map(|&x| {
            delta_interval(c, x).ok().map(|d| {
                (0..DELTA_GRID)
                    .map(|j| d.lo + j as f64 * (d.hi - d.lo) / (DELTA_GRID - 1) as f64)
                    .collect()
            })
        })
        .collect();
    let mut b_vals = Vec::with_capacity(xs.len());
    for (x, grid) in xs.iter().zip(&grids) {
        let mut worst = b_at(*x)?;
        match grid {
            Some(g) => {
                for &t in g {
                    worst = worst.max(b_at(t)?);
                }
            }
            None => worst = f64::INFINITY,
        }
        b_vals.push(worst);
    }
    let b_ok = b_vals.iter().all(|&v| v <= 1.0);

    let c_probes: Vec<f64> = xs.iter().copied().filter(|x| x.abs() >= 1.0).collect();
    let c_vals: Vec<f64> = c_probes
        .iter()
        .map(|&x| s(x) / (x.abs() * (split.q1)(x)))
        .collect();
    let c_ok = strictly_decreasing(&c_vals) && c_vals.iter().all(|v| v.is_finite() && *v >= 0.0);

    let mut nu = 1.0f64;
    let mut d_vals = Vec::with_capacity(xs.len());
    for (x, grid) in xs.iter().zip(&grids) {
        let v = match grid {
            Some(g) => {
                let sx = s(*x);
                g.iter()
                    .map(|&t| {
                        let r = s(t) / sx;
                        if r > 0.0 && (split.q1)(t) > 0.0 {
                            r.max(1.0 / r)
                        } else {
                            f64::INFINITY
                        }
                    })
                    .fold(1.0, f64::max)
            }
            None => f64::INFINITY,
        };
        nu = nu.max(v);
        d_vals.push(v);
    }
    let d_ok = d_vals.iter().all(|v| v.is_finite());

    let mut e_vals = Vec::with_capacity(xs.len());
    let mut e_ok = true;
    for (x, grid) in xs.iter().zip(&grids) {
        if grid.is_none() {
            e_vals.push(f64::INFINITY);
            e_ok = false;
            continue;
        }
        e_vals.push(kappa_tilde(c, *x, KAPPA_PROBES, KAPPA_TOL)?.value);
    }
    e_ok &= e_vals
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] <= KAPPA_ZERO && w[1] <= KAPPA_ZERO));

    let conditions = vec![
        record("a", "s(x) increases to infinity", xs.clone(), a_vals, a_ok),
        record("b", "|q1'| s / q1^2 <= 1 on each probe and its Delta grid", xs.clone(), b_vals, b_ok),
        record("c", "s / (|x| q1) decreases to 0 (probes with |x| >= 1)", c_probes, c_vals, c_ok),
        record("d", "s(t)/s(x) stays within [1/nu, nu] on Delta(x)", xs.clone(), d_vals, d_ok),
        record("e", "kappa_tilde decreases to 0", xs, e_vals, e_ok),
    ];
    Ok(ConditionReport {
        conditions,
        empirical_nu: nu,
    })
}
