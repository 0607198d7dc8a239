//! Windowed grid estimates of `inf_x ∫_{x-a}^{x+a} q` and `sup_x d(x)`.
//!
//! Both are lower-confidence numbers: the extremum over the real line is
//! replaced by the extremum over `{-X, -X + h, …, X}`.

use rayon::prelude::*;
use serde::Serialize;

use super::dfun::{d_from_table, DOptions};
use super::Coefficient;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Q0Estimate {
    pub a: f64,
    pub inf_value: f64,
    pub argmin_x: f64,
    pub window: (f64, f64),
    pub grid_step: f64,
}

pub(crate) fn grid(window: f64, step: f64) -> Vec<f64> {
    grid_between(-window, window, step)
}

/// `{lo, lo + h, …}` up to `hi`, with `hi` included when it lies on the lattice.
pub(crate) fn grid_between(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn check_grid(window: f64, grid_step: f64) -> Result<()> {
    if !(window > 0.0 && window.is_finite()) {
        return Err(invalid(format!("window must be positive, got {window}")));
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(invalid(format!("grid_step must be positive, got {grid_step}")));
    }
    if 2.0 * window / grid_step > 1e7 {
        return Err(invalid("grid has more than 10^7 points"));
    }
    Ok(())
}

pub fn q0_estimate(c: &Coefficient, a: f64, window: f64, grid_step: f64) -> Result<Q0Estimate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    check_grid(window, grid_step)?;
    let table = c.mass_table(0.0);
    let mut best = (f64::INFINITY, 0.0);
    for x in grid(window, grid_step) {
        // tiny negative values are rounding in the split forms
        let v = table.integral(x - a, x + a)?.max(0.0);
        if v < best.0 {
            best = (v, x);
        }
    }
    Ok(Q0Estimate {
        a,
        inf_value: best.0,
        argmin_x: best.1,
        window: (-window, window),
        grid_step,
    })
}

/// Grid maximum of `d(x)`; evaluated in parallel, each point with its own table
/// anchored at the point.
pub fn d_sup_estimate(c: &Coefficient, window: f64, grid_step: f64, opts: DOptions) -> Result<f64> {
    check_grid(window, grid_step)?;
    opts.validate()?;
    let values: Vec<f64> = grid(window, grid_step)
        .into_par_iter()
        .map(|x| d_from_table(&c.mass_table(x), x, opts).map(|r| r.d))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}
