//! A-posteriori checks on computed solutions: the pointwise residual of the
//! equation, and the norm inequalities that correct solvability promises.

use rayon::prelude::*;
use serde::Serialize;

use super::{GreenOperator, LebesgueExponent, RightHandSide, SolutionSample};
use crate::coefficient::scan::grid_between;
use crate::error::{invalid, Error, Result};

/// Norms below this make the bound ratios meaningless.
pub const ZERO_RHS_NORM: f64 = 1e-13;
const SOLVE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `max |-y' + q y - f|` over interior grid points, `y'` by central differences.
    pub max_residual: f64,
    pub argmax_x: f64,
    pub step: f64,
    pub samples: Vec<SolutionSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub p: LebesgueExponent,
    /// `‖y‖_p / ‖f‖_p`.
    pub norm_ratio: f64,
    /// `‖q^{1/p} y‖_p / ‖f‖_p`.
    pub weighted_ratio: f64,
    /// `(‖y'‖_1 + ‖q y‖_1) / ‖f‖_1`, for `p = 1` only.
    pub separability_ratio: Option<f64>,
    pub f_norm: f64,
    pub y_norm: f64,
    /// Estimate of the part of `‖y‖_p` outside the domain, assuming `f` is
    /// negligible there: `y` decays from its boundary values at least as fast as
    /// the kernel does.
    pub tail_estimate: f64,
    pub domain: (f64, f64),
    pub grid_step: f64,
}

impl GreenOperator {
    /// `y` at every grid point, evaluated in parallel.
    pub fn solve_on_grid(&self, f: &RightHandSide, xs: &[f64], tol: f64) -> Result<Vec<SolutionSample>> {
        xs.par_iter().map(|&x| self.apply(f, x, tol)).collect()
    }

    pub fn residual_check(&self, f: &RightHandSide, xs: &[f64], tol: f64) -> Result<ResidualReport> {
        let h = uniform_step(xs)?;
        let samples = self.solve_on_grid(f, xs, tol)?;
        let mut worst = (0.0, xs[1]);
        for i in 1..xs.len() - 1 {
            let dy = (samples[i + 1].y - samples[i - 1].y) / (xs[i + 1] - xs[i - 1]);
            let x = xs[i];
            let r = (-dy + self.coef.eval(x) * samples[i].y - f.eval(x)).abs();
            if !(r <= worst.0) {
                worst = (r, x);
            }
        }
        Ok(ResidualReport {
            max_residual: worst.0,
            argmax_x: worst.1,
            step: h,
            samples,
        })
    }

    /// Ratios of solution norms to `‖f‖_p` on the grid `{lo, lo + h, …, hi}`.
    /// Integrals are trapezoidal; `p = ∞` norms are grid maxima. `y'` is taken
    /// from the equation, `y' = q y - f`, not from differences.
    pub fn bound_checks(
        &self,
        f: &RightHandSide,
        p: LebesgueExponent,
        domain: (f64, f64),
        grid_step: f64,
    ) -> Result<BoundReport> {
        let (lo, hi) = domain;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(invalid(format!("domain ({lo}, {hi}) is not an interval")));
        }
        if !(grid_step > 0.0 && grid_step < hi - lo) {
            return Err(invalid(format!("grid step {grid_step} does not fit the domain")));
        }
        let f_norm = f.p_norm(p, domain)?;
        if !(f_norm >= ZERO_RHS_NORM) {
            return Err(Error::ZeroRhs { norm: f_norm });
        }
        let xs = grid_between(lo, hi, grid_step);
        let ys: Vec<f64> = self
            .solve_on_grid(f, &xs, SOLVE_TOL)?
            .into_iter()
            .map(|s| s.y)
            .collect();
        let qs: Vec<f64> = xs.iter().map(|&x| self.coef.eval(x)).collect();

        let norm = |v: &dyn Fn(usize) -> f64| -> f64 {
            if p.is_infinite() {
                (0..xs.len()).map(|i| v(i).abs()).fold(0.0, f64::max)
            } else {
                trapezoid(&xs, |i| v(i).abs().powf(p.p)).powf(1.0 / p.p)
            }
        };
        let y_norm = norm(&|i| ys[i]);
        let weighted = if p.is_infinite() {
            y_norm
        } else {
            norm(&|i| qs[i].max(0.0).powf(1.0 / p.p) * ys[i])
        };
        let separability_ratio = p.is_one().then(|| {
            let dy = trapezoid(&xs, |i| (qs[i] * ys[i] - f.eval(xs[i])).abs());
            let qy = trapezoid(&xs, |i| (qs[i] * ys[i]).abs());
            (dy + qy) / f_norm
        });

        let (y_lo, y_hi) = (ys[0].abs(), ys[ys.len() - 1].abs());
        let tail_estimate = if p.is_infinite() {
            y_lo.max(y_hi)
        } else {
            let j0 = self.floor.scaled(p.p).j0_bound();
            ((y_lo.powf(p.p) + y_hi.powf(p.p)) * j0).powf(1.0 / p.p)
        };

        Ok(BoundReport {
            p,
            norm_ratio: y_norm / f_norm,
            weighted_ratio: weighted / f_norm,
            separability_ratio,
            f_norm,
            y_norm,
            tail_estimate,
            domain,
            grid_step,
        })
    }
}

fn uniform_step(xs: &[f64]) -> Result<f64> {
    if xs.len() < 3 {
        return Err(invalid("residual check needs at least 3 grid points"));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(invalid("grid must be increasing"));
    }
    for w in xs.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h {
            return Err(invalid("grid spacing must be uniform"));
        }
    }
    Ok(h)
}

fn trapezoid(xs: &[f64], v: impl Fn(usize) -> f64) -> f64 {
    let mut s = 0.0;
    for i in 1..xs.len() {
        s += 0.5 * (xs[i] - xs[i - 1]) * (v(i - 1) + v(i));
    }
    s
}

pub fn residual_check(
    c: &crate::coefficient::Coefficient,
    f: &RightHandSide,
    xs: &[f64],
    tol: f64,
) -> Result<ResidualReport> {
    GreenOperator::certified(c)?.residual_check(f, xs, tol)
}

pub fn bound_checks(
    c: &crate::coefficient::Coefficient,
    f: &RightHandSide,
    p: LebesgueExponent,
    domain: (f64, f64),
    grid_step: f64,
) -> Result<BoundReport> {
    GreenOperator::certified(c)?.bound_checks(f, p, domain, grid_step)
}
