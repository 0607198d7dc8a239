//! Tabulated antiderivative `R(t) = ∫_origin^t f`, extended lazily in both
//! directions with piecewise Chebyshev interpolants.
//!
//! Every sweep in the crate (mass scans, `d(x)` brackets, tail exponents) asks for
//! `∫ q` over thousands of nearby windows. Tabulating once turns each of those into
//! two table lookups instead of a fresh adaptive quadrature.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use super::partition::next_width;
use super::PhaseHint;
use crate::error::{invalid, Error, Result};

/// Polynomial degree of each panel interpolant.
const N: usize = 16;
const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone)]
pub struct RunningOptions {
    /// Widest panel allowed before the accuracy test is even tried.
    pub max_width: f64,
    /// Relative accuracy asked of each panel, measured against max |f| on it.
    pub rel_tol: f64,
    /// Absolute floor on the Chebyshev tail, in integrand units.
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl Default for RunningOptions {
    fn default() -> Self {
        Self {
            max_width: 0.5,
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            max_evaluations: 4_000_000,
        }
    }
}

#[derive(Debug, Clone)]
struct ChebPanel {
    lo: f64,
    hi: f64,
    /// Chebyshev coefficients of the antiderivative on [lo, hi], zero at lo.
    coef: [f64; N + 2],
    total: f64,
}

impl ChebPanel {
    fn eval(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 0.0;
        }
        if t >= self.hi {
            return self.total;
        }
        let s = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        clenshaw(&self.coef, s)
    }
}

fn clenshaw(c: &[f64], s: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + c[0]
}

#[derive(Debug, Default)]
struct Side {
    panels: Vec<ChebPanel>,
    /// Signed integral from the origin to the near edge of each panel.
    near: Vec<f64>,
    frontier: f64,
    frontier_value: f64,
}

pub struct RunningIntegral<F> {
    f: F,
    hint: Option<PhaseHint>,
    breakpoints: Vec<f64>,
    origin: f64,
    opts: RunningOptions,
    right: RefCell<Side>,
    left: RefCell<Side>,
    evaluations: Cell<usize>,
    error: Cell<f64>,
}

impl<F: Fn(f64) -> f64> RunningIntegral<F> {
    pub fn new(f: F, origin: f64) -> Self {
        Self::with_options(f, origin, None, Vec::new(), RunningOptions::default())
    }

    pub fn with_options(
        f: F,
        origin: f64,
        hint: Option<PhaseHint>,
        mut breakpoints: Vec<f64>,
        opts: RunningOptions,
    ) -> Self {
        breakpoints.retain(|b| b.is_finite());
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let side = || {
            RefCell::new(Side {
                frontier: origin,
                ..Side::default()
            })
        };
        Self {
            f,
            hint,
            breakpoints,
            origin,
            opts,
            right: side(),
            left: side(),
            evaluations: Cell::new(0),
            error: Cell::new(0.0),
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations.get()
    }

    /// Sum of per-panel error estimates over everything tabulated so far.
    pub fn error_estimate(&self) -> f64 {
        self.error.get()
    }

    /// `∫_origin^t f`, signed.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(invalid(format!("running integral requested at {t}")));
        }
        if t >= self.origin {
            self.extend(&self.right, t, 1.0)?;
            let side = self.right.borrow();
            if side.panels.is_empty() {
                return Ok(0.0);
            }
            let k = side.panels.partition_point(|p| p.lo <= t).max(1) - 1;
            Ok(side.near[k] + side.panels[k].eval(t))
        } else {
            self.extend(&self.left, t, -1.0)?;
            let side = self.left.borrow();
            let k = side.panels.partition_point(|p| p.lo > t);
            let k = k.min(side.panels.len() - 1);
            let p = &side.panels[k];
            Ok(side.near[k] - (p.total - p.eval(t)))
        }
    }

    /// `∫_u^v f`.
    pub fn integral(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.value(v)? - self.value(u)?)
    }

    fn extend(&self, side: &RefCell<Side>, t: f64, dir: f64) -> Result<()> {
        let mut s = side.borrow_mut();
        while (t - s.frontier) * dir > 0.0 {
            let start = s.frontier;
            let mut w = next_width(self.hint.as_ref(), start, dir, self.opts.max_width)?;
            let end_guess = start + dir * w;
            if let Some(bp) = self.next_breakpoint(start, end_guess, dir) {
                w = (bp - start).abs();
            }
            let end = start + dir * w;
            let (lo, hi) = if dir > 0.0 { (start, end) } else { (end, start) };
            let mut built = Vec::new();
            self.build(lo, hi, 0, &mut built)?;
            if dir < 0.0 {
                built.reverse();
            }
            for p in built {
                let near = s.frontier_value;
                s.frontier_value += dir * p.total;
                s.frontier = if dir > 0.0 { p.hi } else { p.lo };
                s.near.push(near);
                s.panels.push(p);
            }
        }
        Ok(())
    }

    fn next_breakpoint(&self, start: f64, end: f64, dir: f64) -> Option<f64> {
        let inside = |b: f64| (b - start) * dir > 0.0 && (end - b) * dir > 0.0;
        if dir > 0.0 {
            self.breakpoints.iter().copied().find(|&b| inside(b))
        } else {
            self.breakpoints.iter().rev().copied().find(|&b| inside(b))
        }
    }

    fn build(&self, lo: f64, hi: f64, depth: u32, out: &mut Vec<ChebPanel>) -> Result<()> {
        let used = self.evaluations.get() + N + 1;
        if used > self.opts.max_evaluations {
            return Err(Error::PanelBudgetExceeded {
                evaluations: used,
                cap: self.opts.max_evaluations,
            });
        }
        self.evaluations.set(used);

        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut vals = [0.0; N + 1];
        let mut fmax: f64 = 0.0;
        for (j, v) in vals.iter_mut().enumerate() {
            let t = mid + half * (j as f64 * PI / N as f64).cos();
            let y = (self.f)(t);
            if !y.is_finite() {
                return Err(Error::NonFiniteEvaluation { at: t, value: y });
            }
            fmax = fmax.max(y.abs());
            *v = y;
        }
        let a = chebyshev_coefficients(&vals);
        let tail = a[N - 1].abs() + a[N].abs();
        // cos(g) cannot be evaluated better than ε·|g| in absolute terms
        let phase_noise = match &self.hint {
            Some(h) => 16.0 * f64::EPSILON * h.phase(lo).abs().max(h.phase(hi).abs()) * fmax,
            None => 0.0,
        };
        let accepted = tail <= self.opts.rel_tol * fmax + phase_noise + self.opts.abs_tol;
        let tiny = half <= 8.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300);
        if accepted || depth >= MAX_DEPTH || tiny {
            if !accepted {
                self.error.set(self.error.get() + 2.0 * half * tail);
            }
            out.push(integrate_series(&a, lo, hi));
            return Ok(());
        }
        self.build(lo, mid, depth + 1, out)?;
        self.build(mid, hi, depth + 1, out)
    }
}

/// Coefficients `a_k` with `f(s) ≈ Σ a_k T_k(s)` from values at `cos(jπ/N)`.
fn chebyshev_coefficients(vals: &[f64; N + 1]) -> [f64; N + 1] {
    let mut table = [0.0; 2 * N];
    for (m, c) in table.iter_mut().enumerate() {
        *c = (m as f64 * PI / N as f64).cos();
    }
    let mut a = [0.0; N + 1];
    for (k, ak) in a.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (j, &v) in vals.iter().enumerate() {
            let w = if j == 0 || j == N { 0.5 } else { 1.0 };
            sum += w * v * table[(j * k) % (2 * N)];
        }
        *ak = 2.0 * sum / N as f64;
    }
    a[0] *= 0.5;
    a[N] *= 0.5;
    a
}

fn integrate_series(a: &[f64; N + 1], lo: f64, hi: f64) -> ChebPanel {
    let half = 0.5 * (hi - lo);
    let at = |k: usize| if k <= N { a[k] } else { 0.0 };
    let mut c = [0.0; N + 2];
    c[1] = (2.0 * a[0] - at(2)) / 2.0;
    for k in 2..=N + 1 {
        c[k] = (at(k - 1) - at(k + 1)) / (2.0 * k as f64);
    }
    // fix the constant so the antiderivative vanishes at s = -1
    let mut at_minus_one = 0.0;
    for (k, ck) in c.iter().enumerate().skip(1) {
        at_minus_one += if k % 2 == 0 { *ck } else { -*ck };
    }
    c[0] = -at_minus_one;
    for ck in c.iter_mut() {
        *ck *= half;
    }
    let total = clenshaw(&c, 1.0);
    ChebPanel {
        lo,
        hi,
        coef: c,
        total,
    }
}
