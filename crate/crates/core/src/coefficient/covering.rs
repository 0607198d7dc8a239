//! Coverings of `[origin, ∞)` by abutting segments `Δn = [xn - dn, xn + dn]`
//! with `dn = d(xn)`, each of mass 2.

use serde::Serialize;

use super::dfun::{d_from_table, plateau_slack, DOptions};
use super::{Coefficient, MassTable};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub center: f64,
    pub radius: f64,
    pub left: f64,
    pub right: f64,
    /// `∫_left^right q`.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Covering {
    pub origin: f64,
    pub segments: Vec<Segment>,
}

pub fn r_covering(c: &Coefficient, origin: f64, count: usize) -> Result<Covering> {
    r_covering_with(c, origin, count, DOptions::default())
}

/// Builds the segments left to right. Given the left end `L`, the right end `R`
/// is the leftmost solution of `∫_L^R q = 2`; the midpoint `c` then satisfies
/// `c - d(c) = L` unless `q` vanishes near an end of `[L, R]`, in which case the
/// center is found by bisection on `c - d(c) - L`.
pub fn r_covering_with(c: &Coefficient, origin: f64, count: usize, opts: DOptions) -> Result<Covering> {
    if count == 0 {
        return Err(invalid("covering needs at least one segment"));
    }
    if !origin.is_finite() {
        return Err(invalid(format!("origin must be finite, got {origin}")));
    }
    opts.validate()?;
    let table = c.mass_table(origin);
    let mut segments = Vec::with_capacity(count);
    let mut left = origin;
    for _ in 0..count {
        let seg = segment_from(c, &table, left, opts)?;
        left = seg.right;
        segments.push(seg);
    }
    Ok(Covering { origin, segments })
}

fn mass_ahead(table: &MassTable, left: f64, opts: DOptions) -> Result<f64> {
    let mass = |r: f64| table.integral(left, r);
    let target = 2.0 - plateau_slack(opts.root_tol);
    let horizon = 2.0 * opts.d_max;
    let mut lo = left;
    let mut step = opts.root_tol;
    let mut hi = left + step;
    let mut m_hi = mass(hi)?;
    while m_hi < target {
        if hi - left >= horizon {
            return Err(Error::MassDeficit {
                x: left,
                d_max: opts.d_max,
                mass: m_hi,
            });
        }
        lo = hi;
        step *= 2.0;
        hi = (left + step).min(left + horizon);
        m_hi = mass(hi)?;
    }
    while hi - lo > 4.0 * f64::EPSILON * hi.abs().max(f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mass(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn segment_from(c: &Coefficient, table: &MassTable, left: f64, opts: DOptions) -> Result<Segment> {
    let right = mass_ahead(table, left, opts)?;
    let center = 0.5 * (left + right);
    let radius = 0.5 * (right - left);
    let d = d_from_table(&c.mass_table(center), center, opts)?.d;
    let slack = 4.0 * opts.root_tol * radius.max(1.0);
    if (d - radius).abs() <= slack {
        return Ok(Segment {
            center,
            radius,
            left,
            right,
            mass: table.integral(left, right)?,
        });
    }

    // φ(c) = c - d(c) - L is negative at c = L and grows at least like
    // (c - L) - d0; walk right until it changes sign, then bisect.
    let phi = |x: f64| -> Result<f64> { Ok(x - d_from_table(&c.mass_table(x), x, opts)?.d - left) };
    let mut lo = left;
    let mut hi = right;
    let mut step = radius.max(opts.root_tol);
    while phi(hi)? < 0.0 {
        lo = hi;
        hi += step;
        step *= 2.0;
        if hi - left > 2.0 * opts.d_max {
            return Err(Error::BracketFailure {
                from: left,
                horizon: 2.0 * opts.d_max,
            });
        }
    }
    for _ in 0..200 {
        if hi - lo <= opts.root_tol * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let center = hi;
    let radius = d_from_table(&c.mass_table(center), center, opts)?.d;
    let right = center + radius;
    Ok(Segment {
        center,
        radius,
        left,
        right,
        mass: table.integral(left, right)?,
    })
}
