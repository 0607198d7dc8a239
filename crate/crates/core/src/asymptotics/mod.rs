//! Asymptotics of `J(x)` and `G_p(x)` for `q = q1 + q2` with a dominant, slowly
//! varying `q1`: the interval `Δ(x)`, the functions `ϰ`, `ϰ̃` and `μ`, the
//! checker for the five sufficient conditions, the majorant table, and the
//! `σ1, σ2` quantities that control `q1(x) d(x) → 1`.

mod checks;
mod conditions;

use serde::Serialize;

pub use checks::{
    asymptotic_j_check, d_asymptotic_check, norm_majorant_ratios, sandwich_constant, sigma_pair, DAsymptotics,
    DRow, JCheck, NormRatio, Sigma,
};
pub use conditions::{check_conditions, ConditionRecord, ConditionReport, Verdict};

use crate::coefficient::Coefficient;
use crate::error::{invalid, Result};
use crate::green::LebesgueExponent;
use crate::quadrature::{gauss_kronrod_15, integrate_fallible, stepped_integral, QuadratureConfig};

/// Evaluation cap for the `∫ q2/q1` integrals, which cross many oscillations.
const KAPPA_EVALUATIONS: usize = 50_000_000;
/// Local maxima of the coarse sweep that get refined.
const REFINED_CANDIDATES: usize = 4;

/// `Δ(x) = [x - s(x)/q1(x), x + s(x)/q1(x)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaInterval {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub half_width: f64,
}

pub fn delta_interval(c: &Coefficient, x: f64) -> Result<DeltaInterval> {
    let s = c.weight()?;
    let half_width = s(x) / c.q1(x)?;
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(invalid(format!(
            "{}: Δ({x}) has half-width {half_width}; s and q1 must be positive",
            c.label
        )));
    }
    Ok(DeltaInterval {
        x,
        lo: x - half_width,
        hi: x + half_width,
        half_width,
    })
}

fn ratio_fn(c: &Coefficient) -> Result<impl Fn(f64) -> Result<f64> + '_> {
    let split = c.split()?;
    Ok(move |t: f64| Ok((split.q2)(t) / (split.q1)(t)))
}

fn config() -> QuadratureConfig {
    QuadratureConfig {
        max_evaluations: KAPPA_EVALUATIONS,
        rel_tol: 0.0,
    }
}

/// `∫_x^t q2/q1`, oriented.
fn ratio_integral(c: &Coefficient, x: f64, t: f64, tol: f64) -> Result<f64> {
    let g = ratio_fn(c)?;
    let (a, b, sign) = if t >= x { (x, t, 1.0) } else { (t, x, -1.0) };
    let Some(hint) = &c.phase_hint else {
        let r = integrate_fallible(&g, a, b, tol, None, &c.breakpoints, &config())?;
        return Ok(sign * r.value);
    };
    // adaptive bisection spends most of its budget rediscovering the wavelength
    Ok(sign * stepped_integral(&g, a, b, hint, &c.breakpoints)?)
}

/// `ϰ(t) = q1(t) ∫_x^t q2/q1`, with the integral accurate to `tol / q1(t)` so that
/// `ϰ` itself is accurate to `tol`.
pub fn kappa(c: &Coefficient, x: f64, t: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    let q1 = c.q1(t)?;
    if t == x {
        return Ok(0.0);
    }
    Ok(q1 * ratio_integral(c, x, t, tol / q1.max(1.0))?)
}

/// `μ(t) = -(q1'(t) / q1(t)²) ϰ(t)`.
pub fn mu(c: &Coefficient, x: f64, t: f64, tol: f64) -> Result<f64> {
    let q1 = c.q1(t)?;
    Ok(-c.q1_prime(t)? / (q1 * q1) * kappa(c, x, t, tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaTilde {
    pub x: f64,
    /// Lower estimate of `sup_{t∈Δ(x)} |ϰ(t)|`.
    pub value: f64,
    pub argmax_t: f64,
    /// Points at which `ϰ` was sampled before refinement.
    pub samples: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    /// `|ϰ|` at the sample point `at`.
    value: f64,
    at: f64,
    /// The refinement bracket `[from, to]` and `∫_x^from q2/q1`.
    from: f64,
    r_from: f64,
    to: f64,
}

/// `ϰ̃(x) = sup_{t∈Δ(x)} |ϰ(t)|`, estimated from below.
///
/// `ϰ` is sampled on each half of `Δ(x)` walking out from `x`, with at least
/// `probes` points overall and at most an eighth of the local oscillation
/// wavelength between neighbours, so that every local extremum is seen. The
/// largest few sampled local maxima are then refined by golden-section search.
/// Each sampling step spans at most an eighth of a wavelength, where one
/// 15-point Kronrod rule is accurate far below any `tol` this function accepts.
pub fn kappa_tilde(c: &Coefficient, x: f64, probes: usize, tol: f64) -> Result<KappaTilde> {
    if !(tol >= 1e-14) {
        return Err(invalid(format!("tol must be at least 1e-14, got {tol}")));
    }
    if probes < 8 {
        return Err(invalid(format!("kappa_tilde needs at least 8 probes, got {probes}")));
    }
    let delta = delta_interval(c, x)?;
    let split = c.split()?;
    let g = ratio_fn(c)?;
    let coarse = 2.0 * delta.half_width / (probes - 1) as f64;

    let mut candidates: Vec<Candidate> = Vec::new();
    let mut samples = 1;
    for dir in [1.0, -1.0] {
        let edge = x + dir * delta.half_width;
        let mut t = x;
        let mut r = 0.0;
        // the last two samples as (t, ∫_x^t q2/q1, |ϰ(t)|); x itself has ϰ = 0
        let mut before = (x, 0.0, 0.0);
        let mut prev: Option<(f64, f64, f64)> = None;
        loop {
            let mut w = coarse;
            if let Some(h) = &c.phase_hint {
                w = w.min(h.wavelength(t).min(h.wavelength(t + dir * w)) / 8.0);
            }
            let next = if dir * (edge - (t + dir * w)) <= 0.0 { edge } else { t + dir * w };
            r += gauss_kronrod_15(&g, t, next)?.value;
            let k = ((split.q1)(next) * r).abs();
            samples += 1;
            if let Some(p) = prev {
                if p.2 >= k && p.2 >= before.2 {
                    push_candidate(&mut candidates, Candidate { value: p.2, at: p.0, from: before.0, r_from: before.1, to: next });
                }
                before = p;
            }
            prev = Some((next, r, k));
            t = next;
            if t == edge {
                break;
            }
        }
        // the edge of Δ(x) is a candidate even when |ϰ| is still rising there
        if let Some(p) = prev {
            push_candidate(&mut candidates, Candidate { value: p.2, at: p.0, from: before.0, r_from: before.1, to: p.0 });
        }
    }

    let mut best = (0.0, x);
    for cand in candidates {
        let (v, t) = refine(c, &g, cand)?;
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(KappaTilde {
        x,
        value: best.0,
        argmax_t: best.1,
        samples,
    })
}

fn push_candidate(list: &mut Vec<Candidate>, cand: Candidate) {
    if list.len() < REFINED_CANDIDATES {
        list.push(cand);
    } else if let Some((i, worst)) = list
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
    {
        if cand.value > worst.value {
            list[i] = cand;
        }
    }
}

/// Golden-section search for the largest `|ϰ|` on the candidate bracket.
fn refine<G>(c: &Coefficient, g: &G, cand: Candidate) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64>,
{
    let split = c.split()?;
    let value = |u: f64| -> Result<f64> {
        let piece = if u == cand.from {
            0.0
        } else {
            gauss_kronrod_15(g, cand.from, u)?.value
        };
        Ok(((split.q1)(u) * (cand.r_from + piece)).abs())
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (cand.from, cand.to);
    let mut u = b - ratio * (b - a);
    let mut v = a + ratio * (b - a);
    let (mut fu, mut fv) = (value(u)?, value(v)?);
    let mut best = (cand.value, cand.at);
    for _ in 0..80 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if fu > fv {
            b = v;
            v = u;
            fv = fu;
            u = b - ratio * (b - a);
            fu = value(u)?;
        } else {
            a = u;
            u = v;
            fu = fv;
            v = a + ratio * (b - a);
            fv = value(v)?;
        }
    }
    for (f, t) in [(fu, u), (fv, v)] {
        if f > best.0 {
            best = (f, t);
        }
    }
    Ok(best)
}

/// Value of the majorant table at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantValue {
    pub p: LebesgueExponent,
    pub x: f64,
    pub value: f64,
    /// True unless the caller supplied a condition report in which all five
    /// conditions hold.
    pub unverified: bool,
}

/// `1` for `p = 1`, `(p')^{-1/p'} q1(x)^{-1/p'}` for `1 < p < ∞`, `1/q1(x)` for
/// `p = ∞`.
pub fn majorant(c: &Coefficient, p: LebesgueExponent, x: f64) -> Result<MajorantValue> {
    let q1 = c.q1(x)?;
    let value = if p.is_one() {
        1.0
    } else if p.is_infinite() {
        1.0 / q1
    } else {
        let s = p.p_conj;
        (s * q1).powf(-1.0 / s)
    };
    Ok(MajorantValue {
        p,
        x,
        value,
        unverified: true,
    })
}

/// [`majorant`], flagged as verified when `report` shows every condition holding.
pub fn majorant_with(c: &Coefficient, p: LebesgueExponent, x: f64, report: &ConditionReport) -> Result<MajorantValue> {
    let mut m = majorant(c, p, x)?;
    m.unverified = !report.all_hold();
    Ok(m)
}
