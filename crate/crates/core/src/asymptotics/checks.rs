//! Probe-ladder evaluations of the asymptotic relations
//! `q1(x) J(x) = 1 + ε(x)`, `G_p(x) / ϰ_p(x) → 1` and `q1(x) d(x) = 1 + ε(x)`,
//! together with the `σ1, σ2` sizes that bound the last `ε`.

use rayon::prelude::*;
use serde::Serialize;

use super::majorant;
use crate::coefficient::{d_function, Coefficient, DOptions};
use crate::error::{invalid, Result};
use crate::green::{GreenOperator, LebesgueExponent};
use crate::quadrature::gauss_kronrod_15;

/// Grid points on `[-2/q1(x), 2/q1(x)]` for the `σ` sups.
const SIGMA_GRID: usize = 33;
const REFINED_CANDIDATES: usize = 4;
const MAX_HALVINGS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JCheck {
    pub x: f64,
    pub q1: f64,
    pub j: f64,
    /// `q1(x) J(x) - 1`.
    pub epsilon: f64,
    pub j_error: f64,
}

/// `ε(x) = q1(x) J(x) - 1` at each probe.
pub fn asymptotic_j_check(c: &Coefficient, probe_xs: &[f64], tol: f64) -> Result<Vec<JCheck>> {
    let op = GreenOperator::certified(c)?;
    probe_xs
        .par_iter()
        .map(|&x| {
            let q1 = c.q1(x)?;
            let j = op.j_integral(x, 1.0, tol)?;
            Ok(JCheck {
                x,
                q1,
                j: j.value,
                epsilon: q1 * j.value - 1.0,
                j_error: j.abs_error_estimate,
            })
        })
        .collect()
}

/// Smallest `c` with `q1 J ∈ [1/c, c]` at every row.
pub fn sandwich_constant(rows: &[JCheck]) -> f64 {
    rows.iter()
        .map(|r| {
            let v = 1.0 + r.epsilon;
            v.max(1.0 / v)
        })
        .fold(1.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormRatio {
    pub x: f64,
    pub green_norm: f64,
    pub majorant: f64,
    pub ratio: f64,
}

/// `G_p(x) / ϰ_p(x)` at each probe.
pub fn norm_majorant_ratios(c: &Coefficient, p: LebesgueExponent, probe_xs: &[f64], tol: f64) -> Result<Vec<NormRatio>> {
    let op = GreenOperator::certified(c)?;
    probe_xs
        .par_iter()
        .map(|&x| {
            let g = op.green_norm(x, p, tol)?;
            let m = majorant(c, p, x)?.value;
            Ok(NormRatio {
                x,
                green_norm: g,
                majorant: m,
                ratio: g / m,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sigma {
    pub x: f64,
    /// `sup_{|z|≤2/q1(x)} |∫_0^z [q1(x+t) - 2q1(x) + q1(x-t)] dt|`.
    pub sigma1: f64,
    /// `sup_{|z|≤2/q1(x)} |∫_{x-z}^{x+z} q2|`.
    pub sigma2: f64,
    pub z_max: f64,
    pub argmax_z1: f64,
    pub argmax_z2: f64,
}

struct Sup {
    value: f64,
    arg: f64,
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    at: f64,
    from: f64,
    f_from: f64,
    to: f64,
}

/// `sup_{0≤z≤zmax} |∫_0^z φ|`, sampled with at least `min_points` points and steps
/// no longer than `max_step(z)`, then refined around the largest local maxima.
/// Steps are halved until the summed Kronrod error estimate is within `tol`.
fn sup_abs_cumulative<P>(
    phi: &P,
    zmax: f64,
    min_points: usize,
    max_step: &dyn Fn(f64) -> f64,
    kinks: &[f64],
    tol: f64,
) -> Result<Sup>
where
    P: Fn(f64) -> Result<f64>,
{
    let mut scale = 1.0;
    for attempt in 0..=MAX_HALVINGS {
        let coarse = scale * zmax / (min_points - 1) as f64;
        let mut candidates: Vec<Candidate> = Vec::new();
        let mut err = 0.0;
        let (mut z, mut f) = (0.0, 0.0);
        let mut before = (0.0, 0.0, 0.0);
        let mut prev: Option<(f64, f64, f64)> = None;
        while z < zmax {
            let w = coarse.min(scale * max_step(z)).min(scale * max_step((z + coarse).min(zmax)));
            let mut next = (z + w).min(zmax);
            if let Some(&k) = kinks.iter().find(|&&k| k > z && k < next) {
                next = k;
            }
            let est = gauss_kronrod_15(phi, z, next)?;
            f += est.value;
            err += est.error;
            let v = f.abs();
            if let Some(p) = prev {
                if p.2 >= v && p.2 >= before.2 {
                    push(&mut candidates, Candidate { value: p.2, at: p.0, from: before.0, f_from: before.1, to: next });
                }
                before = p;
            }
            prev = Some((next, f, v));
            z = next;
        }
        if let Some(p) = prev {
            push(&mut candidates, Candidate { value: p.2, at: p.0, from: before.0, f_from: before.1, to: p.0 });
        }
        if err > tol && attempt < MAX_HALVINGS {
            scale *= 0.5;
            continue;
        }
        let mut best = Sup { value: 0.0, arg: 0.0 };
        for cand in candidates {
            let (v, t) = golden(phi, cand)?;
            if v > best.value {
                best = Sup { value: v, arg: t };
            }
        }
        return Ok(best);
    }
    unreachable!("the last attempt always returns")
}

fn push(list: &mut Vec<Candidate>, cand: Candidate) {
    if list.len() < REFINED_CANDIDATES {
        list.push(cand);
    } else if let Some((i, worst)) = list.iter().enumerate().min_by(|a, b| a.1.value.total_cmp(&b.1.value)) {
        if cand.value > worst.value {
            list[i] = cand;
        }
    }
}

fn golden<P>(phi: &P, cand: Candidate) -> Result<(f64, f64)>
where
    P: Fn(f64) -> Result<f64>,
{
    let value = |u: f64| -> Result<f64> {
        let piece = if u == cand.from { 0.0 } else { gauss_kronrod_15(phi, cand.from, u)?.value };
        Ok((cand.f_from + piece).abs())
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (cand.from, cand.to);
    let mut u = b - ratio * (b - a);
    let mut v = a + ratio * (b - a);
    let (mut fu, mut fv) = (value(u)?, value(v)?);
    for _ in 0..80 {
        if b - a <= 4.0 * f64::EPSILON * b.abs().max(f64::MIN_POSITIVE) {
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
    let mut best = (cand.value, cand.at);
    for (f, t) in [(fu, u), (fv, v)] {
        if f > best.0 {
            best = (f, t);
        }
    }
    Ok(best)
}

/// `σ1(x)` and `σ2(x)`. Both integrands are even in `z`, so the sups over
/// `|z| ≤ 2/q1(x)` are taken on `[0, 2/q1(x)]` with half of a 33-point grid
/// (refined to an eighth of the local oscillation wavelength when `q` carries a
/// phase hint).
pub fn sigma_pair(c: &Coefficient, x: f64, tol: f64) -> Result<Sigma> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    let split = c.split()?;
    let q1x = (split.q1)(x);
    if !(q1x > 0.0 && q1x.is_finite()) {
        return Err(invalid(format!("{}: q1({x}) = {q1x} must be positive", c.label)));
    }
    let zmax = 2.0 / q1x;
    let min_points = SIGMA_GRID / 2 + 1;
    let mut kinks: Vec<f64> = c.breakpoints.iter().map(|b| (b - x).abs()).filter(|&k| k > 0.0).collect();
    kinks.sort_by(f64::total_cmp);

    let second_difference = |t: f64| Ok((split.q1)(x + t) - 2.0 * q1x + (split.q1)(x - t));
    let smooth_step = |_: f64| f64::INFINITY;
    let s1 = sup_abs_cumulative(&second_difference, zmax, min_points, &smooth_step, &kinks, 0.5 * tol)?;

    let symmetric_q2 = |z: f64| Ok((split.q2)(x + z) + (split.q2)(x - z));
    let osc_step = |z: f64| match &c.phase_hint {
        Some(h) => h.wavelength(x + z).min(h.wavelength(x - z)) / 8.0,
        None => f64::INFINITY,
    };
    let s2 = sup_abs_cumulative(&symmetric_q2, zmax, min_points, &osc_step, &kinks, 0.5 * tol)?;

    Ok(Sigma {
        x,
        sigma1: s1.value,
        sigma2: s2.value,
        z_max: zmax,
        argmax_z1: s1.arg,
        argmax_z2: s2.arg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DRow {
    pub x: f64,
    pub d: f64,
    pub q1: f64,
    pub q1_times_d: f64,
    pub sigma1: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DAsymptotics {
    pub rows: Vec<DRow>,
    /// Both `σ1` and `σ2` strictly decrease along the probes.
    pub sigmas_vanish: bool,
}

/// `q1(x) d(x)` at each probe, with the `σ` pair alongside.
pub fn d_asymptotic_check(c: &Coefficient, probe_xs: &[f64], tol: f64) -> Result<DAsymptotics> {
    let opts = DOptions {
        root_tol: tol,
        ..DOptions::default()
    };
    let rows: Vec<DRow> = probe_xs
        .par_iter()
        .map(|&x| {
            let d = d_function(c, x, opts)?.d;
            let q1 = c.q1(x)?;
            let s = sigma_pair(c, x, tol)?;
            Ok(DRow {
                x,
                d,
                q1,
                q1_times_d: q1 * d,
                sigma1: s.sigma1,
                sigma2: s.sigma2,
            })
        })
        .collect::<Result<_>>()?;
    let sigmas_vanish = rows
        .windows(2)
        .all(|w| w[1].sigma1 < w[0].sigma1 && w[1].sigma2 < w[0].sigma2);
    Ok(DAsymptotics { rows, sigmas_vanish })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::{catalog, parse_coefficient};

    #[test]
    fn constant_coefficients_are_exact() {
        let one = catalog("constant_one").unwrap();
        for r in asymptotic_j_check(&one, &[-1.0, 0.0, 3.0], 1e-10).unwrap() {
            assert!(r.epsilon.abs() < 1e-9);
        }
        let two = parse_coefficient("2").unwrap();
        for r in asymptotic_j_check(&two, &[0.0, 5.0], 1e-10).unwrap() {
            assert!(r.epsilon.abs() < 1e-9);
        }
        for c in [&one, &two] {
            let s = sigma_pair(c, 1.5, 1e-12).unwrap();
            assert_eq!((s.sigma1, s.sigma2), (0.0, 0.0));
        }
        let d = d_asymptotic_check(&one, &[0.0, 2.0], 1e-10).unwrap();
        assert!(d.rows.iter().all(|r| (r.q1_times_d - 1.0).abs() < 1e-10));
    }

    #[test]
    fn exact_majorant_without_oscillation() {
        let one = catalog("constant_one").unwrap();
        for p in [LebesgueExponent::ONE, LebesgueExponent::new(3.0).unwrap(), LebesgueExponent::INFINITY] {
            for r in norm_majorant_ratios(&one, p, &[-2.0, 0.0, 2.0], 1e-11).unwrap() {
                assert!((r.ratio - 1.0).abs() < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn exp_osc_sigma_against_oracle() {
        let c = catalog("exp_osc").unwrap();
        // σ1 = 2e^x (sinh z - z) at z = 2e^{-x}; σ2 from Fresnel integrals after u = e^t
        let oracle = [
            (4.0, 8.9462702841744624e-4, 1.8318127968660964e-2),
            (5.0, 1.2106757865331133e-4, 6.7370483002732502e-3),
            (6.0, 1.6384586409604577e-5, 2.478767027247426e-3),
            (7.0, 2.2174102863775493e-6, 9.1188178856246786e-4),
        ];
        for (x, s1, s2) in oracle {
            let s = sigma_pair(&c, x, 1e-12).unwrap();
            assert!((s.sigma1 - s1).abs() <= 1e-8 * s1, "x={x}: {s:?}");
            assert!((s.sigma2 - s2).abs() <= 1e-8 * s2, "x={x}: {s:?}");
            assert!(s.sigma1 <= 10.0 * (-2.0 * x).exp() && s.sigma2 <= 10.0 * (-x).exp());
        }
    }

    #[test]
    fn sigma_is_even_for_even_coefficients() {
        let c = catalog("exp_osc").unwrap();
        for x in [3.0, 4.5] {
            let (p, m) = (sigma_pair(&c, x, 1e-12).unwrap(), sigma_pair(&c, -x, 1e-12).unwrap());
            assert!((p.sigma1 - m.sigma1).abs() <= 1e-12 && (p.sigma2 - m.sigma2).abs() <= 1e-12);
        }
    }

    #[test]
    fn gaussian_epsilon_against_oracle() {
        let c = catalog("gaussian_osc").unwrap();
        let rows = asymptotic_j_check(&c, &[1.5, 2.0, 2.5, 3.0], 1e-12).unwrap();
        let want = [-0.112_635_1, -0.216_666_4, 0.106_683_1, -0.100_316_9];
        for (r, w) in rows.iter().zip(want) {
            assert!((r.epsilon - w).abs() < 1e-6, "{r:?}");
        }
        assert!(sandwich_constant(&rows) < 1.3);
    }
}
