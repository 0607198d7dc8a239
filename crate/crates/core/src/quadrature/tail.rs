//! Semi-infinite integrals `∫_x^∞ e^{-A(t)} w(t) dt` with a certified cut.
//!
//! When every window of length `2a` carries mass at least `q0 > 0`, the whole
//! tail past `T` is at most `e^{-A(T)} · sup_{t≥T}|w| · J0` with
//! `J0 = 2a + 2a / (1 - e^{-q0})`. The cut `T` walks a fixed ladder and stops
//! at the first rung whose bound fits in half the tolerance; the other half goes
//! to the finite part. The rungs are `x + 2a·2^{-k}` for `k = 48, …, 1`, then
//! `x + 2a·m` for `m = 1, 2, …`. Past one block the steps stay linear: a
//! doubling ladder would overshoot by up to a factor of two, and for rapidly
//! oscillating `q` the cost of tabulating `∫ q` out to the cut grows faster than
//! exponentially in its distance.

use super::adaptive::integrate_fallible;
use super::{DecayFloor, IntegralResult, PhaseHint, QuadratureConfig};
use crate::error::{invalid, Error, Result};

const FINE_RUNGS: i32 = 48;
const MAX_BLOCKS: u32 = 1 << 22;

fn rung(x: f64, block: f64, k: u32) -> f64 {
    let k = k as i32;
    if k < FINE_RUNGS {
        x + block * 2f64.powi(k - FINE_RUNGS)
    } else {
        x + block * f64::from(k - FINE_RUNGS + 1)
    }
}

#[derive(Clone, Default)]
pub struct TailOptions {
    pub phase_hint: Option<PhaseHint>,
    /// Points where the integrand may have a kink or jump.
    pub breakpoints: Vec<f64>,
    pub config: QuadratureConfig,
}

/// `∫_x^∞ exp(-A(t)) dt` where `A(t) = exponent_accumulator(t)` is nondecreasing
/// with `A(x) = 0`.
pub fn integrate_exp_tail<A>(
    exponent_accumulator: A,
    x: f64,
    floor: DecayFloor,
    tol: f64,
    opts: &TailOptions,
) -> Result<IntegralResult>
where
    A: Fn(f64) -> Result<f64>,
{
    weighted_exp_tail(&exponent_accumulator, &|_| Ok(1.0), &|_| 1.0, x, floor, tol, opts)
}

/// The cut used by [`integrate_exp_tail`] for the given inputs, without running
/// the finite-part quadrature.
pub fn truncation_point<A>(
    exponent_accumulator: &A,
    sup_weight: &dyn Fn(f64) -> f64,
    x: f64,
    floor: DecayFloor,
    tail_tol: f64,
) -> Result<(f64, f64)>
where
    A: Fn(f64) -> Result<f64>,
{
    floor.validate()?;
    let j0 = floor.j0_bound();
    let block = 2.0 * floor.a;
    for k in 0..FINE_RUNGS as u32 + MAX_BLOCKS {
        let t = rung(x, block, k);
        let m = sup_weight(t);
        let bound = if m == 0.0 {
            0.0
        } else {
            (-exponent_accumulator(t)?).exp() * m * j0
        };
        if bound <= tail_tol {
            return Ok((t, bound));
        }
    }
    Err(Error::BracketFailure {
        from: x,
        horizon: block * f64::from(MAX_BLOCKS),
    })
}

/// `∫_x^∞ exp(-A(t)) w(t) dt`. `sup_weight(T)` must bound `|w|` on `[T, ∞)` and be
/// nonincreasing in `T`.
pub(crate) fn weighted_exp_tail<A, W>(
    exponent_accumulator: &A,
    weight: &W,
    sup_weight: &dyn Fn(f64) -> f64,
    x: f64,
    floor: DecayFloor,
    tol: f64,
    opts: &TailOptions,
) -> Result<IntegralResult>
where
    A: Fn(f64) -> Result<f64>,
    W: Fn(f64) -> Result<f64>,
{
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(invalid(format!("tol must be positive, got {tol}")));
    }
    if !x.is_finite() {
        return Err(invalid(format!("tail start must be finite, got {x}")));
    }
    let (cut, tail_bound) = truncation_point(exponent_accumulator, sup_weight, x, floor, 0.5 * tol)?;
    let integrand = |t: f64| -> Result<f64> {
        let w = weight(t)?;
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok((-exponent_accumulator(t)?).exp() * w)
    };
    let finite = integrate_fallible(
        &integrand,
        x,
        cut,
        0.5 * tol,
        opts.phase_hint.as_ref(),
        &opts.breakpoints,
        &opts.config,
    )?;
    Ok(IntegralResult {
        value: finite.value,
        abs_error_estimate: finite.abs_error_estimate + tail_bound,
        panels_used: finite.panels_used,
        truncated_at: Some(cut),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rate() {
        let floor = DecayFloor { a: 1.0, q0: 2.0 };
        let r = integrate_exp_tail(|t| Ok(t), 0.0, floor, 1e-10, &TailOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        assert!(r.truncated_at.unwrap() > 20.0);
    }

    #[test]
    fn rate_two_from_five() {
        let floor = DecayFloor { a: 1.0, q0: 4.0 };
        let r = integrate_exp_tail(|t| Ok(2.0 * (t - 5.0)), 5.0, floor, 1e-10, &TailOptions::default())
            .unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn gaussian_decay_against_erfc() {
        // ∫_0^∞ e^{-t - t²} = (√π/2) e^{1/4} erfc(1/2)
        let floor = DecayFloor { a: 1.0, q0: 2.0 };
        let w = |t: f64| Ok((-t * t).exp());
        let r = weighted_exp_tail(&|t| Ok(t), &w, &|t: f64| (-t * t).exp(), 0.0, floor, 1e-12, &TailOptions::default())
            .unwrap();
        assert!((r.value - 0.545_641_360_765_047_042_099_387_827_377).abs() < 1e-11);
    }

    #[test]
    fn zero_floor_is_rejected() {
        let floor = DecayFloor { a: 1.0, q0: 0.0 };
        let err = integrate_exp_tail(|t| Ok(t), 0.0, floor, 1e-8, &TailOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoDecay { .. }));
    }

    #[test]
    fn indicator_weight_cuts_early() {
        let floor = DecayFloor { a: 1.0, q0: 2.0 };
        let w = |t: f64| Ok(if t <= 1.0 { 1.0 } else { 0.0 });
        let sup = |t: f64| if t < 1.0 { 1.0 } else { 0.0 };
        let opts = TailOptions {
            breakpoints: vec![1.0],
            ..TailOptions::default()
        };
        let r = weighted_exp_tail(&|t| Ok(t), &w, &sup, 0.0, floor, 1e-12, &opts).unwrap();
        assert!((r.value - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
        assert!(r.truncated_at.unwrap() <= 2.0);
    }
}
