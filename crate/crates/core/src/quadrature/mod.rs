//! Adaptive quadrature for oscillatory integrands and certified exponential tails.

mod adaptive;
mod kronrod;
mod partition;
mod running;
mod tail;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

pub(crate) use adaptive::integrate_fallible;
pub(crate) use kronrod::{gauss_kronrod_15, stepped_integral};
pub use partition::pre_partition;
pub use running::{RunningIntegral, RunningOptions};
pub(crate) use tail::weighted_exp_tail;
pub use tail::{integrate_exp_tail, truncation_point, TailOptions};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Phase `g` of an integrand containing `cos g(ξ)` or `sin g(ξ)`.
#[derive(Clone)]
pub struct PhaseHint {
    phase: RealFn,
    derivative: Option<RealFn>,
}

impl PhaseHint {
    /// Derivative taken by central differences.
    pub fn new(phase: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            phase: Arc::new(phase),
            derivative: None,
        }
    }

    pub fn with_derivative(
        phase: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            phase: Arc::new(phase),
            derivative: Some(Arc::new(derivative)),
        }
    }

    pub fn phase(&self, t: f64) -> f64 {
        (self.phase)(t)
    }

    /// `|g'(t)|`.
    pub fn slope(&self, t: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(t).abs(),
            None => {
                let h = 1e-5 * t.abs().max(1.0);
                ((self.phase)(t + h) - (self.phase)(t - h)).abs() / (2.0 * h)
            }
        }
    }

    /// Local oscillation wavelength `2π / |g'(t)|`.
    pub fn wavelength(&self, t: f64) -> f64 {
        2.0 * std::f64::consts::PI / self.slope(t)
    }
}

impl fmt::Debug for PhaseHint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseHint")
            .field("analytic_derivative", &self.derivative.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Smoothness {
    Smooth,
    Oscillatory,
    /// Smooth between the listed breakpoints.
    Piecewise(Vec<f64>),
}

#[derive(Clone)]
pub struct IntegrandSpec {
    pub evaluator: RealFn,
    pub phase_hint: Option<PhaseHint>,
    pub smoothness: Smoothness,
}

impl IntegrandSpec {
    pub fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(f),
            phase_hint: None,
            smoothness: Smoothness::Smooth,
        }
    }

    pub fn oscillatory(f: impl Fn(f64) -> f64 + Send + Sync + 'static, hint: PhaseHint) -> Self {
        Self {
            evaluator: Arc::new(f),
            phase_hint: Some(hint),
            smoothness: Smoothness::Oscillatory,
        }
    }

    pub fn piecewise(f: impl Fn(f64) -> f64 + Send + Sync + 'static, breakpoints: Vec<f64>) -> Self {
        Self {
            evaluator: Arc::new(f),
            phase_hint: None,
            smoothness: Smoothness::Piecewise(breakpoints),
        }
    }

    fn breakpoints(&self) -> &[f64] {
        match &self.smoothness {
            Smoothness::Piecewise(b) => b,
            _ => &[],
        }
    }
}

impl fmt::Debug for IntegrandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegrandSpec")
            .field("phase_hint", &self.phase_hint)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
    /// Right endpoint actually used, for semi-infinite requests only.
    pub truncated_at: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Cap on integrand evaluations per request.
    pub max_evaluations: usize,
    /// Optional relative tolerance; the effective target is `max(tol, rel_tol·|I|)`.
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            max_evaluations: 2_000_000,
            rel_tol: 0.0,
        }
    }
}

/// Mass floor `∫_{x-a}^{x+a} q ≥ q0` for every `x`, which certifies exponential decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFloor {
    pub a: f64,
    pub q0: f64,
}

impl DecayFloor {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.q0 > 0.0) {
            return Err(Error::NoDecay { q0: self.q0 });
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(invalid(format!("decay floor needs a > 0, got {}", self.a)));
        }
        Ok(())
    }

    /// Upper bound `2a + 2a/(1 - e^{-q0})` on `∫_x^∞ e^{-∫_x^t q} dt`, uniform in `x`.
    pub fn j0_bound(&self) -> f64 {
        2.0 * self.a + 2.0 * self.a / (-(-self.q0).exp_m1())
    }

    /// Floor for `s·q`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a,
            q0: s * self.q0,
        }
    }
}

pub fn integrate(spec: &IntegrandSpec, a: f64, b: f64, tol: f64) -> Result<IntegralResult> {
    integrate_with(spec, a, b, tol, &QuadratureConfig::default())
}

pub fn integrate_with(
    spec: &IntegrandSpec,
    a: f64,
    b: f64,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult> {
    let f = |t: f64| Ok((spec.evaluator)(t));
    integrate_fallible(&f, a, b, tol, spec.phase_hint.as_ref(), spec.breakpoints(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian_osc() -> IntegrandSpec {
        IntegrandSpec::oscillatory(
            |t: f64| (t * t).exp() * (t * t).exp().cos(),
            PhaseHint::with_derivative(|t: f64| (t * t).exp(), |t: f64| 2.0 * t * (t * t).exp()),
        )
    }

    #[test]
    fn constant_and_closed_form() {
        let one = integrate(&IntegrandSpec::smooth(|_| 1.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((one.value - 1.0).abs() < 1e-12);
        assert_eq!(one.truncated_at, None);
        let r = integrate(&IntegrandSpec::smooth(|t: f64| 1.0 + t.cos()), -1.0, 1.0, 1e-12).unwrap();
        assert!((r.value - (2.0 + 2.0 * 1f64.sin())).abs() < 1e-12);
    }

    #[test]
    fn numeric_phase_derivative_matches_analytic() {
        let numeric = PhaseHint::new(|t: f64| (t * t).exp());
        for t in [0.5f64, 2.0, 3.0] {
            let exact = 2.0 * t * (t * t).exp();
            assert!((numeric.slope(t) - exact).abs() <= 1e-6 * exact);
        }
    }

    #[test]
    fn empty_interval_and_bad_inputs() {
        let spec = IntegrandSpec::smooth(|t| t);
        assert_eq!(integrate(&spec, 2.0, 2.0, 1e-8).unwrap().value, 0.0);
        assert!(integrate(&spec, 2.0, 1.0, 1e-8).is_err());
        assert!(integrate(&spec, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn nonfinite_integrand() {
        let spec = IntegrandSpec::smooth(|t: f64| 1.0 / t);
        let err = integrate(&spec, 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEvaluation { .. }) || matches!(err, Error::PanelBudgetExceeded { .. }));
        let spec = IntegrandSpec::smooth(|t: f64| (t - 0.5).ln());
        assert!(matches!(integrate(&spec, 0.0, 1.0, 1e-8), Err(Error::NonFiniteEvaluation { .. })));
    }

    #[test]
    fn hint_controls_initial_panels() {
        let r = integrate(&gaussian_osc(), 2.0, 3.0, 1e-8).unwrap();
        assert!(r.panels_used > 5_000);
    }

    #[test]
    fn tail_truncation_monotone_in_tol() {
        let floor = DecayFloor { a: 1.0, q0: 2.0 };
        let acc = |t: f64| Ok(t + 0.3 * t.sin());
        let mut last = f64::INFINITY;
        for tol in [1e-14, 1e-12, 1e-10, 1e-8, 1e-6, 1e-3] {
            let r = integrate_exp_tail(acc, 0.0, floor, tol, &TailOptions::default()).unwrap();
            let t = r.truncated_at.unwrap();
            assert!(t <= last);
            last = t;
        }
    }

    #[test]
    fn j0_bound_matches_formula() {
        let floor = DecayFloor { a: 1.5, q0: 0.7 };
        let expect = 3.0 + 3.0 / (1.0 - (-0.7f64).exp());
        assert!((floor.j0_bound() - expect).abs() < 1e-14);
        assert_eq!(floor.scaled(2.0).q0, 1.4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn additivity(a in -3.0f64..3.0, l1 in 0.0f64..2.0, l2 in 0.0f64..2.0) {
            let spec = IntegrandSpec::smooth(|t: f64| (t * t).exp() * (3.0 * t).cos() + 1.0);
            let b = a + l1;
            let c = b + l2;
            let tol = 1e-10;
            let ac = integrate(&spec, a, c, tol).unwrap();
            let ab = integrate(&spec, a, b, tol).unwrap();
            let bc = integrate(&spec, b, c, tol).unwrap();
            let slack = ac.abs_error_estimate.max(tol)
                + ab.abs_error_estimate.max(tol)
                + bc.abs_error_estimate.max(tol);
            prop_assert!((ac.value - ab.value - bc.value).abs() <= slack);
        }

        #[test]
        fn truncation_never_grows_with_tol(scale in 0.5f64..3.0, tol_exp in -13.0f64..-4.0) {
            let floor = DecayFloor { a: 1.0, q0: scale };
            let acc = |t: f64| Ok(scale * 0.5 * t);
            let lo = integrate_exp_tail(acc, 0.0, floor, 10f64.powf(tol_exp), &TailOptions::default()).unwrap();
            let hi = integrate_exp_tail(acc, 0.0, floor, 10f64.powf(tol_exp + 1.0), &TailOptions::default()).unwrap();
            prop_assert!(hi.truncated_at.unwrap() <= lo.truncated_at.unwrap());
        }

        #[test]
        fn doubling_the_cut_changes_little(x in -2.0f64..2.0, tol_exp in -12.0f64..-5.0) {
            let tol = 10f64.powf(tol_exp);
            let floor = DecayFloor { a: 1.0, q0: 1.0 };
            // q = 1 + 0.5 cos t, mass floor ≥ 2 - 1 = 1 on every window of half-width 1
            let acc = move |t: f64| Ok((t - x) + 0.5 * (t.sin() - x.sin()));
            let r = integrate_exp_tail(acc, x, floor, tol, &TailOptions::default()).unwrap();
            let cut = r.truncated_at.unwrap();
            let far = x + 2.0 * (cut - x);
            let f = |t: f64| Ok((-acc(t)?).exp());
            let longer = integrate_fallible(&f, x, far, tol / 4.0, None, &[], &QuadratureConfig::default()).unwrap();
            prop_assert!((longer.value - r.value).abs() < 2.0 * tol);
        }
    }
}
