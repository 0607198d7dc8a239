//! The Green operator `(G f)(x) = ∫_x^∞ exp(-∫_x^t q) f(t) dt` and the
//! integrals built from its kernel: `J_s(x)`, the norm function `G_p(x)` and the
//! a-posteriori checks on computed solutions.
//!
//! Every semi-infinite integral is cut with the geometric tail bound, which needs
//! a mass floor `∫_{x-a}^{x+a} q ≥ q0 > 0`. [`GreenOperator::certified`] finds one
//! by a windowed scan; [`GreenOperator::with_floor`] accepts a known one.

mod checks;
mod rhs;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use checks::{bound_checks, residual_check, BoundReport, ResidualReport, ZERO_RHS_NORM};
pub use rhs::{RhsKind, RightHandSide};

use crate::coefficient::{q0_estimate, Coefficient, MassTable};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{
    integrate_with, weighted_exp_tail, DecayFloor, IntegralResult, QuadratureConfig, TailOptions,
};

/// Half-widths tried, in order, when looking for a mass floor.
pub const FLOOR_LADDER: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
/// A windowed scan value below this is treated as zero.
pub const MASS_THRESHOLD: f64 = 1e-6;
/// The scanned infimum only covers a window, so the floor handed to the tail
/// bound is this fraction of it.
pub const FLOOR_SAFETY: f64 = 0.5;

/// `p ∈ [1, ∞]` together with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueExponent {
    pub p: f64,
    pub p_conj: f64,
}

impl LebesgueExponent {
    pub const ONE: Self = Self {
        p: 1.0,
        p_conj: f64::INFINITY,
    };
    pub const INFINITY: Self = Self {
        p: f64::INFINITY,
        p_conj: 1.0,
    };

    pub fn new(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Self::ONE)
        } else if p == f64::INFINITY {
            Ok(Self::INFINITY)
        } else if p > 1.0 && p.is_finite() {
            Ok(Self {
                p,
                p_conj: p / (p - 1.0),
            })
        } else {
            Err(invalid(format!("p must lie in [1, ∞], got {p}")))
        }
    }

    pub fn is_one(&self) -> bool {
        self.p == 1.0
    }

    pub fn is_infinite(&self) -> bool {
        self.p == f64::INFINITY
    }

    pub fn label(&self) -> String {
        if self.is_infinite() {
            "inf".into()
        } else {
            format!("{}", self.p)
        }
    }
}

impl FromStr for LebesgueExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| invalid(format!("cannot read p from '{s}'")))?;
                Self::new(p)
            }
        }
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for LebesgueExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionSample {
    pub x: f64,
    pub y: f64,
    pub error_estimate: f64,
    pub truncated_at: f64,
}

/// Finds a mass floor by scanning `q0(a)` over `FLOOR_LADDER` in the
/// coefficient's default window. The first `a` whose windowed infimum exceeds
/// [`MASS_THRESHOLD`] wins; the floor is [`FLOOR_SAFETY`] times that infimum.
pub fn find_decay_floor(c: &Coefficient) -> Result<DecayFloor> {
    let mut best = 0.0;
    for a in FLOOR_LADDER {
        let est = q0_estimate(c, a, c.reach, a / 16.0)?;
        if est.inf_value > MASS_THRESHOLD {
            return Ok(DecayFloor {
                a,
                q0: FLOOR_SAFETY * est.inf_value,
            });
        }
        best = f64::max(best, est.inf_value);
    }
    Err(Error::NotSolvable(format!(
        "{}: windowed q0(a) ≤ {best:e} for every a in {FLOOR_LADDER:?} on [-{r}, {r}]",
        c.label,
        r = c.reach
    )))
}

#[derive(Debug, Clone)]
pub struct GreenOperator {
    coef: Coefficient,
    floor: DecayFloor,
    config: QuadratureConfig,
}

impl GreenOperator {
    pub fn certified(c: &Coefficient) -> Result<Self> {
        let floor = find_decay_floor(c)?;
        Ok(Self::with_floor(c, floor))
    }

    pub fn with_floor(c: &Coefficient, floor: DecayFloor) -> Self {
        Self {
            coef: c.clone(),
            floor,
            config: QuadratureConfig::default(),
        }
    }

    pub fn with_config(mut self, config: QuadratureConfig) -> Self {
        self.config = config;
        self
    }

    pub fn coefficient(&self) -> &Coefficient {
        &self.coef
    }

    pub fn floor(&self) -> DecayFloor {
        self.floor
    }

    /// The operator for `q + λ`, `λ ≥ 0`. Every window of half-width `a` gains
    /// mass `2aλ`, so the floor carries over.
    pub fn shifted(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("shift must be nonnegative, got {lambda}")));
        }
        Ok(Self {
            coef: self.coef.shifted(lambda),
            floor: DecayFloor {
                a: self.floor.a,
                q0: self.floor.q0 + 2.0 * self.floor.a * lambda,
            },
            config: self.config.clone(),
        })
    }

    /// The operator for `t ↦ q(-t)`; its `J` is the left-sided integral of `q`.
    pub fn reflected(&self) -> Self {
        Self {
            coef: self.coef.reflected(),
            floor: self.floor,
            config: self.config.clone(),
        }
    }

    fn tail_options(&self, extra_breaks: &[f64]) -> TailOptions {
        let mut breakpoints = self.coef.breakpoints.clone();
        breakpoints.extend_from_slice(extra_breaks);
        TailOptions {
            phase_hint: self.coef.phase_hint.clone(),
            breakpoints,
            config: self.config.clone(),
        }
    }

    fn table(&self, x: f64) -> Result<MassTable> {
        if !x.is_finite() {
            return Err(invalid(format!("x must be finite, got {x}")));
        }
        Ok(self.coef.mass_table(x))
    }

    /// `G(x, t)`: zero for `t < x`, else `exp(-∫_x^t q)` with the exponent
    /// integrated adaptively to `tol`.
    pub fn kernel(&self, x: f64, t: f64, tol: f64) -> Result<f64> {
        if t < x {
            return Ok(0.0);
        }
        let r = integrate_with(&self.coef.integrand(), x, t, tol, &self.config)?;
        Ok((-r.value).exp())
    }

    /// `y(x) = (G f)(x)`.
    pub fn apply(&self, f: &RightHandSide, x: f64, tol: f64) -> Result<SolutionSample> {
        let table = self.table(x)?;
        let r = weighted_exp_tail(
            &|t| table.integral(x, t),
            &|t| Ok(f.eval(t)),
            &|t| f.sup_tail(t),
            x,
            self.floor,
            tol,
            &self.tail_options(&f.breakpoints()),
        )?;
        Ok(SolutionSample {
            x,
            y: r.value,
            error_estimate: r.abs_error_estimate,
            truncated_at: r.truncated_at.unwrap_or(x),
        })
    }

    /// `J_s(x) = ∫_x^∞ exp(-s ∫_x^t q) dt`.
    pub fn j_integral(&self, x: f64, s: f64, tol: f64) -> Result<IntegralResult> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(invalid(format!("s must be positive, got {s}")));
        }
        let table = self.table(x)?;
        weighted_exp_tail(
            &|t| Ok(s * table.integral(x, t)?),
            &|_| Ok(1.0),
            &|_| 1.0,
            x,
            self.floor.scaled(s),
            tol,
            &self.tail_options(&[]),
        )
    }

    /// `G_p(x)`: 1 for `p = 1`, `J_{p'}(x)^{1/p'}` for `1 < p < ∞`, `J_1(x)` for
    /// `p = ∞`. The result is accurate to `tol`.
    pub fn green_norm(&self, x: f64, p: LebesgueExponent, tol: f64) -> Result<f64> {
        if p.is_one() {
            return Ok(1.0);
        }
        if p.is_infinite() {
            return Ok(self.j_integral(x, 1.0, tol)?.value);
        }
        let s = p.p_conj;
        let first = self.j_integral(x, s, tol)?;
        // |δ(J^{1/s})| ≈ J^{1/s - 1}|δJ| / s; tighten when that exceeds tol
        let gain = first.value.powf(1.0 / s - 1.0) / s;
        let j = if gain * first.abs_error_estimate > tol {
            self.j_integral(x, s, 0.5 * tol / gain)?.value
        } else {
            first.value
        };
        Ok(j.powf(1.0 / s))
    }
}

pub fn kernel(c: &Coefficient, x: f64, t: f64, tol: f64) -> Result<f64> {
    // the kernel needs no tail, hence no floor
    GreenOperator::with_floor(c, DecayFloor { a: 1.0, q0: 1.0 }).kernel(x, t, tol)
}

pub fn apply(c: &Coefficient, f: &RightHandSide, x: f64, tol: f64) -> Result<SolutionSample> {
    GreenOperator::certified(c)?.apply(f, x, tol)
}

pub fn j_integral(c: &Coefficient, x: f64, s: f64, tol: f64) -> Result<IntegralResult> {
    GreenOperator::certified(c)?.j_integral(x, s, tol)
}

pub fn green_norm(c: &Coefficient, x: f64, p: LebesgueExponent, tol: f64) -> Result<f64> {
    GreenOperator::certified(c)?.green_norm(x, p, tol)
}
