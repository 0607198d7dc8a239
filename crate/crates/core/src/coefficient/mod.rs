//! The coefficient `q ≥ 0`, its optional split `q = q1 + q2`, the expression
//! parser, the catalog, and the integral constructs built on local mass:
//! `d(x)`, windowed `q0(a)`, and coverings by segments of mass 2.

mod catalog;
mod covering;
mod dfun;
pub mod expr;
pub(crate) mod scan;

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{IntegrandSpec, PhaseHint, RealFn, RunningIntegral, RunningOptions, Smoothness};

pub use catalog::{catalog, CATALOG_NAMES};
pub use covering::{r_covering, r_covering_with, Covering, Segment};
pub use dfun::{d_function, DFunctionResult, DOptions};
pub use scan::{d_sup_estimate, q0_estimate, Q0Estimate};

/// Lazily tabulated `∫ q` used throughout the crate.
pub type MassTable = RunningIntegral<Box<dyn Fn(f64) -> f64 + Send + Sync>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    None,
}

/// `q = q1 + q2` with `q1 > 0`.
#[derive(Clone)]
pub struct Split {
    pub q1: RealFn,
    pub q2: RealFn,
    /// Analytic `q1'` when known.
    pub q1_prime: Option<RealFn>,
}

#[derive(Clone)]
pub struct Coefficient {
    pub q: RealFn,
    pub split: Option<Split>,
    /// Auxiliary weight `s(x)` used by the majorant conditions.
    pub s: Option<RealFn>,
    pub phase_hint: Option<PhaseHint>,
    pub parity: Parity,
    pub label: String,
    /// Points where `q` may fail to be smooth (e.g. the kink of `e^{|x|}` at 0).
    pub breakpoints: Vec<f64>,
    /// Half-width of the default window for scans over the whole line. Strongly
    /// oscillating entries get a small one: the cost of tabulating `∫ q` grows
    /// with the number of oscillations crossed.
    pub reach: f64,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficient")
            .field("label", &self.label)
            .field("split", &self.split.is_some())
            .field("s", &self.s.is_some())
            .field("phase_hint", &self.phase_hint)
            .field("parity", &self.parity)
            .finish()
    }
}

/// Parses an expression in `x`. The result carries the trivial split `(q, 0)`
/// and no auxiliary weight.
pub fn parse_coefficient(expr: &str) -> Result<Coefficient> {
    let tree = Arc::new(expr::parse(expr)?);
    let parity = if tree.is_even() { Parity::Even } else { Parity::None };
    let q: RealFn = {
        let tree = Arc::clone(&tree);
        Arc::new(move |x| tree.eval(x))
    };
    Ok(Coefficient {
        q: Arc::clone(&q),
        split: Some(Split {
            q1: q,
            q2: Arc::new(|_| 0.0),
            q1_prime: None,
        }),
        s: None,
        phase_hint: None,
        parity,
        label: format!("expr:{tree}"),
        breakpoints: vec![0.0],
        reach: 8.0,
    })
}

/// A catalog name, or `expr:<expression>`.
pub fn resolve(name: &str) -> Result<Coefficient> {
    match name.strip_prefix("expr:") {
        Some(text) => parse_coefficient(text),
        None => catalog(name),
    }
}

impl Coefficient {
    pub fn eval(&self, x: f64) -> f64 {
        (self.q)(x)
    }

    pub fn split(&self) -> Result<&Split> {
        self.split
            .as_ref()
            .ok_or_else(|| Error::NoSplit(self.label.clone()))
    }

    pub fn weight(&self) -> Result<&RealFn> {
        self.s.as_ref().ok_or_else(|| Error::NoWeight(self.label.clone()))
    }

    pub fn q1(&self, x: f64) -> Result<f64> {
        Ok((self.split()?.q1)(x))
    }

    pub fn q2(&self, x: f64) -> Result<f64> {
        Ok((self.split()?.q2)(x))
    }

    /// `q1'(x)`, analytic when the split carries it, else a central difference
    /// with step `max(1e-6, 1e-6·|x|)`.
    pub fn q1_prime(&self, x: f64) -> Result<f64> {
        let split = self.split()?;
        Ok(match &split.q1_prime {
            Some(d) => d(x),
            None => {
                let h = 1e-6f64.max(1e-6 * x.abs());
                ((split.q1)(x + h) - (split.q1)(x - h)) / (2.0 * h)
            }
        })
    }

    /// `q` packaged for the adaptive integrator, with its phase hint and kinks.
    pub fn integrand(&self) -> IntegrandSpec {
        let smoothness = match (&self.phase_hint, self.breakpoints.is_empty()) {
            (_, false) => Smoothness::Piecewise(self.breakpoints.clone()),
            (Some(_), true) => Smoothness::Oscillatory,
            (None, true) => Smoothness::Smooth,
        };
        IntegrandSpec {
            evaluator: Arc::clone(&self.q),
            phase_hint: self.phase_hint.clone(),
            smoothness,
        }
    }

    /// Antiderivative of `q` anchored at `origin`.
    pub fn mass_table(&self, origin: f64) -> MassTable {
        self.mass_table_with(origin, RunningOptions::default())
    }

    pub fn mass_table_with(&self, origin: f64, opts: RunningOptions) -> MassTable {
        let q = Arc::clone(&self.q);
        RunningIntegral::with_options(
            Box::new(move |t| q(t)),
            origin,
            self.phase_hint.clone(),
            self.breakpoints.clone(),
            opts,
        )
    }

    /// `q + λ`, with split `(q1 + λ, q2)`.
    pub fn shifted(&self, lambda: f64) -> Coefficient {
        let add = |f: &RealFn| -> RealFn {
            let f = Arc::clone(f);
            Arc::new(move |x| f(x) + lambda)
        };
        Coefficient {
            q: add(&self.q),
            split: self.split.as_ref().map(|s| Split {
                q1: add(&s.q1),
                q2: Arc::clone(&s.q2),
                q1_prime: s.q1_prime.clone(),
            }),
            s: self.s.clone(),
            phase_hint: self.phase_hint.clone(),
            parity: self.parity,
            label: format!("{}+{lambda:?}", self.label),
            breakpoints: self.breakpoints.clone(),
            reach: self.reach,
        }
    }

    /// `x ↦ q(-x)`; turns integrals to the left into integrals to the right.
    pub fn reflected(&self) -> Coefficient {
        let flip = |f: &RealFn| -> RealFn {
            let f = Arc::clone(f);
            Arc::new(move |x| f(-x))
        };
        let hint = self.phase_hint.clone().map(|h| {
            let g = h.clone();
            PhaseHint::with_derivative(move |t| h.phase(-t), move |t| g.slope(-t))
        });
        Coefficient {
            q: flip(&self.q),
            split: self.split.as_ref().map(|s| Split {
                q1: flip(&s.q1),
                q2: flip(&s.q2),
                q1_prime: s.q1_prime.as_ref().map(|d| {
                    let d = Arc::clone(d);
                    Arc::new(move |x: f64| -d(-x)) as RealFn
                }),
            }),
            s: self.s.as_ref().map(flip),
            phase_hint: hint,
            parity: self.parity,
            label: format!("reflect({})", self.label),
            breakpoints: self.breakpoints.iter().map(|b| -b).collect(),
            reach: self.reach,
        }
    }

    /// Checks the sampled invariants: `q ≥ -1e-12`, `q1 > 0`, and
    /// `|q - q1 - q2| ≤ 1e-10 (1 + q1)`.
    pub fn check_samples(&self, xs: &[f64]) -> Result<()> {
        for &x in xs {
            let q = self.eval(x);
            if !(q >= -1e-12) {
                return Err(invalid(format!("{}: q({x}) = {q} is negative", self.label)));
            }
            if let Some(split) = &self.split {
                let (q1, q2) = ((split.q1)(x), (split.q2)(x));
                if !(q1 > 0.0) {
                    return Err(invalid(format!("{}: q1({x}) = {q1} is not positive", self.label)));
                }
                if (q - (q1 + q2)).abs() > 1e-10 * (1.0 + q1) {
                    return Err(invalid(format!("{}: split mismatch at {x}", self.label)));
                }
            }
        }
        Ok(())
    }
}
