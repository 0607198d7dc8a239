//! Right-hand sides `f` of `-y' + q y = f`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::LebesgueExponent;
use crate::coefficient::expr::{self, Expr};
use crate::error::{invalid, Result};
use crate::quadrature::{integrate, IntegrandSpec};

/// How far past `T` an expression is sampled when bounding its tail.
const TAIL_SAMPLE_SPAN: f64 = 64.0;
const TAIL_SAMPLES: usize = 1024;

#[derive(Clone, PartialEq)]
pub enum RhsKind {
    Expression { text: String, expr: Arc<Expr> },
    /// `height` on `[a, b]`, zero elsewhere.
    Indicator { a: f64, b: f64, height: f64 },
    /// `exp(-((t - center) / width)²)`.
    GaussianBump { center: f64, width: f64 },
}

#[derive(Clone, PartialEq)]
pub struct RightHandSide {
    pub kind: RhsKind,
    /// Last computed `(p, ‖f‖_p)`.
    pub p_norm_cache: Option<(f64, f64)>,
}

impl fmt::Debug for RightHandSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RightHandSide({})", self.label())
    }
}

impl Serialize for RightHandSide {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl RightHandSide {
    pub fn expression(text: &str) -> Result<Self> {
        let expr = Arc::new(expr::parse(text)?);
        Ok(Self::from_kind(RhsKind::Expression {
            text: text.to_string(),
            expr,
        }))
    }

    pub fn indicator(a: f64, b: f64, height: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("indicator needs a < b, got [{a}, {b}]")));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(invalid(format!("indicator height must be positive, got {height}")));
        }
        Ok(Self::from_kind(RhsKind::Indicator { a, b, height }))
    }

    pub fn gaussian_bump(center: f64, width: f64) -> Result<Self> {
        if !(center.is_finite() && width > 0.0 && width.is_finite()) {
            return Err(invalid(format!("bump needs a finite center and width > 0, got ({center}, {width})")));
        }
        Ok(Self::from_kind(RhsKind::GaussianBump { center, width }))
    }

    /// `expr:<text>`, `indicator:a,b,h` or `bump:center,width`.
    pub fn parse(spec: &str) -> Result<Self> {
        let numbers = |body: &str, n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = body
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| invalid(format!("cannot read numbers in '{spec}'")))?;
            if v.len() != n {
                return Err(invalid(format!("'{spec}' needs {n} numbers")));
            }
            Ok(v)
        };
        if let Some(body) = spec.strip_prefix("expr:") {
            Self::expression(body)
        } else if let Some(body) = spec.strip_prefix("indicator:") {
            let v = numbers(body, 3)?;
            Self::indicator(v[0], v[1], v[2])
        } else if let Some(body) = spec.strip_prefix("bump:") {
            let v = numbers(body, 2)?;
            Self::gaussian_bump(v[0], v[1])
        } else {
            Err(invalid(format!(
                "right-hand side '{spec}' must start with expr:, indicator: or bump:"
            )))
        }
    }

    fn from_kind(kind: RhsKind) -> Self {
        Self {
            kind,
            p_norm_cache: None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            RhsKind::Expression { expr, .. } => format!("expr:{expr}"),
            RhsKind::Indicator { a, b, height } => format!("indicator:{a:?},{b:?},{height:?}"),
            RhsKind::GaussianBump { center, width } => format!("bump:{center:?},{width:?}"),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            RhsKind::Expression { expr, .. } => expr.eval(t),
            RhsKind::Indicator { a, b, height } => {
                if (*a..=*b).contains(&t) {
                    *height
                } else {
                    0.0
                }
            }
            RhsKind::GaussianBump { center, width } => {
                let u = (t - center) / width;
                (-u * u).exp()
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            RhsKind::Indicator { a, b, .. } => vec![*a, *b],
            _ => Vec::new(),
        }
    }

    /// Bound on `sup_{t ≥ T} |f(t)|`, nonincreasing in `T`.
    ///
    /// Structured kinds are exact. For expressions the bound is twice the largest
    /// sampled `|f|` on `[T, T + 64]`, which is a heuristic: nothing is known about
    /// an arbitrary expression past the sample.
    pub fn sup_tail(&self, t: f64) -> f64 {
        match &self.kind {
            RhsKind::Indicator { b, height, .. } => {
                if t <= *b {
                    *height
                } else {
                    0.0
                }
            }
            RhsKind::GaussianBump { center, width } => {
                if t <= *center {
                    1.0
                } else {
                    let u = (t - center) / width;
                    (-u * u).exp()
                }
            }
            RhsKind::Expression { expr, .. } => {
                let step = TAIL_SAMPLE_SPAN / TAIL_SAMPLES as f64;
                let m = (0..=TAIL_SAMPLES)
                    .map(|k| expr.eval(t + k as f64 * step).abs())
                    .fold(0.0, |m: f64, v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
                2.0 * m
            }
        }
    }

    /// `‖f‖_p` over the real line; closed forms for the structured kinds. An
    /// expression is measured on `domain` only, to relative accuracy about 1e-10
    /// (grid maximum with spacing `domain width / 2^16` for `p = ∞`).
    pub fn p_norm(&self, p: LebesgueExponent, domain: (f64, f64)) -> Result<f64> {
        if let Some((cp, v)) = self.p_norm_cache {
            if cp == p.p {
                return Ok(v);
            }
        }
        let v = match &self.kind {
            RhsKind::Indicator { a, b, height } => {
                if p.is_infinite() {
                    *height
                } else {
                    height * (b - a).powf(1.0 / p.p)
                }
            }
            RhsKind::GaussianBump { width, .. } => {
                if p.is_infinite() {
                    1.0
                } else {
                    (width * (std::f64::consts::PI / p.p).sqrt()).powf(1.0 / p.p)
                }
            }
            RhsKind::Expression { expr, .. } => {
                let (lo, hi) = domain;
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(invalid(format!("norm domain ({lo}, {hi}) is not an interval")));
                }
                if p.is_infinite() {
                    let n = 1 << 16;
                    let h = (hi - lo) / n as f64;
                    (0..=n).map(|k| expr.eval(lo + k as f64 * h).abs()).fold(0.0, f64::max)
                } else {
                    let e = Arc::clone(expr);
                    let pp = p.p;
                    let spec = IntegrandSpec::smooth(move |t| e.eval(t).abs().powf(pp));
                    // one coarse pass fixes the scale for the relative target
                    let rough = integrate(&spec, lo, hi, 1e-6)?.value;
                    let fine = integrate(&spec, lo, hi, (1e-11 * rough).max(1e-300))?.value;
                    fine.powf(1.0 / pp)
                }
            }
        };
        Ok(v)
    }

    /// Stores `‖f‖_p` so later calls with the same `p` skip the computation.
    pub fn cache_norm(&mut self, p: LebesgueExponent, domain: (f64, f64)) -> Result<f64> {
        let v = self.p_norm(p, domain)?;
        self.p_norm_cache = Some((p.p, v));
        Ok(v)
    }
}
