use std::f64::consts::PI;
use std::sync::Arc;

use super::{Coefficient, Parity, Split};
use crate::error::{Error, Result};
use crate::quadrature::{PhaseHint, RealFn};

pub const CATALOG_NAMES: [&str; 4] = ["constant_one", "gaussian_osc", "exp_osc", "one_plus_cos"];

fn f(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RealFn {
    Arc::new(g)
}

fn sqrt_one_plus_abs() -> RealFn {
    f(|x: f64| (1.0 + x.abs()).sqrt())
}

pub fn catalog(name: &str) -> Result<Coefficient> {
    let c = match name {
        "constant_one" => Coefficient {
            q: f(|_| 1.0),
            split: Some(Split {
                q1: f(|_| 1.0),
                q2: f(|_| 0.0),
                q1_prime: Some(f(|_| 0.0)),
            }),
            s: Some(sqrt_one_plus_abs()),
            phase_hint: None,
            parity: Parity::Even,
            label: name.into(),
            breakpoints: Vec::new(),
            reach: 8.0,
        },
        // e^{x²} + e^{x²} cos e^{x²}
        "gaussian_osc" => Coefficient {
            q: f(|x: f64| {
                let e = (x * x).exp();
                e + e * e.cos()
            }),
            split: Some(Split {
                q1: f(|x: f64| (x * x).exp()),
                q2: f(|x: f64| {
                    let e = (x * x).exp();
                    e * e.cos()
                }),
                q1_prime: Some(f(|x: f64| 2.0 * x * (x * x).exp())),
            }),
            s: Some(f(|x: f64| (x * x).exp() / (8.0 * (1.0 + x * x).sqrt()))),
            phase_hint: Some(PhaseHint::with_derivative(
                |x: f64| (x * x).exp(),
                |x: f64| 2.0 * x * (x * x).exp(),
            )),
            parity: Parity::Even,
            label: name.into(),
            breakpoints: Vec::new(),
            reach: 2.0,
        },
        // e^{|x|} + e^{|x|} cos e^{2|x|}
        "exp_osc" => Coefficient {
            q: f(|x: f64| {
                let e = x.abs().exp();
                e + e * (e * e).cos()
            }),
            split: Some(Split {
                q1: f(|x: f64| x.abs().exp()),
                q2: f(|x: f64| {
                    let e = x.abs().exp();
                    e * (e * e).cos()
                }),
                q1_prime: Some(f(|x: f64| x.signum() * x.abs().exp())),
            }),
            s: None,
            phase_hint: Some(PhaseHint::with_derivative(
                |x: f64| (2.0 * x.abs()).exp(),
                |x: f64| 2.0 * x.signum() * (2.0 * x.abs()).exp(),
            )),
            parity: Parity::Even,
            label: name.into(),
            breakpoints: vec![0.0],
            reach: 4.0,
        },
        "one_plus_cos" => Coefficient {
            q: f(|x: f64| 1.0 + x.cos()),
            split: Some(Split {
                q1: f(|x: f64| 1.0 + x.cos()),
                q2: f(|_| 0.0),
                q1_prime: Some(f(|x: f64| -x.sin())),
            }),
            s: Some(sqrt_one_plus_abs()),
            phase_hint: None,
            parity: Parity::Even,
            label: name.into(),
            breakpoints: Vec::new(),
            reach: 4.0 * PI,
        },
        _ => return Err(Error::UnknownName(name.into())),
    };
    Ok(c)
}
