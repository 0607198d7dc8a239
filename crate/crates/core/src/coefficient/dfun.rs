//! `d(x) = inf { d > 0 : ∫_{x-d}^{x+d} q = 2 }`.

use serde::Serialize;

use super::{Coefficient, MassTable};
use crate::error::{invalid, Error, Result};

pub(crate) fn plateau_slack(root_tol: f64) -> f64 {
    (1e-2 * root_tol).min(1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DOptions {
    pub root_tol: f64,
    pub d_max: f64,
}

impl Default for DOptions {
    fn default() -> Self {
        Self {
            root_tol: 1e-10,
            d_max: 100.0,
        }
    }
}

impl DOptions {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.root_tol > 0.0 && self.root_tol.is_finite()) {
            return Err(invalid(format!("root_tol must be positive, got {}", self.root_tol)));
        }
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(invalid(format!("d_max must be positive, got {}", self.d_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DFunctionResult {
    pub d: f64,
    pub bracket: (f64, f64),
    /// `|∫_{x-d}^{x+d} q - 2|`.
    pub residual: f64,
}

pub fn d_function(c: &Coefficient, x: f64, opts: DOptions) -> Result<DFunctionResult> {
    opts.validate()?;
    if !x.is_finite() {
        return Err(invalid(format!("x must be finite, got {x}")));
    }
    let table = c.mass_table(x);
    d_from_table(&table, x, opts)
}

/// Leftmost root of `F(d) = ∫_{x-d}^{x+d} q = 2`. `F` is nondecreasing, so
/// bisection on the predicate `F(d) ≥ 2` converges to the infimum even across
/// plateaus where `q` vanishes. The predicate allows a rounding slack far below
/// `root_tol` so that a plateau sitting exactly at 2 is still recognised.
pub(crate) fn d_from_table(table: &MassTable, x: f64, opts: DOptions) -> Result<DFunctionResult> {
    let mass = |d: f64| -> Result<f64> { table.integral(x - d, x + d) };
    let target = 2.0 - plateau_slack(opts.root_tol);

    let mut lo = 0.0;
    let mut hi = opts.root_tol.min(opts.d_max);
    let mut f_hi = mass(hi)?;
    while f_hi < target {
        if hi >= opts.d_max {
            return Err(Error::MassDeficit {
                x,
                d_max: opts.d_max,
                mass: f_hi,
            });
        }
        lo = hi;
        hi = (2.0 * hi).min(opts.d_max);
        f_hi = mass(hi)?;
    }

    // bisect to full precision; the cost is a table lookup per step
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        let f_mid = mass(mid)?;
        if f_mid >= target {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
        }
    }

    Ok(DFunctionResult {
        d: hi,
        bracket: (lo, hi),
        residual: (f_hi - 2.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::{catalog, parse_coefficient};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_one_gives_one() {
        let c = catalog("constant_one").unwrap();
        for x in [-2.0, 0.0, 3.5] {
            let r = d_function(&c, x, DOptions::default()).unwrap();
            assert!((r.d - 1.0).abs() < 1e-10);
            assert!(r.bracket.0 <= r.d && r.d <= r.bracket.1);
            assert!(r.residual <= 1e-10);
        }
    }

    #[test]
    fn one_plus_cos_at_origin() {
        // root of d + sin d = 1
        let c = catalog("one_plus_cos").unwrap();
        let r = d_function(&c, 0.0, DOptions::default()).unwrap();
        assert!((r.d - 0.510_973_429_388_569_109_520_013_971_145).abs() < 1e-9);
        for k in 1..=5 {
            let x = (2 * k + 1) as f64 * PI;
            let r = d_function(&c, x, DOptions::default()).unwrap();
            assert!((r.d - 1.934_563_210_752_024_267_6).abs() < 1e-9);
            assert!(r.d > PI / 2.0);
        }
    }

    #[test]
    fn exp_osc_matches_oracle() {
        let c = catalog("exp_osc").unwrap();
        let oracle = [
            (0.0, 0.874_207_862_192_493_417_11),
            (3.0, 0.050_148_728_349_970_036_768),
            (4.0, 0.018_315_114_515_996_254_072),
            (5.0, 0.006_722_289_689_003_247_047_8),
            (6.0, 0.002_479_539_853_102_397_160_1),
            (7.0, 0.000_911_899_856_440_803_432_44),
        ];
        for (x, d) in oracle {
            let r = d_function(&c, x, DOptions::default()).unwrap();
            assert!((r.d - d).abs() <= 1e-9 * d.max(1e-3), "x={x}: {} vs {d}", r.d);
        }
        let r6 = d_function(&c, 6.0, DOptions::default()).unwrap();
        assert!((0.95..=1.05).contains(&(6f64.exp() * r6.d)));
    }

    #[test]
    fn gaussian_osc_matches_oracle() {
        let c = catalog("gaussian_osc").unwrap();
        for (x, d) in [
            (1.5, 0.105_698_267_902_220_804_38),
            (2.0, 0.017_646_163_919_336_722_458),
            (2.5, 0.001_615_226_529_603_400_914_7),
        ] {
            let r = d_function(&c, x, DOptions::default()).unwrap();
            assert!((r.d - d).abs() <= 1e-8 * d, "x={x}: {} vs {d}", r.d);
        }
    }

    #[test]
    fn plateau_returns_leftmost_root() {
        // q = 1 on (-1, 1) and 0 outside, so F(d) = 2 for every d >= 1
        let c = parse_coefficient("(1 - abs(x) + abs(1 - abs(x))) / (2 * (1 - abs(x)) + 1e-300)").unwrap();
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.eval(1.5), 0.0);
        let r = d_function(&c, 0.0, DOptions::default()).unwrap();
        assert!((r.d - 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn mass_deficit() {
        let c = parse_coefficient("exp(-abs(x)) / 4").unwrap();
        match d_function(&c, 0.0, DOptions::default()) {
            Err(Error::MassDeficit { mass, .. }) => assert!((mass - 0.5).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_options() {
        let c = catalog("constant_one").unwrap();
        let bad = DOptions { root_tol: 0.0, d_max: 1.0 };
        assert!(d_function(&c, 0.0, bad).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mass_is_monotone(x in -4.0f64..4.0, d1 in 0.0f64..1.5, d2 in 0.0f64..1.5) {
            for name in ["one_plus_cos", "exp_osc", "constant_one"] {
                let c = catalog(name).unwrap();
                let t = c.mass_table(x);
                let (a, b) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
                prop_assert!(t.integral(x - a, x + a).unwrap() <= t.integral(x - b, x + b).unwrap() + 1e-12);
            }
        }

        #[test]
        fn even_coefficients_have_even_d(x in 0.0f64..6.0) {
            for name in ["one_plus_cos", "exp_osc"] {
                let c = catalog(name).unwrap();
                let opts = DOptions::default();
                let p = d_function(&c, x, opts).unwrap().d;
                let m = d_function(&c, -x, opts).unwrap().d;
                prop_assert!((p - m).abs() <= 2.0 * opts.root_tol);
            }
        }

        #[test]
        fn d_is_one_lipschitz(x in -6.0f64..6.0, h in -0.2f64..0.2) {
            for name in ["one_plus_cos", "exp_osc", "constant_one"] {
                let c = catalog(name).unwrap();
                let opts = DOptions::default();
                let a = d_function(&c, x, opts).unwrap().d;
                let b = d_function(&c, x + h, opts).unwrap().d;
                prop_assert!((a - b).abs() <= h.abs() + 2.0 * opts.root_tol);
            }
        }
    }
}
