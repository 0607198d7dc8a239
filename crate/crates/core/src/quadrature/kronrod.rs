//! Embedded 7-point Gauss / 15-point Kronrod pair.

use super::PhaseHint;
use crate::error::{Error, Result};

// Abscissae of the 15-point Kronrod rule; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub(crate) const EVALS_PER_PANEL: usize = 15;

#[derive(Debug, Clone, Copy)]
pub(crate) struct PanelEstimate {
    pub value: f64,
    /// |Kronrod - Gauss|.
    pub error: f64,
    /// Kronrod estimate of the integral of |f|.
    pub abs_value: f64,
}

fn checked<F>(f: &F, t: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = f(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteEvaluation { at: t, value: v })
    }
}

pub(crate) fn gauss_kronrod_15<F>(f: &F, a: f64, b: f64) -> Result<PanelEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = checked(f, center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_value = WGK[7] * fc.abs();

    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = checked(f, center - dx)?;
        let f2 = checked(f, center + dx)?;
        kronrod += w * (f1 + f2);
        abs_value += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    Ok(PanelEstimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs_value: abs_value * half.abs(),
    })
}

/// `∫_a^b f` as a sum of single Kronrod panels, each at most an eighth of the
/// local wavelength of `hint` and a sixteenth of `b - a`, split at breakpoints.
/// No error control beyond that: on such short panels the rule is exact to
/// rounding for the integrands the phase hints describe.
pub(crate) fn stepped_integral<F>(f: &F, a: f64, b: f64, hint: &PhaseHint, breakpoints: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut u = a;
    let mut sum = 0.0;
    let cap = (b - a) / 16.0;
    while u < b {
        let w = (hint.wavelength(u) / 8.0).min(cap);
        let w = w.min(hint.wavelength(u + w) / 8.0).max(f64::EPSILON * u.abs().max(1.0));
        let mut v = (u + w).min(b);
        if let Some(&k) = breakpoints.iter().find(|&&k| k > u && k < v) {
            v = k;
        }
        sum += gauss_kronrod_15(f, u, v)?.value;
        u = v;
    }
    Ok(sum)
}
