//! The limit condition behind decay in whole and compactness, read off a probe
//! ladder: `d(x)` must fall towards zero while every window mass
//! `∫_{x-a}^{x+a} q` grows.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficient::{d_function, Coefficient, DOptions, Parity};
use crate::error::{invalid, Result};
use crate::green::LebesgueExponent;
use crate::quadrature::stepped_integral;

/// Final `d` must fall below this for `d → 0`.
pub const DEFAULT_STRIP_THRESHOLD: f64 = 0.1;
/// `d(last) / d(first)` must fall below this for `d → 0`.
pub const DECAY_RATIO: f64 = 0.2;
/// Relative step a trend must make to count as strict.
const TREND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StripClass {
    TendsInWhole,
    NotTending,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Compactness {
    Compact,
    NotCompact,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripVerdict {
    pub p: LebesgueExponent,
    pub verdict: StripClass,
    pub d_trend: Vec<(f64, f64)>,
    pub int_trend: Vec<(f64, f64)>,
    pub a: f64,
    pub threshold: f64,
    pub d_tends_to_zero: bool,
    pub mass_grows: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessVerdict {
    pub p: LebesgueExponent,
    pub verdict: Compactness,
    pub d_trend: Vec<(f64, f64)>,
    pub int_trend: Vec<(f64, f64)>,
    /// True for `p = 1`, where solutions never decay in whole whatever `d` does.
    pub strip_exception: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderTrend {
    pub a: f64,
    pub int_trend: Vec<(f64, f64)>,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub agreement: bool,
    pub d_tends_to_zero: bool,
    pub mass_grows_for_every_a: bool,
    pub d_trend: Vec<(f64, f64)>,
    pub ladder: Vec<LadderTrend>,
}

/// Indices of the probes on each side that has to be examined: one group for an
/// even coefficient, one per sign otherwise.
fn groups(c: &Coefficient, probe_xs: &[f64]) -> Result<Vec<Vec<usize>>> {
    if probe_xs.len() < 2 {
        return Err(invalid("the limit test needs at least 2 probes"));
    }
    let groups: Vec<Vec<usize>> = match c.parity {
        Parity::Even => vec![(0..probe_xs.len()).collect()],
        Parity::None => {
            let neg = (0..probe_xs.len()).filter(|&i| probe_xs[i] < 0.0).collect();
            let pos = (0..probe_xs.len()).filter(|&i| probe_xs[i] >= 0.0).collect();
            vec![neg, pos]
        }
    };
    for g in &groups {
        if g.len() < 2 {
            return Err(invalid(format!(
                "{} is not even: probes must cover both signs with at least 2 on each",
                c.label
            )));
        }
        if g.windows(2).any(|w| probe_xs[w[1]].abs() <= probe_xs[w[0]].abs()) {
            return Err(invalid("probes must increase in |x|"));
        }
    }
    Ok(groups)
}

fn d_trend(c: &Coefficient, probe_xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    probe_xs
        .par_iter()
        .map(|&x| Ok((x, d_function(c, x, DOptions::default())?.d)))
        .collect()
}

fn int_trend(c: &Coefficient, probe_xs: &[f64], a: f64) -> Result<Vec<(f64, f64)>> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("a must be positive, got {a}")));
    }
    probe_xs
        .par_iter()
        .map(|&x| Ok((x, window_mass(c, x, a)?)))
        .collect()
}

fn window_mass(c: &Coefficient, x: f64, a: f64) -> Result<f64> {
    match &c.phase_hint {
        Some(hint) => {
            let q = |t: f64| Ok(c.eval(t));
            stepped_integral(&q, x - a, x + a, hint, &c.breakpoints)
        }
        None => c.mass_table(x).integral(x - a, x + a),
    }
}

fn d_tends(groups: &[Vec<usize>], d: &[(f64, f64)], threshold: f64) -> bool {
    groups.iter().all(|g| {
        let v: Vec<f64> = g.iter().map(|&i| d[i].1).collect();
        let (first, last) = (v[0], v[v.len() - 1]);
        v.windows(2).all(|w| w[1] < w[0] * (1.0 - TREND_MARGIN)) && last < threshold && last / first < DECAY_RATIO
    })
}

fn grows(groups: &[Vec<usize>], ints: &[(f64, f64)]) -> bool {
    groups.iter().all(|g| {
        g.windows(2)
            .all(|w| ints[w[1]].1 > ints[w[0]].1 + TREND_MARGIN * ints[w[0]].1.abs().max(1.0))
    })
}

struct LimitEvidence {
    d_trend: Vec<(f64, f64)>,
    int_trend: Vec<(f64, f64)>,
    d_tends: bool,
    grows: bool,
}

impl LimitEvidence {
    fn gather(c: &Coefficient, probe_xs: &[f64], a: f64, threshold: f64) -> Result<Self> {
        if !(threshold > 0.0) {
            return Err(invalid(format!("threshold must be positive, got {threshold}")));
        }
        let g = groups(c, probe_xs)?;
        let d = d_trend(c, probe_xs)?;
        let ints = int_trend(c, probe_xs, a)?;
        Ok(Self {
            d_tends: d_tends(&g, &d, threshold),
            grows: grows(&g, &ints),
            d_trend: d,
            int_trend: ints,
        })
    }
}

/// Decay in whole of all solutions with `‖f‖_p ≤ 1`. Never for `p = 1`; for other
/// `p` it is `d(x) → 0`, accepted only when the window masses grow as well.
pub fn strip_verdict(
    c: &Coefficient,
    p: LebesgueExponent,
    probe_xs: &[f64],
    a: f64,
    threshold: f64,
) -> Result<StripVerdict> {
    let ev = LimitEvidence::gather(c, probe_xs, a, threshold)?;
    let (verdict, reason) = if p.is_one() {
        (StripClass::NotTending, "p = 1: G_1 = 1 everywhere".to_string())
    } else {
        match (ev.d_tends, ev.grows) {
            (true, true) => (StripClass::TendsInWhole, "d decreases to zero and window masses grow".into()),
            (false, false) => (StripClass::NotTending, "d does not decrease to zero and window masses do not grow".into()),
            (true, false) => (StripClass::Inconclusive, "d decreases but window masses do not grow".into()),
            (false, true) => (StripClass::Inconclusive, "window masses grow but d does not decrease to zero".into()),
        }
    };
    Ok(StripVerdict {
        p,
        verdict,
        d_trend: ev.d_trend,
        int_trend: ev.int_trend,
        a,
        threshold,
        d_tends_to_zero: ev.d_tends,
        mass_grows: ev.grows,
        reason,
    })
}

const COMPACTNESS_NOTE: &str = "the inverse is compact exactly when d(x) -> 0, the same condition that \
governs decay in whole for p > 1; at p = 1 solutions never decay in whole, and compactness is still \
reported by the d criterion";

/// Compactness of the inverse on `L_p`, decided by the same limit test as
/// [`strip_verdict`] for every `p`.
pub fn compactness_verdict(
    c: &Coefficient,
    p: LebesgueExponent,
    probe_xs: &[f64],
    a: f64,
    threshold: f64,
) -> Result<CompactnessVerdict> {
    let ev = LimitEvidence::gather(c, probe_xs, a, threshold)?;
    let verdict = match (ev.d_tends, ev.grows) {
        (true, true) => Compactness::Compact,
        (false, false) => Compactness::NotCompact,
        _ => Compactness::Inconclusive,
    };
    Ok(CompactnessVerdict {
        p,
        verdict,
        d_trend: ev.d_trend,
        int_trend: ev.int_trend,
        strip_exception: p.is_one(),
        note: COMPACTNESS_NOTE.into(),
    })
}

/// Whether "`d → 0`" and "`∫_{x-a}^{x+a} q → ∞` for every `a` of the ladder" get
/// the same answer on the probes.
pub fn equivalence_crosscheck(c: &Coefficient, probe_xs: &[f64], a_ladder: &[f64]) -> Result<EquivalenceCheck> {
    if a_ladder.is_empty() {
        return Err(invalid("a_ladder is empty"));
    }
    let g = groups(c, probe_xs)?;
    let d = d_trend(c, probe_xs)?;
    let d_tends_to_zero = d_tends(&g, &d, DEFAULT_STRIP_THRESHOLD);
    let ladder = a_ladder
        .iter()
        .map(|&a| {
            let ints = int_trend(c, probe_xs, a)?;
            Ok(LadderTrend {
                a,
                grows: grows(&g, &ints),
                int_trend: ints,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let every = ladder.iter().all(|l| l.grows);
    Ok(EquivalenceCheck {
        agreement: every == d_tends_to_zero,
        d_tends_to_zero,
        mass_grows_for_every_a: every,
        d_trend: d,
        ladder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::{catalog, parse_coefficient};
    use std::f64::consts::PI;

    fn two() -> LebesgueExponent {
        LebesgueExponent::new(2.0).unwrap()
    }

    #[test]
    fn periodic_does_not_tend() {
        let c = catalog("one_plus_cos").unwrap();
        let probes: Vec<f64> = (1..=5).map(|k| (2 * k + 1) as f64 * PI).collect();
        let s = strip_verdict(&c, two(), &probes, 1.0, DEFAULT_STRIP_THRESHOLD).unwrap();
        assert_eq!(s.verdict, StripClass::NotTending);
        assert!(s.d_trend.iter().all(|&(_, d)| d > PI / 2.0));
        let k = compactness_verdict(&c, two(), &probes, 1.0, DEFAULT_STRIP_THRESHOLD).unwrap();
        assert_eq!(k.verdict, Compactness::NotCompact);
    }

    #[test]
    fn exp_osc_tends() {
        let c = catalog("exp_osc").unwrap();
        let probes = [3.0, 4.0, 5.0, 6.0, 7.0];
        let s = strip_verdict(&c, two(), &probes, 0.25, 0.1).unwrap();
        assert_eq!(s.verdict, StripClass::TendsInWhole, "{s:#?}");
        let k = compactness_verdict(&c, LebesgueExponent::INFINITY, &probes, 0.25, 0.1).unwrap();
        assert_eq!(k.verdict, Compactness::Compact);
        let one = strip_verdict(&c, LebesgueExponent::ONE, &probes, 0.25, 0.1).unwrap();
        assert_eq!(one.verdict, StripClass::NotTending);
        let k1 = compactness_verdict(&c, LebesgueExponent::ONE, &probes, 0.25, 0.1).unwrap();
        assert!(k1.strip_exception && k1.verdict == Compactness::Compact);
    }

    #[test]
    fn constant_is_not_compact() {
        let c = catalog("constant_one").unwrap();
        let k = compactness_verdict(&c, two(), &[1.0, 2.0, 4.0, 8.0], 1.0, 0.1).unwrap();
        assert_eq!(k.verdict, Compactness::NotCompact);
        let e = equivalence_crosscheck(&c, &[1.0, 2.0, 4.0, 8.0], &[0.5, 1.0, 2.0]).unwrap();
        assert!(e.agreement && !e.d_tends_to_zero);
    }

    #[test]
    fn non_even_needs_both_sides() {
        let c = parse_coefficient("2 + x / (1 + abs(x))").unwrap();
        assert!(strip_verdict(&c, two(), &[1.0, 2.0, 3.0], 1.0, 0.1).is_err());
        assert!(strip_verdict(&c, two(), &[-2.0, -1.0, 1.0, 2.0], 1.0, 0.1).is_err());
        // bounded between 1 and 3: d stays of order one, the left masses shrink
        let s = strip_verdict(&c, two(), &[-1.0, 1.0, -2.0, 2.0, -3.0, 3.0], 1.0, 0.1).unwrap();
        assert_eq!(s.verdict, StripClass::NotTending, "{s:#?}");
    }

    #[test]
    fn growing_one_side_is_checked_per_side() {
        // q = e^x grows on the right only; the left side keeps d from vanishing
        let c = parse_coefficient("1 + exp(x)").unwrap();
        let s = strip_verdict(&c, two(), &[-1.0, 1.0, -2.0, 2.0, -3.0, 3.0, -4.0, 4.0], 0.5, 0.1).unwrap();
        assert_ne!(s.verdict, StripClass::TendsInWhole);
    }

    #[test]
    fn equivalence_on_catalog() {
        let e = equivalence_crosscheck(&catalog("exp_osc").unwrap(), &[3.0, 4.0, 5.0, 6.0, 7.0], &[0.125, 0.25]).unwrap();
        assert!(e.agreement && e.d_tends_to_zero, "{e:#?}");
        let probes: Vec<f64> = (1..=5).map(|k| (2 * k + 1) as f64 * PI).collect();
        let e = equivalence_crosscheck(&catalog("one_plus_cos").unwrap(), &probes, &[0.5, 1.0, 2.0]).unwrap();
        assert!(e.agreement && !e.mass_grows_for_every_a);
    }
}
