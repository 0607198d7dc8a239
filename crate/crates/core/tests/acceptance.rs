//! Acceptance criteria 1-8. Each criterion prints one PASS or FAIL line with its
//! runtime and the failing sub-checks; the process exits nonzero if any fails.

use std::f64::consts::PI;
use std::fmt::Display;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corsol::asymptotics::{asymptotic_j_check, check_conditions, majorant, norm_majorant_ratios, sigma_pair};
use corsol::coefficient::{catalog, d_function, q0_estimate, r_covering, Coefficient, DOptions, CATALOG_NAMES};
use corsol::diagnostics::{
    compactness_verdict, equivalence_crosscheck, solvability_verdict, strip_verdict, Compactness, Solvability,
    StripClass,
};
use corsol::green::{bound_checks, j_integral, kernel, GreenOperator, LebesgueExponent, RightHandSide};
use corsol::Result;

#[derive(Default)]
struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Display) {
        if !ok {
            self.failed.push(what.to_string());
        }
    }
}

fn d(c: &Coefficient, x: f64) -> Result<f64> {
    Ok(d_function(c, x, DOptions::default())?.d)
}

fn p(v: f64) -> LebesgueExponent {
    LebesgueExponent::new(v).unwrap()
}

fn probes_for(name: &str) -> Vec<f64> {
    match name {
        "one_plus_cos" => (1..=5).map(|k| (2 * k + 1) as f64 * PI).collect(),
        "exp_osc" => vec![3.0, 4.0, 5.0, 6.0, 7.0],
        "gaussian_osc" => vec![1.5, 2.0, 2.5, 3.0],
        _ => vec![1.0, 2.0, 4.0, 8.0],
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn criterion_1(k: &mut Checks) -> Result<()> {
    let c = catalog("constant_one")?;
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let dx = d(&c, x)?;
        k.check((dx - 1.0).abs() <= 1e-10, format!("d({x}) = {dx}"));
        let j = j_integral(&c, x, 1.0, 1e-10)?.value;
        k.check((j - 1.0).abs() <= 1e-8, format!("J({x}) = {j}"));
        let op = GreenOperator::certified(&c)?;
        let g2 = op.green_norm(x, p(2.0), 1e-10)?;
        k.check((g2 - 0.5f64.sqrt()).abs() <= 1e-8, format!("G_2({x}) = {g2}"));
        let ginf = op.green_norm(x, LebesgueExponent::INFINITY, 1e-10)?;
        k.check((ginf - 1.0).abs() <= 1e-8, format!("G_inf({x}) = {ginf}"));
        for q in [LebesgueExponent::ONE, p(2.0), p(3.0), LebesgueExponent::INFINITY] {
            let g = op.green_norm(x, q, 1e-10)?;
            let m = majorant(&c, q, x)?.value;
            k.check((g - m).abs() <= 1e-8, format!("kappa_{q}({x}) = {m} vs G = {g}"));
        }
    }
    Ok(())
}

fn criterion_2(k: &mut Checks) -> Result<()> {
    let c = catalog("one_plus_cos")?;
    let probes = probes_for("one_plus_cos");
    for &x in &probes {
        let dx = d(&c, x)?;
        k.check(dx > PI / 2.0, format!("d({x}) = {dx} <= pi/2"));
    }
    let d0 = d(&c, 0.0)?;
    k.check((d0 - 0.510_973_429_4).abs() <= 1e-8, format!("d(0) = {d0}"));
    let q0 = q0_estimate(&c, PI / 2.0, 4.0 * PI, PI / 64.0)?.inf_value;
    k.check((q0 - (PI - 2.0)).abs() <= 1e-6, format!("q0(pi/2) = {q0}"));
    let s = strip_verdict(&c, p(2.0), &probes, 0.25, 0.1)?;
    k.check(s.verdict == StripClass::NotTending, format!("strip = {:?}", s.verdict));
    let cv = compactness_verdict(&c, p(2.0), &probes, 0.25, 0.1)?;
    k.check(cv.verdict == Compactness::NotCompact, format!("compactness = {:?}", cv.verdict));
    Ok(())
}

fn criterion_3(k: &mut Checks) -> Result<()> {
    let c = catalog("gaussian_osc")?;
    let probes = probes_for("gaussian_osc");
    let sv = solvability_verdict(&c, &[1.0, 2.0], c.reach, 1.0 / 32.0)?;
    k.check(sv.verdict == Solvability::Solvable, format!("solvability = {:?}", sv.verdict));
    let report = check_conditions(&c, &probes)?;
    for cond in &report.conditions {
        k.check(
            cond.verdict == corsol::asymptotics::Verdict::Holds,
            format!("condition {} {:?} on {:?}", cond.name, cond.verdict, cond.values),
        );
    }
    let rows = asymptotic_j_check(&c, &probes, 1e-12)?;
    let eps: Vec<f64> = rows.iter().map(|r| r.epsilon.abs()).collect();
    k.check(strictly_decreasing(&eps), format!("|eps| not strictly decreasing: {eps:?}"));
    k.check(eps[eps.len() - 1] <= 0.2, format!("|eps(3)| = {}", eps[eps.len() - 1]));
    let r = norm_majorant_ratios(&c, p(2.0), &[3.0], 1e-10)?[0].ratio;
    k.check((0.8..=1.2).contains(&r), format!("G_2/kappa_2 at 3 = {r}"));
    Ok(())
}

fn criterion_4(k: &mut Checks) -> Result<()> {
    let c = catalog("exp_osc")?;
    let xs = [4.0, 5.0, 6.0, 7.0];
    let mut dev = Vec::new();
    let op = GreenOperator::certified(&c)?;
    let mut ratios = Vec::new();
    for x in xs {
        let dx = d(&c, x)?;
        let scaled = x.exp() * dx;
        k.check((0.95..=1.05).contains(&scaled), format!("e^x d({x}) = {scaled}"));
        dev.push((scaled - 1.0).abs());
        let s = sigma_pair(&c, x, 1e-12)?;
        k.check(s.sigma1 <= 10.0 * (-2.0 * x).exp(), format!("sigma1({x}) = {}", s.sigma1));
        k.check(s.sigma2 <= 10.0 * (-x).exp(), format!("sigma2({x}) = {}", s.sigma2));
        let g = op.green_norm(x, p(2.0), 1e-12)?;
        ratios.push(g * g / dx);
    }
    k.check(strictly_decreasing(&dev), format!("|e^x d - 1| not decreasing: {dev:?}"));
    let probes = probes_for("exp_osc");
    let s = strip_verdict(&c, p(2.0), &probes, 0.25, 0.1)?;
    k.check(s.verdict == StripClass::TendsInWhole, format!("strip = {:?}", s.verdict));
    let cv = compactness_verdict(&c, p(2.0), &probes, 0.25, 0.1)?;
    k.check(cv.verdict == Compactness::Compact, format!("compactness = {:?}", cv.verdict));
    // the smallest c with every G_2^2 / d in [1/c, c]; the band [1/c, c] spans a factor c^2
    let hi = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let band = hi.max(1.0 / lo).powi(2);
    k.check(band <= 20.0, format!("two-sided band {band} from ratios {ratios:?}"));
    Ok(())
}

fn grid(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|i| lo + i as f64 * h).collect()
}

fn criterion_5(k: &mut Checks) -> Result<()> {
    let one = catalog("constant_one")?;
    let op = GreenOperator::certified(&one)?;
    let f1 = RightHandSide::expression("1")?;
    let r = op.residual_check(&f1, &grid(-0.05, 0.05, 1e-3), 1e-12)?.max_residual;
    k.check(r <= 1e-6, format!("residual for f = 1: {r}"));
    let bump = RightHandSide::gaussian_bump(0.0, 1.0)?;
    let coarse = op.residual_check(&bump, &grid(0.3, 0.34, 2e-3), 1e-14)?.max_residual;
    let fine = op.residual_check(&bump, &grid(0.3, 0.34, 1e-3), 1e-14)?.max_residual;
    let ratio = coarse / fine;
    k.check((ratio - 4.0).abs() <= 1.0, format!("halving ratio {ratio}"));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let coefs: Vec<Coefficient> = CATALOG_NAMES.iter().map(|n| catalog(n)).collect::<Result<_>>()?;
    let tol = 1e-10;
    for i in 0..50 {
        let c = &coefs[i % coefs.len()];
        let mut v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        v.sort_by(f64::total_cmp);
        let [x, t, u] = v;
        let lhs = kernel(c, x, t, tol)? * kernel(c, t, u, tol)?;
        let rhs = kernel(c, x, u, tol)?;
        k.check((lhs - rhs).abs() <= 3.0 * tol, format!("{}: G({x},{t})G({t},{u}) - G({x},{u}) = {}", c.label, lhs - rhs));
    }

    for i in 0..20 {
        let c = &coefs[1 + i % 3];
        let f = if i % 2 == 0 {
            let a = rng.gen_range(-3.0..2.0);
            RightHandSide::indicator(a, a + rng.gen_range(0.1..2.0), rng.gen_range(0.1..5.0))?
        } else {
            RightHandSide::gaussian_bump(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..2.0))?
        };
        let op = GreenOperator::certified(c)?;
        for _ in 0..5 {
            let x = rng.gen_range(-3.0..3.0);
            let y = op.apply(&f, x, 1e-10)?.y;
            k.check(y >= 0.0, format!("{}: y({x}) = {y} for {}", c.label, f.label()));
        }
    }
    Ok(())
}

fn criterion_6(k: &mut Checks) -> Result<()> {
    for name in CATALOG_NAMES {
        let c = catalog(name)?;
        let op = GreenOperator::certified(&c)?;
        let xs: &[f64] = match name {
            "gaussian_osc" => &[-1.0, 0.0, 1.0, 2.0, 3.0],
            "exp_osc" => &[-1.0, 0.0, 1.0, 2.0, 3.0],
            _ => &[-2.0, -1.0, 0.0, 1.0, 2.0],
        };
        for &x in xs {
            let dx = d(&c, x)?;
            let g1 = op.green_norm(x, LebesgueExponent::ONE, 1e-10)?;
            k.check(g1 == 1.0, format!("{name}: G_1({x}) = {g1}"));
            for q in [p(1.5), p(2.0), p(4.0), LebesgueExponent::INFINITY] {
                let g = op.green_norm(x, q, 1e-10)?;
                let bound = (-2f64).exp() * dx.powf(1.0 / q.p_conj);
                k.check(g >= bound, format!("{name}: G_{q}({x}) = {g} < {bound}"));
            }
        }
    }
    let one = catalog("constant_one")?;
    let rhs = [
        RightHandSide::indicator(0.0, 1.0, 1.0)?,
        RightHandSide::indicator(-2.0, 3.0, 0.5)?,
        RightHandSide::gaussian_bump(0.0, 1.0)?,
        RightHandSide::gaussian_bump(2.0, 0.3)?,
        RightHandSide::expression("exp(-abs(x))")?,
    ];
    for f in &rhs {
        let r = bound_checks(&one, f, LebesgueExponent::ONE, (-30.0, 30.0), 1e-2)?;
        let s = r.separability_ratio.unwrap_or(f64::INFINITY);
        k.check(s <= 3.01, format!("separability {s} for {}", f.label()));
    }
    Ok(())
}

fn criterion_7(k: &mut Checks) -> Result<()> {
    for name in CATALOG_NAMES {
        let c = catalog(name)?;
        let probes = probes_for(name);
        let e = equivalence_crosscheck(&c, &probes, &[0.125, 0.25])?;
        k.check(e.agreement, format!("{name}: d -> 0 is {} but masses grow is {}", e.d_tends_to_zero, e.mass_grows_for_every_a));
        for q in [p(2.0), p(3.0), LebesgueExponent::INFINITY] {
            let s = strip_verdict(&c, q, &probes, 0.25, 0.1)?.verdict;
            let cv = compactness_verdict(&c, q, &probes, 0.25, 0.1)?.verdict;
            let agree = matches!(
                (s, cv),
                (StripClass::TendsInWhole, Compactness::Compact)
                    | (StripClass::NotTending, Compactness::NotCompact)
                    | (StripClass::Inconclusive, Compactness::Inconclusive)
            );
            k.check(agree, format!("{name}, p = {q}: strip {s:?} vs {cv:?}"));
        }
    }
    Ok(())
}

fn criterion_8(k: &mut Checks) -> Result<()> {
    for name in CATALOG_NAMES {
        let c = catalog(name)?;
        let cov = r_covering(&c, 0.0, 10)?;
        k.check(cov.segments.len() == 10, format!("{name}: {} segments", cov.segments.len()));
        k.check(cov.segments[0].left == 0.0, format!("{name}: first segment starts at {}", cov.segments[0].left));
        for w in cov.segments.windows(2) {
            k.check(w[0].right == w[1].left, format!("{name}: gap between {} and {}", w[0].right, w[1].left));
        }
        for (n, s) in cov.segments.iter().enumerate() {
            k.check((s.mass - 2.0).abs() <= 1e-8, format!("{name}: segment {} mass {}", n + 1, s.mass));
            if name == "constant_one" {
                let (l, r) = (2.0 * n as f64, 2.0 * (n + 1) as f64);
                k.check(
                    (s.left - l).abs() <= 1e-10 && (s.right - r).abs() <= 1e-10,
                    format!("segment {} = [{}, {}]", n + 1, s.left, s.right),
                );
            }
        }
    }
    Ok(())
}

type Criterion = fn(&mut Checks) -> Result<()>;

fn main() {
    let criteria: [(u32, &str, Option<u64>, Criterion); 8] = [
        (1, "constant-coefficient exactness", Some(5), criterion_1),
        (2, "periodic counterexample", Some(10), criterion_2),
        (3, "gaussian oscillatory example", Some(60), criterion_3),
        (4, "exponential oscillatory example", Some(60), criterion_4),
        (5, "green-operator correctness", None, criterion_5),
        (6, "explicit-constant inequalities", None, criterion_6),
        (7, "equivalence lemma", None, criterion_7),
        (8, "covering soundness", None, criterion_8),
    ];
    let mut all = true;
    for (n, name, budget, run) in criteria {
        let mut checks = Checks::default();
        let start = Instant::now();
        let outcome = run(&mut checks);
        let elapsed = start.elapsed();
        if let Err(e) = outcome {
            checks.failed.push(format!("error {}: {e}", e.name()));
        }
        if let Some(limit) = budget {
            checks.check(elapsed <= Duration::from_secs(limit), format!("runtime over {limit} s"));
        }
        let pass = checks.failed.is_empty();
        all &= pass;
        let secs = elapsed.as_secs_f64();
        if pass {
            println!("PASS criterion {n} ({name}) in {secs:.2} s");
        } else {
            println!("FAIL criterion {n} ({name}) in {secs:.2} s: {}", checks.failed.join("; "));
        }
    }
    if !all {
        std::process::exit(1);
    }
}
