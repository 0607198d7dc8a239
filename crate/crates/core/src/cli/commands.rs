use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::output::{Record, Table};
use super::{parse_points, Command, Failure, UsageError};
use crate::asymptotics::{
    asymptotic_j_check, check_conditions, d_asymptotic_check, majorant_with, norm_majorant_ratios, sandwich_constant,
};
use crate::coefficient::{d_function, q0_estimate, r_covering, resolve, Coefficient, DOptions, Parity};
use crate::diagnostics::{
    compactness_verdict, equivalence_crosscheck, solvability_verdict, strip_verdict, Compactness, Solvability,
    StripClass,
};
use crate::green::{GreenOperator, LebesgueExponent, RightHandSide, MASS_THRESHOLD};

type Outcome = Result<(Record, bool), Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialize")
}

fn positive(name: &str, v: f64) -> Result<f64, UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(UsageError(format!("--{name} must be positive, got {v}")))
    }
}

fn increasing(name: &str, xs: &[f64]) -> Result<(), UsageError> {
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(UsageError(format!("--{name} must be increasing")));
    }
    Ok(())
}

fn sorted_by_magnitude(name: &str, xs: &[f64]) -> Result<(), UsageError> {
    if xs.windows(2).any(|w| w[1].abs() < w[0].abs()) {
        return Err(UsageError(format!("--{name} must be sorted by |x|")));
    }
    Ok(())
}

fn exponent(p: &str) -> Result<LebesgueExponent, Failure> {
    Ok(p.parse::<LebesgueExponent>()?)
}

/// Rows become both the CSV table and, as objects keyed by column, the JSON results.
fn tabulate(columns: &[&'static str], rows: Vec<Vec<Value>>) -> (Table, Value) {
    let mut table = Table::new(columns);
    let objects: Vec<Value> = rows
        .iter()
        .map(|r| Value::Object(columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
        .collect();
    for r in rows {
        table.push(r);
    }
    (table, Value::Array(objects))
}

fn record(command: &'static str, c: &Coefficient, config_echo: Value, results: Value, evidence: Value, table: Table) -> Record {
    Record {
        command,
        coefficient_label: c.label.clone(),
        config_echo,
        results,
        evidence,
        table,
    }
}

/// Probe ladders for `diagnose` when none is given: the points the catalog
/// examples are known at, and a doubling ladder (mirrored when `q` is not even)
/// otherwise.
fn default_probes(c: &Coefficient) -> Vec<f64> {
    match c.label.as_str() {
        "one_plus_cos" => (1..=5).map(|k| (2 * k + 1) as f64 * PI).collect(),
        "exp_osc" => vec![3.0, 4.0, 5.0, 6.0, 7.0],
        "gaussian_osc" => vec![1.5, 2.0, 2.5, 3.0],
        _ => {
            let ladder = [1.0, 2.0, 4.0, 8.0];
            match c.parity {
                Parity::Even => ladder.to_vec(),
                Parity::None => ladder.iter().flat_map(|&x| [-x, x]).collect(),
            }
        }
    }
}

pub(super) fn run(command: &Command) -> Outcome {
    let c = resolve(&command.common().coef)?;
    let coef = command.common().coef.clone();
    match command {
        Command::Dfun { xs, root_tol, .. } => {
            let points = parse_points(xs)?;
            let opts = DOptions {
                root_tol: positive("root-tol", *root_tol)?,
                ..DOptions::default()
            };
            let found = points
                .par_iter()
                .map(|&x| d_function(&c, x, opts))
                .collect::<crate::Result<Vec<_>>>()?;
            let rows = points
                .iter()
                .zip(&found)
                .map(|(&x, r)| vec![json!(x), json!(r.d), json!(r.residual)])
                .collect();
            let (table, results) = tabulate(&["x", "d", "residual"], rows);
            let brackets: Vec<Value> = found.iter().map(|r| json!([r.bracket.0, r.bracket.1])).collect();
            let echo = json!({"coef": coef, "xs": xs, "root_tol": root_tol, "d_max": opts.d_max});
            Ok((record("dfun", &c, echo, results, json!({"brackets": brackets}), table), false))
        }
        Command::Q0 { a_ladder, window, grid_step, .. } => {
            let ladder = parse_points(a_ladder)?;
            increasing("a", &ladder)?;
            let window = positive("window", window.unwrap_or(c.reach))?;
            let step = positive("grid-step", *grid_step)?;
            let est = ladder
                .par_iter()
                .map(|&a| q0_estimate(&c, a, window, step))
                .collect::<crate::Result<Vec<_>>>()?;
            let rows = est
                .iter()
                .map(|e| vec![json!(e.a), json!(e.inf_value), json!(e.argmin_x), json!(e.window.0), json!(e.window.1), json!(e.grid_step)])
                .collect();
            let (table, results) = tabulate(&["a", "q0", "argmin_x", "window_lo", "window_hi", "grid_step"], rows);
            let first = est.iter().find(|e| e.inf_value > MASS_THRESHOLD).map(|e| e.a);
            let evidence = json!({"threshold": MASS_THRESHOLD, "first_positive_a": first});
            let echo = json!({"coef": coef, "a": a_ladder, "window": window, "grid_step": step});
            Ok((record("q0", &c, echo, results, evidence, table), false))
        }
        Command::Cover { origin, count, .. } => {
            let cov = r_covering(&c, *origin, *count)?;
            let rows = cov
                .segments
                .iter()
                .enumerate()
                .map(|(i, s)| vec![json!(i + 1), json!(s.left), json!(s.right), json!(s.center), json!(s.radius), json!(s.mass)])
                .collect();
            let (table, results) = tabulate(&["index", "left", "right", "center", "radius", "mass"], rows);
            let gap = cov.segments.windows(2).map(|w| (w[1].left - w[0].right).abs()).fold(0.0, f64::max);
            let mass_error = cov.segments.iter().map(|s| (s.mass - 2.0).abs()).fold(0.0, f64::max);
            let evidence = json!({"max_abutment_gap": gap, "max_mass_error": mass_error});
            let echo = json!({"coef": coef, "origin": origin, "count": count});
            Ok((record("cover", &c, echo, results, evidence, table), false))
        }
        Command::Solve { rhs, xs, tol, .. } => {
            let f = RightHandSide::parse(rhs)?;
            let points = parse_points(xs)?;
            let tol = positive("tol", *tol)?;
            let op = GreenOperator::certified(&c)?;
            let report = op.residual_check(&f, &points, tol)?;
            let rows = report
                .samples
                .iter()
                .map(|s| vec![json!(s.x), json!(s.y), json!(s.error_estimate), json!(s.truncated_at)])
                .collect();
            let (table, results) = tabulate(&["x", "y", "error_estimate", "truncated_at"], rows);
            let floor = op.floor();
            let evidence = json!({
                "max_residual": report.max_residual,
                "argmax_x": report.argmax_x,
                "step": report.step,
                "decay_floor": {"a": floor.a, "q0": floor.q0},
            });
            let echo = json!({"coef": coef, "rhs": f.label(), "xs": xs, "tol": tol});
            Ok((record("solve", &c, echo, results, evidence, table), false))
        }
        Command::Gnorm { p, xs, tol, .. } => {
            let p = exponent(p)?;
            let points = parse_points(xs)?;
            let tol = positive("tol", *tol)?;
            let op = GreenOperator::certified(&c)?;
            let values = points
                .par_iter()
                .map(|&x| {
                    let g = op.green_norm(x, p, tol)?;
                    let d = d_function(&c, x, DOptions::default())?.d;
                    Ok((g, d))
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let rows = points
                .iter()
                .zip(&values)
                .map(|(&x, &(g, d))| {
                    let bound = (-2f64).exp() * d.powf(1.0 / p.p_conj);
                    vec![json!(x), json!(g), json!(d), json!(bound)]
                })
                .collect();
            let (table, results) = tabulate(&["x", "green_norm", "d", "lower_bound"], rows);
            let floor = op.floor();
            let evidence = json!({"decay_floor": {"a": floor.a, "q0": floor.q0}});
            let echo = json!({"coef": coef, "p": p, "xs": xs, "tol": tol});
            Ok((record("gnorm", &c, echo, results, evidence, table), false))
        }
        Command::Majorant { p, probes, tol, .. } => {
            let p = exponent(p)?;
            let probes_v = parse_points(probes)?;
            sorted_by_magnitude("probes", &probes_v)?;
            let tol = positive("tol", *tol)?;
            let ratios = norm_majorant_ratios(&c, p, &probes_v, tol)?;
            let js = asymptotic_j_check(&c, &probes_v, tol)?;
            let (conditions, unverified) = match check_conditions(&c, &probes_v) {
                Ok(report) => {
                    let unverified = majorant_with(&c, p, probes_v[0], &report)?.unverified;
                    (to_value(&report), unverified)
                }
                Err(e) if !e.is_quadrature_failure() => (json!({"error": {"name": e.name(), "message": e.to_string()}}), true),
                Err(e) => return Err(e.into()),
            };
            let rows = ratios
                .iter()
                .zip(&js)
                .map(|(r, j)| {
                    vec![
                        json!(r.x),
                        json!(r.green_norm),
                        json!(r.majorant),
                        json!(r.ratio),
                        json!((r.ratio - 1.0).abs()),
                        json!(j.q1),
                        json!(j.j),
                        json!(j.epsilon),
                    ]
                })
                .collect();
            let (table, rows) = tabulate(
                &["x", "green_norm", "majorant", "ratio", "abs_ratio_minus_one", "q1", "j", "epsilon"],
                rows,
            );
            let results = json!({
                "rows": rows,
                "sandwich_constant": sandwich_constant(&js),
                "unverified": unverified,
            });
            let evidence = json!({"conditions": conditions});
            let echo = json!({"coef": coef, "p": p, "probes": probes, "tol": tol});
            Ok((record("majorant", &c, echo, results, evidence, table), false))
        }
        Command::Sigma { probes, tol, .. } => {
            let probes_v = parse_points(probes)?;
            sorted_by_magnitude("probes", &probes_v)?;
            let tol = positive("tol", *tol)?;
            let report = d_asymptotic_check(&c, &probes_v, tol)?;
            let rows = report
                .rows
                .iter()
                .map(|r| vec![json!(r.x), json!(r.d), json!(r.q1), json!(r.q1_times_d), json!(r.sigma1), json!(r.sigma2)])
                .collect();
            let (table, rows) = tabulate(&["x", "d", "q1", "q1_times_d", "sigma1", "sigma2"], rows);
            let results = json!({"rows": rows, "sigmas_vanish": report.sigmas_vanish});
            let echo = json!({"coef": coef, "probes": probes, "tol": tol});
            Ok((record("sigma", &c, echo, results, json!({}), table), false))
        }
        Command::Diagnose {
            p,
            probes,
            a_ladder,
            window,
            grid_step,
            strip_a,
            equivalence_ladder,
            threshold,
            ..
        } => {
            let p = exponent(p)?;
            let probes_v = match probes {
                Some(s) => parse_points(s)?,
                None => default_probes(&c),
            };
            sorted_by_magnitude("probes", &probes_v)?;
            let ladder = parse_points(a_ladder)?;
            let eq_ladder = parse_points(equivalence_ladder)?;
            let window = positive("window", window.unwrap_or(c.reach))?;
            let step = positive("grid-step", *grid_step)?;
            let strip_a = positive("strip-a", *strip_a)?;
            let threshold = positive("threshold", *threshold)?;

            let solv = solvability_verdict(&c, &ladder, window, step)?;
            let mut inconclusive = solv.verdict == Solvability::Inconclusive;
            let mut results = json!({
                "solvable": solv.verdict == Solvability::Solvable,
                "solvability": to_value(&solv.verdict),
                "tends_in_whole": Value::Null,
                "strip": Value::Null,
                "compact": Value::Null,
                "compactness": Value::Null,
                "equivalence_agrees": Value::Null,
            });
            let mut evidence = json!({"solvability": to_value(&solv)});
            let mut table = Table::new(&["check", "verdict"]);
            table.push(vec![json!("solvability"), to_value(&solv.verdict)]);
            if solv.verdict == Solvability::Solvable {
                let strip = strip_verdict(&c, p, &probes_v, strip_a, threshold)?;
                let compact = compactness_verdict(&c, p, &probes_v, strip_a, threshold)?;
                let eq = equivalence_crosscheck(&c, &probes_v, &eq_ladder)?;
                inconclusive |= strip.verdict == StripClass::Inconclusive || compact.verdict == Compactness::Inconclusive;
                results["tends_in_whole"] = json!(strip.verdict == StripClass::TendsInWhole);
                results["strip"] = to_value(&strip.verdict);
                results["compact"] = json!(compact.verdict == Compactness::Compact);
                results["compactness"] = to_value(&compact.verdict);
                results["equivalence_agrees"] = json!(eq.agreement);
                table.push(vec![json!("strip"), to_value(&strip.verdict)]);
                table.push(vec![json!("compactness"), to_value(&compact.verdict)]);
                table.push(vec![json!("equivalence"), json!(eq.agreement)]);
                evidence["strip"] = to_value(&strip);
                evidence["compactness"] = to_value(&compact);
                evidence["equivalence"] = to_value(&eq);
            }
            results["inconclusive"] = json!(inconclusive);
            let echo = json!({
                "coef": coef,
                "p": p,
                "probes": probes_v,
                "a_ladder": ladder,
                "window": window,
                "grid_step": step,
                "strip_a": strip_a,
                "equivalence_ladder": eq_ladder,
                "threshold": threshold,
            });
            Ok((record("diagnose", &c, echo, results, evidence, table), inconclusive))
        }
    }
}
