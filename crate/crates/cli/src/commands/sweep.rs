use rayon::prelude::*;
use serde_json::json;

use posdef_core::criteria::{sweep_schoenberg, verify_thm_decreasing, Classification};
use posdef_core::profiles::{RadialProfile, Thm2Branch};

use super::{exit_for, grid, value_list};
use crate::config::Params;
use crate::error::CliError;
use crate::output::{num, Report, Table};

pub const SUBCOMMANDS: &[&str] = &["schoenberg", "gnp"];

pub const SCHOENBERG_COLUMNS: &[&str] = &["p", "q", "classification", "min_value", "threshold"];
pub const GNP_COLUMNS: &[&str] = &["n", "p", "classification", "min_value", "threshold"];

pub fn run(which: &str, p: &mut Params) -> Result<Report, CliError> {
    match which {
        "schoenberg" => schoenberg(p),
        "gnp" => gnp(p),
        other => Err(CliError::Usage(format!("unknown sweep `{other}`"))),
    }
}

/// Exit code of a grid: the worst outcome over its rows.
fn grid_exit(classes: impl Iterator<Item = Classification>) -> i32 {
    classes
        .map(exit_for)
        .max_by_key(|&c| match c {
            1 => 3,
            3 => 2,
            4 => 1,
            _ => 0,
        })
        .unwrap_or(0)
}

fn counts(classes: &[Classification]) -> String {
    let all = [
        Classification::PositiveNumeric,
        Classification::ViolationFound,
        Classification::HypothesesFailed,
        Classification::Inconclusive,
    ];
    all.iter()
        .map(|c| format!("{} {}", classes.iter().filter(|x| *x == c).count(), c))
        .collect::<Vec<_>>()
        .join(", ")
}

fn schoenberg(p: &mut Params) -> Result<Report, CliError> {
    let n: usize = p.parse("n")?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let ps = value_list("p", &p.text("p")?)?;
    let qs = value_list("q", &p.text("q")?)?;
    let seed: u64 = p.parse_or("seed", 0)?;
    let tol: f64 = p.parse_or("tol", 1e-6)?;
    let default_points = if n == 1 { "grid:-5:5:40".to_string() } else { "random:120:3".to_string() };
    let template = super::check::points(n, &p.text_or("points", &default_points), seed)?;
    let rows = sweep_schoenberg(n, &ps, &qs, &template, tol)?;
    let mut table = Table::new(SCHOENBERG_COLUMNS);
    let mut json_rows = Vec::with_capacity(rows.len());
    for r in &rows {
        let v = &r.verdict;
        table.push(vec![num(r.p), num(r.q), v.classification.to_string(), num(v.min_value), num(v.threshold)]);
        json_rows.push(json!({
            "p": r.p, "q": r.q, "classification": v.classification,
            "min_value": v.min_value, "threshold": v.threshold,
        }));
    }
    let classes: Vec<_> = rows.iter().map(|r| r.classification()).collect();
    let summary = vec![format!(
        "Schoenberg sweep n={n} on {} points: {}",
        template.len(),
        counts(&classes)
    )];
    Ok(Report { table, json: json_rows.into(), exit: grid_exit(classes.into_iter()), summary })
}

/// Radial transforms of `r^{−1}e^{−r^p}` in dimension `n`.
fn gnp(p: &mut Params) -> Result<Report, CliError> {
    let ns: Vec<usize> = value_list("n", &p.text("n")?)?
        .into_iter()
        .map(|x| {
            if x >= 3.0 && x.fract() == 0.0 && x < 1e6 {
                Ok(x as usize)
            } else {
                Err(CliError::Usage(format!("--n: need integer dimensions ≥ 3, got {x}")))
            }
        })
        .collect::<Result<_, _>>()?;
    let ps = value_list("p", &p.text("p")?)?;
    if let Some(bad) = ps.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(CliError::Usage(format!("--p: need positive finite exponents, got {bad}")));
    }
    let freq = grid(p)?;
    let tol: f64 = p.parse_or("tol", 1e-6)?;
    let cases: Vec<(usize, f64)> = ns.iter().flat_map(|&n| ps.iter().map(move |&q| (n, q))).collect();
    let verdicts: Vec<_> = cases
        .par_iter()
        .map(|&(n, q)| -> Result<_, CliError> {
            // |x|^{2−n}·f(|x|) with f = r^{−1}e^{−r^p} is r^{1−n}e^{−r^p}
            let f = RadialProfile::product(&RadialProfile::power(-1.0)?, &RadialProfile::exp_power(q)?);
            Ok(verify_thm_decreasing(&f, n, Thm2Branch::One, &freq, tol)?)
        })
        .collect();
    let mut table = Table::new(GNP_COLUMNS);
    let mut json_rows = Vec::with_capacity(cases.len());
    let mut classes = Vec::with_capacity(cases.len());
    for (&(n, q), v) in cases.iter().zip(verdicts) {
        let v = v?;
        table.push(vec![n.to_string(), num(q), v.classification.to_string(), num(v.min_value), num(v.threshold)]);
        json_rows.push(json!({
            "n": n, "p": q, "classification": v.classification,
            "min_value": v.min_value, "threshold": v.threshold,
        }));
        classes.push(v.classification);
    }
    let summary = vec![format!("g(n,p) sweep over {} frequencies: {}", freq.len(), counts(&classes))];
    Ok(Report { table, json: json_rows.into(), exit: grid_exit(classes.into_iter()), summary })
}
