use rayon::prelude::*;
use serde_json::{json, Value};

use posdef_core::criteria::{lemma1_closed_form, lemma1_pairing, Classification, Lemma1Branch};
use posdef_core::profiles::RadialProfile;
use posdef_core::transforms::{dilation_ft_check, integral_radon_identity, slice_identity_check, slice_trials, TestFunction};

use super::{body, value_list};
use crate::config::Params;
use crate::error::CliError;
use crate::output::{num, Report, Table};

pub const SUBCOMMANDS: &[&str] = &["slice", "radon-average", "dilation", "lemma1"];

pub const SLICE_COLUMNS: &[&str] = &["trial", "n", "s", "residual", "threshold", "pass"];
pub const RADON_COLUMNS: &[&str] = &["n", "r", "lhs", "rhs", "residual", "threshold", "pass"];
pub const DILATION_COLUMNS: &[&str] = &["lambda", "xi_norm", "residual", "threshold", "pass"];
pub const LEMMA1_COLUMNS: &[&str] = &["a", "b", "numeric", "closed_form", "residual", "threshold", "pass"];

/// Accumulates rows and the worst residual-to-threshold ratio.
struct Residuals {
    table: Table,
    json: Vec<Value>,
    failures: usize,
    worst: f64,
}

impl Residuals {
    fn new(columns: &[&'static str]) -> Self {
        Self { table: Table::new(columns), json: Vec::new(), failures: 0, worst: 0.0 }
    }

    fn push(&mut self, mut cells: Vec<String>, mut record: Value, residual: f64, threshold: f64) {
        let pass = residual <= threshold;
        self.failures += usize::from(!pass);
        self.worst = self.worst.max(residual);
        cells.extend([num(residual), num(threshold), pass.to_string()]);
        self.table.push(cells);
        record["residual"] = json!(residual);
        record["threshold"] = json!(threshold);
        record["pass"] = json!(pass);
        self.json.push(record);
    }

    fn finish(self, what: &str) -> Report {
        let rows = self.json.len();
        let summary = vec![format!(
            "{what}: {rows} rows, max residual {}, {} above threshold",
            num(self.worst),
            self.failures
        )];
        Report { table: self.table, json: self.json.into(), exit: i32::from(self.failures > 0), summary }
    }
}

pub fn run(which: &str, p: &mut Params) -> Result<Report, CliError> {
    match which {
        "slice" => slice(p),
        "radon-average" => radon_average(p),
        "dilation" => dilation(p),
        "lemma1" => lemma1(p),
        other => Err(CliError::Usage(format!("unknown identity `{other}`"))),
    }
}

fn dims(p: &mut Params, default: &str) -> Result<Vec<usize>, CliError> {
    let text = p.text_or("n", default);
    value_list("n", &text)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x < 1e6 {
                Ok(x as usize)
            } else {
                Err(CliError::Usage(format!("--n: `{x}` is not a dimension")))
            }
        })
        .collect()
}

fn slice(p: &mut Params) -> Result<Report, CliError> {
    let ns = dims(p, "3")?;
    let trials: usize = p.parse_or("trials", 50)?;
    let seed: u64 = p.parse_or("seed", 0)?;
    let tol: f64 = p.parse_or("tol", 1e-8)?;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let mut out = Residuals::new(SLICE_COLUMNS);
    for n in ns {
        let cases = slice_trials::<f64>(n, trials, seed)?;
        let residuals: Vec<_> =
            cases.par_iter().map(|c| slice_identity_check(&c.phi, &c.direction, c.s, 1e-12)).collect();
        for (i, (c, r)) in cases.iter().zip(residuals).enumerate() {
            let r = r?;
            out.push(
                vec![i.to_string(), n.to_string(), num(c.s)],
                json!({"trial": i, "n": n, "s": c.s}),
                r,
                tol,
            );
        }
    }
    Ok(out.finish("slice identity"))
}

fn radon_average(p: &mut Params) -> Result<Report, CliError> {
    let ns = dims(p, "3")?;
    let rs = value_list("r", &p.text_or("r", "1"))?;
    let sigma: f64 = p.parse_or("sigma", 1.0)?;
    let tol: f64 = p.parse_or("tol", 1e-6)?;
    let mut out = Residuals::new(RADON_COLUMNS);
    for n in ns {
        let delta = TestFunction::single(n, sigma, 1.0)?;
        for &r in &rs {
            let id = integral_radon_identity(&delta, r, 1e-12)?;
            let (lhs, rhs) = (id.lhs.value, id.rhs.value);
            out.push(
                vec![n.to_string(), num(r), num(lhs), num(rhs)],
                json!({"n": n, "r": r, "lhs": lhs, "rhs": rhs}),
                (lhs - rhs).abs(),
                tol * rhs.abs(),
            );
        }
    }
    Ok(out.finish("spherical Radon average"))
}

fn dilation(p: &mut Params) -> Result<Report, CliError> {
    let k = body(p, "body")?;
    let lambdas = value_list("lambda", &p.text_or("lambda", "0.5,1,2"))?;
    let default_xi = (0..k.dim).map(|i| if i == 0 { "1.3" } else { "0.4" }).collect::<Vec<_>>().join(",");
    let xi = value_list("xi", &p.text_or("xi", &default_xi))?;
    if xi.len() != k.dim {
        return Err(CliError::Usage(format!("--xi has {} components, the body is in dimension {}", xi.len(), k.dim)));
    }
    let tol: f64 = p.parse_or("tol", 1e-8)?;
    let xi_norm = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let volume = k.volume().unwrap_or(1.0);
    let mut out = Residuals::new(DILATION_COLUMNS);
    for &lambda in &lambdas {
        let r = dilation_ft_check(&k, lambda, &xi, 1e-12)?;
        // |χ̂_{λK}| ≤ vol(λK)
        let threshold = tol * (lambda.powi(k.dim as i32) * volume).max(1.0);
        out.push(vec![num(lambda), num(xi_norm)], json!({"lambda": lambda, "xi_norm": xi_norm}), r, threshold);
    }
    Ok(out.finish("dilation identity"))
}

fn lemma1(p: &mut Params) -> Result<Report, CliError> {
    let pairs: usize = p.parse_or("pairs", 25)?;
    let side = (pairs as f64).sqrt().round() as usize;
    if pairs == 0 || side * side != pairs {
        return Err(CliError::Usage(format!("--pairs must be a positive square, got {pairs}")));
    }
    let lo: f64 = p.parse_or("min", 0.1)?;
    let hi: f64 = p.parse_or("max", 10.0)?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < --min ≤ --max, got {lo}, {hi}")));
    }
    let tol: f64 = p.parse_or("tol", 1e-8)?;
    let axis: Vec<f64> = (0..side)
        .map(|i| if side == 1 { lo } else { lo * (hi / lo).powf(i as f64 / (side - 1) as f64) })
        .collect();
    let grid: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    let values: Vec<_> = grid
        .par_iter()
        .map(|&(a, b)| -> Result<_, CliError> {
            let phi = RadialProfile::truncated_power(0.0, a)?;
            let psi = RadialProfile::truncated_power(1.0, b)?;
            let v = lemma1_pairing(&phi, &psi, Lemma1Branch::Two, 1e-6)?;
            Ok((v.min_value, v.classification, lemma1_closed_form(a, b)?))
        })
        .collect();
    let mut out = Residuals::new(LEMMA1_COLUMNS);
    let mut negative = 0;
    for (&(a, b), row) in grid.iter().zip(values) {
        let (numeric, class, exact) = row?;
        negative += usize::from(class == Classification::ViolationFound);
        out.push(
            vec![num(a), num(b), num(numeric), num(exact)],
            json!({"a": a, "b": b, "numeric": numeric, "closed_form": exact, "classification": class}),
            (numeric - exact).abs(),
            tol,
        );
    }
    let mut report = out.finish("interval pairing against (4/a)(1 − cos(ab))");
    report.summary.push(format!("  {negative} pairs with a negative value"));
    Ok(report)
}
