pub mod check;
pub mod identity;
pub mod sweep;
pub mod transform;

use posdef_core::bodies::parse_body;
use posdef_core::criteria::{Classification, Verdict};
use posdef_core::profiles::parse_profile;
use posdef_core::transforms::FrequencyGrid;
use posdef_core::{Body, Profile};

use crate::config::{parse_value, Params};
use crate::error::CliError;
use crate::output::{num, to_json, Report, Table};

pub const DEFAULT_GRID: &str = "log:0.01:50:200";

pub fn profile(p: &mut Params, key: &str) -> Result<Profile, CliError> {
    let text = p.text(key)?;
    parse_profile(&text).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
}

pub fn body(p: &mut Params, key: &str) -> Result<Body, CliError> {
    let text = p.text(key)?;
    parse_body(&text).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
}

pub fn grid(p: &mut Params) -> Result<FrequencyGrid<f64>, CliError> {
    let text = p.text_or("grid", DEFAULT_GRID);
    FrequencyGrid::parse(&text).map_err(|e| CliError::Usage(format!("--grid: {e}")))
}

/// `a:b:N` (N equispaced values), or a comma separated list; `inf` is accepted.
pub fn value_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, n] => {
            let (a, b): (f64, f64) = (parse_value(key, a)?, parse_value(key, b)?);
            let n: usize = parse_value(key, n)?;
            if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && !(b > a)) {
                return Err(CliError::Usage(format!("--{key}: range `{text}` needs a < b and N ≥ 1")));
            }
            if n == 1 {
                vec![a]
            } else {
                (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
            }
        }
        [list] => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_value::<f64>(key, s))
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(CliError::Usage(format!("--{key}: cannot parse `{text}`"))),
    };
    if values.is_empty() {
        return Err(CliError::Usage(format!("--{key}: empty list")));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(CliError::Usage(format!("--{key}: NaN in `{text}`")));
    }
    Ok(values)
}

pub fn exit_for(c: Classification) -> i32 {
    match c {
        Classification::PositiveNumeric => 0,
        Classification::ViolationFound => 1,
        Classification::HypothesesFailed => 3,
        Classification::Inconclusive => 4,
    }
}

pub const VERDICT_COLUMNS: &[&str] =
    &["criterion", "classification", "min_value", "threshold", "scale", "witness", "witness_point"];

pub fn verdict_row(v: &Verdict) -> Vec<String> {
    let (label, point) = match &v.witness {
        Some(w) => (w.label.clone(), w.point.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ")),
        None => (String::new(), String::new()),
    };
    vec![
        v.criterion.clone(),
        v.classification.to_string(),
        num(v.min_value),
        num(v.threshold),
        num(v.scale),
        label,
        point,
    ]
}

pub fn verdict_report(v: Verdict) -> Report {
    let mut table = Table::new(VERDICT_COLUMNS);
    table.push(verdict_row(&v));
    let mut summary = vec![format!(
        "{}: {} (min {} vs threshold −{})",
        v.criterion,
        v.classification,
        num(v.min_value),
        num(v.threshold)
    )];
    for h in &v.hypotheses {
        summary.push(format!("  hypothesis {}: {:?} (margin {})", h.name, h.satisfied, num(h.margin)));
    }
    for n in &v.notes {
        summary.push(format!("  note: {n}"));
    }
    Report { table, json: to_json(&v), exit: exit_for(v.classification), summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(value_list("p", "0.5:4:8").unwrap().len(), 8);
        assert_eq!(value_list("p", "1,2,inf").unwrap()[2], f64::INFINITY);
        assert!(value_list("p", "").is_err());
        assert!(value_list("p", "3:1:4").is_err());
        assert!(value_list("p", "1,x").is_err());
    }
}
