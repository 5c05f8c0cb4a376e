use rayon::prelude::*;
use serde_json::json;

use posdef_core::transforms::radial_ft;

use super::{grid, profile};
use crate::config::Params;
use crate::error::{CliError, EXIT_NUMERICAL};
use crate::output::{num, Report, Table};

pub const COLUMNS: &[&str] = &["xi", "value", "error_estimate", "converged"];

/// Radial Fourier transform of a profile on a frequency grid.
pub fn run(p: &mut Params) -> Result<Report, CliError> {
    let f = profile(p, "profile")?;
    let n: usize = p.parse("n")?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let grid = grid(p)?;
    let tol: f64 = p.parse_or("tol", 1e-10)?;
    let rows: Vec<_> = grid.points.par_iter().map(|&xi| radial_ft(&f, n, xi, tol)).collect();
    let mut table = Table::new(COLUMNS);
    let mut json_rows = Vec::with_capacity(rows.len());
    let mut failed = 0;
    for (xi, row) in grid.points.iter().zip(rows) {
        let q = row?;
        failed += usize::from(!q.converged);
        table.push(vec![num(*xi), num(q.value), num(q.error_estimate), q.converged.to_string()]);
        json_rows.push(json!({"xi": xi, "value": q.value, "error_estimate": q.error_estimate, "converged": q.converged}));
    }
    let summary = vec![format!(
        "transform of {} in dimension {n}: {} frequencies, {failed} not converged",
        f.label,
        grid.len()
    )];
    Ok(Report { table, json: json_rows.into(), exit: if failed > 0 { EXIT_NUMERICAL } else { 0 }, summary })
}
