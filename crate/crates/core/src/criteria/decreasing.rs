use rayon::prelude::*;

use super::{nonincreasing_scan, nonnegative_scan, shape_grid, CriteriaError, Verdict, Witness};
use crate::profiles::{check_thm2_integrability, RadialProfile, Thm2Branch};
use crate::transforms::{radial_ft, FrequencyGrid, TransformError};
use crate::{Profile, Tri};

/// 200 log-spaced frequencies on `[1e-2, 50]`.
pub fn default_grid() -> FrequencyGrid<f64> {
    FrequencyGrid::log(1e-2, 50.0, 200).expect("valid default grid")
}

/// Positivity of the transform of `|x|^{2−n} f(|x|)` in ℝⁿ over `grid`.
pub fn verify_thm_decreasing(
    f: &Profile,
    n: usize,
    branch: Thm2Branch,
    grid: &FrequencyGrid<f64>,
    tol: f64,
) -> Result<Verdict, CriteriaError> {
    if n == 2 {
        return Err(CriteriaError::Refused("dimension 2 is not covered by this criterion".into()));
    }
    match branch {
        Thm2Branch::One if n < 3 => {
            return Err(CriteriaError::Refused(format!("branch 1 needs n ≥ 3, got {n}")));
        }
        Thm2Branch::Two if n < 9 => {
            return Err(CriteriaError::Refused(format!("branch 2 needs n ≥ 9, got {n}")));
        }
        _ => {}
    }
    if grid.is_empty() {
        return Err(CriteriaError::InvalidArgument("empty frequency grid".into()));
    }
    let mut v = Verdict::new("thm-decreasing", tol);
    let scan = shape_grid(f);
    v.hypotheses.push(nonnegative_scan("f_nonnegative", |t| f.eval(t), &scan));
    v.hypotheses.push(nonincreasing_scan("f_nonincreasing", |t| f.eval(t), &scan));
    v.hypotheses.push(check_thm2_integrability(f, branch));
    if v.hypotheses_status(&[]) == Tri::False {
        v.classify(&[], 0.0, true);
        return Ok(v);
    }
    let weight = RadialProfile::power(2.0 - n as f64)?;
    let g = RadialProfile::product(&weight, f);
    let inner_tol = (tol * 1e-4).clamp(1e-12, 1e-8);
    let rows: Vec<_> = grid.points.par_iter().map(|&xi| radial_ft(&g, n, xi, inner_tol)).collect();
    let mut values = Vec::with_capacity(rows.len());
    let mut all_converged = true;
    let mut noise = 0.0f64;
    for r in rows {
        match r {
            Ok(q) => {
                all_converged &= q.converged;
                v.budget.evaluations += q.evaluations;
                values.push((q.value, q.error_estimate));
            }
            Err(TransformError::Refused(msg)) => {
                v.notes.push(format!("transform refused: {msg}"));
                v.classification = crate::criteria::Classification::HypothesesFailed;
                return Ok(v);
            }
            Err(e) => return Err(e.into()),
        }
    }
    v.budget.points = values.len();
    v.scale = values[0].0.abs();
    v.threshold = tol * v.scale;
    let (i, &(low, err)) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("non-empty grid");
    noise = noise.max(err);
    v.min_value = low;
    v.witness = Some(Witness { label: "frequency".into(), point: vec![grid.points[i]], value: low });
    if !all_converged {
        v.notes.push("some frequencies did not converge".into());
    }
    v.classify(&[], noise, all_converged);
    Ok(v)
}
