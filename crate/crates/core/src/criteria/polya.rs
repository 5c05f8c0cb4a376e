use rayon::prelude::*;

use super::{Classification, CriteriaError, Verdict, Witness};
use crate::profiles::check_polya;
use crate::transforms::{ft_even_1d, FrequencyGrid, TransformError};
use crate::{Profile, Tri};

/// Pólya certificate for `t ↦ f(|t|)` on ℝ, with a confirming scan of its
/// one-dimensional transform over `grid`.
///
/// Certified profiles are `POSITIVE_NUMERIC`. Without the certificate the
/// verdict is `INCONCLUSIVE` unless the scan finds a negative value, which
/// is a genuine `VIOLATION_FOUND`.
pub fn polya_verdict(f: &Profile, grid: &FrequencyGrid<f64>, tol: f64) -> Result<Verdict, CriteriaError> {
    if grid.is_empty() {
        return Err(CriteriaError::InvalidArgument("empty frequency grid".into()));
    }
    let mut v = Verdict::new("polya", tol);
    let cert = check_polya(f);
    let certified = cert.satisfied;
    v.hypotheses.push(cert);

    let rows: Vec<_> = grid.points.par_iter().map(|&xi| ft_even_1d(f, xi, 1e-10)).collect();
    let mut scan = Vec::with_capacity(rows.len());
    let mut converged = true;
    let mut refused = None;
    for r in rows {
        match r {
            Ok(q) => {
                converged &= q.converged;
                v.budget.evaluations += q.evaluations;
                scan.push(q.value);
            }
            Err(TransformError::Refused(msg)) => {
                refused = Some(msg);
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    v.budget.points = scan.len();

    if let Some(msg) = refused {
        v.notes.push(format!("transform scan unavailable: {msg}"));
        v.classification = if certified == Tri::True {
            Classification::PositiveNumeric
        } else {
            Classification::Inconclusive
        };
        return Ok(v);
    }

    v.scale = scan[0].abs();
    v.threshold = tol * v.scale;
    let (i, &low) = scan.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty grid");
    v.min_value = low;
    v.witness = Some(Witness { label: "frequency".into(), point: vec![grid.points[i]], value: low });
    let negative = low < -v.threshold;
    v.notes.push(format!(
        "transform scan over {} frequencies: min {low:e} at {} ({})",
        scan.len(),
        grid.points[i],
        if negative { "negative" } else { "non-negative" }
    ));
    v.classification = match (certified, negative) {
        (Tri::True, false) if converged => Classification::PositiveNumeric,
        // the certificate and a negative scan cannot both be right
        (Tri::True, _) => Classification::Inconclusive,
        (_, true) if converged => Classification::ViolationFound,
        _ => Classification::Inconclusive,
    };
    if certified != Tri::True {
        v.notes.push("not certified by the convexity criterion".into());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::default_grid;
    use crate::profiles::RadialProfile;

    #[test]
    fn stretched_exponential_is_certified() {
        let f = RadialProfile::exp_power(0.5).unwrap();
        let v = polya_verdict(&f, &default_grid(), 1e-6).unwrap();
        assert_eq!(v.classification, Classification::PositiveNumeric, "{v:?}");
        assert_eq!(v.hypotheses[0].satisfied, Tri::True);
    }

    #[test]
    fn gaussian_is_not_certified_but_scans_positive() {
        let f = RadialProfile::exp_power(2.0).unwrap();
        let v = polya_verdict(&f, &FrequencyGrid::log(0.01, 8.0, 60).unwrap(), 1e-6).unwrap();
        assert_eq!(v.classification, Classification::Inconclusive);
        assert_eq!(v.hypotheses[0].satisfied, Tri::False);
        assert!(v.min_value >= -v.threshold);
    }

    #[test]
    fn cubic_exponential_scan_goes_negative() {
        let f = RadialProfile::exp_power(3.0).unwrap();
        let v = polya_verdict(&f, &FrequencyGrid::lin(0.0, 20.0, 201).unwrap(), 1e-6).unwrap();
        assert_eq!(v.classification, Classification::ViolationFound);
    }

    #[test]
    fn smoothed_reciprocal_reports_margin() {
        let f = RadialProfile::smoothed_truncated_power(-1.0, 10.0, 1.0).unwrap();
        let v = polya_verdict(&f, &default_grid(), 1e-6).unwrap();
        // the ramp bends the profile concave at the truncation point
        assert_eq!(v.hypotheses[0].satisfied, Tri::False);
        assert!(v.hypotheses[0].margin < 0.0);
        assert_ne!(v.classification, Classification::PositiveNumeric);
    }
}
