use serde::Serialize;

use super::{Classification, CriteriaError, Verdict, Witness, SIGMA_MULTIPLIER};
use crate::profiles::check_omega_hypotheses;
use crate::seeds::derive_seed;
use crate::transforms::{pairing_direct, pairing_sectional_with, OmegaTransform, PairingOptions, TransformError};
use crate::{Body, HypothesisReport, Profile, Test, Tri};

#[derive(Clone, Debug, Serialize)]
pub struct OmegaOptions {
    /// Monte Carlo samples per pairing.
    pub samples: usize,
    pub seed: u64,
    /// Also run the sectional route and compare.
    pub sectional: bool,
    /// Hypothesis names to skip when classifying.
    pub waivers: Vec<String>,
    pub tol: f64,
    pub allow_finite_difference: bool,
}

impl OmegaOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            sectional: false,
            waivers: Vec::new(),
            tol: super::DEFAULT_TOL,
            allow_finite_difference: false,
        }
    }
}

/// Pairs `f(‖·‖_K)` against `φ̂` for every `φ` in `battery`.
///
/// Element `i` uses seed `derive_seed(seed, i)` and passes when its estimate
/// is above `−max(3σ, tol·∫|integrand|)`.
pub fn verify_thm_omega(f: &Profile, body: &Body, battery: &[Test], opts: &OmegaOptions) -> Result<Verdict, CriteriaError> {
    if battery.is_empty() {
        return Err(CriteriaError::InvalidArgument("empty test-function battery".into()));
    }
    if let Some(phi) = battery.iter().find(|p| p.dim != body.dim) {
        return Err(CriteriaError::InvalidArgument(format!(
            "battery element in dimension {} against a body in dimension {}",
            phi.dim, body.dim
        )));
    }
    let mut v = Verdict::new("thm-omega", opts.tol);
    v.hypotheses = check_omega_hypotheses(f, body.dim);
    v.hypotheses.push(HypothesisReport::new("body_convex", Tri::from_bool(body.is_convex()), 0.0));
    if v.hypotheses_status(&opts.waivers) == Tri::False {
        v.classify(&opts.waivers, 0.0, true);
        return Ok(v);
    }

    let seeds: Vec<u64> = (0..battery.len()).map(|i| derive_seed(opts.seed, i as u64)).collect();
    let pairing_opts = |seed| {
        let mut p = PairingOptions::<f64>::new(opts.samples, seed);
        p.allow_finite_difference = opts.allow_finite_difference;
        p
    };
    let mut direct = Vec::with_capacity(battery.len());
    for (phi, &seed) in battery.iter().zip(&seeds) {
        direct.push(pairing_direct(f, body, phi, &pairing_opts(seed))?);
    }
    v.seeds = seeds.clone();
    v.budget.points = battery.len();
    v.budget.samples = direct.iter().map(|d| d.samples).sum();

    // worst element relative to its own threshold
    let threshold = |sigma: f64, abs: f64| (SIGMA_MULTIPLIER * sigma).max(opts.tol * abs).max(f64::MIN_POSITIVE);
    let (worst, _) = direct
        .iter()
        .enumerate()
        .map(|(i, d)| (i, d.result.value / threshold(d.result.error_estimate, d.abs_scale)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty battery");
    let d = &direct[worst];
    v.min_value = d.result.value;
    v.scale = d.abs_scale;
    v.threshold = threshold(d.result.error_estimate, d.abs_scale);
    let phi = &battery[worst];
    let mut point = phi.center.clone();
    point.push(phi.sigma);
    v.witness = Some(Witness { label: format!("battery[{worst}]"), point, value: d.result.value });
    v.notes.push(format!("worst element {worst}: {:e} ± {:e}", d.result.value, d.result.error_estimate));

    let mut agree = true;
    if opts.sectional {
        match sectional_compare(f, body, battery, &direct, &seeds, opts) {
            Ok((count, notes)) => {
                v.budget.samples += count;
                agree = notes.is_empty();
                v.notes.extend(notes);
            }
            Err(CriteriaError::Transform(TransformError::Refused(msg))) => {
                v.notes.push(format!("sectional route unavailable: {msg}"));
            }
            Err(e) => return Err(e),
        }
    }
    v.classify(&opts.waivers, 0.0, true);
    if !agree && v.classification == Classification::PositiveNumeric {
        v.classification = Classification::Inconclusive;
    }
    Ok(v)
}

/// Runs the sectional route on every element; returns the sample count and
/// one note per disagreement beyond 3 combined standard errors.
fn sectional_compare(
    f: &Profile,
    body: &Body,
    battery: &[Test],
    direct: &[crate::transforms::PairingEstimate<f64>],
    seeds: &[u64],
    opts: &OmegaOptions,
) -> Result<(usize, Vec<String>), CriteriaError> {
    let mut base = PairingOptions::<f64>::new(opts.samples, opts.seed);
    base.allow_finite_difference = opts.allow_finite_difference;
    let table = OmegaTransform::for_battery(f, body, battery, &base)?;
    let mut notes = Vec::new();
    let mut count = 0;
    for (i, (phi, d)) in battery.iter().zip(direct).enumerate() {
        // an independent stream from the direct route
        let mut p = base;
        p.seed = derive_seed(seeds[i], u64::MAX);
        let s = pairing_sectional_with(&table, body, phi, &p)?;
        count += s.samples;
        let combined = d.result.error_estimate.hypot(s.result.error_estimate);
        let gap = (d.result.value - s.result.value).abs();
        if gap > SIGMA_MULTIPLIER * combined {
            notes.push(format!(
                "routes disagree on element {i}: direct {:e}, sectional {:e}, combined σ {:e}",
                d.result.value, s.result.value, combined
            ));
        }
    }
    Ok((count, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::NormBody;
    use crate::profiles::RadialProfile;
    use crate::transforms::TestFunction;

    #[test]
    fn admissible_profile_on_cube() {
        let f = RadialProfile::admissible_omega_profile(3, -1.5).unwrap();
        let body = NormBody::cube(3).unwrap();
        let battery = TestFunction::battery(3, 4, 11).unwrap();
        let v = verify_thm_omega(&f, &body, &battery, &OmegaOptions::new(20_000, 11)).unwrap();
        assert_eq!(v.classification, Classification::PositiveNumeric, "{v:?}");
        assert_eq!(v.seeds.len(), 4);
        let again = verify_thm_omega(&f, &body, &battery, &OmegaOptions::new(20_000, 11)).unwrap();
        assert_eq!(v.min_value.to_bits(), again.min_value.to_bits());
    }

    #[test]
    fn exponential_fails_monotonicity() {
        let f = RadialProfile::exp_power(1.0).unwrap();
        let body = NormBody::ball(3).unwrap();
        let battery = TestFunction::battery(3, 2, 1).unwrap();
        let v = verify_thm_omega(&f, &body, &battery, &OmegaOptions::new(1000, 1)).unwrap();
        assert_eq!(v.classification, Classification::HypothesesFailed);
        let h = v.hypotheses.iter().find(|h| h.name == "omega_over_t_nonincreasing").unwrap();
        assert_eq!(h.satisfied, Tri::False);
        assert_eq!(h.evidence.len(), 2);
        // t²e^{−t} increases on (0, 2)
        assert!(h.evidence[0].point < 2.0 && h.evidence[1].value > h.evidence[0].value);
    }

    #[test]
    fn sectional_agrees_on_ball() {
        let f = RadialProfile::admissible_omega_profile(3, -1.5).unwrap();
        let body = NormBody::ball(3).unwrap();
        let battery = TestFunction::battery(3, 2, 5).unwrap();
        let mut o = OmegaOptions::new(20_000, 5);
        o.sectional = true;
        let v = verify_thm_omega(&f, &body, &battery, &o).unwrap();
        assert_eq!(v.classification, Classification::PositiveNumeric, "{:?}", v.notes);
    }
}
