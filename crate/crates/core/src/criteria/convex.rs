use serde::{Deserialize, Serialize};

use super::{CriteriaError, Verdict, Witness, SIGMA_MULTIPLIER};
use crate::numerics::{integrate_adaptive_with, AdaptiveOptions, ChebyshevTable, NumericsError, SphereConstant};
use crate::profiles::is_plain_exponent;
use crate::transforms::{ball_indicator_ft, random_direction, stratified, TransformError};
use crate::{Body, HypothesisReport, Tri};

/// The radially decreasing factor `ψ` whose transform enters the integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PsiKind {
    /// Indicator of the centred ball of this radius.
    Ball { radius: f64 },
    /// `e^{−|x|²/(2σ²)}`.
    Gaussian { sigma: f64 },
}

impl PsiKind {
    fn transform(self, n: usize, r: f64) -> Result<f64, TransformError> {
        match self {
            PsiKind::Ball { radius } => ball_indicator_ft(n, radius, r),
            PsiKind::Gaussian { sigma } => {
                let nn = n as f64;
                Ok((2.0 * std::f64::consts::PI).powf(0.5 * nn) * sigma.powi(n as i32) * (-0.5 * sigma * sigma * r * r).exp())
            }
        }
    }

    fn length_scale(self) -> f64 {
        match self {
            PsiKind::Ball { radius } => radius,
            PsiKind::Gaussian { sigma } => sigma,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvexOptions {
    /// Random directions.
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl ConvexOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, tol: super::DEFAULT_TOL }
    }
}

/// `∫ |x|^α χ_K(x) ψ̂(x) dx` in polar coordinates.
///
/// With `e = n − 1 + α`, the inner radial integral up to `ρ = ρ_K(v)` equals
/// `ρ^{e+1} H(ρ)` where `H(ρ) = ∫_0^1 u^e ψ̂(ρu) du` is smooth and tabulated
/// once; the directions are Monte Carlo.
pub fn verify_thm_convex(body: &Body, psi: PsiKind, alpha: f64, opts: &ConvexOptions) -> Result<Verdict, CriteriaError> {
    let n = body.dim;
    let nn = n as f64;
    if !(alpha > -nn && alpha <= 2.0 - nn) {
        return Err(CriteriaError::Refused(format!("α must lie in (−{n}, {}], got {alpha}", 2 - n as i64)));
    }
    let scale = psi.length_scale();
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CriteriaError::InvalidArgument(format!("ψ needs a positive finite scale, got {scale}")));
    }
    let mut v = Verdict::new("thm-convex", opts.tol);
    v.hypotheses.push(HypothesisReport::new("phi_convex_level_sets", Tri::from_bool(body.is_convex()), 0.0));
    v.hypotheses.push(HypothesisReport::new("psi_radially_decreasing", Tri::True, 0.0));
    if v.hypotheses_status(&[]) == Tri::False {
        v.classify(&[], 0.0, true);
        return Ok(v);
    }

    let e = nn - 1.0 + alpha;
    let mut quad = AdaptiveOptions::new(1e-13).with_abs_tol(1e-15);
    if !is_plain_exponent(e) {
        quad = quad.singular_left(e);
    }
    let h = |rho: f64, absolute: bool| -> Result<f64, TransformError> {
        let mut failure = None;
        let q = integrate_adaptive_with(
            |u: f64| {
                let w = if e == 0.0 { 1.0 } else { u.powf(e) };
                match psi.transform(n, rho * u) {
                    Ok(y) if absolute => w * y.abs(),
                    Ok(y) => w * y,
                    Err(err) => {
                        failure.get_or_insert(err);
                        f64::NAN
                    }
                }
            },
            0.0,
            1.0,
            &quad,
        );
        if let Some(err) = failure {
            return Err(err);
        }
        Ok(q?.value)
    };
    let width = 0.25 / scale.max(1.0);
    let upper = body.bounding_radius * (1.0 + 1e-9);
    let signed = ChebyshevTable::build(|r| h(r, false), upper, width, 16)?;
    let absolute = ChebyshevTable::build(|r| h(r, true), upper, width, 16)?;
    let surface = SphereConstant::<f64>::new(n).surface;

    let acc = stratified::<TransformError, _>(opts.samples, 64, opts.seed, |rng| {
        let u = random_direction::<f64>(n, rng);
        let rho = body.radial(&u).map_err(TransformError::from)?;
        let lead = surface * rho.powf(e + 1.0);
        let value = match signed.eval(rho) {
            Some(y) => y,
            None => h(rho, false)?,
        };
        let abs = match absolute.eval(rho) {
            Some(y) => y,
            None => h(rho, true)?,
        };
        Ok((lead * value, lead * abs))
    })
    .map_err(|err| match err {
        TransformError::Numerics(NumericsError::InvalidArgument(m)) => CriteriaError::InvalidArgument(m),
        other => other.into(),
    })?;
    let (mean, sigma, abs) = acc.summary();
    v.min_value = mean;
    v.scale = abs;
    v.threshold = (SIGMA_MULTIPLIER * sigma).max(opts.tol * abs);
    v.seeds = vec![opts.seed];
    v.budget.samples = acc.count;
    v.budget.points = acc.count;
    v.notes.push(format!("standard error {sigma:e}, abs integral {abs:e}"));
    v.witness = Some(Witness { label: "integral".into(), point: vec![alpha], value: mean });
    v.classify(&[], 0.0, true);
    Ok(v)
}
