use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::{nonincreasing_scan, shape_grid, CriteriaError, Verdict};
use crate::numerics::Decay;
use crate::profiles::integrate_half_line;
use crate::transforms::{ft_even_1d, TransformError};
use crate::{HypothesisReport, Profile, Tri};

/// `(4/a)(1 − cos(ab))`: the pairing of `χ_{[−a,a]}^` with `|x|χ_{[−b,b]}`.
pub fn lemma1_closed_form(a: f64, b: f64) -> Result<f64, CriteriaError> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(CriteriaError::InvalidArgument(format!("need a, b > 0, got a={a}, b={b}")));
    }
    // 1 − cos x = 2 sin²(x/2) keeps accuracy for small ab
    let s = (0.5 * a * b).sin();
    Ok(8.0 * s * s / a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma1Branch {
    /// `φ, ψ ∈ L^p` for some `p ∈ [1, 2]`.
    One,
    /// `φ` bounded with compact support, `ψ(x)·min{1, |x|⁻¹}` integrable.
    Two,
    /// `φ ∈ L¹ ∩ C³`, `ψ` locally integrable.
    Three,
}

impl TryFrom<u32> for Lemma1Branch {
    type Error = CriteriaError;
    fn try_from(b: u32) -> Result<Self, CriteriaError> {
        match b {
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            3 => Ok(Self::Three),
            _ => Err(CriteriaError::InvalidArgument(format!("branch must be 1, 2 or 3, got {b}"))),
        }
    }
}

/// Interval of `p ∈ [1, 2]` with `f ∈ L^p(ℝ)`, from the metadata; `None` when
/// the tail is unknown.
fn lp_window(f: &Profile) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    let g = f.singularity_exponent;
    if g < 0.0 {
        hi = hi.min(-1.0 / g - 1e-12);
    }
    match f.decay {
        Decay::Unknown => return None,
        Decay::Polynomial { exponent } => {
            if exponent >= 0.0 {
                return Some((2.0, 1.0));
            }
            lo = lo.max(-1.0 / exponent + 1e-12);
        }
        _ => {}
    }
    Some((lo, hi))
}

fn confirm(name: &str, g: impl Fn(f64) -> f64, exponent: f64, f: &Profile, margin: f64) -> HypothesisReport {
    match integrate_half_line(g, exponent, &f.decay, &f.breakpoints, 1e-8) {
        Ok(q) if q.converged && q.value.is_finite() => HypothesisReport::new(name, Tri::True, margin),
        Ok(q) => HypothesisReport::new(name, Tri::Unknown, margin).with_evidence(0.0, q.value),
        Err(_) => HypothesisReport::new(name, Tri::Unknown, margin),
    }
}

fn branch_report(phi: &Profile, psi: &Profile, branch: Lemma1Branch) -> HypothesisReport {
    match branch {
        Lemma1Branch::One => {
            let name = "branch_1_common_lp";
            let (Some(a), Some(b)) = (lp_window(phi), lp_window(psi)) else {
                return HypothesisReport::new(name, Tri::Unknown, 0.0);
            };
            let (lo, hi) = (a.0.max(b.0), a.1.min(b.1));
            if lo > hi {
                return HypothesisReport::new(name, Tri::False, hi - lo).with_evidence(lo, hi);
            }
            let p = 0.5 * (lo + hi);
            let r1 = confirm(name, |t| phi.eval(t).abs().powf(p), phi.singularity_exponent * p, phi, hi - lo);
            let r2 = confirm(name, |t| psi.eval(t).abs().powf(p), psi.singularity_exponent * p, psi, hi - lo);
            HypothesisReport::new(name, r1.satisfied.and(r2.satisfied), hi - lo).with_evidence(p, 0.0)
        }
        Lemma1Branch::Two => {
            let name = "branch_2_compact_phi";
            let bounded = phi.singularity_exponent >= 0.0;
            let compact = phi.decay.support().is_some();
            if !bounded || !compact {
                return HypothesisReport::new(name, Tri::False, phi.singularity_exponent.min(0.0) - f64::from(!compact));
            }
            let head = psi.singularity_exponent + 1.0;
            let tail = match psi.decay {
                Decay::Unknown => return HypothesisReport::new(name, Tri::Unknown, head),
                Decay::Polynomial { exponent } => -exponent,
                _ => f64::INFINITY,
            };
            let margin = head.min(tail);
            if margin <= 0.0 {
                return HypothesisReport::new(name, Tri::False, margin);
            }
            let g = |t: f64| psi.eval(t).abs() * if t < 1.0 { 1.0 } else { 1.0 / t };
            confirm(name, g, psi.singularity_exponent, psi, margin)
        }
        Lemma1Branch::Three => {
            let name = "branch_3_smooth_phi";
            let smooth = phi.smoothness.is_some_and(|k| k >= 3);
            let integrable = phi.singularity_exponent > -1.0
                && match phi.decay {
                    Decay::Polynomial { exponent } => exponent < -1.0,
                    Decay::Unknown => false,
                    _ => true,
                };
            let local = psi.singularity_exponent > -1.0;
            if !smooth || !local || (!integrable && phi.decay != Decay::Unknown) {
                return HypothesisReport::new(name, Tri::False, (psi.singularity_exponent + 1.0).min(-1.0 + f64::from(smooth)));
            }
            if phi.decay == Decay::Unknown || psi.decay == Decay::Unknown {
                return HypothesisReport::new(name, Tri::Unknown, 0.0);
            }
            let margin = psi.singularity_exponent + 1.0;
            let r = confirm(name, |t| phi.eval(t).abs(), phi.singularity_exponent, phi, margin);
            let upper = psi.decay.support().unwrap_or(1.0).min(1.0);
            let local_psi = crate::numerics::integrate_adaptive_with(
                |t: f64| psi.eval(t).abs(),
                0.0,
                upper,
                &crate::numerics::AdaptiveOptions::new(1e-8).singular_left(psi.singularity_exponent.min(0.0)),
            );
            let s = if local_psi.is_ok_and(|q| q.converged) { Tri::True } else { Tri::Unknown };
            HypothesisReport::new(name, r.satisfied.and(s), margin)
        }
    }
}

/// `∫ φ̂ ψ = 2∫_0^∞ φ̂(x)ψ(x)dx` for even `φ, ψ` after checking the requested branch.
pub fn lemma1_pairing(phi: &Profile, psi: &Profile, branch: Lemma1Branch, tol: f64) -> Result<Verdict, CriteriaError> {
    let mut v = Verdict::new("lemma1", tol);
    let phi_grid = shape_grid(phi);
    let psi_grid = shape_grid(psi);
    v.hypotheses.push(nonincreasing_scan("phi_nonincreasing", |t| phi.eval(t), &phi_grid));
    v.hypotheses.push(nonincreasing_scan("psi_over_x_nonincreasing", |t| psi.eval(t) / t, &psi_grid));
    v.hypotheses.push(branch_report(phi, psi, branch));
    if v.hypotheses_status(&[]) == Tri::False {
        v.classify(&[], 0.0, true);
        return Ok(v);
    }
    let failure: RefCell<Option<TransformError>> = RefCell::new(None);
    let evaluations = RefCell::new(0usize);
    let transform = |x: f64| match ft_even_1d(phi, x, 1e-12) {
        Ok(q) => {
            *evaluations.borrow_mut() += q.evaluations;
            q.value
        }
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let outer_tol = (tol * 1e-3).clamp(1e-12, 1e-8);
    let signed = integrate_half_line(
        |x| {
            let p = psi.eval(x);
            if p == 0.0 {
                0.0
            } else {
                transform(x) * p
            }
        },
        psi.singularity_exponent,
        &psi.decay,
        &psi.breakpoints,
        outer_tol,
    );
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e.into());
    }
    let signed = signed?;
    let abs = integrate_half_line(
        |x| {
            let p = psi.eval(x);
            if p == 0.0 {
                0.0
            } else {
                (transform(x) * p).abs()
            }
        },
        psi.singularity_exponent,
        &psi.decay,
        &psi.breakpoints,
        outer_tol,
    )?;
    v.min_value = 2.0 * signed.value;
    v.scale = 2.0 * abs.value;
    v.threshold = tol * v.scale;
    v.budget.evaluations = *evaluations.borrow() + signed.evaluations + abs.evaluations;
    v.budget.points = signed.evaluations;
    if !signed.converged {
        v.notes.push(format!("outer quadrature not converged (error estimate {:e})", signed.error_estimate));
    }
    v.notes.push(format!("error estimate {:e}", 2.0 * signed.error_estimate));
    if v.min_value < -v.threshold {
        v.witness = Some(super::Witness { label: "pairing".into(), point: vec![], value: v.min_value });
    }
    v.classify(&[], 2.0 * signed.error_estimate, signed.converged);
    if v.hypotheses_status(&[]) == Tri::Unknown {
        // an undecided integrability check does not license the identity
        v.notes.push(format!("hypotheses undecided; computed value {:e} is informational", v.min_value));
        v.classification = super::Classification::HypothesesFailed;
    }
    Ok(v)
}
