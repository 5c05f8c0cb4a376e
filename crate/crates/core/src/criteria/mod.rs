//! Verdict engines for the positive-definiteness criteria.
//!
//! Every engine returns a [`Verdict`]: a classification, the hypothesis
//! reports it rests on, the minimum observed value with a witness, and the
//! tolerance, seeds and budget needed to reproduce it. Engines run in `f64`.

mod convex;
mod decreasing;
mod gram;
mod lemma1;
mod omega;
mod polya;

use serde::Serialize;
use thiserror::Error;

use crate::bodies::BodyError;
use crate::numerics::NumericsError;
use crate::profiles::ProfileError;
use crate::transforms::TransformError;
use crate::{HypothesisReport, Tri};

pub use convex::{verify_thm_convex, ConvexOptions, PsiKind};
pub use decreasing::{default_grid, verify_thm_decreasing};
pub use gram::{gram_test, norm_p, sweep_schoenberg, GramSpec, SweepRow, MAX_GRAM_POINTS};
pub use lemma1::{lemma1_closed_form, lemma1_pairing, Lemma1Branch};
pub use omega::{verify_thm_omega, OmegaOptions};
pub use polya::polya_verdict;

/// Default relative tolerance for quadrature-backed verdicts.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Monte Carlo verdicts allow this many standard errors.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("refused: {0}")]
    Refused(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    PositiveNumeric,
    ViolationFound,
    HypothesesFailed,
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::PositiveNumeric => "POSITIVE_NUMERIC",
            Classification::ViolationFound => "VIOLATION_FOUND",
            Classification::HypothesesFailed => "HYPOTHESES_FAILED",
            Classification::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where the minimum was attained: a frequency, a point, or a battery element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Budget {
    /// Integrand or matrix-entry evaluations.
    pub evaluations: usize,
    /// Monte Carlo samples drawn.
    pub samples: usize,
    /// Grid points, battery elements or Gram points examined.
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub criterion: String,
    pub classification: Classification,
    pub min_value: f64,
    pub witness: Option<Witness>,
    /// Relative tolerance as requested.
    pub tolerance: f64,
    /// Scale the tolerance is relative to.
    pub scale: f64,
    /// Absolute threshold: `min_value < −threshold` is a violation.
    pub threshold: f64,
    pub hypotheses: Vec<HypothesisReport>,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    pub notes: Vec<String>,
}

impl Verdict {
    pub(crate) fn new(criterion: impl Into<String>, tolerance: f64) -> Self {
        Self {
            criterion: criterion.into(),
            classification: Classification::Inconclusive,
            min_value: f64::NAN,
            witness: None,
            tolerance,
            scale: f64::NAN,
            threshold: f64::NAN,
            hypotheses: Vec::new(),
            seeds: Vec::new(),
            budget: Budget::default(),
            notes: Vec::new(),
        }
    }

    /// Conjunction of the hypothesis reports, skipping waived names.
    pub fn hypotheses_status(&self, waived: &[String]) -> Tri {
        self.hypotheses
            .iter()
            .filter(|h| !waived.iter().any(|w| w == &h.name))
            .fold(Tri::True, |acc, h| acc.and(h.satisfied))
    }

    /// Sets the classification from the hypotheses and `min_value` vs `threshold`.
    ///
    /// `noise` is an error bar on `min_value`: a minimum below the threshold
    /// by less than the noise is inconclusive rather than a violation.
    pub(crate) fn classify(&mut self, waived: &[String], noise: f64, numerics_ok: bool) {
        for h in &self.hypotheses {
            if h.satisfied != Tri::True && waived.iter().any(|w| w == &h.name) {
                self.notes.push(format!("hypothesis `{}` waived (status {:?})", h.name, h.satisfied));
            }
        }
        let status = self.hypotheses_status(waived);
        self.classification = if status == Tri::False {
            Classification::HypothesesFailed
        } else if !self.min_value.is_finite() {
            Classification::Inconclusive
        } else if self.min_value < -self.threshold {
            if self.min_value + noise < -self.threshold {
                Classification::ViolationFound
            } else {
                Classification::Inconclusive
            }
        } else if status == Tri::Unknown || !numerics_ok {
            Classification::Inconclusive
        } else {
            Classification::PositiveNumeric
        };
    }
}

/// Scan points for shape checks: 401 log-spaced points up to the support
/// (or 10⁴), plus both sides of every breakpoint.
pub(crate) fn shape_grid(f: &crate::Profile) -> Vec<f64> {
    let upper = f.decay.support().unwrap_or(1e4).min(1e4);
    let mut g = crate::profiles::log_grid(1e-4f64.min(upper * 0.5), upper, 401);
    for &b in &f.breakpoints {
        for p in [b * (1.0 - 1e-6), b * (1.0 + 1e-6)] {
            if p > 0.0 && p < upper {
                g.push(p);
            }
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    g.dedup();
    g
}

/// `g` non-increasing along `grid`, up to relative noise `1e-9`.
pub(crate) fn nonincreasing_scan(name: &str, g: impl Fn(f64) -> f64, grid: &[f64]) -> HypothesisReport {
    let v: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    let mut worst = (f64::NEG_INFINITY, 0usize);
    for i in 0..v.len().saturating_sub(1) {
        let rise = v[i + 1] - v[i];
        let rel = rise / v[i].abs().max(v[i + 1].abs()).max(f64::MIN_POSITIVE);
        if rel > worst.0 || rel.is_nan() {
            worst = (rel, i);
        }
    }
    let i = worst.1;
    if worst.0 > 1e-9 || worst.0.is_nan() {
        HypothesisReport::new(name, Tri::False, -worst.0)
            .with_evidence(grid[i], v[i])
            .with_evidence(grid[i + 1], v[i + 1])
    } else {
        HypothesisReport::new(name, Tri::True, -worst.0)
    }
}

/// `g ≥ 0` along `grid`.
pub(crate) fn nonnegative_scan(name: &str, g: impl Fn(f64) -> f64, grid: &[f64]) -> HypothesisReport {
    let (arg, low) = grid.iter().map(|&x| (x, g(x))).fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if low < 0.0 || low.is_nan() {
        HypothesisReport::new(name, Tri::False, low).with_evidence(arg, low)
    } else {
        HypothesisReport::new(name, Tri::True, low)
    }
}
