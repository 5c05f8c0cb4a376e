//! One-dimensional radial profiles `f: (0, ∞) → ℝ` with the analytic metadata
//! the positivity criteria quantify over.

mod checks;
mod grammar;

pub use checks::{
    check_omega_hypotheses, check_polya, check_thm2_integrability, layer_cake_width, log_grid,
    omega_of, Thm2Branch,
};
pub use grammar::parse_profile;
pub(crate) use checks::{integrate_half_line, is_plain_exponent};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grammar::ParseError;
use crate::numerics::{Decay, NumericsError};
use crate::report::Tri;
use crate::Real;

pub type ProfileFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("invalid profile parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("profile `{0}` has no analytic derivative and finite differences were not allowed")]
    DerivativeUnavailable(String),
    #[error("profile `{0}` is known to be increasing somewhere")]
    NotMonotone(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone)]
pub enum Derivative<T> {
    Analytic(ProfileFn<T>),
    /// Central difference with step `1e-5·max(r, 1)`.
    FiniteDifference,
}

/// Radial profile with metadata.
///
/// `|f(r)| ≤ bound_constant · r^singularity_exponent` for `0 < r ≤ 1`.
/// `smoothness` is the `k` for which the even extension `t ↦ f(|t|)` is `C^k`
/// on ℝ (`u32::MAX` for `C^∞`); `None` when not continuous or not known.
#[derive(Clone)]
pub struct RadialProfile<T> {
    eval: ProfileFn<T>,
    deriv: Derivative<T>,
    pub singularity_exponent: T,
    pub bound_constant: T,
    pub decay: Decay<T>,
    pub monotone_nonincreasing: Tri,
    pub nonnegative: Tri,
    pub smoothness: Option<u32>,
    pub absolutely_continuous: bool,
    /// Points in `(0, ∞)` where the profile or its derivative is not smooth.
    pub breakpoints: Vec<T>,
    pub label: String,
}

impl<T> fmt::Debug for RadialProfile<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("singularity_exponent", &self.singularity_exponent)
            .field("decay", &self.decay)
            .field("monotone_nonincreasing", &self.monotone_nonincreasing)
            .finish_non_exhaustive()
    }
}

pub const SMOOTH: u32 = u32::MAX;

fn invalid<T>(msg: String) -> Result<T, ProfileError> {
    Err(ProfileError::InvalidParameter(msg))
}

fn finite<T: Real>(x: T, what: &str) -> Result<T, ProfileError> {
    if x.is_finite() {
        Ok(x)
    } else {
        invalid(format!("{what} must be finite, got {x}"))
    }
}

impl<T: Real> RadialProfile<T> {
    /// A profile from a bare closure; all metadata starts out unknown and
    /// the derivative is by finite differences.
    pub fn from_fn(label: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            deriv: Derivative::FiniteDifference,
            singularity_exponent: T::zero(),
            bound_constant: T::infinity(),
            decay: Decay::Unknown,
            monotone_nonincreasing: Tri::Unknown,
            nonnegative: Tri::Unknown,
            smoothness: None,
            absolutely_continuous: false,
            breakpoints: Vec::new(),
            label: label.into(),
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.deriv = Derivative::Analytic(Arc::new(d));
        self
    }

    pub fn with_singularity(mut self, exponent: T, constant: T) -> Self {
        self.singularity_exponent = exponent;
        self.bound_constant = constant;
        self
    }

    pub fn with_decay(mut self, decay: Decay<T>) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_shape(mut self, monotone: Tri, nonnegative: Tri) -> Self {
        self.monotone_nonincreasing = monotone;
        self.nonnegative = nonnegative;
        self
    }

    pub fn with_regularity(mut self, smoothness: Option<u32>, absolutely_continuous: bool) -> Self {
        self.smoothness = smoothness;
        self.absolutely_continuous = absolutely_continuous;
        self
    }

    pub fn with_breakpoints(mut self, points: Vec<T>) -> Self {
        self.breakpoints = points;
        self
    }

    #[inline]
    pub fn eval(&self, r: T) -> T {
        (self.eval)(r)
    }

    /// `f′(r)`, analytic when available.
    pub fn deriv(&self, r: T) -> T {
        match &self.deriv {
            Derivative::Analytic(d) => d(r),
            Derivative::FiniteDifference => self.finite_difference(r),
        }
    }

    pub fn finite_difference(&self, r: T) -> T {
        self.central_difference(r, T::lit(1e-5) * r.max(T::one()))
    }

    /// `(f(r + h) − f(r − h)) / 2h`, with `h` clipped to `r/2`.
    pub fn central_difference(&self, r: T, h: T) -> T {
        let h = h.min(T::lit(0.5) * r);
        (self.eval(r + h) - self.eval(r - h)) / (h + h)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        matches!(self.deriv, Derivative::Analytic(_))
    }

    pub fn eval_fn(&self) -> ProfileFn<T> {
        self.eval.clone()
    }

    /// `r^α`.
    pub fn power(alpha: T) -> Result<Self, ProfileError> {
        let alpha = finite(alpha, "exponent")?;
        let smoothness = if alpha == T::zero() {
            Some(SMOOTH)
        } else if alpha > T::zero() {
            even_power_smoothness(alpha)
        } else {
            None
        };
        Ok(Self::from_fn(format!("power({alpha})"), move |r: T| r.powf(alpha))
            .with_derivative(move |r: T| if alpha == T::zero() { T::zero() } else { alpha * r.powf(alpha - T::one()) })
            .with_singularity(alpha, T::one())
            .with_decay(Decay::Polynomial { exponent: alpha })
            .with_shape(if alpha <= T::zero() { Tri::True } else { Tri::False }, Tri::True)
            .with_regularity(smoothness, true))
    }

    /// `e^{-r^p}`.
    pub fn exp_power(p: T) -> Result<Self, ProfileError> {
        if !(p > T::zero() && p.is_finite()) {
            return invalid(format!("exp_power exponent must be positive, got {p}"));
        }
        Ok(Self::from_fn(format!("exp_power({p})"), move |r: T| (-r.powf(p)).exp())
            .with_derivative(move |r: T| -p * r.powf(p - T::one()) * (-r.powf(p)).exp())
            .with_singularity(T::zero(), T::one())
            .with_decay(Decay::Exponential { rate: T::one(), power: p })
            .with_shape(Tri::True, Tri::True)
            .with_regularity(even_power_smoothness(p), true))
    }

    /// `r^{1-n} e^{-r^p}`.
    pub fn g_profile(n: usize, p: T) -> Result<Self, ProfileError> {
        if n == 0 {
            return invalid("g_profile dimension must be at least 1".into());
        }
        if !(p > T::zero() && p.is_finite()) {
            return invalid(format!("g_profile exponent must be positive, got {p}"));
        }
        let a = T::one() - T::from_usize_lossy(n);
        let smooth = if n == 1 { even_power_smoothness(p) } else { None };
        Ok(Self::from_fn(format!("g({n},{p})"), move |r: T| r.powf(a) * (-r.powf(p)).exp())
            .with_derivative(move |r: T| {
                r.powf(a) * (-r.powf(p)).exp() * (a / r - p * r.powf(p - T::one()))
            })
            .with_singularity(a, T::one())
            .with_decay(Decay::Exponential { rate: T::one(), power: p })
            .with_shape(Tri::True, Tri::True)
            .with_regularity(smooth, true))
    }

    /// `r^α·χ_{r ≤ a}`.
    pub fn truncated_power(alpha: T, a: T) -> Result<Self, ProfileError> {
        let alpha = finite(alpha, "exponent")?;
        if !(a > T::zero() && a.is_finite()) {
            return invalid(format!("truncation radius must be positive, got {a}"));
        }
        Ok(Self::from_fn(format!("truncated({alpha},{a})"), move |r: T| if r <= a { r.powf(alpha) } else { T::zero() })
            .with_derivative(move |r: T| {
                if r < a && alpha != T::zero() {
                    alpha * r.powf(alpha - T::one())
                } else {
                    T::zero()
                }
            })
            .with_singularity(alpha, T::one())
            .with_decay(Decay::CompactSupport { radius: a })
            .with_shape(Tri::from_bool(alpha <= T::zero()), Tri::True)
            .with_regularity(None, false)
            .with_breakpoints(vec![a]))
    }

    /// `r^α` on `(0, a]`, multiplied by a linear ramp from 1 to 0 on `[a, a + ε]`.
    pub fn smoothed_truncated_power(alpha: T, a: T, eps: T) -> Result<Self, ProfileError> {
        let alpha = finite(alpha, "exponent")?;
        if !(a > T::zero() && a.is_finite() && eps > T::zero() && eps.is_finite()) {
            return invalid(format!("need a > 0 and ε > 0, got a={a}, ε={eps}"));
        }
        let b = a + eps;
        Ok(Self::from_fn(format!("smoothed({alpha},{a},{eps})"), move |r: T| {
            if r <= a {
                r.powf(alpha)
            } else if r < b {
                r.powf(alpha) * (b - r) / eps
            } else {
                T::zero()
            }
        })
        .with_derivative(move |r: T| {
            let d = if alpha == T::zero() { T::zero() } else { alpha * r.powf(alpha - T::one()) };
            if r <= a {
                d
            } else if r < b {
                d * (b - r) / eps - r.powf(alpha) / eps
            } else {
                T::zero()
            }
        })
        .with_singularity(alpha, T::one())
        .with_decay(Decay::CompactSupport { radius: b })
        .with_shape(Tri::from_bool(alpha <= T::zero()), Tri::True)
        .with_regularity(if alpha >= T::zero() { Some(0) } else { None }, true)
        .with_breakpoints(vec![a, b]))
    }

    /// `r^α e^{-r}` with `α ∈ (1 − n, 2 − n)`.
    pub fn admissible_omega_profile(n: usize, alpha: T) -> Result<Self, ProfileError> {
        let nn = T::from_usize_lossy(n);
        if n == 0 || !(alpha > T::one() - nn && alpha < T::lit(2.0) - nn) {
            return invalid(format!("admissible profile needs α in ({}, {}), got {alpha}", 1 - n as i64, 2 - n as i64));
        }
        Ok(Self::from_fn(format!("admissible({n},{alpha})"), move |r: T| r.powf(alpha) * (-r).exp())
            .with_derivative(move |r: T| r.powf(alpha - T::one()) * (-r).exp() * (alpha - r))
            .with_singularity(alpha, T::one())
            .with_decay(Decay::Exponential { rate: T::one(), power: T::one() })
            .with_shape(Tri::from_bool(alpha <= T::zero()), Tri::True)
            .with_regularity(None, true))
    }

    /// `c·f`.
    pub fn scale(c: T, f: &Self) -> Result<Self, ProfileError> {
        let c = finite(c, "scale factor")?;
        let (e, d) = (f.eval.clone(), f.deriv_fn());
        let mut out = f.clone();
        out.eval = Arc::new(move |r| c * e(r));
        out.deriv = match d {
            Some(d) => Derivative::Analytic(Arc::new(move |r| c * d(r))),
            None => Derivative::FiniteDifference,
        };
        out.bound_constant = c.abs() * f.bound_constant;
        if c == T::zero() {
            out.decay = Decay::CompactSupport { radius: T::zero() };
            out.monotone_nonincreasing = Tri::True;
            out.nonnegative = Tri::True;
            out.smoothness = Some(SMOOTH);
        } else if c < T::zero() {
            out.monotone_nonincreasing = flip(f.monotone_nonincreasing);
            out.nonnegative = flip(f.nonnegative);
        }
        out.label = format!("scale({c},{})", f.label);
        Ok(out)
    }

    /// `f + g`.
    pub fn sum(f: &Self, g: &Self) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let deriv = match (f.deriv_fn(), g.deriv_fn()) {
            (Some(a), Some(b)) => Derivative::Analytic(Arc::new(move |r| a(r) + b(r))),
            _ => Derivative::FiniteDifference,
        };
        Self {
            eval: Arc::new(move |r| fe(r) + ge(r)),
            deriv,
            singularity_exponent: f.singularity_exponent.min(g.singularity_exponent),
            bound_constant: f.bound_constant + g.bound_constant,
            decay: sum_decay(f.decay, g.decay),
            monotone_nonincreasing: both(f.monotone_nonincreasing, g.monotone_nonincreasing),
            nonnegative: both(f.nonnegative, g.nonnegative),
            smoothness: f.smoothness.zip(g.smoothness).map(|(a, b)| a.min(b)),
            absolutely_continuous: f.absolutely_continuous && g.absolutely_continuous,
            breakpoints: merged(&f.breakpoints, &g.breakpoints),
            label: format!("sum({},{})", f.label, g.label),
        }
    }

    /// `f·g`.
    pub fn product(f: &Self, g: &Self) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let deriv = match (f.deriv_fn(), g.deriv_fn()) {
            (Some(fd), Some(gd)) => {
                let (fe, ge) = (fe.clone(), ge.clone());
                Derivative::Analytic(Arc::new(move |r| {
                    let (a, b) = (fe(r), ge(r));
                    // avoid 0·∞ where one factor vanishes identically
                    let left = if b == T::zero() { T::zero() } else { fd(r) * b };
                    let right = if a == T::zero() { T::zero() } else { a * gd(r) };
                    left + right
                }))
            }
            _ => Derivative::FiniteDifference,
        };
        let nonneg = both(f.nonnegative, g.nonnegative);
        let monotone = if nonneg.is_true() { both(f.monotone_nonincreasing, g.monotone_nonincreasing) } else { Tri::Unknown };
        let monotone = if monotone == Tri::False { Tri::Unknown } else { monotone };
        Self {
            eval: Arc::new(move |r| {
                let a = fe(r);
                if a == T::zero() {
                    T::zero()
                } else {
                    a * ge(r)
                }
            }),
            deriv,
            singularity_exponent: f.singularity_exponent + g.singularity_exponent,
            bound_constant: f.bound_constant * g.bound_constant,
            decay: product_decay(f.decay, g.decay),
            monotone_nonincreasing: monotone,
            nonnegative: nonneg,
            smoothness: f.smoothness.zip(g.smoothness).map(|(a, b)| a.min(b)),
            absolutely_continuous: f.absolutely_continuous && g.absolutely_continuous,
            breakpoints: merged(&f.breakpoints, &g.breakpoints),
            label: format!("product({},{})", f.label, g.label),
        }
    }

    /// `Σ w_i f_i` with non-negative weights.
    pub fn mixture(parts: &[(T, Self)]) -> Result<Self, ProfileError> {
        let Some(((w0, f0), rest)) = parts.split_first() else {
            return invalid("mixture needs at least one component".into());
        };
        for (w, _) in parts {
            if !(*w >= T::zero() && w.is_finite()) {
                return invalid(format!("mixture weight must be non-negative, got {w}"));
            }
        }
        let mut acc = Self::scale(*w0, f0)?;
        for (w, f) in rest {
            acc = Self::sum(&acc, &Self::scale(*w, f)?);
        }
        acc.label = format!(
            "mixture({})",
            parts.iter().map(|(w, f)| format!("{w},{}", f.label)).collect::<Vec<_>>().join(",")
        );
        Ok(acc)
    }

    fn deriv_fn(&self) -> Option<ProfileFn<T>> {
        match &self.deriv {
            Derivative::Analytic(d) => Some(d.clone()),
            Derivative::FiniteDifference => None,
        }
    }

    /// Bound `C` in `|f(r)| ≤ C r^γ` measured on a log grid over `(0, 1]`.
    pub(crate) fn measured_bound(&self, exponent: T) -> T {
        let mut c = T::zero();
        for i in 0..=200 {
            let r = T::lit(10f64.powf(-8.0 + 8.0 * i as f64 / 200.0));
            let v = (self.eval(r) / r.powf(exponent)).abs();
            if v.is_finite() {
                c = c.max(v);
            }
        }
        c * T::lit(1.01)
    }
}

fn flip(t: Tri) -> Tri {
    match t {
        Tri::True => Tri::Unknown,
        other => other,
    }
}

fn both(a: Tri, b: Tri) -> Tri {
    if a.is_true() && b.is_true() {
        Tri::True
    } else {
        Tri::Unknown
    }
}

/// Smoothness of `t ↦ |t|^p` (times a smooth factor) on ℝ.
fn even_power_smoothness<T: Real>(p: T) -> Option<u32> {
    let k = p.floor();
    if p == k {
        let k = k.to_u32().unwrap_or(u32::MAX);
        if k % 2 == 0 {
            Some(SMOOTH)
        } else {
            Some(k - 1)
        }
    } else {
        Some(k.to_u32().unwrap_or(u32::MAX))
    }
}

fn merged<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut v: Vec<T> = a.iter().chain(b).copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    v.dedup();
    v
}

fn sum_decay<T: Real>(a: Decay<T>, b: Decay<T>) -> Decay<T> {
    use Decay::*;
    match (a, b) {
        (Unknown, _) | (_, Unknown) => Unknown,
        (CompactSupport { radius: x }, CompactSupport { radius: y }) => CompactSupport { radius: x.max(y) },
        (CompactSupport { .. }, other) | (other, CompactSupport { .. }) => other,
        (Polynomial { exponent: x }, Polynomial { exponent: y }) => Polynomial { exponent: x.max(y) },
        (p @ Polynomial { .. }, _) | (_, p @ Polynomial { .. }) => p,
        (Exponential { rate: r1, power: p1 }, Exponential { rate: r2, power: p2 }) => {
            if p1 < p2 || (p1 == p2 && r1 < r2) {
                Exponential { rate: r1, power: p1 }
            } else {
                Exponential { rate: r2, power: p2 }
            }
        }
    }
}

fn product_decay<T: Real>(a: Decay<T>, b: Decay<T>) -> Decay<T> {
    use Decay::*;
    match (a, b) {
        (CompactSupport { radius: x }, CompactSupport { radius: y }) => CompactSupport { radius: x.min(y) },
        (c @ CompactSupport { .. }, _) | (_, c @ CompactSupport { .. }) => c,
        (Unknown, _) | (_, Unknown) => Unknown,
        (Polynomial { exponent: x }, Polynomial { exponent: y }) => Polynomial { exponent: x + y },
        (e @ Exponential { .. }, Polynomial { .. }) | (Polynomial { .. }, e @ Exponential { .. }) => e,
        (Exponential { rate: r1, power: p1 }, Exponential { rate: r2, power: p2 }) => {
            if p1 == p2 {
                Exponential { rate: r1 + r2, power: p1 }
            } else if p1 > p2 {
                Exponential { rate: r1, power: p1 }
            } else {
                Exponential { rate: r2, power: p2 }
            }
        }
    }
}
