use super::{Derivative, ProfileError, RadialProfile};
use crate::numerics::{
    integrate_adaptive_with, integrate_semi_infinite, AdaptiveOptions, Decay, NumericsError, QuadratureResult,
};
use crate::report::{HypothesisReport, Tri};
use crate::Real;

const SCAN_POINTS: usize = 401;
const SCAN_LOW: f64 = 1e-4;
const SCAN_HIGH: f64 = 1e4;
const CHECK_TOL: f64 = 1e-8;

/// `n` log-spaced points on `[a, b]`, endpoints included.
pub fn log_grid<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    assert!(a > T::zero() && b >= a && n >= 1);
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    let last = T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                (la + (lb - la) * T::from_usize_lossy(i) / last).exp()
            }
        })
        .collect()
}

/// Scan grid over `[1e-4, min(1e4, upper)]` refined on both sides of every breakpoint.
fn scan_grid<T: Real>(f: &RadialProfile<T>, upper: Option<T>) -> Vec<T> {
    let hi = upper.map_or(T::lit(SCAN_HIGH), |u| u.min(T::lit(SCAN_HIGH)));
    let lo = T::lit(SCAN_LOW).min(hi * T::lit(0.5));
    let mut g = log_grid(lo, hi, SCAN_POINTS);
    for &b in &f.breakpoints {
        for s in [T::lit(1.0 - 1e-6), T::lit(1.0 + 1e-6)] {
            let p = b * s;
            if p > lo && p < hi {
                g.push(p);
            }
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    g.dedup();
    g
}

pub(crate) fn is_plain_exponent<T: Real>(e: T) -> bool {
    e >= T::zero() && e == e.round()
}

/// `∫_0^∞ g` for a function behaving like `r^exponent` at the origin, split
/// at `breakpoints` and ending at the support radius when compact.
pub(crate) fn integrate_half_line<T: Real>(
    g: impl Fn(T) -> T,
    exponent: T,
    decay: &Decay<T>,
    breakpoints: &[T],
    tol: T,
) -> Result<QuadratureResult<T>, NumericsError> {
    let mut opts = AdaptiveOptions::new(tol);
    if !is_plain_exponent(exponent) {
        opts = opts.singular_left(exponent);
    }
    let mut cuts = vec![T::zero()];
    let end = decay.support();
    cuts.extend(breakpoints.iter().copied().filter(|&b| b > T::zero() && end.map_or(true, |e| b < e)));
    let mut total = QuadratureResult::exact(T::zero());
    for (i, w) in cuts.windows(2).enumerate() {
        let o = if i == 0 { opts } else { AdaptiveOptions::new(opts.rel_tol) };
        total = total.combine(integrate_adaptive_with(&g, w[0], w[1], &o)?);
    }
    let start = *cuts.last().expect("non-empty");
    let first = cuts.len() == 1;
    let o = if first { opts } else { AdaptiveOptions::new(opts.rel_tol) };
    let tail = match end {
        Some(e) => integrate_adaptive_with(&g, start, e, &o)?,
        None => integrate_semi_infinite(&g, start, T::one(), &o)?,
    };
    Ok(total.combine(tail))
}

/// `ω(t) = −tⁿ f′(t)`.
///
/// Without an analytic derivative `allow_finite_difference` must be set.
pub fn omega_of<T: Real>(
    f: &RadialProfile<T>,
    n: usize,
    allow_finite_difference: bool,
) -> Result<RadialProfile<T>, ProfileError> {
    if n == 0 {
        return Err(ProfileError::InvalidParameter("dimension must be at least 1".into()));
    }
    if !f.has_analytic_derivative() && !allow_finite_difference {
        return Err(ProfileError::DerivativeUnavailable(f.label.clone()));
    }
    if f.monotone_nonincreasing == Tri::False {
        return Err(ProfileError::NotMonotone(f.label.clone()));
    }
    let nn = T::from_usize_lossy(n);
    let ni = n as i32;
    let src = f.clone();
    let omega = move |t: T| {
        let d = src.deriv(t);
        if d == T::zero() {
            T::zero()
        } else {
            -t.powi(ni) * d
        }
    };
    let decay = match f.decay {
        Decay::Polynomial { exponent } => Decay::Polynomial { exponent: exponent + nn - T::one() },
        other => other,
    };
    let exponent = nn + f.singularity_exponent - T::one();
    let mut out = RadialProfile::from_fn(format!("omega({n},{})", f.label), omega)
        .with_decay(decay)
        .with_shape(Tri::Unknown, f.monotone_nonincreasing)
        .with_breakpoints(f.breakpoints.clone());
    out.deriv = Derivative::FiniteDifference;
    let c = out.measured_bound(exponent);
    Ok(out.with_singularity(exponent, c))
}

/// The three hypotheses on `ω = −tⁿ f′`: bounded, integrable, and `ω(t)/t` non-increasing.
pub fn check_omega_hypotheses<T: Real>(f: &RadialProfile<T>, n: usize) -> Vec<HypothesisReport> {
    let nn = T::from_usize_lossy(n.max(1));
    let ni = n as i32;
    let gamma = nn + f.singularity_exponent - T::one();
    let omega = |t: T| {
        let d = f.deriv(t);
        if d == T::zero() {
            T::zero()
        } else {
            -t.powi(ni) * d
        }
    };
    let tail_exponent = match f.decay {
        Decay::Polynomial { exponent } => Some(Some(exponent + nn - T::one())),
        Decay::Unknown => None,
        _ => Some(None),
    };
    let grid = scan_grid(f, f.decay.support());
    let lo = grid[0];
    let hi = *grid.last().expect("non-empty grid");

    // (a) boundedness
    let bounded = {
        let (mut arg, mut sup) = (lo, T::zero());
        for &t in &grid {
            let v = omega(t).abs();
            if v > sup || !v.is_finite() {
                arg = t;
                sup = v;
            }
        }
        let origin = gamma >= T::zero();
        let name = "omega_bounded";
        if !origin || !sup.is_finite() {
            HypothesisReport::new(name, Tri::False, gamma.to64())
                .with_evidence(lo.to64(), omega(lo).to64())
                .with_evidence((lo * T::lit(10.0)).to64(), omega(lo * T::lit(10.0)).to64())
        } else {
            match tail_exponent {
                None => HypothesisReport::new(name, Tri::Unknown, gamma.to64()).with_evidence(arg.to64(), sup.to64()),
                Some(Some(e)) if e > T::zero() => HypothesisReport::new(name, Tri::False, (-e).to64())
                    .with_evidence(hi.to64(), omega(hi).to64()),
                Some(_) => HypothesisReport::new(name, Tri::True, gamma.to64()).with_evidence(arg.to64(), sup.to64()),
            }
        }
    };

    // (b) integrability
    let integrable = {
        let name = "omega_integrable";
        let head = gamma + T::one();
        if head <= T::zero() {
            HypothesisReport::new(name, Tri::False, head.to64()).with_evidence(lo.to64(), (lo * omega(lo)).to64())
        } else {
            match tail_exponent {
                None => HypothesisReport::new(name, Tri::Unknown, head.to64()),
                Some(Some(e)) if e >= -T::one() => {
                    HypothesisReport::new(name, Tri::False, (-(e + T::one())).to64())
                        .with_evidence(hi.to64(), (hi * omega(hi)).to64())
                }
                Some(e) => {
                    let margin = e.map_or(head, |e| head.min(-(e + T::one())));
                    match integrate_half_line(omega, gamma, &f.decay, &f.breakpoints, T::lit(CHECK_TOL)) {
                        Ok(q) if q.converged && q.value.is_finite() => {
                            HypothesisReport::new(name, Tri::True, margin.to64())
                        }
                        Ok(q) => HypothesisReport::new(name, Tri::Unknown, margin.to64())
                            .with_evidence(hi.to64(), q.value.to64()),
                        Err(_) => HypothesisReport::new(name, Tri::Unknown, margin.to64()),
                    }
                }
            }
        }
    };

    // (c) monotonicity of −t^{n−1} f′(t)
    let monotone = {
        let name = "omega_over_t_nonincreasing";
        let noise = if f.has_analytic_derivative() { T::lit(1e-9) } else { T::lit(1e-6) };
        let h: Vec<T> = grid
            .iter()
            .map(|&t| {
                let d = f.deriv(t);
                if d == T::zero() {
                    T::zero()
                } else {
                    -t.powi(ni - 1) * d
                }
            })
            .collect();
        let mut worst = (T::neg_infinity(), 0usize);
        let mut violated = false;
        for i in 0..h.len() - 1 {
            let d = h[i + 1] - h[i];
            let slack = noise * h[i].abs().max(h[i + 1].abs());
            if d > worst.0 {
                worst = (d, i);
            }
            if d > slack {
                violated = true;
            }
        }
        let margin = (-worst.0).to64();
        if violated {
            let i = worst.1;
            HypothesisReport::new(name, Tri::False, margin)
                .with_evidence(grid[i].to64(), h[i].to64())
                .with_evidence(grid[i + 1].to64(), h[i + 1].to64())
        } else if f.decay == Decay::Unknown {
            HypothesisReport::new(name, Tri::Unknown, margin)
        } else {
            HypothesisReport::new(name, Tri::True, margin)
        }
    };
    vec![bounded, integrable, monotone]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Thm2Branch {
    /// `f(r)·min{1, r}` integrable on `(0, ∞)`.
    One,
    /// `r·f(r)` integrable on `(0, 1]`.
    Two,
}

impl TryFrom<u32> for Thm2Branch {
    type Error = ProfileError;
    fn try_from(b: u32) -> Result<Self, ProfileError> {
        match b {
            1 => Ok(Thm2Branch::One),
            2 => Ok(Thm2Branch::Two),
            _ => Err(ProfileError::InvalidParameter(format!("branch must be 1 or 2, got {b}"))),
        }
    }
}

/// Integrability hypothesis of the requested branch, from metadata plus quadrature.
pub fn check_thm2_integrability<T: Real>(f: &RadialProfile<T>, branch: Thm2Branch) -> HypothesisReport {
    let gamma = f.singularity_exponent;
    let head = gamma + T::lit(2.0);
    let probe_lo = T::lit(SCAN_LOW);
    let name = match branch {
        Thm2Branch::One => "f_min_1_r_integrable",
        Thm2Branch::Two => "r_f_locally_integrable",
    };
    if head <= T::zero() {
        return HypothesisReport::new(name, Tri::False, head.to64())
            .with_evidence(probe_lo.to64(), (probe_lo * probe_lo * f.eval(probe_lo)).to64());
    }
    let result = match branch {
        Thm2Branch::Two => {
            let mut opts = AdaptiveOptions::new(T::lit(CHECK_TOL));
            if !is_plain_exponent(gamma + T::one()) {
                opts = opts.singular_left(gamma + T::one());
            }
            let upper = f.decay.support().map_or(T::one(), |r| r.min(T::one()));
            integrate_adaptive_with(|r: T| r * f.eval(r), T::zero(), upper, &opts).map(|q| (q, head)).map_err(ProfileError::from)
        }
        Thm2Branch::One => {
            let tail = match f.decay {
                Decay::Unknown => return HypothesisReport::new(name, Tri::Unknown, head.to64()),
                Decay::Polynomial { exponent } if exponent >= -T::one() => {
                    let far = T::lit(SCAN_HIGH);
                    return HypothesisReport::new(name, Tri::False, (-(exponent + T::one())).to64())
                        .with_evidence(far.to64(), (far * f.eval(far)).to64());
                }
                Decay::Polynomial { exponent } => -(exponent + T::one()),
                _ => T::infinity(),
            };
            let g = |r: T| if r < T::one() { r * f.eval(r) } else { f.eval(r) };
            let mut bps: Vec<T> = f.breakpoints.clone();
            bps.push(T::one());
            bps.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            bps.dedup();
            integrate_half_line(g, gamma + T::one(), &f.decay, &bps, T::lit(CHECK_TOL))
                .map(|q| (q, head.min(tail)))
                .map_err(ProfileError::from)
        }
    };
    match result {
        Ok((q, margin)) if q.converged && q.value.is_finite() => {
            HypothesisReport::new(name, Tri::True, margin.to64())
        }
        Ok((q, margin)) => HypothesisReport::new(name, Tri::Unknown, margin.to64()).with_evidence(T::one().to64(), q.value.to64()),
        Err(_) => HypothesisReport::new(name, Tri::Unknown, head.to64()),
    }
}

/// Convexity on `(0, ∞)` by a slope scan, plus decay to zero at infinity.
pub fn check_polya<T: Real>(f: &RadialProfile<T>) -> HypothesisReport {
    let name = "polya_convex_decaying";
    let grid = scan_grid(f, f.decay.support().map(|r| r + r));
    let v: Vec<T> = grid.iter().map(|&t| f.eval(t)).collect();
    let slopes: Vec<T> = (0..grid.len() - 1).map(|i| (v[i + 1] - v[i]) / (grid[i + 1] - grid[i])).collect();
    let mut worst = (T::infinity(), 0usize);
    let mut violated = false;
    for i in 0..slopes.len() - 1 {
        let d = slopes[i + 1] - slopes[i];
        let h = (grid[i + 1] - grid[i]).min(grid[i + 2] - grid[i + 1]);
        let roundoff = T::lit(64.0) * T::epsilon() * (v[i].abs() + v[i + 1].abs() + v[i + 2].abs()) / h;
        let slack = T::lit(1e-8) * slopes[i].abs().max(slopes[i + 1].abs()) + roundoff;
        let scaled = d / (slopes[i].abs().max(slopes[i + 1].abs()).max(T::min_positive_value()));
        if scaled < worst.0 {
            worst = (scaled, i);
        }
        if d < -slack {
            violated = true;
        }
    }
    let margin = worst.0.to64();
    if violated {
        let i = worst.1;
        let mut r = HypothesisReport::new(name, Tri::False, margin);
        for j in i..i + 3 {
            r = r.with_evidence(grid[j].to64(), v[j].to64());
        }
        return r;
    }
    match f.decay.vanishes_at_infinity() {
        Some(true) => HypothesisReport::new(name, Tri::True, margin),
        Some(false) => {
            let far = *grid.last().expect("non-empty");
            HypothesisReport::new(name, Tri::False, margin).with_evidence(far.to64(), f.eval(far).to64())
        }
        None => HypothesisReport::new(name, Tri::Unknown, margin),
    }
}

/// Half-width `a(t) = sup{x ≥ 0 : φ(x) > t}` of the superlevel set of a
/// bounded, non-increasing profile.
pub fn layer_cake_width<T: Real>(phi: &RadialProfile<T>, t: T) -> T {
    let top = phi.eval(T::min_positive_value().sqrt());
    if !(top > t) {
        return T::zero();
    }
    let mut lo = T::zero();
    let mut hi = T::one();
    let limit = phi.decay.support().unwrap_or(T::lit(1e300));
    while phi.eval(hi) > t {
        lo = hi;
        if hi >= limit {
            return limit;
        }
        hi = (hi + hi).min(limit * T::lit(1.0 + 1e-12));
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi.eval(mid) > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    T::lit(0.5) * (lo + hi)
}
