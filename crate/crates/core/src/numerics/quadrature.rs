use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::NumericsError;
use crate::Real;

/// Value of a numeric integral together with its error claim.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Real> QuadratureResult<T> {
    pub fn exact(value: T) -> Self {
        Self { value, error_estimate: T::zero(), evaluations: 0, converged: true }
    }

    /// Sum of two independent pieces.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Knobs for the adaptive Gauss–Kronrod integrator.
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Bisection depth limit of a single subinterval.
    pub max_depth: u32,
    pub max_subintervals: usize,
    /// Declared exponent γ > −1 with `f(t) ~ (t − a)^γ` near the left endpoint.
    pub left_exponent: Option<T>,
    /// Declared exponent γ > −1 with `f(t) ~ (b − t)^γ` near the right endpoint.
    pub right_exponent: Option<T>,
}

impl<T: Real> AdaptiveOptions<T> {
    pub fn new(tol: T) -> Self {
        Self {
            rel_tol: tol,
            abs_tol: tol * T::lit(1e-3),
            max_depth: 50,
            max_subintervals: 4000,
            left_exponent: None,
            right_exponent: None,
        }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn singular_left(mut self, exponent: T) -> Self {
        self.left_exponent = Some(exponent);
        self
    }

    pub fn singular_right(mut self, exponent: T) -> Self {
        self.right_exponent = Some(exponent);
        self
    }
}

// 7-point Gauss / 15-point Kronrod pair.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Rule<T> {
    xgk: [T; 8],
    wgk: [T; 8],
    wg: [T; 4],
}

impl<T: Real> Rule<T> {
    fn new() -> Self {
        Self {
            xgk: XGK.map(T::lit),
            wgk: WGK.map(T::lit),
            wg: WG.map(T::lit),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
    depth: u32,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn check<T: Real>(x: T, y: T) -> Result<T, NumericsError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(NumericsError::NonFinite { abscissa: x.to64(), value: y.to64() })
    }
}

fn kronrod<T, F>(f: &mut F, rule: &Rule<T>, a: T, b: T) -> Result<(T, T), NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = check(center, f(center))?;
    let mut res_k = fc * rule.wgk[7];
    let mut res_g = fc * rule.wg[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let x = half_len * rule.xgk[j];
        let (x1, x2) = (center - x, center + x);
        let f1 = check(x1, f(x1))?;
        let f2 = check(x2, f(x2))?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + rule.wgk[j] * (f1 + f2);
        res_abs = res_abs + rule.wgk[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + rule.wg[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = rule.wgk[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + rule.wgk[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half_len.abs();
    let value = res_k * half_len;
    res_abs = res_abs * scale;
    res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        let ratio = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * ratio.min(T::one());
    }
    let eps = T::epsilon();
    if res_abs > T::min_positive_value() / (T::lit(50.0) * eps) {
        err = err.max(T::lit(50.0) * eps * res_abs);
    }
    Ok((value, err))
}

/// Globally adaptive 15-point Gauss–Kronrod on a finite interval without
/// endpoint transformations.
fn adaptive_core<T, F>(
    f: &mut F,
    a: T,
    b: T,
    opts: &AdaptiveOptions<T>,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let rule = Rule::new();
    let (v0, e0) = kronrod(f, &rule, a, b)?;
    let mut evals = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v0, error: e0, depth: 0 });
    let mut total = v0;
    let mut err = e0;
    let mut frozen_value = T::zero();
    let mut frozen_error = T::zero();
    let mut count = 1;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadratureResult { value: total, error_estimate: err, evaluations: evals, converged: true });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(QuadratureResult { value: total, error_estimate: err, evaluations: evals, converged: false })
            }
        };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if count >= opts.max_subintervals {
            return Ok(QuadratureResult { value: total, error_estimate: err, evaluations: evals, converged: false });
        }
        if worst.depth >= opts.max_depth || mid <= worst.a || mid >= worst.b {
            // cannot refine further; its error stays in the budget
            frozen_value = frozen_value + worst.value;
            frozen_error = frozen_error + worst.error;
            if heap.is_empty() {
                return Ok(QuadratureResult { value: total, error_estimate: err, evaluations: evals, converged: false });
            }
            continue;
        }
        let (v1, e1) = kronrod(f, &rule, worst.a, mid)?;
        let (v2, e2) = kronrod(f, &rule, mid, worst.b)?;
        evals += 30;
        count += 1;
        total = total - worst.value + v1 + v2;
        err = err - worst.error + e1 + e2;
        if count % 64 == 0 {
            // refresh running sums
            total = heap.iter().map(|s| s.value).sum::<T>() + v1 + v2 + frozen_value;
            err = heap.iter().map(|s| s.error).sum::<T>() + e1 + e2 + frozen_error;
        }
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, depth: worst.depth + 1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, depth: worst.depth + 1 });
    }
}

fn validate_exponent<T: Real>(e: Option<T>) -> Result<(), NumericsError> {
    match e {
        Some(g) if !(g > -T::one()) => Err(NumericsError::EndpointExponent(g.to64())),
        _ => Ok(()),
    }
}

/// `∫_a^b f` with a singular left endpoint removed by `t = a + u^{1/(1+γ)}`.
fn integrate_left_singular<T, F>(
    f: &mut F,
    a: T,
    b: T,
    gamma: T,
    opts: &AdaptiveOptions<T>,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let k = T::one() / (T::one() + gamma);
    let upper = (b - a).powf(T::one() + gamma);
    let floor = T::epsilon() * a.abs();
    let mut g = |u: T| {
        let d = u.powf(k).max(floor);
        f(a + d) * k * u.powf(k - T::one())
    };
    adaptive_core(&mut g, T::zero(), upper, opts)
}

fn integrate_right_singular<T, F>(
    f: &mut F,
    a: T,
    b: T,
    gamma: T,
    opts: &AdaptiveOptions<T>,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let k = T::one() / (T::one() + gamma);
    let upper = (b - a).powf(T::one() + gamma);
    let floor = T::epsilon() * b.abs();
    let mut g = |u: T| {
        let d = u.powf(k).max(floor);
        f(b - d) * k * u.powf(k - T::one())
    };
    adaptive_core(&mut g, T::zero(), upper, opts)
}

/// `∫_a^b f(t) dt` to relative tolerance `tol`.
pub fn integrate_adaptive<T, F>(f: F, a: T, b: T, tol: T) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_adaptive_with(f, a, b, &AdaptiveOptions::new(tol))
}

/// `∫_a^b f(t) dt` with explicit options, including declared endpoint singularities.
pub fn integrate_adaptive_with<T, F>(
    mut f: F,
    a: T,
    b: T,
    opts: &AdaptiveOptions<T>,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(NumericsError::InvalidInterval { a: a.to64(), b: b.to64() });
    }
    validate_exponent(opts.left_exponent)?;
    validate_exponent(opts.right_exponent)?;
    if a == b {
        return Ok(QuadratureResult::exact(T::zero()));
    }
    let is_trivial = |e: Option<T>| e.map_or(true, |g| g == T::zero());
    match (is_trivial(opts.left_exponent), is_trivial(opts.right_exponent)) {
        (true, true) => adaptive_core(&mut f, a, b, opts),
        (false, true) => integrate_left_singular(&mut f, a, b, opts.left_exponent.unwrap(), opts),
        (true, false) => integrate_right_singular(&mut f, a, b, opts.right_exponent.unwrap(), opts),
        (false, false) => {
            let mid = T::lit(0.5) * (a + b);
            let left = integrate_left_singular(&mut f, a, mid, opts.left_exponent.unwrap(), opts)?;
            let right = integrate_right_singular(&mut f, mid, b, opts.right_exponent.unwrap(), opts)?;
            Ok(left.combine(right))
        }
    }
}

/// `∫_a^∞ f(t) dt`: the piece `[a, a + scale]` honours `opts.left_exponent`,
/// the tail is mapped to `[0, 1)` by `t = a + scale + u/(1 − u)`.
pub fn integrate_semi_infinite<T, F>(
    mut f: F,
    a: T,
    scale: T,
    opts: &AdaptiveOptions<T>,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !a.is_finite() || !(scale > T::zero()) {
        return Err(NumericsError::InvalidInterval { a: a.to64(), b: f64::INFINITY });
    }
    let split = a + scale;
    let head_opts = AdaptiveOptions { right_exponent: None, ..*opts };
    let head = integrate_adaptive_with(&mut f, a, split, &head_opts)?;
    let mut tail_f = |u: T| {
        let w = T::one() - u;
        let t = split + scale * u / w;
        let y = f(t);
        if y == T::zero() {
            T::zero()
        } else {
            y * scale / (w * w)
        }
    };
    let tail_opts = AdaptiveOptions {
        left_exponent: None,
        abs_tol: opts.abs_tol.max(opts.rel_tol * head.value.abs() * T::lit(0.1)),
        ..*opts
    };
    let tail = if opts.right_exponent.is_some() {
        integrate_adaptive_with(&mut tail_f, T::zero(), T::one(), &tail_opts)?
    } else {
        adaptive_core(&mut tail_f, T::zero(), T::one(), &tail_opts)?
    };
    Ok(head.combine(tail))
}
