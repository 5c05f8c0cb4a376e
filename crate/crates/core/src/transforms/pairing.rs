use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::testfn::random_direction;
use super::{ft_even_1d, TestFunction, TransformError};
use crate::bodies::{dot, euclid, NormBody, SectionBackend, SectionFunction};
use crate::numerics::{ChebyshevTable, Decay, GaussLegendre, NumericsError, QuadratureResult, SphereConstant};
use crate::profiles::{log_grid, omega_of, RadialProfile};
use crate::seeds::rng_for;
use crate::{Real, Tri};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Direct,
    Sectional,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingOptions<T> {
    /// Monte Carlo samples (directions for the direct route, points for the sectional one).
    pub samples: usize,
    pub seed: u64,
    /// Independent RNG streams; partial sums are combined in stratum order.
    pub strata: usize,
    /// Gauss–Legendre nodes per radial piece.
    pub radial_nodes: usize,
    /// Tolerance of the deterministic one-dimensional transforms.
    pub tol: T,
    pub allow_finite_difference: bool,
}

impl<T: Real> PairingOptions<T> {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, strata: 64, radial_nodes: 48, tol: T::lit(1e-10), allow_finite_difference: false }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingEstimate<T> {
    pub route: Route,
    /// `error_estimate` is the Monte Carlo standard error.
    pub result: QuadratureResult<T>,
    /// Monte Carlo estimate of the integral of the absolute integrand.
    pub abs_scale: T,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Default)]
pub(crate) struct Acc {
    pub(crate) sum: f64,
    pub(crate) sumsq: f64,
    pub(crate) abs: f64,
    pub(crate) count: usize,
}

impl Acc {
    fn push(&mut self, value: f64, abs: f64) {
        self.sum += value;
        self.sumsq += value * value;
        self.abs += abs;
        self.count += 1;
    }

    fn merge(self, o: Acc) -> Acc {
        Acc { sum: self.sum + o.sum, sumsq: self.sumsq + o.sumsq, abs: self.abs + o.abs, count: self.count + o.count }
    }

    /// Sample mean, its standard error, and the mean absolute value.
    pub(crate) fn summary(&self) -> (f64, f64, f64) {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sumsq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt(), self.abs / n)
    }
}

/// Runs `per_sample` over `samples` draws split into strata with their own
/// seeds, folding in stratum order.
pub(crate) fn stratified<E, F>(samples: usize, strata: usize, seed: u64, per_sample: F) -> Result<Acc, E>
where
    E: From<NumericsError> + Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<(f64, f64), E> + Sync,
{
    if samples < 2 {
        return Err(NumericsError::InvalidArgument("Monte Carlo needs at least 2 samples".into()).into());
    }
    let strata = strata.clamp(1, samples);
    let base = samples / strata;
    let extra = samples % strata;
    let parts: Vec<Result<Acc, E>> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_for(seed, s as u64);
            let mut acc = Acc::default();
            for _ in 0..base + usize::from(s < extra) {
                let (v, a) = per_sample(&mut rng)?;
                if !v.is_finite() {
                    return Err(NumericsError::NonFinite { abscissa: f64::NAN, value: v }.into());
                }
                acc.push(v, a);
            }
            Ok(acc)
        })
        .collect();
    parts.into_iter().try_fold(Acc::default(), |a, b| Ok(a.merge(b?)))
}

fn estimate<T: Real>(route: Route, acc: Acc, weight: f64, opts: &PairingOptions<T>) -> PairingEstimate<T> {
    let (mean, sigma, abs) = acc.summary();
    PairingEstimate {
        route,
        result: QuadratureResult {
            value: T::lit(weight * mean),
            error_estimate: T::lit(weight * sigma),
            evaluations: acc.count,
            converged: true,
        },
        abs_scale: T::lit(weight * abs),
        samples: acc.count,
        seed: opts.seed,
    }
}

fn check_inputs<T: Real>(f: &RadialProfile<T>, body: &NormBody<T>, phi: &TestFunction<T>) -> Result<(), TransformError> {
    if body.dim != phi.dim {
        return Err(TransformError::InvalidArgument(format!(
            "body lives in dimension {}, test function in {}",
            body.dim, phi.dim
        )));
    }
    let n = T::from_usize_lossy(body.dim);
    if !(f.singularity_exponent > -n) {
        return Err(TransformError::Refused(format!(
            "f(‖x‖) is not locally integrable: exponent {} ≤ −{}",
            f.singularity_exponent, body.dim
        )));
    }
    Ok(())
}

/// Substitution `r = b·y^m` on the first radial piece that turns
/// `r^e dr` into a polynomial (or constant) weight in `y`.
fn radial_power<T: Real>(e: T) -> T {
    let two = T::lit(2.0);
    if e >= T::zero() && e == e.round() {
        T::one()
    } else if two * e == (two * e).round() {
        two
    } else {
        T::one() / (T::one() + e)
    }
}

/// `∫_{ℝⁿ} f(‖x‖_K) φ̂(x) dx` in polar coordinates: random directions, and a
/// Gauss–Legendre rule along each ray cut at the breakpoints of `f` and
/// where the Gaussian envelope of `φ̂` drops below `e^{−40}`.
pub fn pairing_direct<T: Real>(
    f: &RadialProfile<T>,
    body: &NormBody<T>,
    phi: &TestFunction<T>,
    opts: &PairingOptions<T>,
) -> Result<PairingEstimate<T>, TransformError> {
    check_inputs(f, body, phi)?;
    let n = body.dim;
    let e = f.singularity_exponent + T::from_usize_lossy(n - 1);
    let m = radial_power(e);
    let gl = GaussLegendre::<T>::new(opts.radial_nodes.max(2));
    let reach = T::lit(9.0) / phi.sigma;
    let support = f.decay.support();
    let eval = f.eval_fn();
    let surface = SphereConstant::<T>::new(n).surface.to64();
    let acc = stratified::<TransformError, _>(opts.samples, opts.strata, opts.seed, |rng| {
        let u: Vec<T> = random_direction(n, rng);
        let k = body.norm(&u);
        if !(k > T::zero() && k.is_finite()) {
            return Err(TransformError::InvalidArgument(format!("norm of a unit vector is {k}")));
        }
        let cu = dot(&phi.center, &u);
        let rmax = support.map_or(reach, |s| reach.min(s / k));
        let integrand = |r: T| {
            let v = eval(r * k);
            if v == T::zero() {
                T::zero()
            } else {
                v * phi.fourier_along(r, cu) * r.powi(n as i32 - 1)
            }
        };
        let mut cuts = vec![T::zero()];
        cuts.extend(f.breakpoints.iter().map(|&b| b / k).filter(|&b| b > T::zero() && b < rmax));
        cuts.push(rmax);
        let (mut total, mut abs) = (T::zero(), T::zero());
        for (i, w) in cuts.windows(2).enumerate() {
            for (x, wt) in gl.mapped(T::zero(), T::one()) {
                let (r, jac) = if i == 0 {
                    (w[1] * x.powf(m), w[1] * m * x.powf(m - T::one()))
                } else {
                    (w[0] + (w[1] - w[0]) * x, w[1] - w[0])
                };
                let y = integrand(r) * jac * wt;
                total = total + y;
                abs = abs + y.abs();
            }
        }
        Ok((total.to64() * surface, abs.to64() * surface))
    })?;
    Ok(estimate(Route::Direct, acc, 1.0, opts))
}

/// `ω̂(s) = 2∫_0^∞ ω(λ)cos(λs)dλ` for `ω(t) = −tⁿf′(t)`, tabulated on
/// `[0, upper]` with direct evaluation beyond.
pub struct OmegaTransform<T> {
    omega: RadialProfile<T>,
    table: ChebyshevTable<T>,
    tol: T,
}

impl<T: Real> OmegaTransform<T> {
    pub fn new(
        f: &RadialProfile<T>,
        n: usize,
        upper: T,
        tol: T,
        allow_finite_difference: bool,
    ) -> Result<Self, TransformError> {
        let omega = omega_of(f, n, allow_finite_difference)?;
        let width = T::lit(6.0) / effective_extent(&omega);
        let width = width.min(T::lit(0.25));
        let table = ChebyshevTable::build(|s| ft_even_1d(&omega, s, tol).map(|q| q.value), upper, width, 16)?;
        Ok(Self { omega, table, tol })
    }

    pub fn omega(&self) -> &RadialProfile<T> {
        &self.omega
    }

    pub fn eval(&self, s: T) -> Result<T, TransformError> {
        match self.table.eval(s.abs()) {
            Some(v) => Ok(v),
            None => Ok(ft_even_1d(&self.omega, s, self.tol)?.value),
        }
    }
}

/// Largest `t` where `t·|ω(t)|` is still above `1e-13` of its peak.
fn effective_extent<T: Real>(omega: &RadialProfile<T>) -> T {
    let end = omega.decay.support().unwrap_or(T::lit(1e5));
    let grid = log_grid(T::lit(1e-3).min(end * T::lit(0.5)), end, 800);
    let mass: Vec<T> = grid.iter().map(|&t| (omega.eval(t) * t).abs()).collect();
    let peak = mass.iter().fold(T::zero(), |a, &b| if b.is_finite() { a.max(b) } else { a });
    let last = grid.iter().zip(&mass).filter(|(_, &m)| m >= T::lit(1e-13) * peak).map(|(t, _)| *t).last();
    last.unwrap_or(T::one()).max(T::one())
}

fn sectional_reach<T: Real>(body: &NormBody<T>, phi: &TestFunction<T>) -> T {
    let c = euclid(&phi.center);
    body.bounding_radius * (c + phi.sigma * (T::from_usize_lossy(phi.dim).sqrt() + T::lit(7.0)))
}

impl<T: Real> OmegaTransform<T> {
    /// Table covering every sectional pairing of `f` on `body` against `battery`.
    pub fn for_battery(
        f: &RadialProfile<T>,
        body: &NormBody<T>,
        battery: &[TestFunction<T>],
        opts: &PairingOptions<T>,
    ) -> Result<Self, TransformError> {
        let reach = battery.iter().map(|phi| sectional_reach(body, phi)).fold(T::one(), T::max);
        Self::new(f, body.dim, reach, opts.tol, opts.allow_finite_difference)
    }
}

/// Builds `ω̂` for `f` and runs [`pairing_sectional_with`].
pub fn pairing_sectional<T: Real>(
    f: &RadialProfile<T>,
    body: &NormBody<T>,
    phi: &TestFunction<T>,
    opts: &PairingOptions<T>,
) -> Result<PairingEstimate<T>, TransformError> {
    check_inputs(f, body, phi)?;
    let table = OmegaTransform::new(f, body.dim, sectional_reach(body, phi), opts.tol, opts.allow_finite_difference)?;
    pairing_sectional_with(&table, body, phi, opts)
}

/// `∫ φ(x) ∫_0^{h(v)} A_{K,v}(t) ω̂(|x|t) dt dx` with `v = x/|x|`, sampling
/// `x` from `φ/‖φ‖₁`. Needs exact section functions.
pub fn pairing_sectional_with<T: Real>(
    omega_hat: &OmegaTransform<T>,
    body: &NormBody<T>,
    phi: &TestFunction<T>,
    opts: &PairingOptions<T>,
) -> Result<PairingEstimate<T>, TransformError> {
    if body.dim != phi.dim {
        return Err(TransformError::InvalidArgument("dimension mismatch".into()));
    }
    let probe = random_direction::<T>(body.dim, &mut rng_for(opts.seed, u64::MAX));
    if SectionFunction::new(body, &probe, SectionBackend::Exact).is_err() {
        return Err(TransformError::Refused(format!("no exact section function for `{}`", body.label)));
    }
    let nodes = (opts.radial_nodes / 3).max(8);
    let gl = GaussLegendre::<T>::new(nodes);
    // ω̂(s) is resolved on pieces of length ≤ 2 in s.
    let piece = T::lit(2.0);
    let acc = stratified::<TransformError, _>(opts.samples, opts.strata, opts.seed, |rng| {
        let x = phi.sample(rng);
        let r = euclid(&x);
        if r == T::zero() {
            return Ok((0.0, 0.0));
        }
        let v: Vec<T> = x.iter().map(|c| *c / r).collect();
        let sec = SectionFunction::new(body, &v, SectionBackend::Exact)?;
        let h = sec.support_width();
        let mut cuts = vec![T::zero()];
        cuts.extend(sec.breakpoints().iter().copied().filter(|&b| b > T::zero() && b < h));
        cuts.push(h);
        let (mut total, mut abs) = (T::zero(), T::zero());
        for w in cuts.windows(2) {
            let parts = ((w[1] - w[0]) * r / piece).ceil().to_usize().unwrap_or(1).max(1);
            let step = (w[1] - w[0]) / T::from_usize_lossy(parts);
            for j in 0..parts {
                let a = w[0] + step * T::from_usize_lossy(j);
                for (t, wt) in gl.mapped(a, a + step) {
                    let area = sec.exact_value(t).unwrap_or(T::zero());
                    let y = area * omega_hat.eval(r * t)? * wt;
                    total = total + y;
                    abs = abs + y.abs();
                }
            }
        }
        Ok((total.to64(), abs.to64()))
    })?;
    Ok(estimate(Route::Sectional, acc, phi.l1_norm().to64(), opts))
}

/// `⟨f(‖·‖_K), φ̂⟩` along the requested route.
pub fn pairing<T: Real>(
    f: &RadialProfile<T>,
    body: &NormBody<T>,
    phi: &TestFunction<T>,
    route: Route,
    opts: &PairingOptions<T>,
) -> Result<PairingEstimate<T>, TransformError> {
    match route {
        Route::Direct => pairing_direct(f, body, phi, opts),
        Route::Sectional => pairing_sectional(f, body, phi, opts),
    }
}

fn indicator_ft<T: Real>(body: &NormBody<T>, xi: &[T], tol: T) -> Result<T, TransformError> {
    let s = euclid(xi);
    let v: Vec<T> = if s > T::zero() {
        xi.iter().map(|c| *c / s).collect()
    } else {
        (0..body.dim).map(|i| if i == 0 { T::one() } else { T::zero() }).collect()
    };
    let sec = SectionFunction::new(body, &v, SectionBackend::Exact)?;
    let h = sec.support_width();
    let bound = sec.exact_value(T::zero()).unwrap_or(T::zero());
    let bps = sec.breakpoints().to_vec();
    let profile = RadialProfile::from_fn("section", move |t: T| sec.exact_value(t).unwrap_or(T::zero()))
        .with_singularity(T::zero(), bound)
        .with_decay(Decay::CompactSupport { radius: h })
        .with_shape(Tri::True, Tri::True)
        .with_regularity(None, false)
        .with_breakpoints(bps);
    Ok(ft_even_1d(&profile, s, tol)?.value)
}

/// `|χ̂_{λK}(ξ) − λⁿ χ̂_K(λξ)|`, each side through the section function.
pub fn dilation_ft_check<T: Real>(body: &NormBody<T>, lambda: T, xi: &[T], tol: T) -> Result<T, TransformError> {
    if xi.len() != body.dim {
        return Err(TransformError::InvalidArgument("frequency has the wrong dimension".into()));
    }
    let scaled = body.dilate(lambda)?;
    let lhs = indicator_ft(&scaled, xi, tol)?;
    let lxi: Vec<T> = xi.iter().map(|c| *c * lambda).collect();
    let rhs = lambda.powi(body.dim as i32) * indicator_ft(body, &lxi, tol)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{bessel_j, integrate_semi_infinite, AdaptiveOptions};
    use crate::transforms::ball_indicator_ft;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_pairing_closed_form() {
        let f = RadialProfile::<f64>::exp_power(2.0).unwrap();
        let ball = NormBody::ball(3).unwrap();
        let phi = TestFunction::single(3, 1.0, 1.0).unwrap();
        let want = (2.0 * PI).powf(1.5) * (2.0 * PI / 3.0).powf(1.5);
        let opts = PairingOptions::new(20_000, 1);
        let d = pairing_direct(&f, &ball, &phi, &opts).unwrap();
        // radial integrand is direction independent on the ball
        assert!((d.result.value - want).abs() < 1e-8 * want, "{} {want}", d.result.value);
        let s = pairing_sectional(&f, &ball, &phi, &opts).unwrap();
        let diff = (s.result.value - want).abs();
        assert!(diff < 4.0 * s.result.error_estimate, "{} {want} ± {}", s.result.value, s.result.error_estimate);
    }

    #[test]
    fn ball_pairing_against_radial_oracle() {
        let f = RadialProfile::<f64>::admissible_omega_profile(3, -1.5).unwrap();
        let ball = NormBody::ball(3).unwrap();
        let c = 2.0f64;
        let phi = TestFunction::gaussian_pair(vec![c, 0.0, 0.0], 1.0, 1.0).unwrap();
        // spherical average of cos(r⟨c,u⟩) is sin(rc)/(rc)
        let g = |r: f64| {
            let avg = bessel_j(0.5, r * c).unwrap() * (PI / (2.0 * r * c)).sqrt();
            f.eval(r) * r * r * (-r * r / 2.0).exp() * avg
        };
        let opts = AdaptiveOptions::new(1e-12).singular_left(0.5);
        let oracle = 4.0 * PI * 2.0 * (2.0 * PI).powf(1.5) * integrate_semi_infinite(g, 0.0, 2.0, &opts).unwrap().value;
        let d = pairing_direct(&f, &ball, &phi, &PairingOptions::new(200_000, 3)).unwrap();
        let sd = d.result.error_estimate;
        assert!((d.result.value - oracle).abs() < (1e-3 * oracle.abs()).max(4.0 * sd), "{} {oracle} ± {sd}", d.result.value);
        let s = pairing_sectional(&f, &ball, &phi, &PairingOptions::new(200_000, 4)).unwrap();
        let ss = s.result.error_estimate;
        assert!((s.result.value - oracle).abs() < 4.0 * ss, "{} {oracle} ± {ss}", s.result.value);
    }

    #[test]
    fn routes_agree_on_cube() {
        let f = RadialProfile::<f64>::smoothed_truncated_power(-1.5, 1.0, 0.1).unwrap();
        let cube = NormBody::cube(3).unwrap();
        let phi = TestFunction::gaussian_pair(vec![0.8, -0.5, 0.3], 0.9, 1.0).unwrap();
        let opts = PairingOptions::new(200_000, 11);
        let d = pairing(&f, &cube, &phi, Route::Direct, &opts).unwrap();
        let s = pairing(&f, &cube, &phi, Route::Sectional, &opts).unwrap();
        let sigma = (d.result.error_estimate.powi(2) + s.result.error_estimate.powi(2)).sqrt();
        assert!((d.result.value - s.result.value).abs() < 3.0 * sigma, "{:?} {:?}", d.result, s.result);
    }

    #[test]
    fn deterministic_and_refusals() {
        let f = RadialProfile::<f64>::admissible_omega_profile(3, -1.5).unwrap();
        let cube = NormBody::cube(3).unwrap();
        let phi = TestFunction::gaussian_pair(vec![1.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        let opts = PairingOptions::new(5_000, 2);
        let a = pairing_direct(&f, &cube, &phi, &opts).unwrap();
        let b = pairing_direct(&f, &cube, &phi, &opts).unwrap();
        assert_eq!(a.result.value.to_bits(), b.result.value.to_bits());
        let bad = RadialProfile::power(-3.0).unwrap();
        assert!(matches!(pairing_direct(&bad, &cube, &phi, &opts), Err(TransformError::Refused(_))));
        let star = NormBody::lp(4, 0.5).unwrap();
        let phi4 = TestFunction::single(4, 1.0, 1.0).unwrap();
        assert!(matches!(pairing_sectional(&f, &star, &phi4, &opts), Err(TransformError::Refused(_))));
    }

    #[test]
    fn dilation() {
        let ball = NormBody::<f64>::ball(3).unwrap();
        let r = dilation_ft_check(&ball, 2.0, &[0.0, 0.6, 0.8], 1e-12).unwrap();
        assert!(r <= 1e-8, "{r}");
        let cube = NormBody::<f64>::cube(3).unwrap();
        assert!(dilation_ft_check(&cube, 0.5, &[1.0, 0.0, 0.0], 1e-12).unwrap() <= 1e-8);
        assert_eq!(dilation_ft_check(&cube, 1.0, &[0.3, 0.4, 0.0], 1e-12).unwrap(), 0.0);
        // the section route reproduces the closed ball transform
        let v = indicator_ft(&ball, &[0.0, 0.0, 1.7], 1e-12).unwrap();
        assert!((v - ball_indicator_ft(3, 1.0, 1.7).unwrap()).abs() < 1e-9);
    }
}
