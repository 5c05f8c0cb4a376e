use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{ft_even_1d, TransformError};
use crate::bodies::{check_unit, dot};
use crate::numerics::{integrate_semi_infinite, AdaptiveOptions, Decay, QuadratureResult, SphereConstant};
use crate::profiles::{is_plain_exponent, RadialProfile, SMOOTH};
use crate::seeds::rng_for;
use crate::{Real, Tri};

/// `φ(x) = A[G_σ(x − c) + G_σ(x + c)]` with `G_σ(x) = exp(−|x|²/(2σ²))`,
/// or the single Gaussian `A·G_σ(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunction<T> {
    pub dim: usize,
    pub center: Vec<T>,
    pub sigma: T,
    pub amplitude: T,
    /// False for the single centred Gaussian.
    pub pair: bool,
}

impl<T: Real> TestFunction<T> {
    pub fn gaussian_pair(center: Vec<T>, sigma: T, amplitude: T) -> Result<Self, TransformError> {
        Self::validate(center.len(), sigma, amplitude)?;
        if center.iter().any(|c| !c.is_finite()) {
            return Err(TransformError::InvalidArgument("centre must be finite".into()));
        }
        Ok(Self { dim: center.len(), center, sigma, amplitude, pair: true })
    }

    pub fn single(dim: usize, sigma: T, amplitude: T) -> Result<Self, TransformError> {
        Self::validate(dim, sigma, amplitude)?;
        Ok(Self { dim, center: vec![T::zero(); dim], sigma, amplitude, pair: false })
    }

    fn validate(dim: usize, sigma: T, amplitude: T) -> Result<(), TransformError> {
        if dim == 0 {
            return Err(TransformError::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(TransformError::InvalidArgument(format!("width must be positive, got {sigma}")));
        }
        if !(amplitude > T::zero() && amplitude.is_finite()) {
            return Err(TransformError::InvalidArgument(format!("amplitude must be positive, got {amplitude}")));
        }
        Ok(())
    }

    /// `count` Gaussian pairs with random centre direction, `|c| ∈ [0.5, 2.5]`
    /// and `σ ∈ [0.6, 1.4]`; element `i` depends only on `(seed, i)`.
    pub fn battery(dim: usize, count: usize, seed: u64) -> Result<Vec<Self>, TransformError> {
        (0..count)
            .map(|i| {
                let mut rng = rng_for(seed, i as u64);
                let dir = random_direction::<T>(dim, &mut rng);
                let len = T::lit(0.5 + 2.0 * rng.gen::<f64>());
                let sigma = T::lit(0.6 + 0.8 * rng.gen::<f64>());
                Self::gaussian_pair(dir.into_iter().map(|d| d * len).collect(), sigma, T::one())
            })
            .collect()
    }

    fn gauss(&self, sq: T) -> T {
        (-sq / (T::lit(2.0) * self.sigma * self.sigma)).exp()
    }

    pub fn eval(&self, x: &[T]) -> T {
        let minus: T = x.iter().zip(&self.center).map(|(a, c)| (*a - *c) * (*a - *c)).sum();
        if !self.pair {
            return self.amplitude * self.gauss(minus);
        }
        let plus: T = x.iter().zip(&self.center).map(|(a, c)| (*a + *c) * (*a + *c)).sum();
        self.amplitude * (self.gauss(minus) + self.gauss(plus))
    }

    /// `A(2π)^{n/2}σⁿ`, the transform of one Gaussian at the origin.
    fn fourier_prefactor(&self) -> T {
        let n = self.dim as i32;
        self.amplitude * (T::PI() + T::PI()).powf(T::from_usize_lossy(self.dim) * T::lit(0.5)) * self.sigma.powi(n)
    }

    pub fn fourier(&self, xi: &[T]) -> T {
        let r2: T = xi.iter().map(|x| *x * *x).sum();
        self.fourier_along(r2.sqrt(), dot(&self.center, xi) / r2.sqrt().max(T::min_positive_value()))
    }

    /// `φ̂(r·u)` for a unit vector `u` with `⟨c, u⟩ = cu`.
    pub fn fourier_along(&self, r: T, cu: T) -> T {
        let env = self.fourier_prefactor() * (-self.sigma * self.sigma * r * r * T::lit(0.5)).exp();
        if self.pair {
            env * T::lit(2.0) * (r * cu).cos()
        } else {
            env
        }
    }

    /// `∫ φ`.
    pub fn l1_norm(&self) -> T {
        let mass = self.amplitude * (T::PI() + T::PI()).powf(T::from_usize_lossy(self.dim) * T::lit(0.5))
            * self.sigma.powi(self.dim as i32);
        if self.pair {
            mass * T::lit(2.0)
        } else {
            mass
        }
    }

    /// A point distributed with density `φ/‖φ‖₁`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let sign = if self.pair && rng.gen::<bool>() { -T::one() } else { T::one() };
        self.center
            .iter()
            .map(|c| sign * *c + self.sigma * T::lit(rng.sample::<f64, _>(StandardNormal)))
            .collect()
    }

    fn radon_unchecked(&self, d: T, t: T) -> T {
        let mass = (T::PI() + T::PI()).sqrt() * self.sigma;
        let pre = self.amplitude * mass.powi(self.dim as i32 - 1);
        if self.pair {
            pre * (self.gauss((t - d) * (t - d)) + self.gauss((t + d) * (t + d)))
        } else {
            pre * self.gauss(t * t)
        }
    }

    /// `t ↦ Rφ(v, t)` as an even profile.
    pub fn radon_profile(&self, v: &[T]) -> Result<RadialProfile<T>, TransformError> {
        self.check_direction(v)?;
        let d = dot(&self.center, v);
        let me = self.clone();
        let rate = T::one() / (T::lit(2.0) * self.sigma * self.sigma);
        Ok(RadialProfile::from_fn("radon", move |t| me.radon_unchecked(d, t))
            .with_singularity(T::zero(), me_bound(self, d))
            .with_decay(Decay::Exponential { rate, power: T::lit(2.0) })
            .with_shape(Tri::Unknown, Tri::True)
            .with_regularity(Some(SMOOTH), true))
    }

    fn check_direction(&self, v: &[T]) -> Result<(), TransformError> {
        if v.len() != self.dim {
            return Err(TransformError::InvalidArgument(format!(
                "direction has {} components, test function lives in dimension {}",
                v.len(),
                self.dim
            )));
        }
        check_unit(v)?;
        Ok(())
    }
}

fn me_bound<T: Real>(phi: &TestFunction<T>, d: T) -> T {
    phi.radon_unchecked(d, d).max(phi.radon_unchecked(d, T::zero()))
}

/// Uniform direction on the unit sphere.
pub fn random_direction<T: Real>(dim: usize, rng: &mut impl Rng) -> Vec<T> {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.into_iter().map(|x| T::lit(x / norm)).collect();
        }
    }
}

/// `Rφ(v, t) = ∫_{⟨x,v⟩=t} φ`, in closed form.
pub fn radon<T: Real>(phi: &TestFunction<T>, v: &[T], t: T) -> Result<T, TransformError> {
    phi.check_direction(v)?;
    Ok(phi.radon_unchecked(dot(&phi.center, v), t))
}

/// `|FT₁[Rφ(v, ·)](s) − φ̂(s v)|`.
pub fn slice_identity_check<T: Real>(phi: &TestFunction<T>, v: &[T], s: T, tol: T) -> Result<T, TransformError> {
    let profile = phi.radon_profile(v)?;
    let lhs = ft_even_1d(&profile, s, tol)?.value;
    let xi: Vec<T> = v.iter().map(|c| *c * s).collect();
    Ok((lhs - phi.fourier(&xi)).abs())
}

/// One slice-theorem trial: a test function, a unit direction and a frequency.
#[derive(Clone, Debug, Serialize)]
pub struct SliceTrial<T> {
    pub phi: TestFunction<T>,
    pub direction: Vec<T>,
    pub s: T,
}

/// `count` trials in dimension `dim`; trial `i` depends only on `(seed, i)`.
/// Frequencies are uniform in `[0, 3]`.
pub fn slice_trials<T: Real>(dim: usize, count: usize, seed: u64) -> Result<Vec<SliceTrial<T>>, TransformError> {
    let battery = TestFunction::battery(dim, count, seed)?;
    Ok(battery
        .into_iter()
        .enumerate()
        .map(|(i, phi)| {
            let mut rng = rng_for(seed, (i as u64) | (1 << 63));
            let direction = random_direction(dim, &mut rng);
            let s = T::lit(3.0 * rng.gen::<f64>());
            SliceTrial { phi, direction, s }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RadonIdentity<T> {
    pub lhs: QuadratureResult<T>,
    pub rhs: QuadratureResult<T>,
}

/// Both sides of the spherical average identity
/// `∫_{S^{n−1}} Rδ(v, r) dv = C_n ∫_{ℝⁿ} δ(x)(1 − (r/|x|)²)_+^{(n−3)/2}|x|^{−1} dx`
/// for a centred Gaussian `δ`, with `C_n = |S^{n−2}|`, the surface of the
/// unit sphere in ℝ^{n−1}.
pub fn integral_radon_identity<T: Real>(
    delta: &TestFunction<T>,
    r: T,
    tol: T,
) -> Result<RadonIdentity<T>, TransformError> {
    let n = delta.dim;
    if n < 3 {
        return Err(TransformError::InvalidArgument(format!("identity needs n ≥ 3, got {n}")));
    }
    if delta.pair {
        return Err(TransformError::InvalidArgument("identity needs a radial (single) Gaussian".into()));
    }
    if !(r >= T::zero() && r.is_finite()) {
        return Err(TransformError::InvalidArgument(format!("radius {r}")));
    }
    let surface = SphereConstant::<T>::new(n).surface;
    let c_n = SphereConstant::<T>::new(n - 1).surface;
    let lhs = QuadratureResult::exact(surface * delta.radon_unchecked(T::zero(), r));
    let e = T::from_usize_lossy(n - 3) * T::lit(0.5);
    let mut opts = AdaptiveOptions::new(tol);
    if r > T::zero() && !is_plain_exponent(e) {
        opts = opts.singular_left(e);
    }
    let kernel = |rho: T| {
        if rho <= r {
            return T::zero();
        }
        let q = r / rho;
        delta.amplitude * delta.gauss(rho * rho) * (T::one() - q * q).powf(e) * rho.powi(n as i32 - 2)
    };
    let rhs = integrate_semi_infinite(kernel, r, delta.sigma, &opts)?.scaled(c_n * surface);
    Ok(RadonIdentity { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;
    use std::f64::consts::PI;

    #[test]
    fn radon_examples() {
        let single = TestFunction::<f64>::single(2, 1.0, 1.0).unwrap();
        let s = 0.5f64.sqrt();
        assert!((radon(&single, &[s, s], 0.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-14);
        let pair = TestFunction::gaussian_pair(vec![2.0, 0.0], 1.0, 1.0).unwrap();
        let want = (2.0 * PI).sqrt() * (1.0 + (-8.0f64).exp());
        assert!((radon(&pair, &[1.0, 0.0], 2.0).unwrap() - want).abs() < 1e-14);
        // along x₁ at x₂ = 0 both Gaussians contribute their full mass
        let got = radon(&pair, &[0.0, 1.0], 0.0).unwrap();
        let quad = integrate_adaptive(|x: f64| pair.eval(&[x, 0.0]), -30.0, 30.0, 1e-13).unwrap().value;
        assert!((got - quad).abs() < 1e-12);
        assert!((got - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn fourier_formula_against_quadrature() {
        // n = 1 pair: φ̂(ξ) = ∫ φ(x) cos(xξ) dx
        let pair = TestFunction::gaussian_pair(vec![1.3], 0.7, 2.0).unwrap();
        for xi in [0.0, 0.4, 1.7, 3.0] {
            let quad = integrate_adaptive(|x: f64| pair.eval(&[x]) * (x * xi).cos(), -20.0, 20.0, 1e-13).unwrap();
            assert!((quad.value - pair.fourier(&[xi])).abs() < 1e-11);
        }
        let mass = integrate_adaptive(|x: f64| pair.eval(&[x]), -20.0, 20.0, 1e-13).unwrap().value;
        assert!((mass - pair.l1_norm()).abs() < 1e-11);
    }

    #[test]
    fn slice_examples() {
        let single = TestFunction::<f64>::single(3, 1.0, 1.0).unwrap();
        assert!(slice_identity_check(&single, &[1.0, 0.0, 0.0], 1.0, 1e-12).unwrap() <= 1e-8);
        let pair = TestFunction::gaussian_pair(vec![1.0, 0.0, 0.0], 1.0, 1.0).unwrap();
        assert!(slice_identity_check(&pair, &[1.0, 0.0, 0.0], 2.0, 1e-12).unwrap() <= 1e-8);
        assert!(slice_identity_check(&pair, &[0.0, 1.0, 0.0], 0.5, 1e-12).unwrap() <= 1e-8);
    }

    #[test]
    fn radon_identity_examples() {
        let d3 = TestFunction::<f64>::single(3, 1.0, 1.0).unwrap();
        let id = integral_radon_identity(&d3, 1.0, 1e-12).unwrap();
        let closed = 4.0 * PI * 2.0 * PI * (-0.5f64).exp();
        assert!((id.lhs.value - closed).abs() < 1e-10);
        assert!((id.rhs.value - closed).abs() < 1e-6 * closed);
        for n in [4, 5, 6, 7] {
            let d = TestFunction::<f64>::single(n, 1.0, 1.0).unwrap();
            for r in [0.0, 0.5, 2.0] {
                let id = integral_radon_identity(&d, r, 1e-12).unwrap();
                assert!((id.lhs.value - id.rhs.value).abs() < 1e-6 * id.lhs.value, "n={n} r={r}");
            }
            let far = integral_radon_identity(&d, 40.0, 1e-12).unwrap();
            assert!(far.lhs.value < 1e-300 && far.rhs.value.abs() < 1e-300);
        }
    }

    #[test]
    fn battery_is_reproducible() {
        let a = TestFunction::<f64>::battery(3, 5, 9).unwrap();
        let b = TestFunction::<f64>::battery(3, 5, 9).unwrap();
        assert_eq!(a, b);
        for phi in &a {
            let c = dot(&phi.center, &phi.center).sqrt();
            assert!((0.5..=2.5).contains(&c) && phi.pair);
        }
    }
}
