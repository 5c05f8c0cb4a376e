//! Bessel functions of the first kind for real order `0 ≤ ν ≤ 30`.
//!
//! Evaluation strategy by regime:
//! * half-integer order with `x ≥ ν`: closed trigonometric form (upward
//!   spherical-Bessel recurrence),
//! * small argument: ascending series,
//! * `x > max(30, ν²)`: Hankel asymptotic expansion,
//! * otherwise: Miller backward recurrence normalised by the Neumann sum
//!   `(x/2)^μ = Σ (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x)`.

use super::special::ln_gamma;
use super::NumericsError;
use crate::Real;

pub const MAX_BESSEL_ORDER: f64 = 30.0;

fn is_half_integer<T: Real>(nu: T) -> bool {
    let two = nu + nu;
    two == two.round() && two.to_i64().map_or(false, |k| k % 2 != 0)
}

/// `J_ν(x)` for `ν ∈ [0, 30]`, `x ≥ 0`.
pub fn bessel_j<T: Real>(nu: T, x: T) -> Result<T, NumericsError> {
    if !(nu >= T::zero() && nu <= T::lit(MAX_BESSEL_ORDER)) || !(x >= T::zero()) || !x.is_finite() {
        return Err(NumericsError::BesselRange { nu: nu.to64(), x: x.to64() });
    }
    Ok(bessel_j_unchecked(nu, x))
}

/// Same as [`bessel_j`] but also accepts `ν = −1/2` and orders up to 31; used
/// internally for derivatives and cosine kernels.
pub(crate) fn bessel_j_unchecked<T: Real>(nu: T, x: T) -> T {
    if x == T::zero() {
        return if nu == T::zero() { T::one() } else { T::zero() };
    }
    if nu == T::lit(-0.5) {
        return (T::lit(2.0) / (T::PI() * x)).sqrt() * x.cos();
    }
    if is_half_integer(nu) && x >= nu {
        return half_integer(nu, x);
    }
    if x <= T::lit(8.0) || x * x <= T::lit(4.0) * (nu + T::one()) {
        return series(nu, x);
    }
    if x > T::lit(30.0).max(nu * nu) {
        return hankel(nu, x);
    }
    miller(nu, x)
}

fn series<T: Real>(nu: T, x: T) -> T {
    let half = x * T::lit(0.5);
    let lead = (nu * half.ln() - ln_gamma(nu + T::one())).exp();
    let q = half * half;
    let mut term = lead;
    let mut sum = term;
    for k in 1..300 {
        let kf = T::from_usize_lossy(k);
        term = -term * q / (kf * (kf + nu));
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(0.1) * sum.abs().max(T::min_positive_value()) {
            break;
        }
    }
    sum
}

fn half_integer<T: Real>(nu: T, x: T) -> T {
    // J_{m+1/2}(x) = sqrt(2x/π) j_m(x)
    let m = (nu - T::lit(0.5)).round().to_usize().unwrap_or(0);
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    let prefactor = (T::lit(2.0) * x / T::PI()).sqrt();
    if m == 0 {
        return prefactor * j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for l in 1..m {
        let next = T::from_usize_lossy(2 * l + 1) / x * cur - prev;
        prev = cur;
        cur = next;
    }
    prefactor * cur
}

fn hankel<T: Real>(nu: T, x: T) -> T {
    let mu = T::lit(4.0) * nu * nu;
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = T::from_usize_lossy(2 * k - 1);
        term = term * (mu - odd * odd) / (T::from_usize_lossy(k) * eight_x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // terms alternate between Q (odd k) and P (even k) with signs (-1)^{floor(k/2)}
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        if k % 2 == 1 {
            q = q + sign * term;
        } else {
            p = p + sign * term;
        }
        if mag < T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    // χ = x − (ν/2 + 1/4)π, expanded so x is never reduced together with the phase
    let phase = (nu * T::lit(0.5) + T::lit(0.25)) * T::PI();
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn miller<T: Real>(nu: T, x: T) -> T {
    let m = nu.floor().to_usize().unwrap_or(0);
    let mu = nu - T::from_usize_lossy(m);
    let reach = x.max(nu).to_f64().unwrap_or(0.0);
    let mut start = (reach + 30.0 + 10.0 * reach.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let big = T::lit(1e200);
    let tiny = T::lit(1e-200);
    let mut above = T::zero();
    let mut cur = T::lit(1e-30);
    let mut target = T::zero();
    // a_k = Γ(μ+k)/(k! Γ(μ+1)); weight (μ+2k)·a_k multiplies J_{μ+2k}
    let half_start = start / 2;
    let mut weights = Vec::with_capacity(half_start + 1);
    {
        let mut a = T::one();
        weights.push(T::one());
        for k in 1..=half_start {
            if k > 1 {
                a = a * (mu + T::from_usize_lossy(k - 1)) / T::from_usize_lossy(k);
            }
            weights.push((mu + T::from_usize_lossy(2 * k)) * a);
        }
    }
    let mut norm = T::zero();
    // cur holds J_{μ+k}; iterate k = start down to 0
    let mut k = start;
    loop {
        if k == m {
            target = cur;
        }
        if k % 2 == 0 {
            norm = norm + weights[k / 2] * cur;
        }
        if k == 0 {
            break;
        }
        let next = T::lit(2.0) * (mu + T::from_usize_lossy(k)) / x * cur - above;
        above = cur;
        cur = next;
        k -= 1;
        if cur.abs() > big {
            cur = cur * tiny;
            above = above * tiny;
            norm = norm * tiny;
            target = target * tiny;
        }
    }
    let lhs = (mu * (x * T::lit(0.5)).ln() - ln_gamma(mu + T::one())).exp();
    target * lhs / norm
}

fn mcmahon<T: Real>(nu: T, k: usize) -> T {
    let beta = (T::from_usize_lossy(k) + nu * T::lit(0.5) - T::lit(0.25)) * T::PI();
    let mu = T::lit(4.0) * nu * nu;
    let b8 = T::lit(8.0) * beta;
    beta - (mu - T::one()) / b8
        - T::lit(4.0) * (mu - T::one()) * (T::lit(7.0) * mu - T::lit(31.0)) / (T::lit(3.0) * b8.powi(3))
        - T::lit(32.0) * (mu - T::one()) * (T::lit(83.0) * mu * mu - T::lit(982.0) * mu + T::lit(3779.0))
            / (T::lit(15.0) * b8.powi(5))
}

fn derivative<T: Real>(nu: T, x: T) -> T {
    nu / x * bessel_j_unchecked(nu, x) - bessel_j_unchecked(nu + T::one(), x)
}

/// Successive positive zeros `j_{ν,1} < j_{ν,2} < …` of `J_ν`.
///
/// Consecutive zeros are more than 3 apart for every `ν ≥ 0`, so a unit-step
/// scan brackets exactly one zero; the McMahon expansion seeds a safeguarded
/// Newton polish inside the bracket.
#[derive(Clone, Debug)]
pub struct BesselZeros<T> {
    nu: T,
    k: usize,
    last: T,
}

impl<T: Real> BesselZeros<T> {
    pub fn new(nu: T) -> Result<Self, NumericsError> {
        if !(nu >= T::zero() && nu <= T::lit(MAX_BESSEL_ORDER)) {
            return Err(NumericsError::BesselRange { nu: nu.to64(), x: 0.0 });
        }
        Ok(Self { nu, k: 0, last: T::zero() })
    }

    fn next_zero(&mut self) -> Result<T, NumericsError> {
        let nu = self.nu;
        let k = self.k + 1;
        let step = T::one();
        let mut lo = if k == 1 { nu.max(T::lit(0.5)) } else { self.last + step };
        let mut f_lo = bessel_j_unchecked(nu, lo);
        let mut hi = lo + step;
        let mut f_hi = bessel_j_unchecked(nu, hi);
        let mut guard = 0;
        while f_lo.signum() == f_hi.signum() && f_hi != T::zero() {
            lo = hi;
            f_lo = f_hi;
            hi = hi + step;
            f_hi = bessel_j_unchecked(nu, hi);
            guard += 1;
            if guard > 100 {
                return Err(NumericsError::ZeroNotConverged { nu: nu.to64(), k });
            }
        }
        if f_hi == T::zero() {
            self.k = k;
            self.last = hi;
            return Ok(hi);
        }
        let guess = mcmahon(nu, k);
        let mut x = if guess > lo && guess < hi { guess } else { T::lit(0.5) * (lo + hi) };
        let tol = T::epsilon() * T::lit(4.0);
        for _ in 0..100 {
            let fx = bessel_j_unchecked(nu, x);
            if fx == T::zero() {
                self.k = k;
                self.last = x;
                return Ok(x);
            }
            if fx.signum() == f_lo.signum() {
                lo = x;
            } else {
                hi = x;
            }
            let d = derivative(nu, x);
            let mut next = x - fx / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = T::lit(0.5) * (lo + hi);
            }
            let converged = (next - x).abs() <= tol * x;
            x = next;
            if converged || (hi - lo) <= tol * x {
                self.k = k;
                self.last = x;
                return Ok(x);
            }
        }
        Err(NumericsError::ZeroNotConverged { nu: nu.to64(), k })
    }
}

impl<T: Real> Iterator for BesselZeros<T> {
    type Item = Result<T, NumericsError>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_zero())
    }
}

/// The `k`-th positive zero of `J_ν` (`k ≥ 1`).
pub fn bessel_zero<T: Real>(nu: T, k: usize) -> Result<T, NumericsError> {
    if k == 0 {
        return Err(NumericsError::InvalidArgument("zero index starts at 1".into()));
    }
    let mut zeros = BesselZeros::new(nu)?;
    let mut z = T::zero();
    for _ in 0..k {
        z = zeros.next_zero()?;
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Ascending series with 40 terms, summed largest-last, as an independent oracle.
    fn series_oracle(nu: f64, x: f64) -> f64 {
        let mut terms = Vec::new();
        for k in 0..40 {
            let lg = ln_gamma(k as f64 + 1.0) + ln_gamma(k as f64 + nu + 1.0);
            let mag = ((2 * k) as f64 + nu) * (x / 2.0).ln() - lg;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            terms.push(sign * mag.exp());
        }
        terms.iter().rev().sum()
    }

    #[test]
    fn origin_and_half_integer() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn j1_of_one_matches_series() {
        let v = bessel_j(1.0, 1.0).unwrap();
        assert!((v - series_oracle(1.0, 1.0)).abs() < 1e-14);
        assert!((v - 0.440_050_585_744_933_5).abs() < 1e-14);
    }

    #[test]
    fn half_order_identity() {
        for i in 0..=1000 {
            let x = 0.1 + i as f64 * 0.0999;
            let lhs = bessel_j(0.5, x).unwrap() * (PI * x / 2.0).sqrt();
            assert!((lhs - x.sin()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn regimes_agree_with_references() {
        // values from mpmath.besselj
        let cases = [
            (0.0, 10.0, -0.245_935_764_451_348_335),
            (0.0, 35.0, -0.126_845_682_756_312_570),
            (1.0, 20.0, 0.066_833_124_175_850_045_6),
            (2.3, 15.0, -0.046_397_385_692_545_097_3),
            (10.0, 12.0, 0.300_476_035_271_269_311),
            (30.0, 25.0, 0.011_809_026_124_269_016_2),
            (30.0, 40.0, -0.104_085_949_765_649_727),
            (0.7, 1000.0, 0.015_459_721_454_996_039_5),
            (12.0, 400.0, -0.036_563_602_128_629_073_7),
            (3.5, 2.0, 0.068_517_549_985_127_069_6),
        ];
        for (nu, x, want) in cases {
            let got: f64 = bessel_j(nu, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn range_errors() {
        assert!(bessel_j(31.0, 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
        assert!(bessel_j(-1.0, 1.0).is_err());
    }

    #[test]
    fn half_order_zeros_are_multiples_of_pi() {
        assert!((bessel_zero(0.5, 1).unwrap() - PI).abs() < 1e-12);
        assert!((bessel_zero(0.5, 3).unwrap() - 3.0 * PI).abs() < 1e-11);
        // J_{3/2} vanishes where tan x = x
        for k in 1..6 {
            let z: f64 = bessel_zero(1.5, k).unwrap();
            assert!((z.tan() - z).abs() < 1e-9 * z * z, "k={k}");
        }
    }

    #[test]
    fn first_zero_of_j0_against_bisection() {
        let (mut lo, mut hi) = (2.0f64, 3.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if series_oracle(0.0, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = bessel_zero(0.0, 1).unwrap();
        assert!((z - 0.5 * (lo + hi)).abs() < 1e-12);
        assert!((z - 2.404_825_557_695_773).abs() < 1e-9);
    }

    #[test]
    fn zeros_of_high_order_are_ordered_roots() {
        let zeros: Vec<f64> = BesselZeros::new(30.0).unwrap().take(20).map(Result::unwrap).collect();
        assert!((zeros[0] - 36.098_336_956_747_725).abs() < 1e-9, "{}", zeros[0]);
        for w in zeros.windows(2) {
            assert!(w[1] - w[0] > 3.0);
        }
        for z in zeros {
            assert!(bessel_j(30.0, z).unwrap().abs() < 1e-12);
        }
    }
}
