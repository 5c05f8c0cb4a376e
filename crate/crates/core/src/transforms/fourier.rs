use super::TransformError;
use crate::numerics::{
    bessel_j, gamma, integrate_oscillatory_bessel, integrate_oscillatory_cosine, Amplitude, Decay, QuadratureResult,
    SphereConstant,
};
use crate::profiles::{integrate_half_line, RadialProfile};
use crate::Real;

fn refuse<T>(msg: String) -> Result<T, TransformError> {
    Err(TransformError::Refused(msg))
}

fn shift_decay<T: Real>(decay: Decay<T>, by: T) -> Decay<T> {
    match decay {
        Decay::Polynomial { exponent } => Decay::Polynomial { exponent: exponent + by },
        other => other,
    }
}

/// `2∫_0^∞ ψ(t) cos(ξt) dt`, the transform of the even extension `t ↦ ψ(|t|)`.
pub fn ft_even_1d<T: Real>(psi: &RadialProfile<T>, xi: T, tol: T) -> Result<QuadratureResult<T>, TransformError> {
    let gamma_0 = psi.singularity_exponent;
    if !(gamma_0 > -T::one()) {
        return refuse(format!("`{}` is not integrable at 0 (exponent {gamma_0})", psi.label));
    }
    let xi = xi.abs();
    if !xi.is_finite() {
        return Err(TransformError::InvalidArgument(format!("frequency {xi}")));
    }
    let eval = psi.eval_fn();
    let two = T::lit(2.0);
    if xi == T::zero() {
        if let Decay::Polynomial { exponent } = psi.decay {
            if !(exponent < -T::one()) {
                return refuse(format!("`{}` is not integrable at infinity", psi.label));
            }
        }
        let q = integrate_half_line(|t| eval(t), gamma_0, &psi.decay, &psi.breakpoints, tol)?;
        return Ok(q.scaled(two));
    }
    let amp = Amplitude {
        eval: &*eval,
        origin_exponent: gamma_0,
        decay: psi.decay,
        breakpoints: psi.breakpoints.clone(),
    };
    Ok(integrate_oscillatory_cosine(&amp, xi, tol)?.scaled(two))
}

/// Fourier transform of `x ↦ f(|x|)` on ℝⁿ at `|ξ| = ρ`:
/// `(2π)^{n/2} ρ^{1−n/2} ∫_0^∞ f(r) r^{n/2} J_{n/2−1}(rρ) dr`.
pub fn radial_ft<T: Real>(
    f: &RadialProfile<T>,
    n: usize,
    rho: T,
    tol: T,
) -> Result<QuadratureResult<T>, TransformError> {
    if n == 0 {
        return Err(TransformError::InvalidArgument("dimension must be at least 1".into()));
    }
    if n == 1 {
        return ft_even_1d(f, rho, tol);
    }
    let nn = T::from_usize_lossy(n);
    let gamma_0 = f.singularity_exponent;
    if !(gamma_0 > -nn) {
        return refuse(format!(
            "r^{}·f(r) is not integrable at 0 for `{}` (exponent {gamma_0})",
            n - 1,
            f.label
        ));
    }
    let rho = rho.abs();
    let eval = f.eval_fn();
    if rho == T::zero() {
        if let Decay::Polynomial { exponent } = f.decay {
            if !(exponent + nn - T::one() < -T::one()) {
                return refuse(format!("`{}` is not integrable at infinity in dimension {n}", f.label));
            }
        }
        let e = gamma_0 + nn - T::one();
        let q = integrate_half_line(|r: T| eval(r) * r.powi(n as i32 - 1), e, &f.decay, &f.breakpoints, tol)?;
        return Ok(q.scaled(SphereConstant::<T>::new(n).surface));
    }
    let half = nn * T::lit(0.5);
    let g = move |r: T| {
        let v = eval(r);
        if v == T::zero() {
            T::zero()
        } else {
            v * r.powf(half)
        }
    };
    let amp = Amplitude {
        eval: &g,
        origin_exponent: gamma_0 + half,
        decay: shift_decay(f.decay, half),
        breakpoints: f.breakpoints.clone(),
    };
    let q = integrate_oscillatory_bessel(&amp, half - T::one(), rho, tol)?;
    let two_pi = T::PI() + T::PI();
    Ok(q.scaled(two_pi.powf(half) * rho.powf(T::one() - half)))
}

/// Fourier transform of the indicator of the ball of radius `r` in ℝⁿ at `|ξ| = xi`.
pub fn ball_indicator_ft<T: Real>(n: usize, r: T, xi: T) -> Result<T, TransformError> {
    if n == 0 || !(r > T::zero()) || !xi.is_finite() {
        return Err(TransformError::InvalidArgument(format!("ball transform needs n ≥ 1, r > 0 (n={n}, r={r})")));
    }
    let nu = T::from_usize_lossy(n) * T::lit(0.5);
    let x = r * xi.abs();
    // J_ν(x)/x^ν
    let ratio = if x < T::lit(1e-3) {
        let x2 = x * x;
        let lead = T::one() / (T::lit(2.0).powf(nu) * gamma(nu + T::one()));
        lead * (T::one() - x2 / (T::lit(4.0) * (nu + T::one()))
            + x2 * x2 / (T::lit(32.0) * (nu + T::one()) * (nu + T::lit(2.0))))
    } else {
        bessel_j(nu, x)? / x.powf(nu)
    };
    Ok((T::PI() + T::PI()).powf(nu) * r.powi(n as i32) * ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel_zero;
    use crate::profiles::log_grid;
    use std::f64::consts::PI;

    fn gaussian() -> RadialProfile<f64> {
        RadialProfile::from_fn("gauss", |t: f64| (-t * t / 2.0).exp())
            .with_singularity(0.0, 1.0)
            .with_decay(Decay::Exponential { rate: 0.5, power: 2.0 })
    }

    #[test]
    fn interval_indicator() {
        let chi = RadialProfile::truncated_power(0.0, 1.5).unwrap();
        for xi in log_grid(0.01f64, 50.0, 60) {
            let got = ft_even_1d(&chi, xi, 1e-12).unwrap().value;
            let want = 2.0 * (1.5 * xi).sin() / xi;
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-2), "xi={xi} {got} {want}");
        }
        assert!((ft_even_1d(&chi, 0.0, 1e-12).unwrap().value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_and_lorentzian() {
        let g = gaussian();
        let e = RadialProfile::exp_power(1.0).unwrap();
        for xi in [0.0, 0.01, 0.3, 1.0, 2.5, 5.0] {
            let got = ft_even_1d(&g, xi, 1e-12).unwrap().value;
            let want = (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp();
            assert!((got - want).abs() <= 1e-8 * want, "xi={xi} {got} {want}");
            let got = ft_even_1d(&e, xi, 1e-12).unwrap().value;
            let want = 2.0 / (1.0 + xi * xi);
            assert!((got - want).abs() <= 1e-7 * want, "xi={xi} {got} {want}");
        }
    }

    #[test]
    fn radial_examples() {
        let q = radial_ft(&gaussian(), 3, 1.0, 1e-12).unwrap();
        let want = (2.0 * PI).powf(1.5) * (-0.5f64).exp();
        assert!((q.value - want).abs() < 1e-8 * want);

        let disk = RadialProfile::truncated_power(0.0, 1.0).unwrap();
        let q = radial_ft(&disk, 2, 1.0, 1e-12).unwrap();
        let want = 2.0 * PI * bessel_j(1.0, 1.0).unwrap();
        assert!((q.value - want).abs() < 1e-10);

        // r^{-1}e^{-r}, n = 3: (4π/ρ)∫ e^{-r} sin(ρr) dr by a fine trapezoid.
        let f = RadialProfile::from_fn("x", |r: f64| (-r).exp() / r)
            .with_singularity(-1.0, 1.0)
            .with_decay(Decay::Exponential { rate: 1.0, power: 1.0 });
        let q = radial_ft(&f, 3, 2.0, 1e-12).unwrap();
        let m = 1_000_000;
        let h = 60.0 / m as f64;
        let mut s = 0.0;
        for i in 1..m {
            let r = i as f64 * h;
            s += (-r).exp() * (2.0 * r).sin();
        }
        let end = 60.0f64;
        s += 0.5 * (-end).exp() * (2.0 * end).sin();
        let brute = 4.0 * PI / 2.0 * s * h;
        assert!((q.value - brute).abs() < 1e-6, "{} {brute}", q.value);
        // closed form 4π/(1+ρ²)
        assert!((q.value - 4.0 * PI / 5.0).abs() < 1e-9);
    }

    #[test]
    fn radial_origin_and_refusal() {
        let q = radial_ft(&gaussian(), 2, 0.0, 1e-12).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-10);
        let bad = RadialProfile::power(-3.5).unwrap();
        assert!(matches!(radial_ft(&bad, 3, 1.0, 1e-10), Err(TransformError::Refused(_))));
    }

    #[test]
    fn ball_indicator() {
        assert!((ball_indicator_ft(2, 1.0f64, 0.0).unwrap() - PI).abs() < 1e-14);
        assert!((ball_indicator_ft(2, 1.0, 1e-6).unwrap() - PI).abs() < 1e-9);
        assert!((ball_indicator_ft(3, 1.0, PI).unwrap() - 4.0 / PI).abs() < 1e-12);
        let j1: f64 = bessel_zero(1.0, 1).unwrap();
        assert!(ball_indicator_ft(2, 1.0, j1).unwrap().abs() < 1e-12);
        // against the radial transform of the indicator
        let chi = RadialProfile::truncated_power(0.0, 1.3).unwrap();
        for n in 2..6 {
            for xi in [0.2f64, 1.0, 4.0] {
                let a = ball_indicator_ft(n, 1.3, xi).unwrap();
                let b = radial_ft(&chi, n, xi, 1e-12).unwrap().value;
                assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "n={n} xi={xi}");
            }
        }
    }
}
