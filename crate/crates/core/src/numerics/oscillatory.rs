use super::bessel::{bessel_j_unchecked, BesselZeros};
use super::quadrature::{integrate_adaptive_with, AdaptiveOptions, QuadratureResult};
use super::{Decay, EpsilonTable, NumericsError};
use crate::Real;

/// Slowly varying factor `g` of an oscillatory integrand, with the metadata the
/// partitioned integrator relies on.
pub struct Amplitude<'a, T> {
    pub eval: &'a (dyn Fn(T) -> T + Sync),
    /// `g(r) = O(r^γ)` as `r → 0`.
    pub origin_exponent: T,
    pub decay: Decay<T>,
    /// Points where `g` is not smooth (kinks, jumps); the partition includes them.
    pub breakpoints: Vec<T>,
}

const MAX_TERMS: usize = 200;
const MAX_COMPACT_PIECES: usize = 20_000;

fn needs_transform<T: Real>(e: T) -> bool {
    !(e >= T::zero() && e == e.round())
}

struct Partitioned<'a, T, F> {
    integrand: F,
    origin_exponent: T,
    breakpoints: &'a [T],
    tol: T,
}

impl<T: Real, F: Fn(T) -> T> Partitioned<'_, T, F> {
    fn piece(&self, a: T, b: T, scale: T) -> Result<QuadratureResult<T>, NumericsError> {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints.iter().copied().filter(|&p| p > a && p < b));
        cuts.push(b);
        let mut out = QuadratureResult::exact(T::zero());
        for w in cuts.windows(2) {
            let mut opts = AdaptiveOptions::new(self.tol * T::lit(0.1))
                .with_abs_tol(self.tol * T::lit(1e-3) * scale.max(T::min_positive_value()));
            if w[0] == T::zero() && needs_transform(self.origin_exponent) {
                opts = opts.singular_left(self.origin_exponent);
            }
            out = out.combine(integrate_adaptive_with(&self.integrand, w[0], w[1], &opts)?);
        }
        Ok(out)
    }

    fn run<Z>(&self, mut zeros: Z, support: Option<T>) -> Result<QuadratureResult<T>, NumericsError>
    where
        Z: Iterator<Item = Result<T, NumericsError>>,
    {
        let mut left = T::zero();
        let mut scale = T::zero();
        if let Some(radius) = support {
            let mut total = QuadratureResult::exact(T::zero());
            let mut pieces = 0;
            while left < radius {
                let mut right = zeros.next().expect("zero iterator is infinite")?;
                pieces += 1;
                if right > radius || pieces >= MAX_COMPACT_PIECES {
                    right = radius;
                }
                let p = self.piece(left, right, scale)?;
                scale = scale.max(p.value.abs());
                total = total.combine(p);
                left = right;
            }
            return Ok(total);
        }
        let mut table = EpsilonTable::new();
        let mut partial = T::zero();
        let mut abs_sum = T::zero();
        let mut piece_err = T::zero();
        let mut evals = 0;
        let mut all_converged = true;
        let mut prev_term = T::infinity();
        let mut accel_hits = 0;
        for k in 0..MAX_TERMS {
            let right = zeros.next().expect("zero iterator is infinite")?;
            let p = self.piece(left, right, scale)?;
            left = right;
            scale = scale.max(p.value.abs());
            evals += p.evaluations;
            all_converged &= p.converged;
            piece_err = piece_err + p.error_estimate;
            partial = partial + p.value;
            abs_sum = abs_sum + p.value.abs();
            let estimate = table.push(partial);
            let floor = T::lit(100.0) * T::epsilon() * abs_sum;
            let threshold = (self.tol * estimate.abs()).max(floor);
            if k >= 3 && p.value.abs() <= threshold && prev_term.abs() <= threshold {
                return Ok(QuadratureResult {
                    value: partial,
                    error_estimate: piece_err + p.value.abs(),
                    evaluations: evals,
                    converged: all_converged,
                });
            }
            prev_term = p.value;
            if k >= 4 {
                let acc_err = table.error_estimate();
                if acc_err <= threshold {
                    accel_hits += 1;
                    if accel_hits >= 2 {
                        return Ok(QuadratureResult {
                            value: estimate,
                            error_estimate: acc_err + piece_err,
                            evaluations: evals,
                            converged: all_converged,
                        });
                    }
                } else {
                    accel_hits = 0;
                }
            }
        }
        Ok(QuadratureResult {
            value: table.last().unwrap_or(partial),
            error_estimate: table.error_estimate() + piece_err,
            evaluations: evals,
            converged: false,
        })
    }
}

fn check_tail<T: Real>(decay: &Decay<T>, limit: T, what: &str) -> Result<(), NumericsError> {
    if let Decay::Polynomial { exponent } = *decay {
        if !(exponent < limit) {
            return Err(NumericsError::NotDecaying(format!(
                "{what}: amplitude grows like r^{exponent}, needs exponent < {limit}"
            )));
        }
    }
    Ok(())
}

/// `∫_0^∞ g(r) J_ν(ω r) dr`, partitioned at the scaled zeros `j_{ν,k}/ω` with
/// Wynn-epsilon acceleration of the partial sums; compactly supported `g` is
/// integrated exactly up to its support radius.
pub fn integrate_oscillatory_bessel<T: Real>(
    g: &Amplitude<'_, T>,
    nu: T,
    omega: T,
    tol: T,
) -> Result<QuadratureResult<T>, NumericsError> {
    if !(omega > T::zero()) {
        return Err(NumericsError::InvalidArgument(format!("frequency {omega} must be positive")));
    }
    check_tail(&g.decay, T::lit(0.5), "Bessel transform")?;
    let exponent = g.origin_exponent + nu;
    if !(exponent > -T::one()) {
        return Err(NumericsError::EndpointExponent(exponent.to64()));
    }
    let zeros = BesselZeros::new(nu)?.map(move |z| z.map(|z| z / omega));
    let eval = g.eval;
    let engine = Partitioned {
        integrand: move |r: T| {
            let a = eval(r);
            if a == T::zero() {
                T::zero()
            } else {
                a * bessel_j_unchecked(nu, omega * r)
            }
        },
        origin_exponent: exponent,
        breakpoints: &g.breakpoints,
        tol,
    };
    engine.run(zeros, g.decay.support())
}

/// `∫_0^∞ g(t) cos(ω t) dt`, partitioned at the cosine zeros `(k − ½)π/ω`.
pub fn integrate_oscillatory_cosine<T: Real>(
    g: &Amplitude<'_, T>,
    omega: T,
    tol: T,
) -> Result<QuadratureResult<T>, NumericsError> {
    if !(omega > T::zero()) {
        return Err(NumericsError::InvalidArgument(format!("frequency {omega} must be positive")));
    }
    check_tail(&g.decay, T::zero(), "cosine transform")?;
    if !(g.origin_exponent > -T::one()) {
        return Err(NumericsError::EndpointExponent(g.origin_exponent.to64()));
    }
    let zeros = (1..).map(move |k: usize| Ok((T::from_usize_lossy(k) - T::lit(0.5)) * T::PI() / omega));
    let eval = g.eval;
    let engine = Partitioned {
        integrand: move |t: T| {
            let a = eval(t);
            if a == T::zero() {
                T::zero()
            } else {
                a * (omega * t).cos()
            }
        },
        origin_exponent: g.origin_exponent,
        breakpoints: &g.breakpoints,
        tol,
    };
    engine.run(zeros, g.decay.support())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;
    use std::f64::consts::PI;

    fn amp<'a>(f: &'a (dyn Fn(f64) -> f64 + Sync), gamma: f64, decay: Decay<f64>) -> Amplitude<'a, f64> {
        Amplitude { eval: f, origin_exponent: gamma, decay, breakpoints: vec![] }
    }

    #[test]
    fn gaussian_half_order() {
        // ∫ r^{ν+1} e^{-r²/2} J_ν(r) dr = e^{-1/2}
        let f = |r: f64| r.powf(1.5) * (-r * r / 2.0).exp();
        let g = amp(&f, 1.5, Decay::Exponential { rate: 0.5, power: 2.0 });
        let r = integrate_oscillatory_bessel(&g, 0.5, 1.0, 1e-12).unwrap();
        let exact = (-0.5f64).exp();
        assert!(((r.value - exact) / exact).abs() < 1e-8, "{r:?} vs {exact}");
    }

    #[test]
    fn compact_amplitude_matches_direct_integration() {
        let f = |r: f64| if r <= 1.0 { r } else { 0.0 };
        let g = Amplitude { eval: &f, origin_exponent: 1.0, decay: Decay::CompactSupport { radius: 1.0 }, breakpoints: vec![] };
        let r = integrate_oscillatory_bessel(&g, 0.5, PI, 1e-13).unwrap();
        let direct = integrate_adaptive(|t: f64| t * crate::numerics::bessel_j(0.5, PI * t).unwrap(), 0.0, 1.0, 1e-13).unwrap();
        assert!((r.value - direct.value).abs() < 1e-10);
    }

    #[test]
    fn slowly_decaying_amplitude_against_trapezoid() {
        let f = |r: f64| r.sqrt() * (-r).exp();
        let g = amp(&f, 0.5, Decay::Exponential { rate: 1.0, power: 1.0 });
        let r = integrate_oscillatory_bessel(&g, 0.5, 5.0, 1e-12).unwrap();
        // brute force: 10^6-node trapezoid on [0, 60]; the integrand is r·sin(5r)·const near 0
        let n = 1_000_000;
        let h = 60.0 / n as f64;
        let integrand = |r: f64| {
            if r == 0.0 {
                0.0
            } else {
                f(r) * (2.0 / (PI * 5.0 * r)).sqrt() * (5.0 * r).sin()
            }
        };
        let mut s = 0.5 * (integrand(0.0) + integrand(60.0));
        for i in 1..n {
            s += integrand(i as f64 * h);
        }
        let brute = s * h;
        assert!((r.value - brute).abs() < 1e-6, "{} vs {}", r.value, brute);
    }

    #[test]
    fn cosine_transform_of_exponential() {
        let f = |t: f64| (-t).exp();
        let g = amp(&f, 0.0, Decay::Exponential { rate: 1.0, power: 1.0 });
        for xi in [0.01, 0.5, 3.0, 20.0, 50.0] {
            let r = integrate_oscillatory_cosine(&g, xi, 1e-12).unwrap();
            let exact = 1.0 / (1.0 + xi * xi);
            assert!(((r.value - exact) / exact).abs() < 1e-9, "xi={xi}: {r:?}");
        }
    }

    #[test]
    fn power_law_tail_is_accelerated() {
        // ∫_0^∞ t^{-1/2} cos(ω t) dt = sqrt(π/(2ω))
        let f = |t: f64| t.powf(-0.5);
        let g = amp(&f, -0.5, Decay::Polynomial { exponent: -0.5 });
        let r = integrate_oscillatory_cosine(&g, 2.0, 1e-10).unwrap();
        let exact = (PI / 4.0).sqrt();
        assert!((r.value - exact).abs() < 1e-8, "{r:?} vs {exact}");
    }

    #[test]
    fn refuses_growing_amplitude() {
        let f = |t: f64| t;
        let g = amp(&f, 1.0, Decay::Polynomial { exponent: 1.0 });
        assert!(matches!(integrate_oscillatory_cosine(&g, 1.0, 1e-8), Err(NumericsError::NotDecaying(_))));
        assert!(matches!(integrate_oscillatory_bessel(&g, 0.0, 1.0, 1e-8), Err(NumericsError::NotDecaying(_))));
    }
}
