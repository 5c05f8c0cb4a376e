use crate::Real;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of `|Γ(x)|` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// Γ(x). Exact recursion for positive integers and half-integers, Lanczos otherwise.
pub fn gamma<T: Real>(x: T) -> T {
    let two_x = x + x;
    if x > T::zero() && two_x == two_x.round() && x < T::lit(171.0) {
        let (mut acc, mut k) = if x == x.round() {
            (T::one(), T::one())
        } else {
            (T::PI().sqrt(), T::lit(0.5))
        };
        while k < x {
            acc = acc * k;
            k = k + T::one();
        }
        return acc;
    }
    if x < T::lit(0.5) {
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma(T::one() - x));
    }
    ln_gamma(x).exp()
}

/// The (d−1)-dimensional measure of the unit sphere `S^{d−1} ⊂ ℝ^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereConstant<T> {
    pub dim: usize,
    pub surface: T,
}

impl<T: Real> SphereConstant<T> {
    /// `surface = 2π^{d/2} / Γ(d/2)`; `dim` must be at least 1.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "sphere dimension must be >= 1");
        let half = T::from_usize_lossy(dim) * T::lit(0.5);
        let surface = T::lit(2.0) * T::PI().powf(half) / gamma(half);
        Self { dim, surface }
    }
}

/// Volume of the unit Euclidean ball in ℝ^d (`d = 0` gives 1).
pub fn ball_volume<T: Real>(dim: usize) -> T {
    if dim == 0 {
        return T::one();
    }
    SphereConstant::<T>::new(dim).surface / T::from_usize_lossy(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_dimensional_spheres() {
        assert_eq!(SphereConstant::<f64>::new(1).surface, 2.0);
        assert!((SphereConstant::<f64>::new(2).surface - 2.0 * PI).abs() < 1e-15);
        assert!((SphereConstant::<f64>::new(3).surface - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn sphere_recursion() {
        for d in 3..40 {
            let s = SphereConstant::<f64>::new(d).surface;
            let s2 = SphereConstant::<f64>::new(d - 2).surface;
            let rhs = 2.0 * PI * s2 / (d as f64 - 2.0);
            assert!((s - rhs).abs() <= 1e-12 * s.abs().max(1.0), "d={d}");
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0f64) - 24.0).abs() < 1e-12);
        assert!((gamma(0.5f64) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.3f64) - 0.897_470_696_306_277_2).abs() < 1e-13);
        assert!((ln_gamma(30.5f64) - 72.953_471_184_169_4).abs() < 1e-10);
        assert!((gamma(-0.5f64) + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume::<f64>(2) - PI).abs() < 1e-14);
        assert!((ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert_eq!(ball_volume::<f64>(1), 2.0);
    }
}
