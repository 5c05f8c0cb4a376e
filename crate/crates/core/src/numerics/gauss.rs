use crate::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Newton iteration on `P_m` from Chebyshev-like starting points; computed in
    /// `f64` and converted.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0f64; m];
        let mut weights = vec![0.0f64; m];
        let mf = m as f64;
        for i in 0..(m + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pm = if m == 1 { x } else { p1 };
                let pm1 = if m == 1 { 1.0 } else { p0 };
                dp = mf * (x * pm - pm1) / (x * x - 1.0);
                let dx = pm / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m == 1 {
            nodes[0] = 0.0;
            weights[0] = 2.0;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    /// Fixed-rule approximation of `∫_a^b f`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * f(mid + half * *x);
        }
        acc * half
    }

    /// Maps the rule to `[a, b]`, returning `(abscissa, weight)` pairs.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * *x, *w * half))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for m in [1, 2, 5, 16, 32, 64] {
            let gl = GaussLegendre::<f64>::new(m);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(8);
        // degree 15 integrates exactly
        let v = gl.integrate(|x| x.powi(14), 0.0, 1.0);
        assert!((v - 1.0 / 15.0).abs() < 1e-14);
        let v = gl.integrate(f64::exp, 0.0, 1.0);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
