use crate::Real;

/// Piecewise Chebyshev interpolant of a smooth function on `[0, upper]`,
/// one panel per unit of `panel_width`, evaluated in barycentric form.
#[derive(Clone, Debug)]
pub struct ChebyshevTable<T> {
    upper: T,
    panel_width: T,
    nodes: Vec<T>,
    bary: Vec<T>,
    values: Vec<Vec<T>>,
}

impl<T: Real> ChebyshevTable<T> {
    /// Samples `f` at `degree + 1` Chebyshev–Lobatto points on each panel.
    pub fn build<F, E>(mut f: F, upper: T, panel_width: T, degree: usize) -> Result<Self, E>
    where
        F: FnMut(T) -> Result<T, E>,
    {
        assert!(degree >= 2 && panel_width > T::zero() && upper > T::zero());
        let panels = (upper / panel_width).ceil().to_usize().unwrap_or(1).max(1);
        let nodes: Vec<T> = (0..=degree)
            .map(|j| -(T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(degree)).cos())
            .collect();
        let bary: Vec<T> = (0..=degree)
            .map(|j| {
                let sign = if j % 2 == 0 { T::one() } else { -T::one() };
                if j == 0 || j == degree {
                    sign * T::lit(0.5)
                } else {
                    sign
                }
            })
            .collect();
        let mut values = Vec::with_capacity(panels);
        for p in 0..panels {
            let a = T::from_usize_lossy(p) * panel_width;
            let half = T::lit(0.5) * panel_width;
            let mut row = Vec::with_capacity(degree + 1);
            for &x in &nodes {
                row.push(f(a + half * (x + T::one()))?);
            }
            values.push(row);
        }
        Ok(Self { upper: T::from_usize_lossy(panels) * panel_width, panel_width, nodes, bary, values })
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    /// Interpolated value; `None` outside `[0, upper]`.
    pub fn eval(&self, s: T) -> Option<T> {
        if !(s >= T::zero()) || s > self.upper {
            return None;
        }
        let mut p = (s / self.panel_width).floor().to_usize().unwrap_or(0);
        if p >= self.values.len() {
            p = self.values.len() - 1;
        }
        let a = T::from_usize_lossy(p) * self.panel_width;
        let x = (s - a) / (T::lit(0.5) * self.panel_width) - T::one();
        let row = &self.values[p];
        let mut num = T::zero();
        let mut den = T::zero();
        for ((&xj, &wj), &fj) in self.nodes.iter().zip(&self.bary).zip(row) {
            let d = x - xj;
            if d == T::zero() {
                return Some(fj);
            }
            let c = wj / d;
            num = num + c * fj;
            den = den + c;
        }
        Some(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussLegendre;

    #[test]
    fn reproduces_smooth_function() {
        let table =
            ChebyshevTable::build(|s: f64| Ok::<_, ()>((-s).exp() * (3.0 * s).cos()), 10.0, 0.5, 16).unwrap();
        for i in 0..1000 {
            let s = i as f64 * 0.00999;
            let exact = (-s).exp() * (3.0 * s).cos();
            assert!((table.eval(s).unwrap() - exact).abs() < 1e-12, "s={s}");
        }
        assert!(table.eval(11.0).is_none());
        let gl = GaussLegendre::<f64>::new(20);
        let integral = gl.integrate(|s| table.eval(s).unwrap(), 0.0, 0.5);
        assert!(integral.is_finite());
    }
}
