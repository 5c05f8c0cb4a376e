use crate::Real;

/// Wynn's epsilon algorithm over a growing sequence of partial sums.
///
/// Only the last anti-diagonal of the table is kept, so each new term costs
/// O(n). Even columns hold the extrapolated limits.
#[derive(Clone, Debug, Default)]
pub struct EpsilonTable<T> {
    diagonal: Vec<T>,
    estimates: Vec<T>,
}

impl<T: Real> EpsilonTable<T> {
    pub fn new() -> Self {
        Self { diagonal: Vec::new(), estimates: Vec::new() }
    }

    /// Feeds the next partial sum and returns the current best limit.
    pub fn push(&mut self, s: T) -> T {
        let mut next = Vec::with_capacity(self.diagonal.len() + 1);
        next.push(s);
        for j in 1..=self.diagonal.len() {
            let prev_same = self.diagonal[j - 1];
            let diff = next[j - 1] - prev_same;
            let before = if j >= 2 { self.diagonal[j - 2] } else { T::zero() };
            if diff == T::zero() || !diff.is_finite() {
                break;
            }
            let e = before + T::one() / diff;
            if !e.is_finite() {
                break;
            }
            next.push(e);
        }
        let best_col = (next.len() - 1) & !1;
        let estimate = next[best_col];
        self.diagonal = next;
        self.estimates.push(estimate);
        estimate
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    /// Spread of the last three limit estimates, a conservative error proxy.
    pub fn error_estimate(&self) -> T {
        let n = self.estimates.len();
        if n < 3 {
            return T::infinity();
        }
        let e = &self.estimates[n - 3..];
        (e[2] - e[1]).abs() + (e[2] - e[0]).abs()
    }

    pub fn last(&self) -> Option<T> {
        self.estimates.last().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accelerates_alternating_harmonic() {
        let mut table = EpsilonTable::new();
        let mut s = 0.0f64;
        for k in 1..=20 {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s += sign / k as f64;
            table.push(s);
        }
        let exact = 2.0f64.ln();
        assert!((table.last().unwrap() - exact).abs() < 1e-12);
        assert!(table.error_estimate() < 1e-10);
    }

    #[test]
    fn accelerates_leibniz() {
        let mut table = EpsilonTable::new();
        let mut s = 0.0f64;
        for k in 0..16 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign / (2 * k + 1) as f64;
            table.push(s);
        }
        assert!((4.0 * table.last().unwrap() - std::f64::consts::PI).abs() < 1e-11);
    }
}
