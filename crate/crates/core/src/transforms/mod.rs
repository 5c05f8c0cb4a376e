//! Fourier transforms of even and radial functions, analytic test functions,
//! and the pairing `⟨f(‖·‖_K), φ̂⟩` computed along two independent routes.
//!
//! Convention: `f̂(ξ) = ∫ f(x) e^{−i⟨x,ξ⟩} dx`.

mod fourier;
mod pairing;
mod testfn;

use serde::Serialize;
use thiserror::Error;

use crate::bodies::BodyError;
use crate::numerics::NumericsError;
use crate::profiles::ProfileError;
use crate::Real;

pub use fourier::{ball_indicator_ft, ft_even_1d, radial_ft};
pub use pairing::{
    dilation_ft_check, pairing, pairing_direct, pairing_sectional, pairing_sectional_with, OmegaTransform,
    PairingEstimate, PairingOptions, Route,
};
pub(crate) use pairing::stratified;
pub use testfn::{
    integral_radon_identity, radon, random_direction, slice_identity_check, slice_trials, RadonIdentity, SliceTrial,
    TestFunction,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("refused: {0}")]
    Refused(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// Sorted frequencies `ξ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyGrid<T> {
    pub points: Vec<T>,
    /// `log`, `lin` or `explicit`.
    pub scale: String,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn log(a: T, b: T, count: usize) -> Result<Self, TransformError> {
        if !(a > T::zero() && b > a && a.is_finite() && b.is_finite()) || count < 2 {
            return Err(TransformError::InvalidArgument(format!("log grid needs 0 < {a} < {b} and N ≥ 2")));
        }
        Ok(Self { points: crate::profiles::log_grid(a, b, count), scale: "log".into() })
    }

    pub fn lin(a: T, b: T, count: usize) -> Result<Self, TransformError> {
        if !(a >= T::zero() && b > a && b.is_finite()) || count < 2 {
            return Err(TransformError::InvalidArgument(format!("linear grid needs 0 ≤ {a} < {b} and N ≥ 2")));
        }
        let step = (b - a) / T::from_usize_lossy(count - 1);
        let points = (0..count).map(|i| if i + 1 == count { b } else { a + step * T::from_usize_lossy(i) }).collect();
        Ok(Self { points, scale: "lin".into() })
    }

    pub fn explicit(points: Vec<T>) -> Result<Self, TransformError> {
        if points.is_empty() {
            return Err(TransformError::InvalidArgument("empty frequency grid".into()));
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(TransformError::InvalidArgument("grid must be strictly increasing".into()));
            }
        }
        if points.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(TransformError::InvalidArgument("grid points must be finite and non-negative".into()));
        }
        Ok(Self { points, scale: "explicit".into() })
    }

    /// `log:a:b:N`, `lin:a:b:N`, or a comma separated list.
    pub fn parse(text: &str) -> Result<Self, TransformError> {
        let bad = || TransformError::InvalidArgument(format!("cannot parse grid `{text}`"));
        let num = |s: &str| s.trim().parse::<f64>().map(T::lit).map_err(|_| bad());
        let parts: Vec<&str> = text.split(':').collect();
        match parts.as_slice() {
            [kind, a, b, n] if *kind == "log" || *kind == "lin" => {
                let count = n.trim().parse::<usize>().map_err(|_| bad())?;
                if *kind == "log" {
                    Self::log(num(a)?, num(b)?, count)
                } else {
                    Self::lin(num(a)?, num(b)?, count)
                }
            }
            [single] => Self::explicit(single.split(',').map(num).collect::<Result<_, _>>()?),
            _ => Err(bad()),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = FrequencyGrid::<f64>::parse("log:0.01:50:200").unwrap();
        assert_eq!(g.len(), 200);
        assert!((g.points[0] - 0.01).abs() < 1e-15 && (g.points[199] - 50.0).abs() < 1e-12);
        let l = FrequencyGrid::<f64>::parse("lin:0:1:5").unwrap();
        assert_eq!(l.points, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(FrequencyGrid::<f64>::parse("1,0.5").is_err());
        assert!(FrequencyGrid::<f64>::parse("log:0:1:5").is_err());
        assert_eq!(FrequencyGrid::<f64>::parse("0.5,2").unwrap().scale, "explicit");
    }
}
