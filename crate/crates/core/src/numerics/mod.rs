//! Scalar quadrature, special functions and small dense linear algebra.
//!
//! Everything here is a pure function of its inputs and generic over
//! [`Real`](crate::Real).

mod accel;
mod bessel;
mod gauss;
mod interp;
mod linalg;
mod oscillatory;
mod quadrature;
mod special;

pub use accel::EpsilonTable;
pub use bessel::{bessel_j, bessel_zero, BesselZeros, MAX_BESSEL_ORDER};
pub use gauss::GaussLegendre;
pub use interp::ChebyshevTable;
pub use linalg::{solve_linear, symmetric_eigen, SymmetricEigen};
pub use oscillatory::{integrate_oscillatory_bessel, integrate_oscillatory_cosine, Amplitude};
pub use quadrature::{
    integrate_adaptive, integrate_adaptive_with, integrate_semi_infinite, AdaptiveOptions,
    QuadratureResult,
};
pub use special::{ball_volume, gamma, ln_gamma, SphereConstant};

use thiserror::Error;

/// Large-`r` behaviour of a one-dimensional function on `(0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay<T> {
    /// Identically zero for `r > radius`.
    CompactSupport { radius: T },
    /// Bounded by `C·exp(-rate·r^power)` for large `r`.
    Exponential { rate: T, power: T },
    /// Bounded by `C·r^exponent` for large `r`.
    Polynomial { exponent: T },
    /// Nothing is known about the tail.
    Unknown,
}

impl<T: crate::Real> Decay<T> {
    /// Support radius, if compact.
    pub fn support(&self) -> Option<T> {
        match *self {
            Decay::CompactSupport { radius } => Some(radius),
            _ => None,
        }
    }

    /// True when the function tends to zero at infinity.
    pub fn vanishes_at_infinity(&self) -> Option<bool> {
        match *self {
            Decay::CompactSupport { .. } | Decay::Exponential { .. } => Some(true),
            Decay::Polynomial { exponent } => Some(exponent < T::zero()),
            Decay::Unknown => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("integrand is not finite ({value}) at abscissa {abscissa}")]
    NonFinite { abscissa: f64, value: f64 },
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("endpoint exponent {0} must exceed -1")]
    EndpointExponent(f64),
    #[error("amplitude neither decays nor has compact support: {0}")]
    NotDecaying(String),
    #[error("Bessel order {nu} or argument {x} outside supported range")]
    BesselRange { nu: f64, x: f64 },
    #[error("Newton iteration for zero {k} of J_{nu} did not converge")]
    ZeroNotConverged { nu: f64, k: usize },
    #[error("singular linear system")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
