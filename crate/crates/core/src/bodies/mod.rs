//! Symmetric convex bodies given by their Minkowski functionals, with
//! parallel section functions, uniform sampling and the Brunn check.

mod geometry;
mod grammar;
mod sampling;
mod section;

pub use geometry::orthonormal_complement;
pub use grammar::{parse_body, read_polytope_file};
pub use sampling::{check_brunn, sample_uniform, UniformSample};
pub use section::{section_function, SectionBackend, SectionFunction, MC_TARGET_REL};

use serde::Serialize;
use thiserror::Error;

use crate::grammar::ParseError;
use crate::numerics::{ball_volume, gamma, symmetric_eigen, NumericsError};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("invalid body parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read polytope file {path}: {message}")]
    Io { path: String, message: String },
    #[error("expected a point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction must be a unit vector (|v| = {0})")]
    NotUnitVector(f64),
    #[error("no exact section backend for {0}")]
    NoExactSection(String),
    #[error("rejection sampling acceptance rate {rate:.2e} is below 1e-4; use a lower dimension or another backend")]
    LowAcceptance { rate: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind<T> {
    EuclideanBall,
    /// `ℓ_p` unit ball; `p = ∞` is stored as [`BodyKind::Cube`], `p < 1` is a star body.
    LpBall(T),
    /// `[−1, 1]ⁿ`.
    Cube,
    /// `{x : |⟨a_i, x⟩| ≤ 1 for all i}`.
    Polytope(Vec<Vec<T>>),
    /// `{x : xᵀ M x ≤ 1}`.
    Ellipsoid(Vec<Vec<T>>),
}

#[derive(Clone, Debug)]
struct EllipsoidData<T> {
    inverse: Vec<Vec<T>>,
    det: T,
}

/// `scale · K₀` for a unit body `K₀` of the given kind.
#[derive(Clone, Debug)]
pub struct NormBody<T> {
    pub dim: usize,
    pub kind: BodyKind<T>,
    pub scale: T,
    pub bounding_radius: T,
    pub label: String,
    ellipsoid: Option<EllipsoidData<T>>,
    vertices: Option<Vec<Vec<T>>>,
}

const MAX_VERTEX_CANDIDATES: u128 = 5_000_000;

fn check_dim(n: usize) -> Result<(), BodyError> {
    if n == 0 || n > 64 {
        return Err(BodyError::InvalidParameter(format!("dimension must be in 1..=64, got {n}")));
    }
    Ok(())
}

impl<T: Real> NormBody<T> {
    fn unit(dim: usize, kind: BodyKind<T>, radius: T, label: String) -> Self {
        Self { dim, kind, scale: T::one(), bounding_radius: radius, label, ellipsoid: None, vertices: None }
    }

    pub fn ball(n: usize) -> Result<Self, BodyError> {
        check_dim(n)?;
        Ok(Self::unit(n, BodyKind::EuclideanBall, T::one(), format!("ball({n})")))
    }

    pub fn cube(n: usize) -> Result<Self, BodyError> {
        check_dim(n)?;
        let mut b = Self::unit(n, BodyKind::Cube, T::from_usize_lossy(n).sqrt(), format!("cube({n})"));
        if n <= 12 {
            b.vertices = Some(
                (0..1usize << n)
                    .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { T::one() } else { -T::one() }).collect())
                    .collect(),
            );
        }
        Ok(b)
    }

    pub fn lp(n: usize, p: T) -> Result<Self, BodyError> {
        check_dim(n)?;
        if !(p > T::zero()) || p.is_nan() {
            return Err(BodyError::InvalidParameter(format!("p must be positive, got {p}")));
        }
        if p.is_infinite() {
            let mut c = Self::cube(n)?;
            c.label = format!("lp({n},inf)");
            return Ok(c);
        }
        let two = T::lit(2.0);
        let radius = if p > two {
            T::from_usize_lossy(n).powf(T::lit(0.5) - T::one() / p)
        } else {
            T::one()
        };
        let mut b = Self::unit(n, BodyKind::LpBall(p), radius, format!("lp({n},{p})"));
        if p == T::one() {
            let mut v = Vec::with_capacity(2 * n);
            for i in 0..n {
                for s in [T::one(), -T::one()] {
                    let mut x = vec![T::zero(); n];
                    x[i] = s;
                    v.push(x);
                }
            }
            b.vertices = Some(v);
        }
        Ok(b)
    }

    /// Symmetric polytope `{x : |⟨a_i, x⟩| ≤ 1}`; must be bounded.
    pub fn polytope(normals: Vec<Vec<T>>) -> Result<Self, BodyError> {
        let n = normals.first().map_or(0, Vec::len);
        check_dim(n)?;
        for a in &normals {
            if a.len() != n {
                return Err(BodyError::DimensionMismatch { expected: n, got: a.len() });
            }
            if a.iter().any(|x| !x.is_finite()) {
                return Err(BodyError::InvalidParameter("non-finite polytope normal".into()));
            }
        }
        let vertices = geometry::polytope_vertices(&normals, MAX_VERTEX_CANDIDATES)?;
        let radius = vertices
            .iter()
            .map(|x| x.iter().map(|&c| c * c).sum::<T>().sqrt())
            .fold(T::zero(), T::max);
        let m = normals.len();
        let mut b = Self::unit(n, BodyKind::Polytope(normals), radius, format!("polytope({n}d,{m} pairs)"));
        b.vertices = Some(vertices);
        Ok(b)
    }

    /// `{x : xᵀ M x ≤ 1}` for a symmetric positive-definite `M`.
    pub fn ellipsoid(m: Vec<Vec<T>>) -> Result<Self, BodyError> {
        let n = m.len();
        check_dim(n)?;
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(BodyError::DimensionMismatch { expected: n, got: row.len() });
            }
            for j in 0..n {
                if (row[j] - m[j][i]).abs() > T::lit(1e-12) * (row[j].abs() + T::one()) {
                    return Err(BodyError::InvalidParameter("ellipsoid matrix must be symmetric".into()));
                }
            }
        }
        let eig = symmetric_eigen(&m, T::lit(1e-13), 30);
        let lmin = eig.values[0];
        if !(lmin > T::zero()) {
            return Err(BodyError::InvalidParameter(format!("ellipsoid matrix must be positive definite (λ_min = {lmin})")));
        }
        let mut inverse = vec![vec![T::zero(); n]; n];
        for (lam, vec) in eig.values.iter().zip(&eig.vectors) {
            for i in 0..n {
                for j in 0..n {
                    inverse[i][j] = inverse[i][j] + vec[i] * vec[j] / *lam;
                }
            }
        }
        let det = eig.values.iter().fold(T::one(), |a, &b| a * b);
        let mut b = Self::unit(n, BodyKind::Ellipsoid(m), T::one() / lmin.sqrt(), format!("ellipsoid({n})"));
        b.ellipsoid = Some(EllipsoidData { inverse, det });
        Ok(b)
    }

    /// `λK`.
    pub fn dilate(&self, lambda: T) -> Result<Self, BodyError> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(BodyError::InvalidParameter(format!("dilation factor must be positive, got {lambda}")));
        }
        let mut b = self.clone();
        b.scale = self.scale * lambda;
        b.bounding_radius = self.bounding_radius * lambda;
        b.label = format!("dilate({},{lambda})", self.label);
        Ok(b)
    }

    fn check_point(&self, x: &[T]) -> Result<(), BodyError> {
        if x.len() != self.dim {
            return Err(BodyError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Minkowski functional of the unit body (before dilation).
    fn unit_norm(&self, x: &[T]) -> T {
        match &self.kind {
            BodyKind::EuclideanBall => euclid(x),
            BodyKind::Cube => x.iter().fold(T::zero(), |m, c| m.max(c.abs())),
            BodyKind::LpBall(p) => {
                let big = x.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                if big == T::zero() {
                    return T::zero();
                }
                let s: T = x.iter().map(|c| (c.abs() / big).powf(*p)).sum();
                big * s.powf(T::one() / *p)
            }
            BodyKind::Polytope(normals) => normals.iter().fold(T::zero(), |m, a| m.max(dot(a, x).abs())),
            BodyKind::Ellipsoid(m) => {
                let q: T = (0..x.len()).map(|i| x[i] * dot(&m[i], x)).sum();
                q.max(T::zero()).sqrt()
            }
        }
    }

    /// `‖x‖_K`. Panics on a dimension mismatch; see [`NormBody::try_norm`].
    pub fn norm(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        self.unit_norm(x) / self.scale
    }

    pub fn try_norm(&self, x: &[T]) -> Result<T, BodyError> {
        self.check_point(x)?;
        Ok(self.norm(x))
    }

    /// `ρ_K(v) = 1/‖v‖_K`.
    pub fn radial(&self, v: &[T]) -> Result<T, BodyError> {
        self.check_point(v)?;
        check_unit(v)?;
        Ok(T::one() / self.norm(v))
    }

    /// `h_K(v) = max_{x∈K} ⟨x, v⟩`.
    pub fn support(&self, v: &[T]) -> T {
        let unit = match &self.kind {
            BodyKind::EuclideanBall => euclid(v),
            BodyKind::Cube => v.iter().map(|c| c.abs()).sum(),
            BodyKind::LpBall(p) if *p > T::one() => {
                let q = *p / (*p - T::one());
                let big = v.iter().fold(T::zero(), |m, c| m.max(c.abs()));
                if big == T::zero() {
                    T::zero()
                } else {
                    big * v.iter().map(|c| (c.abs() / big).powf(q)).sum::<T>().powf(T::one() / q)
                }
            }
            // p ≤ 1: the convex hull is the cross-polytope
            BodyKind::LpBall(_) => v.iter().fold(T::zero(), |m, c| m.max(c.abs())),
            BodyKind::Polytope(_) => self
                .vertices
                .as_ref()
                .expect("polytopes carry vertices")
                .iter()
                .map(|x| dot(x, v))
                .fold(T::zero(), T::max),
            BodyKind::Ellipsoid(_) => {
                let inv = &self.ellipsoid.as_ref().expect("ellipsoid data").inverse;
                (0..v.len()).map(|i| v[i] * dot(&inv[i], v)).sum::<T>().max(T::zero()).sqrt()
            }
        };
        unit * self.scale
    }

    /// Half-widths of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> Vec<T> {
        (0..self.dim)
            .map(|j| {
                let mut e = vec![T::zero(); self.dim];
                e[j] = T::one();
                self.support(&e)
            })
            .collect()
    }

    /// Exact `n`-volume where a closed form is known.
    pub fn volume(&self) -> Option<T> {
        let n = self.dim;
        let sn = self.scale.powi(n as i32);
        let unit = match &self.kind {
            BodyKind::EuclideanBall => ball_volume::<T>(n),
            BodyKind::Cube => T::lit(2.0).powi(n as i32),
            BodyKind::LpBall(p) => lp_ball_volume(n, *p),
            BodyKind::Ellipsoid(_) => ball_volume::<T>(n) / self.ellipsoid.as_ref()?.det.sqrt(),
            BodyKind::Polytope(_) => return None,
        };
        Some(unit * sn)
    }

    /// True for bodies whose boundary is convex (all kinds except `ℓ_p`, `p < 1`).
    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, BodyKind::LpBall(p) if p < T::one())
    }

    pub(crate) fn vertices(&self) -> Option<Vec<Vec<T>>> {
        self.vertices.as_ref().map(|vs| vs.iter().map(|x| x.iter().map(|&c| c * self.scale).collect()).collect())
    }

    pub(crate) fn ellipsoid_data(&self) -> Option<(&Vec<Vec<T>>, T)> {
        self.ellipsoid.as_ref().map(|e| (&e.inverse, e.det))
    }
}

/// `vol_d(B_p^d) = (2Γ(1 + 1/p))^d / Γ(1 + d/p)`.
pub fn lp_ball_volume<T: Real>(d: usize, p: T) -> T {
    if d == 0 {
        return T::one();
    }
    let dd = T::from_usize_lossy(d);
    (T::lit(2.0) * gamma(T::one() + T::one() / p)).powi(d as i32) / gamma(T::one() + dd / p)
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn euclid<T: Real>(x: &[T]) -> T {
    let big = x.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    if big == T::zero() {
        return T::zero();
    }
    big * x.iter().map(|&c| (c / big) * (c / big)).sum::<T>().sqrt()
}

pub(crate) fn check_unit<T: Real>(v: &[T]) -> Result<(), BodyError> {
    let len = euclid(v);
    if (len - T::one()).abs() > T::lit(1e-9) {
        return Err(BodyError::NotUnitVector(len.to64()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_examples() {
        let cube = NormBody::<f64>::cube(3).unwrap();
        assert_eq!(cube.norm(&[1.0, -0.5, 0.25]), 1.0);
        let l1 = NormBody::<f64>::lp(2, 1.0).unwrap();
        assert!((l1.norm(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        let ball = NormBody::<f64>::ball(2).unwrap();
        assert_eq!(ball.norm(&[3.0, 4.0]), 5.0);
        assert!(ball.try_norm(&[1.0]).is_err());
    }

    #[test]
    fn radial_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cube = NormBody::<f64>::cube(2).unwrap();
        assert_eq!(cube.radial(&[1.0, 0.0]).unwrap(), 1.0);
        assert!((cube.radial(&[h, h]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let l1 = NormBody::<f64>::lp(2, 1.0).unwrap();
        assert!((l1.radial(&[h, h]).unwrap() - h).abs() < 1e-15);
        assert!(cube.radial(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn bounding_radius_and_box() {
        let e = NormBody::<f64>::ellipsoid(vec![vec![4.0, 0.0], vec![0.0, 0.25]]).unwrap();
        assert!((e.bounding_radius - 2.0).abs() < 1e-12);
        let bb = e.bounding_box();
        assert!((bb[0] - 0.5).abs() < 1e-12 && (bb[1] - 2.0).abs() < 1e-12);
        let oct = NormBody::<f64>::polytope(vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, 1.0, -1.0],
            vec![1.0, -1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
        ])
        .unwrap();
        assert!((oct.bounding_radius - 1.0).abs() < 1e-12);
        assert_eq!(oct.vertices.as_ref().unwrap().len(), 6);
        let l4 = NormBody::<f64>::lp(2, 4.0).unwrap();
        assert!((l4.bounding_radius - 2f64.powf(0.25)).abs() < 1e-12);
        assert!((NormBody::<f64>::cube(4).unwrap().dilate(0.5).unwrap().bounding_radius - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_bodies_rejected() {
        assert!(NormBody::<f64>::ball(0).is_err());
        assert!(NormBody::<f64>::lp(2, -1.0).is_err());
        assert!(NormBody::<f64>::ellipsoid(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        assert!(NormBody::<f64>::polytope(vec![vec![1.0, 0.0]]).is_err());
        assert!(NormBody::<f64>::cube(2).unwrap().dilate(0.0).is_err());
    }

    #[test]
    fn volumes() {
        assert!((NormBody::<f64>::lp(3, 1.0).unwrap().volume().unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!((NormBody::<f64>::lp(2, 2.0).unwrap().volume().unwrap() - std::f64::consts::PI).abs() < 1e-12);
        let e = NormBody::<f64>::ellipsoid(vec![vec![4.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((e.volume().unwrap() - std::f64::consts::PI / 2.0).abs() < 1e-12);
    }
}
