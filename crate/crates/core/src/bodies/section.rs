use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{boundary_bisect, golden_min, hull_area, orthonormal_complement};
use super::{check_unit, dot, lp_ball_volume, BodyError, BodyKind, NormBody};
use crate::numerics::{ball_volume, gamma, QuadratureResult};
use crate::seeds::rng_for;
use crate::Real;

/// Relative standard error above which a Monte Carlo section value is flagged unconverged.
pub const MC_TARGET_REL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionBackend {
    /// Closed form or exact geometry; fails when none exists.
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
    /// Exact when available, Monte Carlo otherwise.
    Auto { samples: usize, seed: u64 },
}

#[derive(Clone, Debug)]
enum Kind<T> {
    /// `A(t) = value` on `|t| ≤ h`.
    Flat { value: T },
    /// `A(t) = a0 (1 − |t/h|^p)^outer`.
    Power { a0: T, p: T, outer: T },
    /// Sum of `2^k` truncated powers (uniform-sum density) for cubes.
    Cube { a: Vec<T>, prefactor: T },
    /// Vertices of a 3-polytope: heights along `v` and coordinates in `v^⊥`.
    Slicer { heights: Vec<T>, plane: Vec<(T, T)> },
    Chord { body: NormBody<T>, v: Vec<T>, w: Vec<T> },
    MonteCarlo { body: NormBody<T>, v: Vec<T>, basis: Vec<Vec<T>>, samples: usize, seed: u64, delta: T },
}

/// `t ↦ A_{K,v}(t)`, the `(n−1)`-volume of `K ∩ {⟨x, v⟩ = t}`.
#[derive(Clone, Debug)]
pub struct SectionFunction<T> {
    width: T,
    kind: Kind<T>,
    breakpoints: Vec<T>,
}

fn axis_of<T: Real>(v: &[T]) -> Option<usize> {
    let big = v.iter().position(|c| (c.abs() - T::one()).abs() <= T::lit(1e-12))?;
    v.iter().enumerate().all(|(i, c)| i == big || c.abs() <= T::lit(1e-12)).then_some(big)
}

impl<T: Real> SectionFunction<T> {
    pub fn new(body: &NormBody<T>, v: &[T], backend: SectionBackend) -> Result<Self, BodyError> {
        if v.len() != body.dim {
            return Err(BodyError::DimensionMismatch { expected: body.dim, got: v.len() });
        }
        check_unit(v)?;
        let width = body.support(v);
        let exact = match backend {
            SectionBackend::MonteCarlo { .. } => None,
            _ => Self::exact_kind(body, v, width),
        };
        let (kind, breakpoints) = match (exact, backend) {
            (Some(k), _) => k,
            (None, SectionBackend::Exact) => return Err(BodyError::NoExactSection(body.label.clone())),
            (None, SectionBackend::MonteCarlo { samples, seed } | SectionBackend::Auto { samples, seed }) => {
                if samples == 0 {
                    return Err(BodyError::InvalidParameter("Monte Carlo sample count must be positive".into()));
                }
                let delta = body.bounding_radius * T::lit(0.01).max(T::from_usize_lossy(samples).powf(T::lit(-1.0 / 3.0)));
                let basis = orthonormal_complement(v);
                let kind = Kind::MonteCarlo { body: body.clone(), v: v.to_vec(), basis, samples, seed, delta };
                (kind, Vec::new())
            }
        };
        Ok(Self { width, kind, breakpoints })
    }

    fn exact_kind(body: &NormBody<T>, v: &[T], width: T) -> Option<(Kind<T>, Vec<T>)> {
        let n = body.dim;
        let s = body.scale;
        let m = T::from_usize_lossy(n.saturating_sub(1));
        let nm1 = (n - 1) as i32;
        let half_outer = m * T::lit(0.5);
        if n == 1 {
            return Some((Kind::Flat { value: T::one() }, vec![]));
        }
        let kind = match &body.kind {
            BodyKind::EuclideanBall => Kind::Power { a0: ball_volume::<T>(n - 1) * s.powi(nm1), p: T::lit(2.0), outer: half_outer },
            BodyKind::LpBall(p) if *p == T::lit(2.0) => {
                Kind::Power { a0: ball_volume::<T>(n - 1) * s.powi(nm1), p: *p, outer: half_outer }
            }
            BodyKind::Ellipsoid(_) => {
                let (_, det) = body.ellipsoid_data()?;
                let h_unit = width / s;
                let a0 = ball_volume::<T>(n - 1) * s.powi(nm1) / (h_unit * det.sqrt());
                Kind::Power { a0, p: T::lit(2.0), outer: half_outer }
            }
            BodyKind::Cube => return Some(cube_kind(n, s, v)),
            BodyKind::LpBall(p) if axis_of(v).is_some() => {
                Kind::Power { a0: lp_ball_volume(n - 1, *p) * s.powi(nm1), p: *p, outer: m / *p }
            }
            BodyKind::LpBall(p) if *p < T::one() => return None,
            _ if n == 3 && body.vertices.is_some() => {
                let verts = body.vertices()?;
                let basis = orthonormal_complement(v);
                let heights: Vec<T> = verts.iter().map(|x| dot(x, v)).collect();
                let plane = verts.iter().map(|x| (dot(x, &basis[0]), dot(x, &basis[1]))).collect();
                let mut bps: Vec<T> = heights.iter().map(|h| h.abs()).filter(|&h| h > T::zero() && h < width).collect();
                bps.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                bps.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12) * width);
                return Some((Kind::Slicer { heights, plane }, bps));
            }
            _ if n == 2 => {
                let w = vec![-v[1], v[0]];
                Kind::Chord { body: body.clone(), v: v.to_vec(), w }
            }
            _ => return None,
        };
        Some((kind, vec![]))
    }

    /// `h_K(v)`: `A(t) = 0` for `|t| > h_K(v)`.
    pub fn support_width(&self) -> T {
        self.width
    }

    /// Points in `(0, h_K(v))` where `A` is not smooth.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, Kind::MonteCarlo { .. })
    }

    /// Exact value; `None` for the Monte Carlo backend.
    pub fn exact_value(&self, t: T) -> Option<T> {
        let t = t.abs();
        if t > self.width {
            return Some(T::zero());
        }
        let h = self.width;
        Some(match &self.kind {
            Kind::Flat { value } => *value,
            Kind::Power { a0, p, outer } => {
                let base = T::one() - (t / h).powf(*p);
                if base <= T::zero() {
                    T::zero()
                } else {
                    *a0 * base.powf(*outer)
                }
            }
            Kind::Cube { a, prefactor } => {
                let k = a.len();
                let mut acc = T::zero();
                for mask in 0..1usize << k {
                    let mut shift = t;
                    let mut sign = T::one();
                    for (i, &ai) in a.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            shift = shift - ai;
                            sign = -sign;
                        } else {
                            shift = shift + ai;
                        }
                    }
                    if shift > T::zero() {
                        acc = acc + sign * shift.powi(k as i32 - 1);
                    }
                }
                (*prefactor * acc).max(T::zero())
            }
            Kind::Slicer { heights, plane } => {
                let mut pts = Vec::new();
                for i in 0..heights.len() {
                    let hi = heights[i] - t;
                    if hi == T::zero() {
                        pts.push(plane[i]);
                    }
                    for j in i + 1..heights.len() {
                        let hj = heights[j] - t;
                        if (hi < T::zero() && hj > T::zero()) || (hi > T::zero() && hj < T::zero()) {
                            let lam = hi / (hi - hj);
                            pts.push((
                                plane[i].0 + lam * (plane[j].0 - plane[i].0),
                                plane[i].1 + lam * (plane[j].1 - plane[i].1),
                            ));
                        }
                    }
                }
                hull_area(&mut pts)
            }
            Kind::Chord { body, v, w } => {
                let r = body.bounding_radius;
                let g = |u: T| body.norm(&[t * v[0] + u * w[0], t * v[1] + u * w[1]]);
                let (u0, g0) = golden_min(g, -r, r);
                if g0 > T::one() {
                    return Some(T::zero());
                }
                let far = r + r + T::one();
                let up = boundary_bisect(g, u0, far);
                let down = -boundary_bisect(|u: T| g(-u), -u0, far);
                up - down
            }
            Kind::MonteCarlo { .. } => return None,
        })
    }

    /// `A_{K,v}(t)` with an error estimate (zero for exact backends).
    pub fn value(&self, t: T) -> QuadratureResult<T> {
        if let Some(a) = self.exact_value(t) {
            return QuadratureResult { value: a, error_estimate: T::zero(), evaluations: 1, converged: true };
        }
        let Kind::MonteCarlo { body, v, basis, samples, seed, delta } = &self.kind else {
            unreachable!("exact kinds handled above")
        };
        let r = body.bounding_radius;
        let n = body.dim;
        let mut rng = rng_for(*seed, t.to64().to_bits());
        let mut x = vec![T::zero(); n];
        let mut hits = 0usize;
        for _ in 0..*samples {
            let s = t + *delta * T::lit(2.0 * rng.gen::<f64>() - 1.0);
            for k in 0..n {
                x[k] = s * v[k];
            }
            for b in basis {
                let u = r * T::lit(2.0 * rng.gen::<f64>() - 1.0);
                for k in 0..n {
                    x[k] = x[k] + u * b[k];
                }
            }
            if body.norm(&x) <= T::one() {
                hits += 1;
            }
        }
        let cross = (r + r).powi(n as i32 - 1);
        let nn = T::from_usize_lossy(*samples);
        let p = T::from_usize_lossy(hits) / nn;
        let value = cross * p;
        let sigma = if hits == 0 { cross * T::lit(3.0) / nn } else { cross * (p * (T::one() - p) / nn).sqrt() };
        QuadratureResult {
            value,
            error_estimate: sigma,
            evaluations: *samples,
            converged: sigma <= T::lit(MC_TARGET_REL) * value,
        }
    }
}

fn cube_kind<T: Real>(n: usize, s: T, v: &[T]) -> (Kind<T>, Vec<T>) {
    let drop = T::lit(1e-7);
    let a: Vec<T> = v.iter().filter(|c| c.abs() > drop).map(|c| s * c.abs()).collect();
    let k = a.len();
    let full = (s + s).powi(n as i32);
    if k == 1 {
        return (Kind::Flat { value: full / (a[0] + a[0]) }, vec![]);
    }
    let prod: T = a.iter().fold(T::one(), |acc, &x| acc * (x + x));
    let prefactor = full / (prod * gamma(T::from_usize_lossy(k)));
    let total: T = a.iter().copied().sum();
    let mut bps = Vec::new();
    for mask in 0..1usize << k {
        let shift: T = a.iter().enumerate().map(|(i, &x)| if mask >> i & 1 == 1 { -x } else { x }).sum();
        let h = shift.abs();
        if h > T::zero() && h < total {
            bps.push(h);
        }
    }
    bps.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    bps.dedup_by(|x, y| (*x - *y).abs() <= T::lit(1e-12) * total);
    (Kind::Cube { a, prefactor }, bps)
}

/// `A_{K,v}(t)` through the requested backend.
pub fn section_function<T: Real>(
    body: &NormBody<T>,
    v: &[T],
    t: T,
    backend: SectionBackend,
) -> Result<QuadratureResult<T>, BodyError> {
    Ok(SectionFunction::new(body, v, backend)?.value(t))
}
