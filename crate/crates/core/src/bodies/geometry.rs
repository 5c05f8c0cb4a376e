use super::{dot, euclid, BodyError};
use crate::numerics::solve_linear;
use crate::Real;

/// Orthonormal basis of `v^⊥` (Gram–Schmidt on the coordinate axes).
pub fn orthonormal_complement<T: Real>(v: &[T]) -> Vec<Vec<T>> {
    let n = v.len();
    let mut basis: Vec<Vec<T>> = vec![v.to_vec()];
    let mut axes: Vec<usize> = (0..n).collect();
    // axes least aligned with v first, for conditioning
    axes.sort_by(|&i, &j| v[i].abs().partial_cmp(&v[j].abs()).expect("finite direction"));
    for i in axes {
        if basis.len() == n {
            break;
        }
        let mut w = vec![T::zero(); n];
        w[i] = T::one();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                for k in 0..n {
                    w[k] = w[k] - c * b[k];
                }
            }
        }
        let len = euclid(&w);
        if len > T::lit(1e-6) {
            basis.push(w.into_iter().map(|c| c / len).collect());
        }
    }
    basis.remove(0);
    basis
}

fn combinations(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::with_capacity(k), f);
}

fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (m as u128 - i) / (i + 1);
    }
    r
}

/// Vertices of `{x : |⟨a_i, x⟩| ≤ 1}` by brute force over `n`-subsets of
/// the constraints and sign patterns.
pub(crate) fn polytope_vertices<T: Real>(normals: &[Vec<T>], cap: u128) -> Result<Vec<Vec<T>>, BodyError> {
    let n = normals[0].len();
    let m = normals.len();
    let candidates = binomial(m, n).saturating_mul(1u128 << n.min(100));
    if candidates > cap {
        return Err(BodyError::InvalidParameter(format!(
            "{m} constraint pairs in dimension {n} is too many for vertex enumeration"
        )));
    }
    let tol = T::lit(1e-9);
    let mut vertices: Vec<Vec<T>> = Vec::new();
    let mut bounded = false;
    combinations(m, n, &mut |idx| {
        let a: Vec<Vec<T>> = idx.iter().map(|&i| normals[i].clone()).collect();
        for signs in 0..1usize << n {
            let b: Vec<T> = (0..n).map(|k| if signs >> k & 1 == 1 { -T::one() } else { T::one() }).collect();
            let Ok(x) = solve_linear(&a, &b) else { break };
            bounded = true;
            if normals.iter().all(|row| dot(row, &x).abs() <= T::one() + tol) {
                let scale = euclid(&x).max(T::one());
                if !vertices.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (*p - *q).abs() <= tol * scale)) {
                    vertices.push(x);
                }
            }
        }
    });
    if !bounded || vertices.is_empty() {
        return Err(BodyError::InvalidParameter("polytope normals must span ℝⁿ (body is unbounded)".into()));
    }
    Ok(vertices)
}

/// Area of the convex hull of planar points (monotone chain + shoelace).
pub(crate) fn hull_area<T: Real>(points: &mut [(T, T)]) -> T {
    if points.len() < 3 {
        return T::zero();
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    let cross = |o: (T, T), a: (T, T), b: (T, T)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(T, T)> = Vec::with_capacity(2 * points.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(T, T)>> =
            if pass == 0 { Box::new(points.iter()) } else { Box::new(points.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let k = hull.len();
    let mut twice = T::zero();
    for i in 0..k {
        let (a, b) = (hull[i], hull[(i + 1) % k]);
        twice = twice + a.0 * b.1 - a.1 * b.0;
    }
    (twice * T::lit(0.5)).abs()
}

/// Minimiser of a convex function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_min<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> (T, T) {
    let g = T::lit(0.618_033_988_749_894_8);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= T::epsilon() * (lo.abs() + hi.abs() + T::one()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = T::lit(0.5) * (lo + hi);
    (x, f(x))
}

/// Largest `u` in `[inside, outside]` with `g(u) ≤ 1`, given `g(inside) ≤ 1 < g(outside)`.
pub(crate) fn boundary_bisect<T: Real>(g: impl Fn(T) -> T, mut inside: T, mut outside: T) -> T {
    for _ in 0..200 {
        let mid = T::lit(0.5) * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if g(mid) <= T::one() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    T::lit(0.5) * (inside + outside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = [0.6f64, 0.0, 0.8];
        let b = orthonormal_complement(&v);
        assert_eq!(b.len(), 2);
        for (i, x) in b.iter().enumerate() {
            assert!(dot(x, &v).abs() < 1e-15);
            assert!((dot(x, x) - 1.0).abs() < 1e-15);
            for y in &b[i + 1..] {
                assert!(dot(x, y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let mut pts = vec![(0.0f64, 0.0f64), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0), (1.0, 0.5)];
        assert!((hull_area(&mut pts) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_vertices_from_normals() {
        let normals: Vec<Vec<f64>> = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(polytope_vertices(&normals, 1000).unwrap().len(), 8);
        let flat = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!(polytope_vertices::<f64>(&flat, 1000).is_err());
    }
}
