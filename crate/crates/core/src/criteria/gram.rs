use rand::Rng;
use serde::Serialize;

use super::{Classification, CriteriaError, Verdict, Witness};
use crate::numerics::symmetric_eigen;
use crate::seeds::rng_for;

/// Largest Gram matrix the dense Jacobi solver is used on.
pub const MAX_GRAM_POINTS: usize = 200;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_SWEEPS: usize = 30;

/// Points `x₁..x_k` in ℝⁿ, pairwise distinct, with optional coefficients
/// for an extra quadratic-form evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramSpec {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub coefficients: Option<Vec<f64>>,
}

impl GramSpec {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, coefficients: Option<Vec<f64>>) -> Result<Self, CriteriaError> {
        if dim == 0 {
            return Err(CriteriaError::InvalidArgument("dimension must be at least 1".into()));
        }
        if points.is_empty() || points.len() > MAX_GRAM_POINTS {
            return Err(CriteriaError::InvalidArgument(format!(
                "need 1..={MAX_GRAM_POINTS} points, got {}",
                points.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
            return Err(CriteriaError::InvalidArgument(format!("bad point {p:?} for dimension {dim}")));
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i] == points[j] {
                    return Err(CriteriaError::InvalidArgument(format!("points {j} and {i} coincide")));
                }
            }
        }
        if let Some(c) = &coefficients {
            if c.len() != points.len() || c.iter().any(|x| !x.is_finite()) {
                return Err(CriteriaError::InvalidArgument("one finite coefficient per point is required".into()));
            }
        }
        Ok(Self { dim, points, coefficients })
    }

    /// `k` points uniform in `[−half_width, half_width]ⁿ`.
    pub fn random(dim: usize, k: usize, seed: u64, half_width: f64) -> Result<Self, CriteriaError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(CriteriaError::InvalidArgument(format!("half width must be positive, got {half_width}")));
        }
        let mut rng = rng_for(seed, 0);
        let points = (0..k).map(|_| (0..dim).map(|_| rng.gen_range(-half_width..=half_width)).collect()).collect();
        Self::new(dim, points, None)
    }

    /// `k` equispaced points on `[a, b]` in dimension 1.
    pub fn grid_1d(a: f64, b: f64, k: usize) -> Result<Self, CriteriaError> {
        if !(b > a) || k < 2 {
            return Err(CriteriaError::InvalidArgument(format!("grid needs a < b and k ≥ 2, got [{a}, {b}], k={k}")));
        }
        let step = (b - a) / (k - 1) as f64;
        Self::new(1, (0..k).map(|i| vec![if i + 1 == k { b } else { a + step * i as f64 }]).collect(), None)
    }

    /// Cartesian lattice with `per_side` points per axis on `[−half_width, half_width]ⁿ`.
    pub fn lattice(dim: usize, per_side: usize, half_width: f64) -> Result<Self, CriteriaError> {
        let total = per_side.checked_pow(dim as u32).filter(|&t| t <= MAX_GRAM_POINTS);
        if per_side < 2 || total.is_none() {
            return Err(CriteriaError::InvalidArgument(format!(
                "lattice of {per_side}^{dim} points exceeds {MAX_GRAM_POINTS} or is degenerate"
            )));
        }
        let axis = Self::grid_1d(-half_width, half_width, per_side)?;
        let mut points = vec![Vec::new()];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p: Vec<f64>| axis.points.iter().map(move |a| [p.clone(), a.clone()].concat()))
                .collect();
        }
        Self::new(dim, points, None)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn quadratic_form(m: &[Vec<f64>], c: &[f64]) -> f64 {
    m.iter().zip(c).map(|(row, ci)| ci * row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()).sum()
}

/// Minimum eigenvalue of `M_{ij} = F(x_i − x_j)` against `−tol·‖M‖`.
pub fn gram_test(f: &(dyn Fn(&[f64]) -> f64 + Sync), spec: &GramSpec, tol: f64) -> Result<Verdict, CriteriaError> {
    let k = spec.len();
    if k > MAX_GRAM_POINTS {
        return Err(CriteriaError::InvalidArgument(format!("{k} points exceed the cap of {MAX_GRAM_POINTS}")));
    }
    let origin = vec![0.0; spec.dim];
    let f0 = f(&origin);
    if !f0.is_finite() {
        return Err(CriteriaError::InvalidArgument(format!("F(0) = {f0} is not finite")));
    }
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let d = difference(&spec.points[i], &spec.points[j]);
            let (a, b) = (f(&d), f(&d.iter().map(|x| -x).collect::<Vec<_>>()));
            if !(a.is_finite() && b.is_finite()) {
                return Err(CriteriaError::InvalidArgument(format!("non-finite entry at ({i}, {j})")));
            }
            let s = 0.5 * (a + b);
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    let eig = symmetric_eigen(&m, JACOBI_TOL, JACOBI_SWEEPS);
    let norm = eig.values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut v = Verdict::new("gram", tol);
    v.min_value = eig.values[0];
    v.scale = norm;
    v.threshold = tol * norm;
    v.budget.evaluations = k * (k + 1);
    v.budget.points = k;
    let c = &eig.vectors[0];
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| c[b].abs().total_cmp(&c[a].abs()));
    let top = order[0];
    v.witness = Some(Witness {
        label: format!("eigenvector; largest coefficient at point {top}"),
        point: spec.points[top].clone(),
        value: quadratic_form(&m, c),
    });
    v.notes.push(format!(
        "heaviest points {:?} with coefficients {:?}",
        &order[..k.min(3)],
        order[..k.min(3)].iter().map(|&i| c[i]).collect::<Vec<_>>()
    ));
    if !eig.converged {
        v.notes.push(format!("Jacobi stopped after {} sweeps without converging", eig.sweeps));
    }
    if let Some(coeffs) = &spec.coefficients {
        v.notes.push(format!("quadratic form at the given coefficients: {:e}", quadratic_form(&m, coeffs)));
    }
    // rounding in the rotations is of order k·ε·‖M‖
    let noise = 4.0 * k as f64 * f64::EPSILON * norm;
    v.classify(&[], noise, eig.converged);
    Ok(v)
}

/// `‖x‖_p`, including `p = ∞` and the quasi-norms `0 < p < 1`.
pub fn norm_p(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    } else if p == 2.0 {
        x.iter().map(|c| c * c).sum::<f64>().sqrt()
    } else if p == 1.0 {
        x.iter().map(|c| c.abs()).sum()
    } else {
        let big = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if big == 0.0 {
            return 0.0;
        }
        big * x.iter().map(|c| (c.abs() / big).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    pub verdict: Verdict,
}

/// Gram tests of `e^{−‖x‖_p^q}` over the `(p, q)` grid on one point set.
pub fn sweep_schoenberg(
    n: usize,
    p_grid: &[f64],
    q_grid: &[f64],
    template: &GramSpec,
    tol: f64,
) -> Result<Vec<SweepRow>, CriteriaError> {
    if p_grid.is_empty() || q_grid.is_empty() {
        return Err(CriteriaError::InvalidArgument("empty p or q grid".into()));
    }
    if template.dim != n {
        return Err(CriteriaError::InvalidArgument(format!("template is in dimension {}, sweep in {n}", template.dim)));
    }
    if let Some(p) = p_grid.iter().find(|&&p| !(p > 0.0)) {
        return Err(CriteriaError::InvalidArgument(format!("p must be in (0, ∞], got {p}")));
    }
    if let Some(q) = q_grid.iter().find(|&&q| !(q > 0.0 && q <= 4.0)) {
        return Err(CriteriaError::InvalidArgument(format!("q must be in (0, 4], got {q}")));
    }
    let mut rows = Vec::with_capacity(p_grid.len() * q_grid.len());
    for &p in p_grid {
        for &q in q_grid {
            let f = move |x: &[f64]| (-norm_p(x, p).powf(q)).exp();
            let mut verdict = gram_test(&f, template, tol)?;
            verdict.criterion = format!("schoenberg(p={p},q={q})");
            rows.push(SweepRow { p, q, verdict });
        }
    }
    Ok(rows)
}

impl SweepRow {
    pub fn classification(&self) -> Classification {
        self.verdict.classification
    }
}
