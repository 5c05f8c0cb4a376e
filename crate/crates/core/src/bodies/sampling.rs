use rand::Rng;

use super::section::{SectionBackend, SectionFunction};
use super::{BodyError, NormBody};
use crate::report::{HypothesisReport, Tri};
use crate::seeds::rng_for;
use crate::Real;

/// Points drawn uniformly from a body, with the rejection acceptance rate.
#[derive(Clone, Debug)]
pub struct UniformSample<T> {
    pub points: Vec<Vec<T>>,
    pub acceptance_rate: f64,
    pub proposals: usize,
}

const MIN_ACCEPTANCE: f64 = 1e-4;
const ACCEPTANCE_PROBE: usize = 100_000;

/// I.i.d. uniform points in `K` by rejection from its bounding box.
pub fn sample_uniform<T: Real>(body: &NormBody<T>, count: usize, seed: u64) -> Result<UniformSample<T>, BodyError> {
    if count == 0 {
        return Err(BodyError::InvalidParameter("sample count must be at least 1".into()));
    }
    let half = body.bounding_box();
    let mut rng = rng_for(seed, 0);
    let mut points = Vec::with_capacity(count);
    let mut proposals = 0usize;
    let mut x = vec![T::zero(); body.dim];
    while points.len() < count {
        for (xi, &h) in x.iter_mut().zip(&half) {
            *xi = h * T::lit(2.0 * rng.gen::<f64>() - 1.0);
        }
        proposals += 1;
        if body.norm(&x) <= T::one() {
            points.push(x.clone());
        }
        if proposals >= ACCEPTANCE_PROBE && (points.len() as f64) < MIN_ACCEPTANCE * proposals as f64 {
            return Err(BodyError::LowAcceptance { rate: points.len() as f64 / proposals as f64 });
        }
    }
    Ok(UniformSample { points, acceptance_rate: count as f64 / proposals as f64, proposals })
}

/// Brunn's principle on a grid: `A` non-increasing for `t > 0` and
/// `A^{1/(n−1)}` concave, both up to three backend standard errors.
pub fn check_brunn<T: Real>(
    body: &NormBody<T>,
    v: &[T],
    grid: &[T],
    backend: SectionBackend,
) -> Result<HypothesisReport, BodyError> {
    let name = "brunn_concavity";
    let sec = SectionFunction::new(body, v, backend)?;
    let mut ts: Vec<T> = grid.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    ts.dedup();
    let vals: Vec<(T, T)> = ts
        .iter()
        .map(|&t| {
            let q = sec.value(t);
            (q.value, q.error_estimate)
        })
        .collect();
    let rel = T::lit(1e-12);
    let mut margin = f64::INFINITY;
    let mut witness: Option<Vec<usize>> = None;
    let record = |m: T, idx: Vec<usize>, margin: &mut f64, witness: &mut Option<Vec<usize>>| {
        if m.to64() < *margin {
            *margin = m.to64();
            if m < T::zero() {
                *witness = Some(idx);
            }
        }
    };
    for i in 0..ts.len().saturating_sub(1) {
        if ts[i] >= T::zero() {
            let ((a0, e0), (a1, e1)) = (vals[i], vals[i + 1]);
            let slack = T::lit(3.0) * (e0 + e1) + rel * a0.abs();
            let m = (a0 - a1 + slack) / a0.abs().max(T::min_positive_value());
            record(m, vec![i, i + 1], &mut margin, &mut witness);
        }
    }
    if body.dim >= 2 {
        let k = T::one() / T::from_usize_lossy(body.dim - 1);
        let g: Vec<(T, T)> = vals
            .iter()
            .map(|&(a, e)| {
                let gv = a.max(T::zero()).powf(k);
                let ge = if a > T::zero() { gv * k * e / a } else { e.powf(k) };
                (gv, ge)
            })
            .collect();
        for i in 0..ts.len().saturating_sub(2) {
            let (t0, t1, t2) = (ts[i], ts[i + 1], ts[i + 2]);
            let lam = (t1 - t0) / (t2 - t0);
            let chord = g[i].0 * (T::one() - lam) + g[i + 2].0 * lam;
            let slack = T::lit(3.0) * (g[i].1 + g[i + 1].1 + g[i + 2].1) + rel * chord.abs();
            let scale = g[i + 1].0.abs().max(chord.abs()).max(T::min_positive_value());
            let m = (g[i + 1].0 - chord + slack) / scale;
            record(m, vec![i, i + 1, i + 2], &mut margin, &mut witness);
        }
    }
    let margin = if margin.is_finite() { margin } else { 0.0 };
    Ok(match witness {
        Some(idx) => {
            let mut r = HypothesisReport::new(name, Tri::False, margin);
            for i in idx {
                r = r.with_evidence(ts[i].to64(), vals[i].0.to64());
            }
            r
        }
        None => HypothesisReport::new(name, Tri::True, margin),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_samples_stay_inside_and_repeat() {
        let cube = NormBody::<f64>::cube(2).unwrap();
        let a = sample_uniform(&cube, 4, 7).unwrap();
        let b = sample_uniform(&cube, 4, 7).unwrap();
        assert_eq!(a.points.len(), 4);
        assert!(a.points.iter().all(|p| p.iter().all(|c| c.abs() <= 1.0)));
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn ball_second_moment() {
        let ball = NormBody::<f64>::ball(3).unwrap();
        let s = sample_uniform(&ball, 100_000, 3).unwrap();
        let r2: Vec<f64> = s.points.iter().map(|p| p.iter().map(|c| c * c).sum()).collect();
        let mean = r2.iter().sum::<f64>() / r2.len() as f64;
        let var = r2.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r2.len() - 1) as f64;
        let sigma = (var / r2.len() as f64).sqrt();
        assert!((mean - 0.6).abs() < 3.0 * sigma, "{mean} ± {sigma}");
    }

    #[test]
    fn cross_polytope_acceptance() {
        let l1 = NormBody::<f64>::lp(2, 1.0).unwrap();
        let s = sample_uniform(&l1, 20_000, 11).unwrap();
        assert!((s.acceptance_rate - 0.5).abs() < 0.01);
    }

    #[test]
    fn thin_star_body_is_refused() {
        let spiky = NormBody::<f64>::lp(12, 0.3).unwrap();
        assert!(matches!(sample_uniform(&spiky, 10, 1), Err(BodyError::LowAcceptance { .. })));
    }

    #[test]
    fn brunn_examples() {
        let grid: Vec<f64> = (0..=4).map(|i| 0.25 * i as f64).collect();
        let ball = NormBody::<f64>::ball(3).unwrap();
        assert_eq!(check_brunn(&ball, &[1.0, 0.0, 0.0], &grid, SectionBackend::Exact).unwrap().satisfied, Tri::True);
        let oct = NormBody::<f64>::lp(3, 1.0).unwrap();
        assert_eq!(check_brunn(&oct, &[1.0, 0.0, 0.0], &grid, SectionBackend::Exact).unwrap().satisfied, Tri::True);
        let star = NormBody::<f64>::lp(3, 0.5).unwrap();
        let r = check_brunn(&star, &[1.0, 0.0, 0.0], &grid, SectionBackend::Exact).unwrap();
        assert_eq!(r.satisfied, Tri::False);
        assert!(r.margin < 0.0 && r.evidence.len() == 3);
    }
}
