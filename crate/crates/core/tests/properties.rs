use std::f64::consts::PI;

use proptest::prelude::*;

use posdef_core::bodies::{NormBody, SectionBackend, SectionFunction};
use posdef_core::criteria::{gram_test, verify_thm_convex, Classification, ConvexOptions, GramSpec, PsiKind};
use posdef_core::numerics::{bessel_j, integrate_adaptive, SphereConstant};
use posdef_core::profiles::{check_polya, RadialProfile};
use posdef_core::transforms::{ft_even_1d, slice_identity_check, slice_trials};
use posdef_core::{Body, Profile, Tri};

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| v.iter().map(|c| c / norm).collect())
}

fn body(kind: u8, n: usize, p: f64) -> Body {
    match kind {
        0 => NormBody::ball(n).unwrap(),
        1 => NormBody::cube(n).unwrap(),
        2 => NormBody::lp(n, 1.0).unwrap(),
        _ => NormBody::lp(n, p).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn half_order_bessel_is_a_sine(x in 0.1f64..100.0) {
        let j = bessel_j(0.5, x).unwrap() * (PI * x / 2.0).sqrt();
        prop_assert!((j - x.sin()).abs() <= 1e-10);
    }

    #[test]
    fn sphere_surface_recursion(d in 3usize..40) {
        let s = SphereConstant::<f64>::new(d).surface;
        let t = SphereConstant::<f64>::new(d - 2).surface;
        prop_assert!((s - 2.0 * PI * t / (d - 2) as f64).abs() <= 1e-12 * s);
    }

    #[test]
    fn derivatives_match_central_differences(p in 0.3f64..4.0, a in -2.5f64..-0.1, n in 1usize..6, r in 0.1f64..10.0) {
        let profiles: Vec<Profile> = vec![
            RadialProfile::exp_power(p).unwrap(),
            RadialProfile::power(a).unwrap(),
            RadialProfile::g_profile(n, p).unwrap(),
        ];
        for f in &profiles {
            let d = f.deriv(r);
            let fd = f.central_difference(r, 1e-5);
            prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1e-300) + 1e-14, "{} at {r}: {d} vs {fd}", f.label);
        }
    }

    #[test]
    fn radial_function_lands_on_the_boundary(
        kind in 0u8..4,
        n in 2usize..6,
        p in 1.2f64..6.0,
        v in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let k = body(kind, n, p);
        if let Some(u) = unit(v[..n].to_vec()) {
            let rho = k.radial(&u).unwrap();
            let x: Vec<f64> = u.iter().map(|c| c * rho).collect();
            prop_assert!((k.norm(&x) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn section_dilation(kind in 0u8..3, lambda in 0.3f64..3.0, frac in 0.0f64..0.95, v in prop::collection::vec(-1.0f64..1.0, 3)) {
        let k = body(kind, 3, 2.0);
        if let Some(u) = unit(v) {
            let base = SectionFunction::new(&k, &u, SectionBackend::Exact).unwrap();
            let scaled = SectionFunction::new(&k.dilate(lambda).unwrap(), &u, SectionBackend::Exact).unwrap();
            let t = frac * scaled.support_width();
            let lhs = scaled.value(t).value;
            let rhs = lambda * lambda * base.value(t / lambda).value;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "{lhs} {rhs}");
        }
    }

    #[test]
    fn slice_theorem_residual(seed in any::<u64>(), n in prop::sample::select(vec![2usize, 3, 5])) {
        for t in slice_trials::<f64>(n, 3, seed).unwrap() {
            prop_assert!(slice_identity_check(&t.phi, &t.direction, t.s, 1e-12).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn polya_mixtures_stay_certified(ws in prop::collection::vec(0.05f64..3.0, 1..4), ps in prop::collection::vec(0.2f64..1.0, 3)) {
        let parts: Vec<(f64, Profile)> =
            ws.iter().zip(&ps).map(|(&w, &p)| (w, RadialProfile::exp_power(p).unwrap())).collect();
        for (_, f) in &parts {
            prop_assert_eq!(check_polya(f).satisfied, Tri::True);
        }
        let mix = RadialProfile::mixture(&parts).unwrap();
        prop_assert_eq!(check_polya(&mix).satisfied, Tri::True);
    }

    #[test]
    fn gram_mixture_closure(seed in any::<u64>(), n in 1usize..4, ws in prop::collection::vec(0.05f64..3.0, 3), ps in prop::collection::vec(0.2f64..2.0, 3)) {
        let spec = GramSpec::random(n, 30, seed, 2.0).unwrap();
        let radius = |x: &[f64]| x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut parts = Vec::new();
        for (&w, &p) in ws.iter().zip(&ps) {
            let f = RadialProfile::exp_power(p).unwrap();
            let v = gram_test(&|x: &[f64]| f.eval(radius(x)), &spec, 1e-6).unwrap();
            prop_assert_ne!(v.classification, Classification::ViolationFound);
            parts.push((w, f));
        }
        let mix = RadialProfile::mixture(&parts).unwrap();
        let v = gram_test(&|x: &[f64]| mix.eval(radius(x)), &spec, 1e-6).unwrap();
        prop_assert_ne!(v.classification, Classification::ViolationFound);
    }

    #[test]
    fn polya_certified_transforms_are_nonnegative(p in 0.2f64..1.0, xi in 0.0f64..60.0) {
        let f = RadialProfile::exp_power(p).unwrap();
        prop_assert!(ft_even_1d(&f, xi, 1e-12).unwrap().value >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn convex_verdicts_reproduce_bitwise(seed in any::<u64>(), kind in 0u8..3) {
        let k = body(kind, 2, 2.0);
        let opts = ConvexOptions::new(5_000, seed);
        let a = verify_thm_convex(&k, PsiKind::Ball { radius: 1.0 }, 0.0, &opts).unwrap();
        let b = verify_thm_convex(&k, PsiKind::Ball { radius: 1.0 }, 0.0, &opts).unwrap();
        prop_assert_eq!(a.min_value.to_bits(), b.min_value.to_bits());
        prop_assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
    }
}

#[test]
fn sections_integrate_to_the_volume() {
    let v = [0.6, 0.0, 0.8];
    for (k, vol) in [
        (NormBody::<f64>::ball(3).unwrap(), 4.0 * PI / 3.0),
        (NormBody::cube(3).unwrap(), 8.0),
        (NormBody::lp(3, 1.0).unwrap(), 4.0 / 3.0),
    ] {
        let sec = SectionFunction::new(&k, &v, SectionBackend::Exact).unwrap();
        let h = sec.support_width();
        let mut total = 0.0;
        let mut pts = vec![0.0];
        pts.extend(sec.breakpoints().iter().copied().filter(|&b| b > 0.0 && b < h));
        pts.push(h);
        for w in pts.windows(2) {
            total += integrate_adaptive(|t: f64| sec.value(t).value, w[0], w[1], 1e-12).unwrap().value;
        }
        assert!((2.0 * total - vol).abs() < 1e-8 * vol, "{} vs {vol}", 2.0 * total);
    }
}

#[test]
fn parseval_on_gaussians() {
    // ∫ φ̂ ψ = ∫ φ ψ̂ with φ = e^{−t²}, ψ = e^{−3t²/2}
    let phi = RadialProfile::exp_power(2.0).unwrap();
    let psi = RadialProfile::exp_power(2.0).unwrap();
    let c = 1.5f64.sqrt();
    let psi_at = |t: f64| psi.eval(c * t);
    let psi_hat = |x: f64| ft_even_1d(&psi, x / c, 1e-13).unwrap().value / c;
    let lhs = integrate_adaptive(|t: f64| ft_even_1d(&phi, t, 1e-13).unwrap().value * psi_at(t), 0.0, 12.0, 1e-13).unwrap().value;
    let rhs = integrate_adaptive(|t: f64| phi.eval(t) * psi_hat(t), 0.0, 12.0, 1e-13).unwrap().value;
    assert!((lhs - rhs).abs() < 1e-8, "{lhs} {rhs}");
    // closed form: 2∫_0^∞ √π e^{−t²/4} e^{−3t²/2} dt = π/√(7/4)
    assert!((2.0 * lhs - PI / 1.75f64.sqrt()).abs() < 1e-10);
}
