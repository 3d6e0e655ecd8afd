use proptest::prelude::*;

use hypercover::ball_cover::{approx_adjusted, approx_normal, LocalCoverQuery, PointKind};
use hypercover::cube_cover::{expected_coverage_closed_form, ik_integral, CubeCoverQuery};
use hypercover::designs::{generate, SchemeId, SchemeSpec};
use hypercover::geometry::{ball_volume, cap_volume};
use hypercover::special::std_normal_cdf;
use hypercover::sweep::format_g17;
use hypercover::union_cover::coverage_approx2;

fn scheme_ids() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(vec![SchemeId::S1, SchemeId::S2, SchemeId::S4, SchemeId::S5, SchemeId::S6, SchemeId::S7])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_cdf_symmetry(x in -30.0f64..30.0) {
        prop_assert!((std_normal_cdf(-x) - (1.0 - std_normal_cdf(x))).abs() <= 1e-14);
    }

    #[test]
    fn cap_volume_between_zero_and_half_ball(d in 1u32..60, r in 0.1f64..3.0, frac in 0.0f64..1.0) {
        let h = frac * r;
        let v = cap_volume(d, r, h).unwrap();
        prop_assert!(v >= 0.0 && v <= 0.5 * ball_volume(d, r) * (1.0 + 1e-12));
        let further = cap_volume(d, r, (h + 0.05 * r).min(r)).unwrap();
        prop_assert!(further <= v * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn ik_is_a_probability(k in 1u32..40, r in 0.0f64..2.5, delta in 0.05f64..1.0) {
        let v = ik_integral(k, r, delta).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        let next = ik_integral(k + 1, r, delta).unwrap();
        prop_assert!(next <= v + 1e-12);
    }

    #[test]
    fn cube_closed_form_monotone_in_r(d in 1usize..15, n in 1usize..200, r in 0.0f64..1.5, delta in 0.1f64..1.0) {
        let a = expected_coverage_closed_form(&CubeCoverQuery::new(d, n, r, delta).unwrap()).unwrap();
        let b = expected_coverage_closed_form(&CubeCoverQuery::new(d, n, r + 0.05, delta).unwrap()).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn local_approximations_are_probabilities(d in 2u32..100, z in 0.0f64..1.0, r in 0.0f64..10.0) {
        let q = LocalCoverQuery::new(d, z * d as f64, r, PointKind::Typical).unwrap();
        prop_assert!((0.0..=1.0).contains(&approx_normal(&q)));
        let adj = approx_adjusted(&q);
        prop_assert!(adj.is_finite());
    }

    #[test]
    fn union_approximation_monotone_in_r(d in 5usize..60, n in 1usize..2000, r in 0.5f64..5.0, delta in 0.1f64..1.0) {
        let a = coverage_approx2(d, n, r, delta).unwrap();
        let b = coverage_approx2(d, n, r + 0.1, delta).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-3);
    }

    #[test]
    fn g17_round_trips(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        prop_assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn designs_respect_invariants(id in scheme_ids(), d in 1usize..12, n in 1usize..64, frac in 0.05f64..1.0, seed in any::<u64>()) {
        let delta = frac * id.delta_max(d);
        let alpha = (id == SchemeId::S4).then_some(0.5 + frac);
        let spec = SchemeSpec::new(id, delta, alpha).unwrap();
        let design = generate(&spec, d, n, seed).unwrap();
        prop_assert_eq!(design.points.len(), n * d);
        prop_assert!(design.check_invariants().is_ok());
        if id.is_nested() && n > 1 {
            let shorter = generate(&spec, d, n - 1, seed).unwrap();
            prop_assert_eq!(&design.points[..(n - 1) * d], &shorter.points[..]);
        }
    }
}
