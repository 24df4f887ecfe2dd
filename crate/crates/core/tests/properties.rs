use capsmooth_core::bounds::{boosting_check, rho_eps, small_calc_row};
use capsmooth_core::condnum::{ConditionNumber, ConicProblem};
use capsmooth_core::distributions::{AdversarialLaw, Cap};
use capsmooth_core::geometry::{geodesic_point, proj_distance, tangent_direction, ProjPoint};
use capsmooth_core::volumes::{cap_integral, cap_integral_bounds};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(n: usize) -> impl Strategy<Value = ProjPoint> {
    prop::collection::vec(-1.0f64..1.0, n + 1)
        .prop_filter_map("nonzero", |v| ProjPoint::normalize(&v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn distance_is_symmetric_and_sign_invariant(x in point(4), y in point(4)) {
        let d = proj_distance(&x, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, proj_distance(&y, &x).unwrap());
        let d_neg = proj_distance(&x.antipode(), &y).unwrap();
        prop_assert!((d - d_neg).abs() < 1e-15);
        prop_assert!(proj_distance(&x, &x).unwrap() < 1e-7);
    }

    #[test]
    fn geodesic_point_lies_at_requested_radius(a in point(5), seed in any::<u64>(), r in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = tangent_direction(&a, &mut rng);
        let z = geodesic_point(&a, &u, r).unwrap();
        prop_assert!((proj_distance(&z, &a).unwrap() - r).abs() < 1e-7 + 1e-12);
    }

    #[test]
    fn condition_is_scale_invariant_and_at_least_one(v in prop::collection::vec(-1.0f64..1.0, 9), scale in 1e-3f64..1e3) {
        let Ok(a) = ProjPoint::normalize(&v) else { return Ok(()) };
        let scaled: Vec<f64> = v.iter().map(|x| -scale * x).collect();
        let b = ProjPoint::normalize(&scaled).unwrap();
        for problem in [ConicProblem::hyperplane(8).unwrap(), ConicProblem::coordinate_hyperplanes(8, 3).unwrap(), ConicProblem::matrix(3).unwrap()] {
            let ca = problem.evaluate(&a);
            let cb = problem.evaluate(&b);
            prop_assert!(ca >= 1.0 - 1e-12);
            if ca.is_finite() {
                prop_assert!((ca - cb).abs() <= 1e-9 * ca);
            }
        }
    }

    #[test]
    fn cap_integral_is_monotone_and_sandwiched_below(m in 0.1f64..60.0, s1 in 1e-4f64..1.0, s2 in 1e-4f64..1.0) {
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let a = cap_integral(m, lo).unwrap();
        let b = cap_integral(m, hi).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-14));
        let bounds = cap_integral_bounds(m, hi).unwrap();
        prop_assert!(bounds.lower <= b * (1.0 + 1e-12));
        // the secant option is valid for every σ < 1
        if hi < 1.0 {
            let secant = hi.powf(m) / m / (1.0 - hi * hi).sqrt();
            prop_assert!(b <= secant * (1.0 + 1e-12));
        }
    }

    #[test]
    fn radial_cdf_is_monotone(beta_frac in 0.0f64..0.95, sigma in 0.05f64..=1.0, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0) {
        let n = 5u32;
        let cap = Cap::new(ProjPoint::basis(n as usize, 0), sigma).unwrap();
        let law = AdversarialLaw::with_constant_profile(cap, beta_frac * f64::from(n)).unwrap();
        let (lo, hi) = if r1 <= r2 { (r1 * sigma, r2 * sigma) } else { (r2 * sigma, r1 * sigma) };
        let a = law.radial_cdf(lo).unwrap();
        let b = law.radial_cdf(hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&a) && a <= b + 1e-15);
    }

    #[test]
    fn inverse_radial_cdf_round_trips(beta_frac in 0.0f64..0.95, p in 1e-9f64..1.0) {
        let n = 4u32;
        let cap = Cap::new(ProjPoint::basis(n as usize, 0), 0.7).unwrap();
        let law = AdversarialLaw::with_constant_profile(cap, beta_frac * f64::from(n)).unwrap();
        let r = law.inverse_radial_cdf(p).unwrap();
        prop_assert!((law.radial_cdf(r).unwrap() - p).abs() < 1e-10);
    }

    #[test]
    fn boosting_holds_below_rho_eps(
        n in 2u32..40,
        beta_frac in 0.0f64..0.9,
        h_sup in 1.0f64..20.0,
        sigma in 0.01f64..=1.0,
        eps_frac in 0.05f64..0.95,
        rho_frac in 1e-6f64..=1.0,
    ) {
        let beta = beta_frac * f64::from(n);
        let eps = eps_frac * (1.0 - beta_frac);
        let limit = rho_eps(n, beta, sigma, h_sup, eps).unwrap();
        prop_assume!(limit > 0.0);
        prop_assert!(boosting_check(n, beta, sigma, h_sup, eps, rho_frac * limit).unwrap());
    }

    #[test]
    fn small_calc_sides_are_finite(n in 1u32..1_000_000) {
        let row = small_calc_row(n).unwrap();
        prop_assert!(row.lhs.is_finite() && row.rhs.is_finite() && row.lhs > 0.0);
    }
}
