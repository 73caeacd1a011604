//! Property tests for the analytic layers: identities and monotonicity that
//! must hold across randomly drawn parameters, not just at hand-picked spots.

use proptest::prelude::*;
use steklov::ball::{mu_exterior, mu_exterior_gap, q_norm, radial_profile, BallSpec};
use steklov::special::{
    bessel_i_scaled, bessel_k_scaled_ext, erfcx, legendre_p, BesselOrder,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_random_orders(twice in 0i32..14, z in 1e-4f64..100.0) {
        let nu = BesselOrder::from_twice(twice);
        let nup = BesselOrder::from_twice(twice + 2);
        let i0 = bessel_i_scaled(nu, z).unwrap();
        let i1 = bessel_i_scaled(nup, z).unwrap();
        let k0 = bessel_k_scaled_ext(nu, z).unwrap().to_f64();
        let k1 = bessel_k_scaled_ext(nup, z).unwrap().to_f64();
        if let (Some(k0), Some(k1)) = (k0, k1) {
            if k0.is_finite() && k1.is_finite() {
                let w = i0 * k1 + i1 * k0;
                prop_assert!(((w - 1.0 / z) * z).abs() < 1e-11, "W = {w}, 1/z = {}", 1.0 / z);
            }
        }
    }

    #[test]
    fn k_monotone_in_order_random(z in 1e-2f64..80.0, twice in 1i32..10) {
        let lo = bessel_k_scaled_ext(BesselOrder::from_twice(twice), z).unwrap();
        let hi = bessel_k_scaled_ext(BesselOrder::from_twice(twice + 1), z).unwrap();
        prop_assert!(hi.ratio(lo) > 1.0, "K not increasing in nu at z={z}, twice={twice}");
    }

    #[test]
    fn erfcx_bounds_random(z in 0.0f64..50.0) {
        let v = erfcx(z).unwrap();
        // sandwich 1/(z + sqrt(z^2 + 2)) < sqrt(pi)/2 erfcx... use loose bounds:
        // 0 < erfcx(z) <= 1 and erfcx(z) >= 1/(1 + z sqrt(pi))
        prop_assert!(v > 0.0 && v <= 1.0);
        prop_assert!(v >= 1.0 / (1.0 + z * std::f64::consts::PI.sqrt()) - 1e-12);
    }

    #[test]
    fn legendre_bounded_random(n in 0usize..64, x in -1.0f64..1.0) {
        let v = legendre_p(n, x).unwrap();
        prop_assert!(v.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn mu_ordering_and_bounds_random(d in 2u32..=5, l in 0.3f64..3.0, p in 0.0f64..9.0) {
        let ball = BallSpec::new(d, l).unwrap();
        let mut prev = -1.0;
        for n in 0..10usize {
            let mu = mu_exterior(ball, n, p).unwrap();
            prop_assert!(mu >= prev - 1e-12, "ordering fails at n={n}");
            prev = mu;
            if d >= 3 {
                let gap = mu_exterior_gap(ball, n, p).unwrap();
                prop_assert!(gap >= -1e-12 && gap <= p.sqrt() + 1e-10);
            }
        }
    }

    #[test]
    fn derivative_identity_random(d in 2u32..=5, n in 0usize..8, p in 1e-3f64..4.0, l in 0.5f64..2.0) {
        let ball = BallSpec::new(d, l).unwrap();
        let h = 1e-6 * p;
        let fd = (mu_exterior_gap(ball, n, p + h).unwrap() - mu_exterior_gap(ball, n, p - h).unwrap())
            / (2.0 * h);
        let q = q_norm(ball, n, p).unwrap();
        prop_assert!((fd - q).abs() <= 1e-6 * q.abs(), "fd={fd} q={q}");
    }

    #[test]
    fn radial_profile_decreasing_random(d in 2u32..=5, n in 0usize..6, p in 1e-4f64..4.0) {
        let ball = BallSpec::new(d, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let r = 1.0 + 0.3 * i as f64;
            let g = radial_profile(ball, n, p, r).unwrap();
            prop_assert!(g <= prev + 1e-14);
            prop_assert!(g >= 0.0);
            prev = g;
        }
        // exponential envelope consistent with the decay bound
        let g5 = radial_profile(ball, n, p, 6.0).unwrap();
        prop_assert!(g5 <= 40.0 * (-p.sqrt() * 5.0).exp(), "g(6) = {g5}");
    }
}
