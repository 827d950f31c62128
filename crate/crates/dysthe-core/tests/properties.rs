//! Randomized invariants: exact algebraic identities hold to roundoff, the
//! two resonance counting routes agree everywhere, and the norm machinery
//! satisfies its embedding and partition rules on arbitrary fields.

use num_complex::Complex64;
use proptest::prelude::*;

use dysthe_core::dispersion::{dispersion, dispersion_i128, resonance_identity};
use dysthe_core::dynamics::{
    duhamel_kernel, third_picard_iterate, viscous_solve, PicardMethod, ViscousParams,
};
use dysthe_core::field::SpectralField;
use dysthe_core::norms::{
    dyadic_levels, dyadic_piece, embedding_constant_upper, lp_norm, sobolev_norm, xsb_norm,
    ysb_norm,
};
use dysthe_core::resonance::{
    count_bruteforce, count_divisor, divisor_candidates, divisor_count, sup_scan, ResonanceQuery,
};
use dysthe_core::spacetime::SpaceTimeField;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn spatial(bandlimit: i64) -> impl Strategy<Value = SpectralField> {
    prop::collection::vec(((-bandlimit..=bandlimit), coeff()), 1..8).prop_map(|modes| {
        let mut u = SpectralField::new();
        for (n, c) in modes {
            u.add(n, c);
        }
        u
    })
}

fn spacetime(bandlimit: i64, tau_spread: i64) -> impl Strategy<Value = SpaceTimeField> {
    prop::collection::vec(
        (
            (-bandlimit..=bandlimit),
            (-tau_spread..=tau_spread),
            coeff(),
        ),
        1..10,
    )
    .prop_map(|modes| {
        let mut f = SpaceTimeField::new();
        for (n, dtau, c) in modes {
            let tau = dispersion(n).unwrap() + dtau;
            f.add(n, tau, c);
        }
        f
    })
}

proptest! {
    #[test]
    fn gap_identity_is_exact(n1 in -1000i64..=1000, n2 in -1000i64..=1000) {
        // evaluates both sides independently and asserts equality internally
        resonance_identity(n1, n2).unwrap();
    }

    #[test]
    fn dispersion_strictly_increasing(n in -100_000i64..100_000) {
        prop_assert!(dispersion(n).unwrap() < dispersion(n + 1).unwrap());
    }

    #[test]
    fn grid_quadrature_matches_coefficient_mass(u in spatial(16), extra in 0usize..8) {
        prop_assume!(!u.is_empty());
        let m = 2 * u.bandlimit() as usize + 1 + extra;
        let samples = u.synthesize(m).unwrap();
        let grid: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / m as f64;
        let mass = u.l2_sum();
        prop_assert!((grid - mass).abs() <= 1e-12 * mass.max(1e-300));
    }

    #[test]
    fn propagation_is_unitary(u in spatial(16), t in -5.0f64..5.0) {
        let before = u.l2_sum();
        let after = u.propagate(t).unwrap().l2_sum();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1e-300));
    }

    #[test]
    fn propagation_has_period_two_pi(u in spatial(32)) {
        let back = u.propagate(TWO_PI).unwrap();
        for (n, c) in u.modes() {
            prop_assert!((back.get(n) - c).norm() <= 1e-9 * (1.0 + c.norm()), "mode {n}");
        }
    }

    #[test]
    fn evolved_slice_matches_propagation(u in spatial(16), t in -2.0f64..2.0) {
        let slice = SpaceTimeField::on_curve(&u).unwrap().time_slice(t);
        let direct = u.propagate(t).unwrap();
        for (n, c) in direct.modes() {
            prop_assert!((slice.get(n) - c).norm() <= 1e-12 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn product_commutes(f in spacetime(4, 6), g in spacetime(4, 6)) {
        let fg = f.multiply(&g);
        let gf = g.multiply(&f);
        for (n, tau, c) in fg.modes() {
            prop_assert!((gf.get(n, tau) - c).norm() <= 1e-12 * (1.0 + c.norm()));
        }
        prop_assert_eq!(fg.mode_count(), gf.mode_count());
    }

    #[test]
    fn conjugation_is_an_involution(f in spacetime(6, 10)) {
        prop_assert_eq!(f.conjugate().conjugate(), f);
    }

    #[test]
    fn kernel_respects_both_bounds(omega in -1_000_000i64..=1_000_000, t in 0.0f64..2.0) {
        let k = duhamel_kernel(omega, t);
        prop_assert!(k.norm() <= t * (1.0 + 1e-12));
        if omega != 0 {
            prop_assert!(k.norm() <= (2.0 / omega.abs() as f64) * (1.0 + 1e-12));
        } else {
            prop_assert_eq!(k, Complex64::new(t, 0.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counting_routes_agree(
        bandlimit in 1i64..=16,
        total_mode in -32i64..=32,
        n1 in -16i64..=16,
        n2 in -16i64..=16,
        jitter in -2i64..=2,
    ) {
        // anchor near an achievable bucket so nonempty cases appear often
        let n3 = total_mode as i128 - n1 as i128 - n2 as i128;
        let exact = dispersion_i128(n1 as i128).unwrap()
            + dispersion_i128(n2 as i128).unwrap()
            + dispersion_i128(n3).unwrap();
        let j = i64::try_from(exact).unwrap() + jitter;
        let q = ResonanceQuery::new(bandlimit, total_mode, j).unwrap();
        let brute = count_bruteforce(&q).unwrap();
        let fast = count_divisor(&q).unwrap();
        prop_assert_eq!(&brute.solutions, &fast.solutions);

        // the factor-pair route admits one signed divisor per magnitude
        let c = 4 - 3 * total_mode as i128;
        let k = dispersion_i128(total_mode as i128).unwrap() - j as i128;
        let l = 9 * k - 4 * c * c;
        if l != 0 {
            let d = divisor_count(l).unwrap() as usize;
            prop_assert!(divisor_candidates(&q).unwrap().len() <= d);
            prop_assert!(brute.count() <= 2 * d);
        }
    }

    #[test]
    fn bucket_sup_is_monotone_in_bandlimit(lo in 1i64..=12, gap in 0i64..=4) {
        let small = sup_scan(lo).unwrap();
        let large = sup_scan(lo + gap).unwrap();
        prop_assert!(small.max_count <= large.max_count);
    }
}

proptest! {
    #[test]
    fn dyadic_pieces_partition_the_field(f in spacetime(6, 40)) {
        let levels = dyadic_levels(&f).unwrap();
        let top = levels.iter().copied().max().unwrap();
        let mut rebuilt = SpaceTimeField::new();
        let mut pieces = 0usize;
        let mut sq = 0.0f64;
        for j in 0..=top {
            let piece = dyadic_piece(&f, j).unwrap();
            pieces += piece.mode_count();
            sq += xsb_norm(&piece, 0.0, 0.0).unwrap().powi(2);
            rebuilt = rebuilt.sum(&piece);
        }
        prop_assert_eq!(rebuilt, f.clone());
        prop_assert_eq!(pieces, f.mode_count());
        let total = xsb_norm(&f, 0.0, 0.0).unwrap().powi(2);
        prop_assert!((sq - total).abs() <= 1e-12 * total.max(1e-300));
    }

    #[test]
    fn flat_x_norm_is_the_l2_norm(f in spacetime(5, 20)) {
        let via_x = TWO_PI * xsb_norm(&f, 0.0, 0.0).unwrap();
        let via_grid = lp_norm(&f, 2, None).unwrap();
        prop_assert!((via_x - via_grid).abs() <= 1e-10 * via_x.max(1e-300));
    }

    #[test]
    fn y_norm_embeds_into_x(f in spacetime(6, 40), s in 0.0f64..1.0) {
        // per-mode Cauchy-Schwarz in tau with delta = 1/2
        let c = embedding_constant_upper(0.5);
        let y = ysb_norm(&f, s, -0.5).unwrap();
        let x = xsb_norm(&f, s, 0.5).unwrap();
        prop_assert!(y <= c * x * (1.0 + 1e-12));
    }

    #[test]
    fn fixed_time_sobolev_below_y(f in spacetime(6, 40), s in 0.0f64..1.5, t in -3.0f64..3.0) {
        let snapshot = sobolev_norm(&f.time_slice(t), s);
        let y = ysb_norm(&f, s, 0.0).unwrap();
        prop_assert!(snapshot <= y * (1.0 + 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_route_agrees_on_small_data(u in spatial(2), t in 0.0f64..0.1) {
        prop_assume!(!u.is_empty());
        let exact = third_picard_iterate(&u, t, PicardMethod::Exact).unwrap();
        let quad = third_picard_iterate(&u, t, PicardMethod::Quadrature(32)).unwrap();
        let scale = exact.l2_sum().sqrt();
        prop_assume!(scale > 1e-12);
        let diff = exact.sum(&quad.scale(Complex64::new(-1.0, 0.0)));
        prop_assert!(diff.l2_sum().sqrt() <= 1e-9 * scale);
    }

    #[test]
    fn linear_viscous_flow_decays_exactly(
        u in spatial(8),
        mu in 0.1f64..1.0,
        dt in 0.01f64..0.1,
        steps in 1usize..=8,
    ) {
        let params = ViscousParams::new(mu, dt, steps).unwrap().linear_only();
        let out = viscous_solve(&u, &params).unwrap().final_state;
        let total = dt * steps as f64;
        for (n, c) in u.modes() {
            let factor = (-mu * (n * n) as f64 * total).exp();
            let phase = Complex64::from_polar(factor, dispersion(n).unwrap() as f64 * total);
            let expect = c * phase;
            prop_assert!((out.get(n) - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
        }
    }
}
