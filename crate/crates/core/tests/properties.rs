use mesoqed::halfspace::GreenBundle;
use mesoqed::model::{figures_of_merit, EmitterMoments, Orientation};
use mesoqed::moments::{allowed_moments, lambda_zx_estimate, GaussianEnvelopes, Parity, ParityTable};
use mesoqed::rates::{extract_fields, ladder_terms, rate_ladder};
use mesoqed::specfun::{bessel_ik_seq, bessel_j};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn parity() -> impl Strategy<Value = Parity> {
    prop::array::uniform3(-1i8..=1)
}

fn bundle() -> impl Strategy<Value = GreenBundle> {
    (0.1f64..3.0, -0.2f64..0.2, 0.0f64..0.01, -0.2f64..0.2).prop_map(|(g, d, dd, b)| GreenBundle {
        g_xx: g,
        d_g_zx: d,
        dd_g_zz: dd,
        b_yx: b,
        q_xz: 2.0 * d - b,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bessel_wronskian(r in 0.01f64..60.0, th in -0.95 * PI..0.95 * PI, n in 0usize..20) {
        let z = Complex64::from_polar(r, th);
        let (i, k) = bessel_ik_seq(n + 1, z).unwrap();
        let (a, b) = (i[n] * k[n + 1], i[n + 1] * k[n]);
        // Left of the imaginary axis both products grow like e^{2|Re z|} and
        // cancel, so the error is measured against the size of the terms.
        let scale = (z.norm() * (a.norm() + b.norm())).max(1.0);
        let w = z * (a + b);
        prop_assert!((w - 1.0).norm() < 1e-9 * scale, "z = {z}, n = {n}: {w}");
    }
}

proptest! {
    #[test]
    fn j_from_modified_bessel_matches_reflection(x in 0.05f64..40.0, n in 0usize..6) {
        // J_n(-x) = (-1)^n J_n(x) on the real axis.
        let a = bessel_j(n, Complex64::new(x, 0.0)).unwrap();
        let b = bessel_j(n, Complex64::new(-x, 0.0)).unwrap();
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - s * b).norm() < 1e-12 * a.norm().max(1e-3));
    }

    #[test]
    fn second_order_figure_is_square_of_first(k in 1e-4f64..0.1, ratio in -50.0f64..50.0) {
        let m = EmitterMoments::new(ratio, 0.0, Orientation::Direct).unwrap();
        let f = figures_of_merit(k, &m).unwrap();
        prop_assert!((f.g2 - (f.g1 / 2.0).powi(2)).abs() <= 1e-14 * f.g2.max(1e-300));
    }

    #[test]
    fn ladder_is_linear_in_the_bundle(b in bundle(), s in 0.01f64..100.0, ratio in -20.0f64..20.0) {
        let l = ladder_terms(&b, ratio, 1.0);
        let ls = ladder_terms(&b.scaled(s), ratio, 1.0);
        for (x, y) in [(l.gamma0, ls.gamma0), (l.gamma1, ls.gamma1), (l.gamma2, ls.gamma2)] {
            prop_assert!((s * x - y).abs() <= 1e-13 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn flip_identities(b in bundle(), ratio in 0.0f64..10.0) {
        let m = EmitterMoments::new(ratio, 0.0, Orientation::Direct).unwrap();
        let k = 0.02;
        let norm = k / (6.0 * PI);
        let up = rate_ladder(&b.scaled(norm), &m, norm);
        let down = rate_ladder(&b.scaled(norm), &m.flipped(), norm);
        if let (Ok(up), Ok(down)) = (up, down) {
            prop_assert!((up.total() - down.total() - 2.0 * up.gamma1).abs() < 1e-12);
            prop_assert!((up.total() + down.total() - 2.0 * (up.gamma0 + up.gamma2)).abs() < 1e-12);
            let (ldos, grad) = extract_fields(up.total(), down.total());
            prop_assert!((grad - up.gamma1).abs() < 1e-12 && (ldos - up.gamma0 - up.gamma2).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_rules_follow_axis_permutation(ug in parity(), pg in parity(), ue in parity(), pe in parity()) {
        let t = ParityTable::new(ug, pg, ue, pe).unwrap();
        let swap = |p: Parity| [p[1], p[0], p[2]];
        let s = ParityTable::new(swap(ug), swap(pg), swap(ue), swap(pe)).unwrap();
        let (a, b) = (allowed_moments(&t), allowed_moments(&s));
        let perm = [1usize, 0, 2];
        for i in 0..3 {
            prop_assert_eq!(a.mu[i], b.mu[perm[i]]);
            for j in 0..3 {
                prop_assert_eq!(a.lambda[i][j], b.lambda[perm[i]][perm[j]]);
            }
        }
    }

    #[test]
    fn lambda_estimate_scales_with_lengths(sigma in 0.5f64..5.0, xi in 0.2f64..10.0, s in -3.0f64..3.0, l in 0.1f64..10.0) {
        let a = lambda_zx_estimate(&GaussianEnvelopes::new(sigma, xi, s).unwrap()).unwrap();
        let b = lambda_zx_estimate(&GaussianEnvelopes::new(l * sigma, xi, l * s).unwrap()).unwrap();
        prop_assert!((l * a - b).abs() <= 1e-12 * (l * sigma));
    }
}
