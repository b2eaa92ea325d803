use cburgers_core::propagator::{cc_evolve_between, cc_exponent, cc_mode_between};
use cburgers_core::{cc_evolve, cc_mode, symbol_re, CcParams, Complex64, Convention, ModeSpectrum};
use proptest::prelude::*;
use std::f64::consts::PI;

fn eps() -> impl Strategy<Value = f64> {
    1e-3f64..5e-2
}

proptest! {
    #[test]
    fn negative_modes_strictly_decay(eps in eps(), k in 1i64..40, t in 1e-4f64..2.0) {
        let p = CcParams::torus(eps, 1);
        let a = Complex64::new(0.6, -0.8);
        prop_assert!(cc_mode(a, -k, &p, t).norm() < 1.0);
    }

    #[test]
    fn positive_modes_dip_then_recover(eps in eps(), k in 1i64..40, s in 0.01f64..0.99) {
        let p = CcParams::torus(eps, 1);
        let tt = 2.0 * PI * eps * k as f64;
        // Compared through the exponent: the modulus underflows near tt.
        let m = |t: f64| cc_exponent(k, &p, 0.0, t);
        prop_assert!(m(s * tt) > m(s * tt + 1e-3 * tt));
        prop_assert!(m(tt + s * tt) < m(tt + s * tt + 1e-3 * tt));
        prop_assert!(m(tt) < 0.0);
        prop_assert!(m(2.0 * tt).abs() < 1e-12 * (1.0 + m(tt).abs()));
        let w = cc_mode(Complex64::new(0.0, 1.0), k, &p, 2.0 * tt);
        prop_assert!((w.norm() - 1.0).abs() < 1e-12 * (1.0 + m(tt).abs()));
    }

    #[test]
    fn symbol_sign_matches_its_factorization(eps in eps(), t in 0.0f64..2.0, xi in -40.0f64..40.0) {
        let negative = symbol_re(eps, t, xi) < 0.0;
        prop_assert_eq!(negative, xi * (t - 2.0 * PI * eps * xi) > 0.0);
    }

    #[test]
    fn two_time_propagation_chains(eps in eps(), t1 in 0.0f64..0.5, dt in 0.0f64..0.5, k0 in 1u32..4) {
        for convention in [Convention::Torus, Convention::Figure1] {
            let p = CcParams::new(eps, k0, convention);
            let s = ModeSpectrum::from_fn(6, k0, |k| Complex64::new(1.0, k as f64) / (1.0 + (k * k) as f64));
            let t2 = t1 + dt;
            let direct = cc_evolve(&s, &p, t2);
            let chained = cc_evolve_between(&cc_evolve(&s, &p, t1), &p, t1, t2);
            for (a, b) in direct.coefficients().iter().zip(chained.coefficients()) {
                prop_assert!((a - b).norm() <= 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn two_time_form_is_the_exponential_of_the_integrated_rate(eps in eps(), k in -20i64..20, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let p = CcParams::torus(eps, 1);
        let kf = k as f64;
        let integral = PI * kf * (t2 * t2 - t1 * t1) - 4.0 * PI * PI * eps * kf * kf * (t2 - t1);
        let z = cc_mode_between(Complex64::new(1.0, 0.0), k, &p, t1, t2);
        prop_assert!((z.re - integral.exp()).abs() <= 1e-13 * integral.exp());
    }
}

#[test]
fn first_figure_convention_uses_the_printed_exponent() {
    let p = CcParams::new(2.5e-3, 1, Convention::Figure1);
    let t = 0.4;
    let k = 16.0;
    let z = cc_mode(Complex64::new(1.0, 0.0), 16, &p, t);
    let expected = (k * t * t / 2.0 - 2.5e-3 * k * k * t).exp();
    assert!((z.re - expected).abs() < 1e-13 * expected);
}
