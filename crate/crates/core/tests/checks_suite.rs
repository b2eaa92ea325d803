use cburgers_core::checks::{
    check_energy_decay, check_errfn, check_gaussian_tail, check_pw, check_theorem1, check_theorem2, fit_theorem1,
    CheckError, Theorem1Calibration,
};
use cburgers_core::field::sobolev_norm;
use cburgers_core::rescaled::re_lambda_1;
use cburgers_core::{lambda_k, run_rescaled, Complex64, ModeSpectrum, RescaledParams};
use proptest::prelude::*;
use std::f64::consts::PI;

fn zero_mean_spectrum() -> impl Strategy<Value = ModeSpectrum> {
    (1usize..12, 1u32..4).prop_flat_map(|(k, k0)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * k + 1).prop_map(move |c| {
            let mut s = ModeSpectrum::from_coefficients(k0, c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
                .unwrap();
            s.set(0, Complex64::new(0.0, 0.0));
            s
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poincare_wirtinger_on_random_spectra(s in zero_mean_spectrum()) {
        let r = check_pw(&s);
        prop_assert!(r.passed, "margin {}", r.margin);
        prop_assert!(r.margin <= 1.0 + 1e-15);
        // Independent evaluation with the unit lowest frequency.
        let lhs = sobolev_norm(&s, 0);
        let grad = (sobolev_norm(&s, 1).powi(2) - lhs * lhs).max(0.0).sqrt();
        prop_assert!(lhs <= grad / (2.0 * PI * s.base_frequency() as f64) * (1.0 + 1e-12));
    }
}

#[test]
fn poincare_wirtinger_is_an_equality_on_eigenmodes() {
    for k0 in 1..4 {
        for n in 1..10 {
            let r = check_pw(&ModeSpectrum::sine_sum(12, k0, &[(n, 1.3)]));
            assert!((r.margin - 1.0).abs() <= 1e-12 && r.passed);
            let mut single = ModeSpectrum::zeros(12, k0);
            single.set(-(n as i64), Complex64::new(0.4, 2.0));
            assert!((check_pw(&single).margin - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn spectrum_above_the_third_harmonic_gains_the_factor_three() {
    let s = ModeSpectrum::from_fn(9, 1, |k| if k.abs() >= 3 { Complex64::new(1.0, -0.5) / k as f64 } else { Complex64::new(0.0, 0.0) });
    let r = check_pw(&s);
    assert!(r.passed);
    let lhs = sobolev_norm(&s, 0);
    let grad = (sobolev_norm(&s, 1).powi(2) - lhs * lhs).sqrt();
    assert!(lhs <= grad / (6.0 * PI));
}

#[test]
fn error_function_bound_on_a_twenty_point_grid() {
    for (eps, k0) in [(1e-2, 1), (5e-3, 1), (2e-2, 2)] {
        let center = 2.0 * PI * k0 as f64 / eps;
        let grid: Vec<f64> = (0..20).map(|i| center * i as f64 / 20.0).collect();
        let r = check_errfn(eps, k0, &grid).unwrap();
        assert!(r.passed, "eps {eps}: margin {}", r.margin);
        assert!(r.margin > 0.0);
    }
    let half = check_errfn(1e-2, 1, &[0.5 * 2.0 * PI / 1e-2]).unwrap();
    assert!(half.passed);
    assert!(matches!(check_errfn(1e-2, 1, &[2.0 * PI / 1e-2]), Err(CheckError::OutOfRange { .. })));
}

#[test]
fn error_function_integral_near_zero_is_linear() {
    let eps = 1e-2;
    let t = 1e-3;
    let r = check_errfn(eps, 1, &[t]).unwrap();
    let o = r.details[0];
    // The quadratic part of the rescaled exponent is below πεt² ≈ 3e-8 here.
    let rate = 4.0 * PI * PI;
    let approx = (1.0 - (-rate * t).exp()) / rate;
    assert!((o.value - approx).abs() <= 1e-7 * approx);
    assert!(r.passed);
}

#[test]
fn gaussian_tail_primitive() {
    let r = check_gaussian_tail(&[0.5, 1.0, 2.0]).unwrap();
    assert!(r.passed);
    for o in &r.details {
        let exact = PI.sqrt() / 2.0 * libm::erfc(o.t);
        assert!((o.value - exact).abs() <= 1e-12, "x = {}", o.t);
    }
    assert!(check_gaussian_tail(&[0.0]).is_err());
}

#[test]
fn theorem2_rejects_a_vanishing_first_harmonic() {
    let datum = ModeSpectrum::sine_sum(8, 1, &[(2, 1.0)]);
    let params = RescaledParams::new(1, 1e-2, 0.4, 8).with_t_end(0.1);
    let traj = run_rescaled(&datum, &params).unwrap();
    assert!(matches!(check_theorem2(&traj), Err(CheckError::HypothesisViolated(_))));
}

#[test]
fn lower_bound_exponent_vanishes_at_the_amplification_time() {
    let p = RescaledParams::new(1, 1e-2, 0.4, 8);
    let t = p.amplification_time();
    assert!(re_lambda_1(t, &p).abs() <= 1e-9);
    assert!((re_lambda_1(p.transition_time(), &p) + 4.0 * PI.powi(3) / p.eps).abs() <= 1e-9);
}

fn small_sine(eps: f64) -> (ModeSpectrum, RescaledParams) {
    let datum = ModeSpectrum::sine_sum(16, 1, &[(1, 0.05)]);
    let params = RescaledParams::new(1, eps, 0.0, 16)
        .with_dt(1e-3)
        .with_t_end(0.9 * 2.0 * PI / eps)
        .with_record_every(20);
    (datum, params)
}

#[test]
fn theorem1_zero_datum_passes() {
    let (_, params) = small_sine(1e-2);
    let params = params.with_t_end(1.0);
    let traj = run_rescaled(&ModeSpectrum::zeros(16, 1), &params).unwrap();
    let r = check_theorem1(&traj, 2, &Theorem1Calibration { c_im: 1.0, c_re: 1.0 }).unwrap();
    assert!(r.passed);
    assert_eq!(r.note_value("c_im"), Some(0.0));
}

#[test]
fn theorem1_rejects_the_wrong_regime() {
    let datum = ModeSpectrum::sine_sum(8, 1, &[(1, 0.05)]);
    let theorem2 = RescaledParams::new(1, 1e-2, 0.4, 8).with_t_end(1.0);
    let traj = run_rescaled(&datum, &theorem2).unwrap();
    assert!(matches!(fit_theorem1(&traj, 2), Err(CheckError::WrongRegime(_))));
    let past = RescaledParams::new(1, 1e-2, 0.0, 8).with_t_end(2.0 * PI / 1e-2);
    let traj = run_rescaled(&datum, &past.with_dt(0.1)).unwrap();
    assert!(matches!(fit_theorem1(&traj, 2), Err(CheckError::WrongRegime(_))));
}

#[test]
fn theorem1_linear_constants_match_the_closed_form() {
    let (datum, params) = small_sine(1e-2);
    let params = params.with_t_end(5.0).linear_only();
    let traj = run_rescaled(&datum, &params).unwrap();
    let fit = fit_theorem1(&traj, 2).unwrap();
    let norm = sobolev_norm(&datum, 3);
    let mut c_im = 0.0f64;
    for state in traj.states.iter().filter(|s| s.t() >= 10.0 * params.dt) {
        let t = state.t();
        let exact = ModeSpectrum::from_fn(16, 1, |k| datum.get(k) * lambda_k(k, t, &params).exp());
        c_im = c_im.max(sobolev_norm(&exact.imag_part(), 2) / (params.eps * t * norm));
    }
    assert!((fit.c_im - c_im).abs() <= 1e-9 * c_im, "{} vs {c_im}", fit.c_im);
    // The linear ratio peaks early, near t ≈ 1/(4π²).
    assert!(fit.t_at_c_im < 0.1, "{}", fit.t_at_c_im);
}

#[test]
fn energy_decays_for_small_data() {
    let (datum, params) = small_sine(1e-2);
    let traj = run_rescaled(&datum, &params.clone().with_t_end(50.0)).unwrap();
    for s in 0..3 {
        let r = check_energy_decay(&traj, s);
        assert!(r.passed, "s = {s}: margin {}", r.margin);
        assert!(r.note_value("window_end").is_none());
        assert_eq!(r.note_value("checked_times"), Some(traj.states.len() as f64));
    }
    let zero = run_rescaled(&ModeSpectrum::zeros(16, 1), &params.with_t_end(1.0)).unwrap();
    assert!(check_energy_decay(&zero, 2).passed);
}

#[test]
fn energy_check_skips_outside_the_smallness_window() {
    let datum = ModeSpectrum::sine_sum(16, 1, &[(1, 2.0)]);
    let params = RescaledParams::new(1, 1e-2, 0.0, 16).with_t_end(1.0);
    let traj = run_rescaled(&datum, &params).unwrap();
    let r = check_energy_decay(&traj, 1);
    assert!(r.passed);
    assert_eq!(r.note_value("window_end"), Some(0.0));
    assert_eq!(r.note_value("checked_times"), Some(0.0));
}
