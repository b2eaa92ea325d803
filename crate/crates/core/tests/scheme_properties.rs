use cburgers_core::{lf_step, run, Complex64, ComplexField, SchemeConfig, Termination};
use proptest::prelude::*;

fn field(grid: usize, amplitude: f64) -> impl Strategy<Value = ComplexField> {
    prop::collection::vec((-amplitude..amplitude, -amplitude..amplitude), grid).prop_map(|v| {
        ComplexField::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

fn iterate(u: &ComplexField, cfg: &SchemeConfig, steps: usize) -> ComplexField {
    (0..steps).fold(u.clone(), |u, _| lf_step(&u, cfg))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_equivariance(u in field(48, 1.0), m in 0usize..48) {
        let cfg = SchemeConfig::with_cfl_ratio(48, 0.1).unwrap();
        let a = iterate(&u, &cfg, 25).shifted(m);
        let b = iterate(&u.shifted(m), &cfg, 25);
        prop_assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn mass_is_conserved_without_forcing(u in field(40, 1.0)) {
        let cfg = SchemeConfig::with_cfl_ratio(40, 0.1).unwrap().without_forcing();
        let mass = |f: &ComplexField| f.samples().iter().sum::<Complex64>();
        let m0 = mass(&u);
        let v = iterate(&u, &cfg, 50);
        prop_assert!((mass(&v) - m0).norm() <= 1e-12 * m0.norm().max(1.0));
    }

    #[test]
    fn real_data_stay_real_without_forcing(v in prop::collection::vec(-2.0f64..2.0, 30)) {
        let u = ComplexField::new(v.into_iter().map(|x| Complex64::new(x, 0.0)).collect()).unwrap();
        let cfg = SchemeConfig::with_cfl_ratio(30, 0.1).unwrap().without_forcing();
        let mut w = u;
        for _ in 0..40 {
            w = lf_step(&w, &cfg);
            prop_assert!(w.samples().iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn constants_follow_c_plus_it(c in -3.0f64..3.0, steps in 1usize..400) {
        let cfg = SchemeConfig::with_cfl_ratio(12, 0.1).unwrap();
        let u = ComplexField::constant(12, Complex64::new(c, 0.0)).unwrap();
        let w = iterate(&u, &cfg, steps);
        let exact = Complex64::new(c, steps as f64 * cfg.sigma);
        for z in w.samples() {
            prop_assert!((z - exact).norm() <= 1e-12 * exact.norm().max(1.0));
        }
    }
}

#[test]
fn zero_datum_breaks_when_the_imaginary_part_reaches_four() {
    let cfg = SchemeConfig::with_cfl_ratio(8, 0.1).unwrap().with_t_max(5.0);
    let trace = run(&ComplexField::constant(8, Complex64::new(0.0, 0.0)).unwrap(), &cfg).unwrap();
    assert_eq!(trace.termination, Termination::CflBreak);
    let t_f = trace.t_f.unwrap();
    assert!((t_f - 4.0).abs() <= 2.0 * cfg.sigma, "t_f = {t_f}");
    let short = run(
        &ComplexField::constant(8, Complex64::new(0.0, 0.0)).unwrap(),
        &cfg.clone().with_t_max(1.0),
    )
    .unwrap();
    assert_eq!(short.termination, Termination::HorizonReached);
    assert!(short.t_f.is_none());
}

#[test]
fn shifted_column_removes_the_forcing_ramp() {
    let cfg = SchemeConfig::with_cfl_ratio(16, 0.1).unwrap().with_t_max(0.5);
    let trace = run(&ComplexField::constant(16, Complex64::new(0.3, 0.0)).unwrap(), &cfg).unwrap();
    for (&m, &t) in trace.max_im_shifted.iter().zip(&trace.times) {
        assert!(m.abs() < 1e-12, "t = {t}: {m}");
    }
}
