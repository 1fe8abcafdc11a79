use proptest::prelude::*;
use stenzel_spin7::ivp::{integrate, rhs, Classification, SolveOptions};
use stenzel_spin7::moduli::{survey_with, x_bracket};
use stenzel_spin7::Execution;

fn grid_opts(step: f64, n: usize) -> SolveOptions {
    let mut opts = SolveOptions::default();
    opts.sample_times = Some((1..=n).map(|k| k as f64 * step).collect());
    opts
}

#[test]
fn halving_tolerances_converges() {
    let mut opts = SolveOptions::default();
    opts.horizon = 6.0;
    opts.sample_times = Some(vec![5.0]);
    let coarse = *integrate(0.3, &opts).unwrap().at(5.0).unwrap();
    opts.rtol /= 2.0;
    opts.atol /= 2.0;
    let fine = *integrate(0.3, &opts).unwrap().at(5.0).unwrap();
    assert!((coarse.a - fine.a).abs() < 1e-8);
    assert!((coarse.b - fine.b).abs() < 1e-8);
}

#[test]
fn parallel_survey_matches_sequential() {
    let grid: Vec<f64> = (0..40).map(|k| k as f64 * 0.025).collect();
    let opts = SolveOptions::default();
    let par = survey_with(&grid, &opts, Execution::Parallel).unwrap();
    let seq = survey_with(&grid, &opts, Execution::Sequential).unwrap();
    assert_eq!(par, seq);
    let (lo, hi) = x_bracket(&par);
    assert!(lo.unwrap() < hi.unwrap());
}

#[test]
fn samples_strictly_increasing() {
    let tr = integrate(0.7, &SolveOptions::default()).unwrap();
    assert_eq!(tr.samples[0].t, SolveOptions::default().t_switch);
    assert!(tr.samples.windows(2).all(|w| w[0].t < w[1].t));
}

#[test]
fn blowup_certificate_precedes_divergence() {
    for a0 in [0.65, 0.8, 1.5, 3.0] {
        let tr = integrate(a0, &SolveOptions::default()).unwrap();
        assert_eq!(tr.classification, Classification::BlowupCertified);
        let cert = tr.certificate().unwrap();
        assert!(cert.value > cert.t);
        assert!(tr.divergence_time().unwrap() <= cert.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sign_of_a_is_preserved(a0 in prop_oneof![-1.2f64..-1e-3, 1e-3f64..1.2]) {
        let tr = integrate(a0, &grid_opts(0.05, 2000)).unwrap();
        for s in &tr.samples {
            prop_assert!(s.a * a0.signum() > 0.0, "t = {}, a = {}", s.t, s.a);
        }
    }

    #[test]
    fn reflection_is_exact(a0 in 1e-3f64..1.2) {
        let opts = grid_opts(0.1, 300);
        let p = integrate(a0, &opts).unwrap();
        let m = integrate(-a0, &opts).unwrap();
        prop_assert_eq!(p.classification, m.classification);
        for (x, y) in p.samples.iter().zip(&m.samples) {
            prop_assert_eq!(x.a, -y.a);
            prop_assert_eq!(x.b, y.b);
        }
    }

    #[test]
    fn critical_locus(t in 0.1f64..20.0, a in -3.0f64..3.0) {
        use stenzel_spin7::geometry::cal_p;
        let (da, _) = rhs(t, a, 1.0 / cal_p(t)).unwrap();
        prop_assert!(da.abs() < 1e-12 * (1.0 + a.abs() / t));
    }
}
