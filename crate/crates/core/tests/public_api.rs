use proptest::prelude::*;
use safebarrier::approx::{pfd_average_approx, pfd_instant_approx, pfh_average_approx, pfh_from_pfd_approx};
use safebarrier::exact;
use safebarrier::oracle::{estimate_pfd, estimate_pfh};
use safebarrier::sil::{classify_demand_mode, sil_from_pfd, sil_from_pfh};
use safebarrier::*;

fn spec(m: u32, n: u32, lambda: f64, t1: f64, partial: u32, coverage: f64) -> BarrierSpecF64 {
    BarrierSpecF64::new(
        Architecture::new(m, n).unwrap(),
        lambda,
        TestPolicyF64::new(t1, partial, coverage).unwrap(),
    )
    .unwrap()
}

#[test]
fn coefficient_table_for_small_barriers() {
    let table: &[((u32, u32), &[i64])] = &[
        ((1, 1), &[1]),
        ((1, 2), &[2, -1]),
        ((2, 2), &[1]),
        ((1, 3), &[3, -3, 1]),
        ((2, 3), &[3, -2]),
        ((3, 3), &[1]),
        ((1, 4), &[4, -6, 4, -1]),
        ((2, 4), &[6, -8, 3]),
        ((3, 4), &[4, -3]),
        ((4, 4), &[1]),
    ];
    for &((m, n), row) in table {
        let got: Vec<i64> = (m..=n).map(|x| coeff_s(m, n, x).unwrap()).collect();
        assert_eq!(got, row, "{m}oo{n}");
    }
}

#[test]
fn reference_scenario_end_to_end() {
    let s = spec(2, 3, 1e-5, 720.0, 1, 0.0);
    let avg = exact::pfd_average(&s);
    assert_eq!(avg.method(), Method::Exact);
    assert!((avg.value() / 5.138e-5 - 1.0).abs() < 5e-3);
    let approx = pfd_average_approx(&s);
    assert!((approx.get() / 5.184e-5 - 1.0).abs() < 1e-12);
    assert_eq!(approx.value.method(), Method::Approximate);

    let pfh = exact::pfh_average(&s).unwrap().value();
    let rate_form = pfh_average_approx(&s).unwrap().get();
    let forms = pfh_from_pfd_approx(&s).unwrap();
    for v in [rate_form, forms.from_end_of_interval.get(), forms.from_average.get()] {
        assert!((v / pfh - 1.0).abs() < 0.1);
    }

    assert_eq!(sil_from_pfd(avg.value()).unwrap().level, SilLevel::Sil4);
    assert_eq!(sil_from_pfh(rate_form).unwrap().level, SilLevel::Sil2);
    assert_eq!(sil_from_pfh(pfh).unwrap().level, SilLevel::Sil2);
    assert_eq!(classify_demand_mode(0.1, 720.0).unwrap(), DemandMode::LowDemand);
}

#[test]
fn partial_curve_has_sawtooth_shape() {
    let s = spec(2, 3, 1e-5, 720.0, 3, 0.5);
    let curve = exact::pfd_curve(&s, 4).unwrap();
    let at_240: Vec<f64> = curve.iter().filter(|p| p.t_hours == 240.0).map(|p| p.value).collect();
    assert_eq!(at_240.len(), 2);
    assert!(at_240[0] > at_240[1]);
    let instant = pfd_instant_approx(&s, 240.0).unwrap().get();
    assert!(instant >= at_240[1]);
}

#[test]
fn single_precision_aliases() {
    let s = BarrierSpecF32::new(Architecture::new(1, 2).unwrap(), 2e-4, TestPolicyF32::full_only(1000.0).unwrap()).unwrap();
    let model = ExactModelF32::new(s);
    let v = model.pfd_average().value();
    let reference = ExactModelF64::new(spec(1, 2, 2e-4, 1000.0, 1, 0.0)).pfd_average().value();
    assert!(((v as f64) / reference - 1.0).abs() < 1e-5);
}

#[test]
fn oracle_against_exact_inflated_rate() {
    let s = spec(1, 2, 5e-4, 1000.0, 2, 0.6);
    let config = SimulationConfig::new(300_000, 2024, 8).unwrap();
    let sim = estimate_pfd(&s.into(), &config).unwrap();
    let model = ExactModelF64::new(s);
    assert!(sim.average.within(model.pfd_average().value(), 4.0));
    let basic = s.without_partial_tests();
    let pfh = estimate_pfh(&basic.into(), &config).unwrap();
    let expected = ExactModelF64::new(basic).pfh_average().unwrap().value();
    assert!(pfh.within(expected, 4.0), "{pfh:?} vs {expected}");
}

#[test]
fn errors_are_classified() {
    let s = spec(2, 3, 1e-5, 720.0, 1, 0.0);
    assert!(!exact::pfd_instant(&s, 1000.0).unwrap_err().is_numerical());
    assert!(Architecture::new(3, 2).is_err());
    assert!(TestPolicyF64::new(720.0, 0, 0.5).is_err());
    assert!(TestPolicyF64::new(720.0, 2, 1.5).is_err());
    assert!(BarrierSpecF64::new(Architecture::new(1, 1).unwrap(), 0.0, TestPolicyF64::full_only(1.0).unwrap()).is_err());
}

proptest! {
    #[test]
    fn sil_bands_are_monotone(a in -12.0f64..0.0, b in -12.0f64..0.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lo, hi) = (10f64.powf(lo), 10f64.powf(hi));
        prop_assert!(sil_from_pfd(lo).unwrap().level.rank() <= sil_from_pfd(hi).unwrap().level.rank());
        prop_assert!(sil_from_pfh(lo).unwrap().level.rank() <= sil_from_pfh(hi).unwrap().level.rank());
    }

    #[test]
    fn coverage_never_increases_average(e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0, n in 2u32..6) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = ExactModelF64::new(spec(2, 3, 1e-4, 1000.0, n, lo)).pfd_average().value();
        let b = ExactModelF64::new(spec(2, 3, 1e-4, 1000.0, n, hi)).pfd_average().value();
        prop_assert!(b <= a * (1.0 + 1e-13));
    }

    #[test]
    fn pfh_average_grows_with_test_period(t1 in 50.0f64..5000.0, factor in 1.01f64..4.0, m in 1u32..=3) {
        let a = ExactModelF64::new(spec(m, 3, 2e-6, t1, 1, 0.0)).pfh_average().unwrap().value();
        let b = ExactModelF64::new(spec(m, 3, 2e-6, t1 * factor, 1, 0.0)).pfh_average().unwrap().value();
        prop_assert!(b >= a * (1.0 - 1e-9), "{} then {}", a, b);
    }

    #[test]
    fn coeff_v_nonincreasing_in_coverage(m in 1u32..=4, extra in 0u32..=4, n in 1u32..8, e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0) {
        let nn = m + extra;
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let vl = coeff_v(m, nn, n, lo).unwrap();
        let vh = coeff_v(m, nn, n, hi).unwrap();
        prop_assert!(vh <= vl * (1.0 + 1e-15));
        prop_assert!(vh >= 1.0 - 1e-15);
    }

    #[test]
    fn coeff_t_in_unit_interval(n in 1u32..10, e in 0.0f64..=1.0, x in 1u32..=20, lambda_t0 in 1e-8f64..1.0) {
        let t = coeff_t(n, e, lambda_t0, 1.0, x).unwrap();
        prop_assert!(t > 0.0 && t <= 1.0);
        let t_more = coeff_t(n, e, lambda_t0 * 2.0, 1.0, x).unwrap();
        prop_assert!(t_more <= t);
    }
}
