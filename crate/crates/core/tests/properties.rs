//! Randomized properties of the public API.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use dde_resolvent::history::{trace_at_tau, transport_resolvent_apply, HistorySegment, RingBuffer};
use dde_resolvent::io::{format_value, read_series, write_scalar_csv};
use dde_resolvent::pde::{thomas_solve, Tridiag};
use dde_resolvent::scalar::{
    run, Coefficient, DelayMode, RunResult, ScalarDelayProblem, ScalarHistory, Scheme, SchemeConfig,
};
use dde_resolvent::stability::{
    spectral_radius, verify_abel, verify_telescoping, CompanionOperator,
};

fn matrix(d: usize, entries: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| entries[(i * d + j) % entries.len()] / d as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_buffer_is_a_sliding_window(init in prop::collection::vec(-1e3..1e3f64, 1..20), pushes in prop::collection::vec(-1e3..1e3f64, 0..50)) {
        let mut buf = RingBuffer::from_samples(&init).unwrap();
        let mut model = init.clone();
        for &v in &pushes {
            buf.push(v);
            model.remove(0);
            model.push(v);
            prop_assert_eq!(buf.oldest(), model[0]);
        }
        prop_assert_eq!(buf.to_vec(), model);
    }

    #[test]
    fn schemes_are_linear_in_the_history(c in -5.0..5.0f64, scheme in prop_oneof![Just(Scheme::ImplicitEuler), Just(Scheme::LieTrotter)]) {
        let base = ScalarDelayProblem::new(Coefficient::Constant(-0.3), -1.2, -0.5, ScalarHistory::poly10()).unwrap();
        let scaled = ScalarDelayProblem::new(
            Coefficient::Constant(-0.3),
            -1.2,
            -0.5,
            ScalarHistory::from_fn("scaled", move |t| c * dde_resolvent::oracle::poly_history(t)),
        )
        .unwrap();
        let cfg = SchemeConfig::new(scheme, DelayMode::Grid, 0.05, 5.0);
        let u = run(&base, &cfg).unwrap();
        let v = run(&scaled, &cfg).unwrap();
        for (x, y) in u.values.iter().zip(&v.values) {
            prop_assert!((c * x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn spectral_radius_matches_dense_eigenvalues(m in 1usize..12, alpha in -1.5..1.5f64, beta in -1.0..1.0f64) {
        let op = CompanionOperator::new(m, alpha, beta).unwrap();
        let rho = spectral_radius(&op, 1e-12).unwrap();
        let dense = op.to_dense().complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((rho - dense).abs() <= 1e-7 * (1.0 + dense), "{} vs {}", rho, dense);
    }

    #[test]
    fn thomas_solves_dominant_systems(n in 1usize..40, seed in prop::collection::vec(-1.0..1.0f64, 3..120)) {
        let pick = |k: usize| seed[k % seed.len()];
        let sub: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { pick(3 * i) }).collect();
        let sup: Vec<f64> = (0..n).map(|i| if i + 1 == n { 0.0 } else { pick(3 * i + 1) }).collect();
        let diag: Vec<f64> = (0..n).map(|i| 2.5 + pick(3 * i + 2)).collect();
        let rhs: Vec<f64> = (0..n).map(|i| pick(7 * i + 5)).collect();
        let sys = Tridiag::new(sub, diag, sup).unwrap();
        let x = thomas_solve(&sys, &rhs).unwrap();
        let back = sys.matvec(&x);
        for (b, r) in back.iter().zip(&rhs) {
            prop_assert!((b - r).abs() <= 1e-13);
        }
        let factored = sys.clone().factored().unwrap();
        prop_assert_eq!(factored.solve(&rhs).unwrap(), x);
    }

    #[test]
    fn csv_round_trip(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 0..40)) {
        let times: Vec<f64> = (0..values.len()).map(|k| k as f64 * 0.1).collect();
        let r = RunResult { times, values: values.clone(), scheme: "ie-grid".into(), wall_clock: 0.0 };
        let mut buf = Vec::new();
        write_scalar_csv(&r, &mut buf).unwrap();
        let (_, u) = read_series(buf.as_slice()).unwrap();
        prop_assert_eq!(u.len(), values.len());
        for (a, b) in u.iter().zip(&values) {
            prop_assert_eq!(format_value(*a), format_value(*b));
        }
    }

    #[test]
    fn trace_bound(f in -10.0..10.0f64, log_h in -3.0..0.5f64, tau in -3.0..-0.05f64, intervals in 8usize..300, amps in prop::collection::vec(-5.0..5.0f64, 1..6)) {
        let h = 10f64.powf(log_h);
        let g = HistorySegment::sample(
            |s| amps.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * 3.0 * s).cos()).sum(),
            tau,
            intervals,
        )
        .unwrap();
        let rho = transport_resolvent_apply(f, &g, h).unwrap();
        prop_assert!(trace_at_tau(&rho).abs() <= f.abs() + g.l2_norm() / (2.0 * h).sqrt());
    }

    #[test]
    fn telescoping_identities(d in 1usize..=8, n in 1usize..=30, entries in prop::collection::vec(-1.0..1.0f64, 16..64)) {
        let r = matrix(d, &entries);
        let p = matrix(d, &entries[3..]);
        let auto = verify_telescoping(&vec![r.clone(); n], &vec![p.clone(); n]).unwrap();
        prop_assert!(auto.holds(1e-12), "{:?}", auto);
        let rs: Vec<_> = (0..n).map(|k| matrix(d, &entries[k % 5..])).collect();
        let ps: Vec<_> = (0..n).map(|k| matrix(d, &entries[(k + 2) % 7..])).collect();
        let ordered = verify_telescoping(&rs, &ps).unwrap();
        prop_assert!(ordered.holds(1e-12), "{:?}", ordered);
        let taus: Vec<_> = (0..n).map(|k| DVector::from_fn(d, |i, _| entries[(k + i) % entries.len()])).collect();
        let abel = verify_abel(&r, &taus).unwrap();
        prop_assert!(abel.holds(1e-12), "{:?}", abel);
    }
}
