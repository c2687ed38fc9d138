use chainctl::chain::{
    actuator_at, build_actuator, build_drift, heisenberg_default, heisenberg_energies, transition_frequency, ChainSpec,
};
use chainctl::io::{parse_spec, read_sequence_csv, serialize_spec, write_sequence_csv};
use chainctl::lie::{chain_closure, thm1_condition, CLOSURE_TOL};
use chainctl::linalg::{hs_norm, max_abs_diff};
use chainctl::propagator::{gate_error, switch_hamiltonians, SwitchPropagator, SwitchSequence, UnitaryOp};
use chainctl::synth::{build_target, nelder_mead, GateName, NelderMeadOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn couplings(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.5f64..2.0, n - 1)
}

/// N in `lo..=hi`, couplings in [0.5, 2), actuator anywhere.
fn heis_chain(lo: usize, hi: usize) -> impl Strategy<Value = ChainSpec> {
    (lo..=hi)
        .prop_flat_map(|n| (couplings(n), 1..n))
        .prop_map(|(d, r)| heisenberg_default(d, r).unwrap())
}

fn generic_chain(lo: usize, hi: usize) -> impl Strategy<Value = ChainSpec> {
    (lo..=hi)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop_oneof![-2.0f64..-0.3, 0.3f64..2.0], n - 1),
                prop::collection::vec(-2.0f64..2.0, n),
                1..n,
                -2.0f64..2.0,
                -2.0f64..2.0,
            )
        })
        .prop_map(|(d, e, r, a, b)| ChainSpec::new(e.len(), d, e, r, a, b).unwrap())
}

fn durations(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..6.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drift_is_hermitian_tridiagonal(spec in generic_chain(2, 9)) {
        let a0 = build_drift(&spec);
        let m = a0.matrix();
        prop_assert!(max_abs_diff(m, &m.adjoint()) == 0.0);
        for i in 0..spec.n() {
            for j in 0..spec.n() {
                if i.abs_diff(j) > 1 {
                    prop_assert_eq!(m[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        for k in 1..spec.n() {
            prop_assert_eq!(m[(k - 1, k)].re, spec.couplings()[k - 1]);
        }
    }

    #[test]
    fn heisenberg_energies_mirror(d in (2usize..10).prop_flat_map(couplings)) {
        let mut rev = d.clone();
        rev.reverse();
        let mut e = heisenberg_energies(&d);
        e.reverse();
        let er = heisenberg_energies(&rev);
        for (a, b) in e.iter().zip(&er) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn heisenberg_transition_frequency(spec in heis_chain(2, 9)) {
        let r = spec.actuator();
        let omega = transition_frequency(&spec, r, r + 1).unwrap();
        let expected = spec.coupling(r as isize - 1) - spec.coupling(r as isize + 1);
        prop_assert!((omega - expected).abs() < 1e-12, "{omega} vs {expected}");
    }

    #[test]
    fn actuator_has_norm_sqrt2(n in 2usize..12, r_frac in 0.0f64..1.0) {
        let r = 1 + ((n - 1) as f64 * r_frac) as usize;
        let r = r.min(n - 1);
        let a = actuator_at(n, r).unwrap();
        prop_assert!((hs_norm(a.matrix()) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn propagators_are_unitary(spec in generic_chain(2, 8), t in durations(24)) {
        let prop = SwitchPropagator::for_chain(&spec).unwrap();
        let u = prop.propagate(&SwitchSequence::new(t).unwrap());
        prop_assert!(u.unitarity_defect() <= 1e-10);
    }

    #[test]
    fn even_prefix_concatenation(spec in generic_chain(2, 6), a in durations(6), b in durations(6)) {
        // Parity of slot indices is preserved only after an even-length prefix.
        let mut a = a;
        if a.len() % 2 == 1 {
            a.push(0.0);
        }
        let prop = SwitchPropagator::for_chain(&spec).unwrap();
        let sa = SwitchSequence::new(a).unwrap();
        let sb = SwitchSequence::new(b).unwrap();
        let joined = prop.propagate(&sa.concat(&sb));
        let product = prop.propagate(&sa).compose(&prop.propagate(&sb));
        prop_assert!(max_abs_diff(joined.matrix(), product.matrix()) <= 1e-10);
    }

    #[test]
    fn degenerate_switch_collapses(spec in generic_chain(2, 6), t in durations(10)) {
        let spec = spec.with_switch_levels(0.7, 0.7).unwrap();
        let prop = SwitchPropagator::for_chain(&spec).unwrap();
        let seq = SwitchSequence::new(t).unwrap();
        let single = SwitchSequence::new(vec![seq.total_time()]).unwrap();
        prop_assert!(max_abs_diff(prop.propagate(&seq).matrix(), prop.propagate(&single).matrix()) <= 1e-10);
    }

    #[test]
    fn gate_error_symmetric_and_phase_blind(t in durations(8), phase in 0.0f64..6.3, g in 0usize..6) {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let u = SwitchPropagator::for_chain(&spec).unwrap().propagate(&SwitchSequence::new(t).unwrap());
        let target = build_target(GateName::ALL[g]);
        let e = gate_error(&u, target.matrix()).unwrap();
        prop_assert!((e - gate_error(target.matrix(), &u).unwrap()).abs() < 1e-14);
        let phased = UnitaryOp::new(u.matrix() * Complex64::from_polar(1.0, phase)).unwrap();
        prop_assert!((e - gate_error(&phased, target.matrix()).unwrap()).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn spec_text_round_trip(spec in generic_chain(2, 9)) {
        prop_assert_eq!(parse_spec(&serialize_spec(&spec)).unwrap(), spec);
    }

    #[test]
    fn sequence_csv_reproduces_error(t in durations(20), g in 0usize..6) {
        let spec = heisenberg_default(vec![1.0; 3], 1).unwrap();
        let prop = SwitchPropagator::for_chain(&spec).unwrap();
        let target = build_target(GateName::ALL[g]);
        let seq = SwitchSequence::new(t).unwrap();
        let before = gate_error(&prop.propagate(&seq), target.matrix()).unwrap();
        let mut buf = Vec::new();
        write_sequence_csv(&mut buf, &seq).unwrap();
        let back = read_sequence_csv(buf.as_slice()).unwrap();
        let after = gate_error(&prop.propagate(&back), target.matrix()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12);
    }

    #[test]
    fn simplex_best_value_never_increases(
        centre in prop::collection::vec(-3.0f64..3.0, 1..6),
        x0_shift in -2.0f64..2.0,
    ) {
        let f = |x: &[f64]| x.iter().zip(&centre).map(|(a, c)| (a - c).powi(2) * (1.0 + c.abs())).sum::<f64>();
        let x0: Vec<f64> = centre.iter().map(|c| c + x0_shift).collect();
        let opts = NelderMeadOptions { max_evals: 300, ..Default::default() };
        let res = nelder_mead(f, &x0, &opts).unwrap();
        prop_assert!(res.history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(res.f <= f(&x0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_condition_implies_full_closure(spec in heis_chain(3, 6)) {
        prop_assume!(thm1_condition(&spec));
        let dim = chain_closure(&spec, CLOSURE_TOL).unwrap().dimension();
        prop_assert_eq!(dim, spec.n() * spec.n() - 1);
    }

    #[test]
    fn closure_dimension_is_mirror_invariant(spec in generic_chain(3, 6)) {
        let a = chain_closure(&spec, CLOSURE_TOL).unwrap().dimension();
        let b = chain_closure(&spec.reflected(), CLOSURE_TOL).unwrap().dimension();
        prop_assert_eq!(a, b);
    }

    /// Any uniform chain is controllable from the first link.
    #[test]
    fn uniform_chain_end_actuator(n in 3usize..7, d in 0.3f64..3.0) {
        let spec = heisenberg_default(vec![d; n - 1], 1).unwrap();
        prop_assert_eq!(chain_closure(&spec, CLOSURE_TOL).unwrap().dimension(), n * n - 1);
    }

    /// Mirror symmetry with a centred actuator confines the dynamics.
    #[test]
    fn centred_actuator_on_mirror_chain(half in 1usize..4, d in 0.3f64..3.0) {
        let n = 2 * half;
        let spec = heisenberg_default(vec![d; n - 1], half).unwrap();
        prop_assert!(chain_closure(&spec, CLOSURE_TOL).unwrap().dimension() < n * n - 1);
    }

    #[test]
    fn switch_pair_differs_by_scaled_actuator(spec in generic_chain(2, 8)) {
        let (h1, h2) = switch_hamiltonians(&spec);
        let ar = build_actuator(&spec);
        let diff = h2.matrix() - h1.matrix();
        let expected = ar.matrix() * Complex64::new(spec.f_on() - spec.f_off(), 0.0);
        prop_assert!(max_abs_diff(&diff, &expected) < 1e-12);
    }
}
