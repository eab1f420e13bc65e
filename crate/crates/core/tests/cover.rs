mod common;

use std::time::Instant;

use prnred_core::{
    compute_cover_set, concrete_cover_set, spec_count, verify_cover_set, Prn, RegulatorState, ValueChange,
};
use proptest::prelude::*;

/// A target `t` regulated by `regs` components of maximum `m`, plus itself with maximum 1.
fn star(regs: usize, m: u8) -> Prn {
    let mut maxes = vec![m; regs];
    maxes.push(1);
    let mut inputs = vec![vec![]; regs];
    inputs.push((0..regs).map(|u| (u, 0)).collect());
    common::build(&maxes, &inputs)
}

fn predicate(bits: &[bool]) -> impl Fn(&RegulatorState) -> bool + '_ {
    move |w: &RegulatorState| {
        let h = w.values.iter().fold(17usize, |h, &k| h.wrapping_mul(31).wrapping_add(k as usize));
        bits[h % bits.len()]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn covers_are_deterministic_and_exact(
        regs in 0usize..=4,
        m in 1u8..=2,
        bits in proptest::collection::vec(any::<bool>(), 1..40),
    ) {
        let prn = star(regs, m);
        let t = prn.components().last().unwrap();
        let change = ValueChange::new(t, 0, 1);
        let enabling = predicate(&bits);
        let a = compute_cover_set(&prn, change, &enabling);
        let b = compute_cover_set(&prn, change, &enabling);
        prop_assert_eq!(&a, &b);
        prop_assert!(verify_cover_set(&prn, &a, &enabling));
        let concrete = concrete_cover_set(&prn, change, &enabling);
        prop_assert!(spec_count(&a) <= spec_count(&concrete));
    }
}

#[test]
fn cover_time_grows_subquadratically_in_regulator_states() {
    let time = |m: u8| {
        let prn = star(3, m);
        let t = prn.components().last().unwrap();
        let change = ValueChange::new(t, 0, 1);
        let bits: Vec<bool> = (0..97).map(|i| (i * 7919) % 5 != 0).collect();
        let enabling = predicate(&bits);
        let mut samples: Vec<f64> = (0..5)
            .map(|_| {
                let start = Instant::now();
                let cs = compute_cover_set(&prn, change, &enabling);
                let elapsed = start.elapsed().as_secs_f64();
                assert!(verify_cover_set(&prn, &cs, &enabling));
                elapsed
            })
            .collect();
        samples.sort_by(f64::total_cmp);
        (samples[2], prn.regulator_state_count(t))
    };
    let (small, n_small) = time(3);
    let (large, n_large) = time(7);
    let growth = n_large as f64 / n_small as f64;
    assert!(
        large / small.max(1e-6) < growth * growth,
        "{n_small} states: {small:.6}s, {n_large} states: {large:.6}s"
    );
}
