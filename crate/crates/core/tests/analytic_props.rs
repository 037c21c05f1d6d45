use cyclic_aoi_core::analytic::{
    aoi_closed_form, aoi_general, correction_sum, correction_sum_direct, pi_z_sums_closed,
    pi_z_sums_direct, stationary, stationary_power_iteration, Scenario, SourceParams,
};
use cyclic_aoi_core::schedule::{CyclicSchedule, SlotSequence, Source};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn scenario(s1: f64, v1: f64, p: f64, s2: f64, v2: f64, q: f64) -> Scenario {
    Scenario::new(
        SourceParams::new(s1, v1, p, 0.5).unwrap(),
        SourceParams::new(s2, v2, q, 0.5).unwrap(),
    )
    .unwrap()
}

fn params() -> impl Strategy<Value = (f64, f64, f64)> {
    (
        0.1f64..5.0,
        0.0f64..4.0,
        prop_oneof![Just(0.0), 0.0f64..0.97],
    )
        .prop_map(|(m, cv2, p)| (m, cv2 * m * m, p))
}

fn placement() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..6, 1..9).prop_filter("u2 >= 1", |r| r.iter().any(|&x| x > 0))
}

#[test]
fn stationary_matches_power_iteration() {
    let grid = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99];
    for u1 in 1..=8 {
        for &p in &grid {
            let a = stationary(u1, p).unwrap();
            let b = stationary_power_iteration(u1, p).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-12, "u1={u1} p={p}");
        }
    }
}

#[test]
fn aoi_nondecreasing_in_drop_probability() {
    for text in ["12", "12122", "1122222", "1212222", "112"] {
        let s: CyclicSchedule = text.parse().unwrap();
        let mut prev = 0.0;
        for k in 0..=19 {
            let p = k as f64 * 0.05;
            let sc = scenario(2.0, 4.0, p, 3.0, 9.0, 0.3);
            let a = aoi_closed_form(&s, &sc, Source::One).unwrap().total;
            assert!(a >= prev - 1e-12, "{text} p={p}");
            prev = a;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn general_equals_closed_form(r in placement(), a in params(), b in params()) {
        let s = CyclicSchedule::from_placement(r).unwrap();
        let sc = scenario(a.0, a.1, a.2, b.0, b.1, b.2);
        for src in [Source::One, Source::Two] {
            let g = aoi_general(&s, &sc, src).unwrap();
            let c = aoi_closed_form(&s, &sc, src).unwrap();
            prop_assert!(rel(g, c.total) < 1e-10, "{:?} {} vs {}", src, g, c.total);
            prop_assert!(c.h >= c.g);
            prop_assert!(rel(c.total, c.f - c.g + c.h) < 1e-12);
            prop_assert!(c.total > sc.source(src).mean_service);
        }
    }

    #[test]
    fn aggregate_sums_agree(r in placement(), a in params(), b in params()) {
        let s = CyclicSchedule::from_placement(r).unwrap();
        let sc = scenario(a.0, a.1, a.2, b.0, b.1, b.2);
        for src in [Source::One, Source::Two] {
            let (zb, zt) = pi_z_sums_direct(&s, &sc, src).unwrap();
            let (cb, ct) = pi_z_sums_closed(&s, &sc, src).unwrap();
            prop_assert!(rel(zb, cb) < 1e-10);
            prop_assert!(rel(zt, ct) < 1e-10);
        }
    }

    #[test]
    fn linear_correction_matches_windowed(
        r in prop::collection::vec(0u32..9, 1..60),
        p in prop_oneof![Just(0.0), 0.0f64..0.999],
    ) {
        prop_assume!(r.iter().any(|&x| x > 0));
        let fast = correction_sum(&r, p);
        let slow = correction_sum_direct(&r, p);
        prop_assert!((fast - slow).abs() <= 1e-9 * slow.abs().max(1.0), "{} vs {}", fast, slow);
    }

    #[test]
    fn closed_form_rotation_invariant(r in placement(), shift in 0usize..8, a in params(), b in params()) {
        let s = CyclicSchedule::from_placement(r.clone()).unwrap();
        let mut rot = r.clone();
        let k = shift % r.len();
        rot.rotate_left(k);
        let t = CyclicSchedule::from_placement(rot).unwrap();
        let sc = scenario(a.0, a.1, a.2, b.0, b.1, b.2);
        for src in [Source::One, Source::Two] {
            let x = aoi_closed_form(&s, &sc, src).unwrap().total;
            let y = aoi_closed_form(&t, &sc, src).unwrap().total;
            prop_assert!(rel(x, y) < 1e-12);
        }
        let slots: SlotSequence = s.to_slots();
        prop_assert!(slots.same_cycle(&t.to_slots()));
    }
}
