use cyclic_aoi_core::analytic::{correction_sum_direct, weighted_aoi, Scenario, SourceParams};
use cyclic_aoi_core::optimizer::{
    brute_force, compositions, insertion_search, near_optimal_search, placement_cost,
    rr_weighted_aoi, uniform_placement,
};
use cyclic_aoi_core::schedule::CyclicSchedule;

const PS: [f64; 4] = [0.0, 0.3, 0.7, 0.95];

#[test]
fn uniform_placement_minimizes_placement_cost() {
    for u1 in 1..=5u32 {
        for u2 in 1..=12u32 {
            let r = uniform_placement(u1 as u64, u2 as u64);
            for &p in &PS {
                let ours = placement_cost(&r, p);
                let best = compositions(u2, u1 as usize)
                    .iter()
                    .map(|c| placement_cost(c, p))
                    .fold(f64::INFINITY, f64::min);
                assert!(ours <= best * (1.0 + 1e-12), "({u1},{u2}) p={p}");
            }
        }
    }
}

#[test]
fn uniform_placement_jointly_minimizes_both_sources() {
    for u1 in 1..=5u32 {
        for u2 in 1..=12u32 {
            let ours =
                CyclicSchedule::from_placement(uniform_placement(u1 as u64, u2 as u64)).unwrap();
            for &p in &PS {
                let own = correction_sum_direct(ours.placement(), p);
                let dual = correction_sum_direct(ours.dual().placement(), p);
                for c in compositions(u2, u1 as usize) {
                    let s = CyclicSchedule::from_placement(c).unwrap();
                    assert!(own <= correction_sum_direct(s.placement(), p) + 1e-9);
                    assert!(dual <= correction_sum_direct(s.dual().placement(), p) + 1e-9);
                }
            }
        }
    }
}

#[test]
fn repeated_pattern_has_same_weighted_aoi() {
    let sc = Scenario::new(
        SourceParams::new(2.0, 4.0, 0.6, 0.3).unwrap(),
        SourceParams::new(3.0, 9.0, 0.8, 0.7).unwrap(),
    )
    .unwrap();
    for u1 in 1..=5u64 {
        for u2 in 1..=(6 - u1) {
            let base = CyclicSchedule::from_placement(uniform_placement(u1, u2)).unwrap();
            let w = weighted_aoi(&base, &sc).unwrap();
            for k in 2..=4u64 {
                let rep =
                    CyclicSchedule::from_placement(uniform_placement(k * u1, k * u2)).unwrap();
                let wk = weighted_aoi(&rep, &sc).unwrap();
                assert!((w - wk).abs() <= 1e-10 * w, "({u1},{u2}) k={k}: {w} {wk}");
            }
        }
    }
}

fn scenario_grid() -> Vec<Scenario> {
    let mut out = Vec::new();
    for &(s1, v1, p, w1) in &[
        (1.0, 0.0, 0.2, 0.5),
        (2.0, 4.0, 0.8, 0.2),
        (0.5, 0.1, 0.5, 0.7),
    ] {
        for &(s2, v2, q) in &[(1.0, 0.0, 0.9), (3.0, 9.0, 0.4)] {
            out.push(
                Scenario::new(
                    SourceParams::new(s1, v1, p, w1).unwrap(),
                    SourceParams::new(s2, v2, q, 1.0 - w1).unwrap(),
                )
                .unwrap(),
            );
        }
    }
    out
}

#[test]
fn doubling_alpha_never_worsens() {
    for sc in scenario_grid() {
        let mut prev = f64::INFINITY;
        for alpha in [5, 10, 20, 40, 80] {
            let r = near_optimal_search(&sc, alpha).unwrap();
            assert!(r.weighted_aoi <= prev);
            assert!(r.weighted_aoi <= rr_weighted_aoi(&sc).unwrap());
            prev = r.weighted_aoi;
        }
    }
}

#[test]
fn near_optimal_close_to_brute_force_small() {
    for sc in scenario_grid() {
        let bf = brute_force(&sc, 10).unwrap();
        let no = near_optimal_search(&sc, 200).unwrap();
        assert!(
            no.weighted_aoi <= 1.01 * bf.weighted_aoi,
            "{} vs {}",
            no.weighted_aoi,
            bf.weighted_aoi
        );
    }
}

#[test]
fn insertion_search_drop_free_matches_near_optimal() {
    for &(s2, w1) in &[(1.0, 0.5), (2.0, 0.3), (0.7, 0.8), (5.0, 0.1)] {
        let sc = Scenario::new(
            SourceParams::new(1.0, 0.0, 0.0, w1).unwrap(),
            SourceParams::new(s2, s2 * s2, 0.0, 1.0 - w1).unwrap(),
        )
        .unwrap();
        let no = near_optimal_search(&sc, 200).unwrap();
        let is = insertion_search(&sc, 200).unwrap();
        assert!(
            (no.weighted_aoi - is.weighted_aoi).abs() <= 1e-9 * no.weighted_aoi,
            "{} {} vs {} {}",
            no.schedule.tuple_string(),
            no.weighted_aoi,
            is.schedule.tuple_string(),
            is.weighted_aoi
        );
    }
}
