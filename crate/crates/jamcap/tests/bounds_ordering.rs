//! Ordering and consistency checks across the bound family, on the same
//! parameter grid the figures use, plus golden values for the n-user
//! operations (computed independently and frozen).

use jamcap::bounds::{
    lb_n_strategy1, lb_n_strategy2, lb_n_strategy3, lb_strategy1, lb_strategy2, lb_strategy3,
    ub_n_user, ub_n_user_variants, ub_two_user,
};
use jamcap::{JamPolicy, OccupancyDist, SystemParams};

const GRID_P: [f64; 6] = [0.01, 0.2, 0.4, 0.6, 0.8, 0.9];

fn alpha_grid() -> Vec<f64> {
    (2..=19).map(|i| i as f64 * 0.05).collect() // 0.10, 0.15, .., 0.95
}

// ---- two-user grid orderings ------------------------------------------------

#[test]
fn strategy2_dominates_strategy1_across_the_grid() {
    for p in GRID_P {
        for alpha in alpha_grid() {
            let params = SystemParams::from_alpha(2, p, alpha).unwrap();
            let lb1 = lb_strategy1(&params).unwrap().rate;
            let lb2 = lb_strategy2(&params).unwrap().rate;
            assert!(
                lb2 >= lb1 - 1e-9,
                "p={p} alpha={alpha}: strategy 2 ({lb2}) below strategy 1 ({lb1})"
            );
        }
    }
}

#[test]
fn every_lower_bound_fits_under_the_upper_bound_across_the_grid() {
    for p in GRID_P {
        for alpha in alpha_grid() {
            let params = SystemParams::from_alpha(2, p, alpha).unwrap();
            let cap = ub_two_user(&params).unwrap().rate.min(1.0) + 1e-9;
            for (name, rate) in [
                ("strategy 1", lb_strategy1(&params).unwrap().rate),
                ("strategy 2", lb_strategy2(&params).unwrap().rate),
                ("strategy 3", lb_strategy3(&params).unwrap().rate),
            ] {
                assert!(
                    (0.0..=cap).contains(&rate),
                    "p={p} alpha={alpha}: {name} rate {rate} outside [0, {cap}]"
                );
            }
        }
    }
}

#[test]
fn bounds_tighten_toward_saturation_at_reference_attempt_rate() {
    let mut prev_ub = f64::INFINITY;
    let mut prev_lb = f64::INFINITY;
    for alpha in [0.9, 0.99, 0.999] {
        let params = SystemParams::from_alpha(2, 0.5, alpha).unwrap();
        let ub = ub_two_user(&params).unwrap().rate;
        let lb = lb_strategy2(&params).unwrap().rate;
        assert!(ub < prev_ub, "upper bound not strictly decreasing at alpha={alpha}");
        assert!(lb < prev_lb, "strategy 2 not strictly decreasing at alpha={alpha}");
        prev_ub = ub;
        prev_lb = lb;
    }
    assert!(prev_ub < 0.05, "upper bound at alpha=0.999 is {prev_ub}, expected < 0.05");
    assert!(prev_lb < 0.02, "strategy 2 at alpha=0.999 is {prev_lb}, expected < 0.02");
}

// ---- n-user reductions at n = 2 ---------------------------------------------

#[test]
fn n_user_strategies_reduce_to_the_two_user_operations() {
    let params = SystemParams::from_alpha(2, 0.5, 0.8).unwrap();
    let saturated = OccupancyDist::saturated(2);

    let s1 = lb_n_strategy1(&params, &saturated).unwrap();
    let lb1 = lb_strategy1(&params).unwrap();
    assert!((s1.rate - lb1.rate).abs() < 1e-12, "{} vs {}", s1.rate, lb1.rate);

    let s2 = lb_n_strategy2(&params, &saturated).unwrap();
    let lb2 = lb_strategy2(&params).unwrap();
    assert!((s2.rate - lb2.rate).abs() < 1e-12, "{} vs {}", s2.rate, lb2.rate);

    let s3 = lb_n_strategy3(&params).unwrap();
    let lb3 = lb_strategy3(&params).unwrap();
    assert!(
        (s3.rate - lb3.rate).abs() < 2e-3,
        "vector ascent {} vs dedicated search {}",
        s3.rate,
        lb3.rate
    );
}

// ---- n-user goldens at n = 3 ------------------------------------------------

#[test]
fn three_user_strategy1_matches_golden() {
    let params = SystemParams::from_alpha(3, 0.5, 0.8).unwrap();
    let r = lb_n_strategy1(&params, &OccupancyDist::saturated(3)).unwrap();
    assert!((r.rate - 0.196835528466765).abs() < 1e-9, "rate {}", r.rate);
}

#[test]
fn three_user_strategy2_matches_golden_scan() {
    let params = SystemParams::from_alpha(3, 0.5, 0.8).unwrap();
    let r = lb_n_strategy2(&params, &OccupancyDist::saturated(3)).unwrap();
    // An independent scan of the same objective (converged truncated chain
    // at the same cap, coarser 0.01 grid) peaks at weight 0.16 with value
    // 0.35456536.  The finer grid here may only improve on that, and the
    // surface is flat enough near the peak to cap the possible gain.
    assert!(
        r.rate >= 0.35456536 - 1e-9 && r.rate <= 0.3548,
        "rate {} expected in [0.35456536, 0.3548]",
        r.rate
    );
    match r.optimizer {
        Some(JamPolicy::Uniform { q }) => {
            assert!((0.15..=0.17).contains(&q), "optimizer weight {q}")
        }
        ref other => panic!("unexpected optimizer {other:?}"),
    }
    assert!(
        r.notes.iter().any(|s| s.contains("uncertified")),
        "the peak sits where the truncation tail exceeds tolerance; notes = {:?}",
        r.notes
    );
    // Still a gain over the saturated single-channel strategy.
    assert!(r.rate > 0.196835528466765);
}

#[test]
fn three_user_upper_bound_variants_match_goldens() {
    let params = SystemParams::from_alpha(3, 0.5, 0.8).unwrap();
    let (literal, solved) = ub_n_user_variants(&params).unwrap();
    // Variant with the product-form saturation-mass stand-in.
    assert!((literal.rate - 0.947826573888779).abs() < 1e-6, "literal {}", literal.rate);
    // Variant with the certified baseline mass: its raw value exceeds one
    // and must arrive clamped with the raw value recorded.
    assert!((solved.rate - 1.0).abs() < 1e-12, "solved variant should clamp, got {}", solved.rate);
    assert!(solved.notes.iter().any(|s| s.contains("clamped")), "notes = {:?}", solved.notes);

    let combined = ub_n_user(&params).unwrap();
    assert!((combined.rate - 0.947826573888779).abs() < 1e-6, "combined {}", combined.rate);
}

#[test]
fn two_user_solved_variant_reproduces_the_high_load_reference() {
    let params = SystemParams::from_alpha(2, 0.5, 0.999).unwrap();
    let (_, solved) = ub_n_user_variants(&params).unwrap();
    assert!((solved.rate - 0.02373886668976865).abs() < 1e-9, "rate {}", solved.rate);
    assert!(solved.rate < 0.06);
}
