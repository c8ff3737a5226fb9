use oar_core::rng::rng_from;
use oar_core::scheduler::{optimize_mask, OperatingLevel, StreamProfile, TransmissionMask};
use rand::Rng;
use std::time::Instant;

const MASKS: [TransmissionMask; 4] = [
    TransmissionMask::LEVEL1,
    TransmissionMask::LEVEL2,
    TransmissionMask::LEVEL3,
    TransmissionMask { rel: false, attr: true },
];

/// Independent oracle: enumerate every mask with the object bit set.
fn brute_force(p: &StreamProfile, budget: u64) -> (TransmissionMask, bool) {
    let mut best: Option<(TransmissionMask, f64, u64)> = None;
    for m in MASKS {
        let rate = p.r_obj + m.rel as u64 * p.r_rel + m.attr as u64 * p.r_attr;
        if rate > budget {
            continue;
        }
        let u = p.u_obj + m.rel as u8 as f64 * p.u_rel + m.attr as u8 as f64 * p.u_attr;
        let better = match best {
            None => true,
            Some((_, bu, br)) => u > bu || (u == bu && rate < br),
        };
        if better {
            best = Some((m, u, rate));
        }
    }
    match best {
        Some((m, _, _)) => (m, false),
        None => (TransmissionMask::LEVEL1, true),
    }
}

fn random_profile(rng: &mut impl Rng) -> StreamProfile {
    let mut u: [f64; 3] = [rng.random_range(0.1..20.0), rng.random_range(0.1..20.0), rng.random_range(0.1..20.0)];
    u.sort_by(|a, b| b.total_cmp(a));
    StreamProfile {
        u_obj: u[0],
        u_rel: u[1],
        u_attr: u[2],
        r_obj: rng.random_range(1..3000),
        r_rel: rng.random_range(1..3000),
        r_attr: rng.random_range(1..3000),
    }
}

#[test]
fn matches_brute_force_on_1000_instances() {
    let mut rng = rng_from(11);
    let start = Instant::now();
    for _ in 0..1000 {
        let p = random_profile(&mut rng);
        let budget = rng.random_range(0..8000);
        let s = optimize_mask(&p, budget);
        assert_eq!((s.mask, s.over_budget), brute_force(&p, budget), "{p:?} budget {budget}");
        if !s.over_budget {
            assert!(s.symbols <= budget);
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn greedy_fill_matches_for_equal_rates() {
    let mut rng = rng_from(12);
    for _ in 0..1000 {
        let mut p = random_profile(&mut rng);
        let r = rng.random_range(1..2000);
        (p.r_obj, p.r_rel, p.r_attr) = (r, r, r);
        let budget = rng.random_range(0..4 * r);
        let rel = budget >= 2 * r;
        let attr = budget >= 3 * r;
        assert_eq!(optimize_mask(&p, budget).mask, TransmissionMask { rel, attr });
    }
}

#[test]
fn utility_monotone_in_budget() {
    let mut rng = rng_from(13);
    for _ in 0..200 {
        let p = random_profile(&mut rng);
        let mut last = 0.0;
        for budget in (0..10_000).step_by(97) {
            let u = optimize_mask(&p, budget).utility;
            assert!(u >= last);
            last = u;
        }
    }
}

#[test]
fn default_profile_reaches_only_standard_levels() {
    let p = StreamProfile::default();
    for budget in 0..4000 {
        let level = optimize_mask(&p, budget).mask.level();
        assert_ne!(level, OperatingLevel::Nonstandard);
    }
    assert_eq!(optimize_mask(&p, 960).mask, TransmissionMask::LEVEL1);
    assert_eq!(optimize_mask(&p, 1920).mask, TransmissionMask::LEVEL2);
    assert_eq!(optimize_mask(&p, 2880).mask, TransmissionMask::LEVEL3);
}
