use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::up::UPPoint;

/// Every point with preperiod at most `max_prefix` and period at most
/// `max_period` as written (not deduplicated up to minimization).
pub fn exhaustive_points(max_prefix: usize, max_period: usize) -> Vec<UPPoint> {
    let mut out = Vec::new();
    for pre in 0..=max_prefix {
        for per in 1..=max_period {
            for code in 0..1u64 << (pre + per) {
                let b: Vec<bool> = (0..pre + per).map(|i| code >> i & 1 == 1).collect();
                out.push(UPPoint::new(b[..pre].to_vec(), b[pre..].to_vec()).expect("nonempty period"));
            }
        }
    }
    out
}

/// The test battery: all points with preperiod ≤ 3 and period ≤ 3, then
/// `extra` seeded random points with preperiod ≤ 8 and period ≤ 4.
pub fn up_battery(extra: usize, seed: u64) -> Vec<UPPoint> {
    let mut out = exhaustive_points(3, 3);
    out.extend(random_points(extra, 8, 4, seed));
    out
}

/// The wide battery used for acceptance runs: the exhaustive part of
/// [`up_battery`] plus `extra` random points with preperiod ≤ 16 and
/// period ≤ 6.
pub fn wide_battery(extra: usize, seed: u64) -> Vec<UPPoint> {
    let mut out = exhaustive_points(3, 3);
    out.extend(random_points(extra, 16, 6, seed));
    out
}

/// Seeded random points. The density of 1s is itself drawn per point, so
/// sparse and dense points both occur.
pub fn random_points(count: usize, max_prefix: usize, max_period: usize, seed: u64) -> Vec<UPPoint> {
    let mut out = Vec::with_capacity(count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let pre = rng.gen_range(0..=max_prefix);
        let per = rng.gen_range(1..=max_period);
        let density = rng.gen_range(0.1..0.9);
        let prefix = (0..pre).map(|_| rng.gen_bool(density)).collect();
        let period = (0..per).map(|_| rng.gen_bool(density)).collect();
        out.push(UPPoint::new(prefix, period).expect("nonempty period"));
    }
    out
}
