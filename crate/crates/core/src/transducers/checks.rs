use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::machine::{run, run_all, Transducer, TransducerError};
use crate::pointclasses::UPPoint;

/// Shapes of the random input pairs used by [`check_monotone`].
#[derive(Clone, Copy, Debug)]
pub struct MonotoneConfig {
    pub trials: usize,
    pub max_shared: usize,
    /// Independent bits appended to each side after the shared prefix.
    pub tail: usize,
    pub seed: u64,
}

impl MonotoneConfig {
    pub fn new(trials: usize) -> Self {
        MonotoneConfig { trials, max_shared: 64, tail: 16, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneViolation {
    /// Length of the common input prefix.
    pub shared: usize,
    /// First output position where the runs disagree, inside the part the
    /// modulus says is determined.
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneReport {
    pub trials: usize,
    pub violations: Vec<MonotoneViolation>,
}

impl MonotoneReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest `n` with `modulus(n) ≤ budget`: the output length the claim
/// says a prefix of length `budget` determines.
pub fn determined_by(t: &dyn Transducer, budget: usize) -> usize {
    let mut hi = 1;
    while t.modulus(hi) <= budget {
        hi *= 2;
        if hi > 1 << 40 {
            return hi;
        }
    }
    // modulus(lo) <= budget < modulus(hi), with modulus(0) = 0
    let mut lo = 0;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t.modulus(mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs random input pairs that share a prefix and checks that the outputs
/// agree on everything the shared prefix determines.
pub fn check_monotone(t: &dyn Transducer, cfg: MonotoneConfig) -> MonotoneReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pairs: Vec<(usize, Vec<bool>, Vec<bool>)> = (0..cfg.trials)
        .map(|_| {
            let shared = rng.gen_range(0..=cfg.max_shared);
            let prefix: Vec<bool> = (0..shared).map(|_| rng.gen()).collect();
            let mut a = prefix.clone();
            let mut b = prefix;
            a.extend((0..cfg.tail).map(|_| rng.gen::<bool>()));
            b.extend((0..cfg.tail).map(|_| rng.gen::<bool>()));
            (shared, a, b)
        })
        .collect();
    let violations = pairs
        .par_iter()
        .filter_map(|(shared, a, b)| {
            let n = determined_by(t, *shared);
            let (oa, ob) = (run_all(t, a), run_all(t, b));
            let upto = n.min(oa.len()).min(ob.len());
            (0..upto).find(|&i| oa[i] != ob[i]).map(|position| MonotoneViolation { shared: *shared, position })
        })
        .collect();
    MonotoneReport { trials: cfg.trials, violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductiveReport {
    pub emitted: usize,
    pub consumed: usize,
}

/// Confirms `n_out` bits appear within the `modulus(n_out)` input bits the
/// transducer claims to need.
pub fn check_productive(t: &dyn Transducer, p: &UPPoint, n_out: usize) -> Result<ProductiveReport, TransducerError> {
    let budget = t.modulus(n_out);
    let out = run(t, p.bits(), n_out, budget)?;
    Ok(ProductiveReport { emitted: out.len(), consumed: budget })
}
