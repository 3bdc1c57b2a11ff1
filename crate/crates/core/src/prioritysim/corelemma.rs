use std::sync::OnceLock;

use super::factory::ModelFactory;
use super::trace::EventKind;
use super::{Demo, Run, SimError};
use crate::formulas::Level;
use crate::pointclasses::{member_up, sigma1_on, sigma2_evzero_on, BorelCode, Track, UPPoint};
use crate::reductions::{matching_vocabulary, monadic_vocabulary};
use crate::theories::{check_fragment_containment, ContainmentReport, TheoryHandle};

/// Rank cap at which pairs are certified.
pub const PAIR_CAP: usize = 3;

/// Which switching construction to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoreLevel {
    /// `Σ1` source, all-`P` versus infinite/coinfinite `P`.
    One,
    /// `Σ2` source, perfect matching versus infinitely many unmatched.
    Two,
}

impl CoreLevel {
    pub fn n(self) -> usize {
        match self {
            CoreLevel::One => 1,
            CoreLevel::Two => 2,
        }
    }
}

/// Theories `T⁻`, `T⁺` with `Θ_{E(n)}(T⁻) ⊆ Θ_{E(n)}(T⁺)` at the cap,
/// and the source set reduced to `Mod(T⁺)`.
#[derive(Clone, Debug)]
pub struct CorePair {
    pub level: CoreLevel,
    pub minus: TheoryHandle,
    pub plus: TheoryHandle,
    pub source: BorelCode,
    pub containment: ContainmentReport,
}

impl CorePair {
    /// Checks the fragment hypothesis and that the level's construction
    /// builds exactly these two theories.
    pub fn new(level: CoreLevel, minus: TheoryHandle, plus: TheoryHandle) -> Result<Self, SimError> {
        let (want_minus, want_plus, source) = match level {
            CoreLevel::One => (TheoryHandle::all_p(), TheoryHandle::inf_coinf(), sigma1_on(Track::Whole)),
            CoreLevel::Two => {
                (TheoryHandle::perfect_matching(), TheoryHandle::inf_inf_matching(), sigma2_evzero_on(Track::Whole))
            }
        };
        if minus.id != want_minus.id || plus.id != want_plus.id {
            return Err(SimError::Incompatible(format!(
                "the level-{} construction builds ({}, {}), not ({}, {})",
                level.n(),
                want_minus.id,
                want_plus.id,
                minus.id,
                plus.id
            )));
        }
        let containment = check_fragment_containment(&minus, &plus, Level::e(level.n()), PAIR_CAP)
            .map_err(|e| SimError::Incompatible(e.to_string()))?;
        if let Some(f) = containment.counterexamples.first() {
            return Err(SimError::Incompatible(format!("E{} fragment not contained: {f}", level.n())));
        }
        Ok(CorePair { level, minus, plus, source, containment })
    }

    /// The shipped pair, certified once per process.
    pub fn shipped(level: CoreLevel) -> &'static CorePair {
        static ONE: OnceLock<CorePair> = OnceLock::new();
        static TWO: OnceLock<CorePair> = OnceLock::new();
        let cell = match level {
            CoreLevel::One => &ONE,
            CoreLevel::Two => &TWO,
        };
        cell.get_or_init(|| {
            let (m, p) = match level {
                CoreLevel::One => (TheoryHandle::all_p(), TheoryHandle::inf_coinf()),
                CoreLevel::Two => (TheoryHandle::perfect_matching(), TheoryHandle::inf_inf_matching()),
            };
            CorePair::new(level, m, p).expect("shipped pair is certified")
        })
    }

    pub fn source_name(&self) -> &str {
        self.source.name().unwrap_or("source")
    }
}

/// The stage-`s` approximation to the index of `T_p ∩ E(k)`.
///
/// Below the pair's level both theories share the fragment. At the level,
/// level 1 answers `T⁻` until a 1 has been read at some stage `t ≤ s`, then
/// `T⁺`; level 2 answers `T⁻` at stages that read a 1 (an injury) and `T⁺`
/// otherwise. Above the level the answer is exact membership.
pub fn approximate_index(pair: &CorePair, p: &UPPoint, k: usize, s: usize) -> String {
    let n = pair.level.n();
    if k < n {
        return format!("E{k} fragment of {}", pair.minus.id);
    }
    let plus = if k > n {
        member_up(&pair.source, p).expect("shipped sources decide UP points")
    } else {
        match pair.level {
            CoreLevel::One => (0..=s).any(|t| p.bit(t)),
            CoreLevel::Two => !p.bit(s),
        }
    };
    if plus {
        pair.plus.id.clone()
    } else {
        pair.minus.id.clone()
    }
}

/// Runs the switching construction for `stages` stages on input `p`.
///
/// Level 1 adds one `P` element per stage until a 1 is read, then
/// alternates `¬P`, `P`. Level 2 adds a matched pair and one candidate per
/// stage; reading a 1 gives every pending candidate a fresh partner.
pub fn run_corelemma(pair: &CorePair, p: &UPPoint, stages: usize) -> Result<Run, SimError> {
    if stages == 0 {
        return Err(SimError::ZeroBudget);
    }
    let n = pair.level.n();
    let factory = match pair.level {
        CoreLevel::One => level_one(pair, p, stages, n)?,
        CoreLevel::Two => level_two(pair, p, stages, n)?,
    };
    let demo = match pair.level {
        CoreLevel::One => Demo::Core1,
        CoreLevel::Two => Demo::Core2,
    };
    let (presentation, trace) = factory.finish();
    Ok(Run { demo, point: p.clone(), stages, presentation, trace })
}

fn level_one(pair: &CorePair, p: &UPPoint, stages: usize, n: usize) -> Result<ModelFactory, SimError> {
    let mut f = ModelFactory::new(&monadic_vocabulary(), &pair.minus.id);
    let mut switched: Option<usize> = None;
    for s in 0..stages {
        let estimate = approximate_index(pair, p, n, s);
        if switched.is_none() && estimate == pair.plus.id {
            f.switch_to(&pair.plus.id, Some(&pair.plus.model))?;
            switched = Some(s);
        }
        let e = f.add_element();
        if switched.is_none_or(|t| (s - t) % 2 == 1) {
            f.add_fact(0, &[e]);
        }
        f.note(EventKind::Estimate { value: estimate });
        f.commit_stage();
    }
    Ok(f)
}

fn level_two(pair: &CorePair, p: &UPPoint, stages: usize, n: usize) -> Result<ModelFactory, SimError> {
    let mut f = ModelFactory::new(&matching_vocabulary(), &pair.minus.id);
    let mut pending: Vec<usize> = Vec::new();
    for s in 0..stages {
        let (u, v) = (f.add_element(), f.add_element());
        f.add_symmetric(0, u, v);
        pending.push(f.add_element());
        if p.bit(s) {
            let repaired = std::mem::take(&mut pending);
            for &c in &repaired {
                let partner = f.add_element();
                f.add_symmetric(0, c, partner);
            }
            f.note(EventKind::InjuryRepair { repaired });
        }
        let estimate = approximate_index(pair, p, n, s);
        if estimate != f.target {
            let model = if estimate == pair.plus.id { &pair.plus.model } else { &pair.minus.model };
            f.switch_to(&estimate, Some(model))?;
        }
        f.note(EventKind::Estimate { value: estimate });
        f.commit_stage();
    }
    Ok(f)
}
