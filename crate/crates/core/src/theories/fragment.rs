use rayon::prelude::*;

use super::models::TheoryHandle;
use super::sentences::SentenceSpace;
use super::TheoryError;
use crate::formulas::{Formula, Level};

/// Largest rank cap the shipped oracles are run at.
pub const MAX_RANK: usize = 4;

/// The `Λ`-sentences of rank at most `rank_cap` that a theory proves, in
/// enumeration order.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub lambda: Level,
    pub rank_cap: usize,
    pub sentences: Vec<Formula>,
}

impl Fragment {
    pub fn contains(&self, f: &Formula) -> bool {
        let key = f.to_string();
        self.sentences.iter().any(|g| g.to_string() == key)
    }
}

pub(crate) fn space_for(t: &TheoryHandle, rank_cap: usize) -> Result<SentenceSpace, TheoryError> {
    if rank_cap > MAX_RANK {
        return Err(TheoryError::RankAboveCap { cap: rank_cap, max: MAX_RANK });
    }
    let literals = t.family().map_or(2, |f| f.default_literals());
    Ok(SentenceSpace::new(t.vocabulary(), rank_cap, literals))
}

fn decide_all(t: &TheoryHandle, sentences: &[Formula]) -> Result<Vec<bool>, TheoryError> {
    sentences.par_iter().map(|f| t.decide(f)).collect()
}

/// `Θ_Λ(T)` at a rank cap: the oracle's true sentences among the normal-form
/// `Λ`-sentences.
pub fn level_fragment(t: &TheoryHandle, lambda: Level, rank_cap: usize) -> Result<Fragment, TheoryError> {
    let candidates = space_for(t, rank_cap)?.in_level(lambda);
    let truth = decide_all(t, &candidates)?;
    let sentences = candidates.into_iter().zip(truth).filter_map(|(f, b)| b.then_some(f)).collect();
    Ok(Fragment { lambda, rank_cap, sentences })
}

/// Outcome of comparing two fragments sentence by sentence.
#[derive(Clone, Debug)]
pub struct ContainmentReport {
    pub lambda: Level,
    pub rank_cap: usize,
    /// Number of `Λ`-sentences compared.
    pub checked: usize,
    /// Sentences in the smaller theory's fragment missing from the larger.
    pub counterexamples: Vec<Formula>,
}

impl ContainmentReport {
    pub fn contained(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks `Θ_Λ(Tm) ⊆ Θ_Λ(Tp)` at `rank_cap`.
pub fn check_fragment_containment(
    tm: &TheoryHandle,
    tp: &TheoryHandle,
    lambda: Level,
    rank_cap: usize,
) -> Result<ContainmentReport, TheoryError> {
    if tm.vocabulary() != tp.vocabulary() {
        return Err(TheoryError::Config(format!("`{}` and `{}` have different vocabularies", tm.id, tp.id)));
    }
    let candidates = space_for(tm, rank_cap)?.in_level(lambda);
    let left = decide_all(tm, &candidates)?;
    let right = decide_all(tp, &candidates)?;
    let counterexamples = candidates
        .iter()
        .zip(left.iter().zip(&right))
        .filter(|(_, (&l, &r))| l && !r)
        .map(|(f, _)| f.clone())
        .collect();
    Ok(ContainmentReport { lambda, rank_cap, checked: candidates.len(), counterexamples })
}
