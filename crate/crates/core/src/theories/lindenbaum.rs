use std::collections::HashMap;

use rayon::prelude::*;

use super::fragment::space_for;
use super::models::{ModelSpace, TheoryHandle};
use super::TheoryError;
use crate::formulas::{classify, Formula, Level};

/// One complete theory, restricted to the sentence stock: each sentence in
/// enumeration order with the value the tower gave it.
#[derive(Clone, Debug)]
pub struct Tower {
    pub steps: Vec<(Formula, bool)>,
    /// Models in the space that satisfy every decision of the tower.
    pub survivors: Vec<String>,
    index: HashMap<String, bool>,
}

impl Tower {
    fn new(steps: Vec<(Formula, bool)>, survivors: Vec<String>) -> Self {
        let index = steps.iter().map(|(f, b)| (f.to_string(), *b)).collect();
        Tower { steps, survivors, index }
    }

    /// The tower's value for a sentence of the stock.
    pub fn decides(&self, f: &Formula) -> Option<bool> {
        self.index.get(&f.to_string()).copied()
    }

    /// Accepted sentences inside `level`.
    pub fn fragment(&self, level: Level) -> Vec<Formula> {
        self.steps.iter().filter(|(f, b)| *b && level.contains(classify(f))).map(|(f, _)| f.clone()).collect()
    }
}

/// The pair of complete theories produced by [`lindenbaum_complete`].
#[derive(Clone, Debug)]
pub struct Completion {
    pub lambda: Level,
    pub rank_cap: usize,
    /// `Θ_Λ(A ∪ {¬φ})` inside the stock.
    pub theta: Vec<Formula>,
    /// Contains `A ∪ {φ} ∪ Θ_Λ(A ∪ {¬φ})`.
    pub plus: Tower,
    /// Contains `A ∪ {¬φ} ∪ (¬Λ ∩ T⁺)`.
    pub minus: Tower,
    /// `Λ`-sentences of `T⁻` missing from `T⁺`. Empty on a correct run.
    pub counterexamples: Vec<Formula>,
}

struct Masks {
    all: u64,
    of: Vec<u64>,
}

fn masks(space: &ModelSpace, sentences: &[Formula]) -> Result<Masks, TheoryError> {
    let of = sentences.par_iter().map(|f| space.mask(f)).collect::<Result<Vec<_>, _>>()?;
    Ok(Masks { all: space.all(), of })
}

fn conj(space: &ModelSpace, fs: &[Formula]) -> Result<u64, TheoryError> {
    fs.iter().try_fold(space.all(), |m, f| Ok(m & space.mask(f)?))
}

// Decide every sentence in order, keeping the candidate models non-empty.
fn tower(space: &ModelSpace, sentences: &[Formula], m: &Masks, mut cand: u64) -> Tower {
    let mut steps = Vec::with_capacity(sentences.len());
    for (f, &mask) in sentences.iter().zip(&m.of) {
        let accept = cand & mask != 0;
        cand &= if accept { mask } else { !mask & m.all };
        steps.push((f.clone(), accept));
    }
    Tower::new(steps, space.labels(cand))
}

/// Builds complete theories `T⁺ ∋ φ` and `T⁻ ∋ ¬φ` over `axioms` with
/// `Λ ∩ T⁻ ⊆ Λ ∩ T⁺`, deciding the stock `sentences` in order.
///
/// Consistency means having a model in `space`; `seed` (a model mask)
/// further restricts `T⁺`. The hypothesis that no `¬Λ`-sentence of the
/// stock is equivalent to `φ` over the axioms is checked first.
pub fn lindenbaum_complete(
    axioms: &[Formula],
    phi: &Formula,
    lambda: Level,
    space: &ModelSpace,
    sentences: &[Formula],
    rank_cap: usize,
    seed: Option<u64>,
) -> Result<Completion, TheoryError> {
    let co = lambda.dual();
    let m = masks(space, sentences)?;
    let base = conj(space, axioms)?;
    let phi_mask = space.mask(phi)?;
    if co.contains(classify(phi)) {
        return Err(TheoryError::PreconditionViolated { psi: phi.to_string() });
    }
    for (f, &mask) in sentences.iter().zip(&m.of) {
        if co.contains(classify(f)) && mask & base == phi_mask & base {
            return Err(TheoryError::PreconditionViolated { psi: f.to_string() });
        }
    }
    let neg = base & !phi_mask & m.all;
    let mut theta = Vec::new();
    let mut theta_mask = m.all;
    for (f, &mask) in sentences.iter().zip(&m.of) {
        if lambda.contains(classify(f)) && neg & !mask == 0 {
            theta.push(f.clone());
            theta_mask &= mask;
        }
    }
    let plus_base = base & phi_mask & theta_mask & seed.unwrap_or(m.all);
    if plus_base == 0 {
        return Err(TheoryError::Inconsistent {
            claim: 1,
            detail: format!("A + phi + Theta has no model in `{}`", space.name),
        });
    }
    let plus = tower(space, sentences, &m, plus_base);

    let mut minus_base = neg;
    for ((f, accepted), &mask) in plus.steps.iter().zip(&m.of) {
        if *accepted && co.contains(classify(f)) {
            minus_base &= mask;
        }
    }
    if minus_base == 0 {
        return Err(TheoryError::Inconsistent {
            claim: 2,
            detail: format!("A + not phi + (co-level part of T+) has no model in `{}`", space.name),
        });
    }
    let minus = tower(space, sentences, &m, minus_base);

    let counterexamples = plus
        .steps
        .iter()
        .zip(&minus.steps)
        .filter(|((f, p), (_, n))| lambda.contains(classify(f)) && *n && !*p)
        .map(|((f, _), _)| f.clone())
        .collect();
    Ok(Completion { lambda, rank_cap, theta, plus, minus, counterexamples })
}

/// Two complete theories witnessing that `T` is not `Λ`-axiomatizable at
/// the cap: `T₀ ⊇ T` (agreeing with `T` on the stock), `T₁ ∌ φ` for some
/// `φ ∈ T`, and `Λ ∩ T₀ ⊆ Λ ∩ T₁`.
#[derive(Clone, Debug)]
pub struct Split {
    pub witness: Formula,
    pub t0: Tower,
    pub t1: Tower,
    pub completion: Completion,
    /// `Λ`-sentences of `T₀` missing from `T₁`.
    pub counterexamples: Vec<Formula>,
}

/// Splits `T` along its `Λ`-fragment.
///
/// The axioms are `Θ_Λ(T)` at the cap. The witness is the first stock
/// sentence true in `T` but false in some model of the axioms; with none,
/// the search is inconclusive ([`TheoryError::NoWitness`]).
pub fn split_theory(
    t: &TheoryHandle,
    lambda: Level,
    space: &ModelSpace,
    rank_cap: usize,
) -> Result<Split, TheoryError> {
    let sentences = space_for(t, rank_cap)?.sentences();
    let truth = sentences.par_iter().map(|f| t.decide(f)).collect::<Result<Vec<_>, _>>()?;
    let m = masks(space, &sentences)?;
    let mut axioms = Vec::new();
    let mut base = m.all;
    let mut agree = m.all;
    for ((f, &b), &mask) in sentences.iter().zip(&truth).zip(&m.of) {
        if b && lambda.contains(classify(f)) {
            axioms.push(f.clone());
            base &= mask;
        }
        agree &= if b { mask } else { !mask & m.all };
    }
    let witness = sentences
        .iter()
        .zip(&truth)
        .zip(&m.of)
        .find(|((_, &b), &mask)| b && base & !mask != 0)
        .map(|((f, _), _)| f.clone())
        .ok_or(TheoryError::NoWitness { cap: rank_cap })?;
    let completion = lindenbaum_complete(&axioms, &witness, lambda.dual(), space, &sentences, rank_cap, Some(agree))?;
    let t0 = completion.plus.clone();
    let t1 = completion.minus.clone();
    let counterexamples = t0
        .steps
        .iter()
        .zip(&t1.steps)
        .filter(|((f, a), (_, b))| lambda.contains(classify(f)) && *a && !*b)
        .map(|((f, _), _)| f.clone())
        .collect();
    Ok(Split { witness, t0, t1, completion, counterexamples })
}
