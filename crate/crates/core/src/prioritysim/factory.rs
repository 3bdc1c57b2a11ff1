use std::sync::Arc;

use super::trace::{EventKind, InjuryTrace};
use super::SimError;
use crate::diagrams::Presentation;
use crate::formulas::{FiniteStructure, Vocabulary};
use crate::theories::CanonicalModel;

/// An injurable structure builder. Facts enter through the open stage only,
/// so every diagram bit, once committed at a stage boundary, is final.
#[derive(Clone, Debug)]
pub struct ModelFactory {
    pub target: String,
    pres: Presentation,
    committed: usize,
    stage: usize,
    pub trace: InjuryTrace,
}

impl ModelFactory {
    pub fn new(vocab: &Vocabulary, target: &str) -> Self {
        ModelFactory {
            target: target.into(),
            pres: Presentation::new(vocab),
            committed: 0,
            stage: 0,
            trace: InjuryTrace::default(),
        }
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn add_element(&mut self) -> usize {
        self.pres.add_element()
    }

    pub fn add_fact(&mut self, sym: usize, tuple: &[usize]) {
        self.pres.add_fact(sym, tuple);
    }

    pub fn add_symmetric(&mut self, sym: usize, a: usize, b: usize) {
        self.pres.add_symmetric(sym, a, b);
    }

    pub fn note(&mut self, kind: EventKind) {
        self.trace.push(self.stage, kind);
    }

    /// Closes the stage and logs the bits it made final.
    pub fn commit_stage(&mut self) {
        let before = self.pres.settled();
        self.pres.close_stage();
        let mut bits = Vec::new();
        for m in before..self.pres.settled() {
            self.pres.push_rank_bits(m, &mut bits);
        }
        let start = self.committed;
        self.committed += bits.len();
        self.trace.push(self.stage, EventKind::Commit { start, bits });
        self.stage += 1;
    }

    /// The structure committed so far.
    pub fn committed_structure(&self) -> Option<FiniteStructure> {
        let n = self.pres.settled();
        (n > 0).then(|| self.pres.structure(n))
    }

    /// Retargets the construction. The committed structure, restricted to
    /// the target's vocabulary, must embed into the target model.
    pub fn switch_to(&mut self, to: &str, model: Option<&Arc<dyn CanonicalModel>>) -> Result<(), SimError> {
        if let (Some(model), Some(s)) = (model, self.committed_structure()) {
            let part = reduct(&s, model.vocabulary());
            if model.embeds(&part) == Some(false) {
                return Err(SimError::Incompatible(format!(
                    "stage {}: committed structure does not embed into {}",
                    self.stage,
                    model.label()
                )));
            }
        }
        let from = std::mem::replace(&mut self.target, to.into());
        self.note(EventKind::Switch { from, to: to.into() });
        Ok(())
    }

    pub fn finish(self) -> (Presentation, InjuryTrace) {
        (self.pres, self.trace)
    }
}

/// The restriction of `s` to the symbols of `vocab` it shares.
pub fn reduct(s: &FiniteStructure, vocab: &Vocabulary) -> FiniteStructure {
    let mut out = FiniteStructure::empty(vocab, s.size()).expect("nonempty");
    for (i, sym) in vocab.symbols().iter().enumerate() {
        if let Some(j) = s.vocabulary().index_of(&sym.name) {
            for t in s.facts(j) {
                out.set(i, &t, true);
            }
        }
    }
    out
}
