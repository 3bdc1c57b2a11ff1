use std::sync::Arc;

use thiserror::Error;

use crate::diagrams::Presentation;
use crate::formulas::{Vocabulary, VocabularyError};
use crate::transducers::{DiagramStaged, ElementRun, SharedTransducer};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SectionError {
    #[error("section {k} is out of range for {sections} sections")]
    OutOfRange { k: usize, sections: usize },
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
}

/// `R_0/1, …, R_{n-1}/1` followed by the symbols of `inner`, each `S`
/// renamed `Lk_S` after the language of section `k`.
pub fn section_vocabulary(k: usize, sections: usize, inner: &Vocabulary) -> Result<Vocabulary, SectionError> {
    if k >= sections {
        return Err(SectionError::OutOfRange { k, sections });
    }
    let mut syms: Vec<(String, usize)> = (0..sections).map(|i| (format!("R_{i}"), 1)).collect();
    syms.extend(inner.symbols().iter().map(|s| (format!("L{k}_{}", s.name), s.arity)));
    Ok(Vocabulary::new(syms)?)
}

struct SectionRun {
    k: usize,
    sections: usize,
}

impl ElementRun for SectionRun {
    fn element(&mut self, _m: usize, facts: &[(usize, Vec<usize>)], out: &mut Presentation) {
        let e = out.add_element();
        out.add_fact(self.k, &[e]);
        for (sym, t) in facts {
            out.add_fact(self.sections + sym, t);
        }
    }
}

/// Copies a structure into section `k`: every element realizes `R_k`, the
/// other `R_i` stay empty, and the copied relations are renamed `Lk_S`.
pub fn section_construction(k: usize, sections: usize, inner: &Vocabulary) -> Result<DiagramStaged, SectionError> {
    let out = section_vocabulary(k, sections, inner)?;
    Ok(DiagramStaged::new("section", inner.clone(), out, 1, move || Box::new(SectionRun { k, sections })))
}

pub fn section_structure(k: usize, sections: usize, inner: &Vocabulary) -> Result<SharedTransducer, SectionError> {
    Ok(Arc::new(section_construction(k, sections, inner)?))
}
