//! Complete decidable theories, level fragments, the completion engine that
//! builds a pair of complete theories with nested level fragments, and the
//! conversion of axiom lists into Borel codes over diagram space.
//!
//! Every complete theory here is `Th(M)` for a canonical countable model
//! with a decision procedure. Consistency of a finite set of sentences is
//! judged against a [`ModelSpace`]: a finite list of canonical models that
//! realizes every complete theory distinguishable inside the sentence stock.

mod borel;
mod fragment;
mod lindenbaum;
mod models;
mod order;
mod sentences;

use thiserror::Error;

use crate::formulas::{Level, ParseError};

pub use borel::{
    axioms_to_borel, infcoinf_axioms, matching_axioms, matching_theory_axioms, sentence_code, AxiomSource,
    DEFAULT_AXIOM_WINDOW,
};
pub use fragment::{check_fragment_containment, level_fragment, ContainmentReport, Fragment, MAX_RANK};
pub use lindenbaum::{lindenbaum_complete, split_theory, Completion, Split, Tower};
pub use models::{CanonicalModel, Card, Family, MatchingModel, ModelSpace, MonadicModel, OrderModel, TheoryHandle};
pub use order::{OrderShape, Region};
pub use sentences::{negate, SentenceSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("bad theory configuration: {0}")]
    Config(String),
    #[error("not a sentence: {0}")]
    NotSentence(String),
    #[error(transparent)]
    Formula(#[from] ParseError),
    #[error("rank cap {cap} exceeds the supported maximum {max}")]
    RankAboveCap { cap: usize, max: usize },
    /// One of the two consistency claims of the completion argument failed
    /// inside the model space: `claim` 1 is the positive base, 2 the negative.
    #[error("inconsistent base in claim {claim}: {detail}")]
    Inconsistent { claim: u8, detail: String },
    #[error("precondition violated: the axioms prove phi <-> {psi}")]
    PreconditionViolated { psi: String },
    #[error("no witness sentence up to rank {cap}; inconclusive")]
    NoWitness { cap: usize },
    #[error("axiom {index} is at level {found}, above the claimed {claimed}")]
    AxiomAboveLevel { index: usize, found: Level, claimed: Level },
}
