use thiserror::Error;

use super::graph::{to_graph, GraphError, DEFAULT_MAX_ARITY};
use super::join::diff_join_transducer;
use super::linord::linord_transducer;
use super::marker::marker_extend;
use super::matching::{matching_construction, r_matching};
use super::section::{section_structure, SectionError};
use super::simple::{infcoinf_construction, monadic_vocabulary, pad, r_infcoinf};
use crate::formulas::{Vocabulary, VocabularyError};
use crate::transducers::{compose, identity, SharedTransducer, TransducerError};

pub const NAMES: [&str; 9] =
    ["identity", "infcoinf", "pad", "matching", "linord", "marker", "diffjoin", "section", "tograph"];

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("unknown reduction `{0}` (known: {names})", names = NAMES.join(", "))]
    Unknown(String),
    #[error("empty pipeline")]
    Empty,
    #[error(transparent)]
    Transducer(#[from] TransducerError),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Vocabulary(#[from] VocabularyError),
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    /// Section index for `section`.
    pub k: usize,
    /// Number of sections for `section`.
    pub sections: usize,
    pub max_arity: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { k: 0, sections: 2, max_arity: DEFAULT_MAX_ARITY }
    }
}

/// The named reduction, reading diagrams over `input` when it reads
/// diagrams at all. Constructions on diagrams read raw bits as diagrams
/// over `{P/1}`.
pub fn transducer_named(
    name: &str,
    input: Option<&Vocabulary>,
    opts: &PipelineOptions,
) -> Result<SharedTransducer, ReductionError> {
    let diagrams = input.cloned().unwrap_or_else(monadic_vocabulary);
    Ok(match name {
        "identity" => identity(),
        "infcoinf" => r_infcoinf(),
        "pad" => pad(),
        "matching" => r_matching(),
        "linord" => linord_transducer(),
        "marker" => marker_extend(&diagrams),
        "diffjoin" => diff_join_transducer(infcoinf_construction(), matching_construction())?,
        "section" => section_structure(opts.k, opts.sections, &diagrams)?,
        "tograph" => to_graph(&diagrams, opts.max_arity)?,
        other => return Err(ReductionError::Unknown(other.to_string())),
    })
}

/// Composes named reductions left to right.
pub fn pipeline(names: &[&str], opts: &PipelineOptions) -> Result<SharedTransducer, ReductionError> {
    let mut acc: Option<SharedTransducer> = None;
    for name in names {
        let input = acc.as_ref().and_then(|t| t.output_vocabulary());
        let next = transducer_named(name.trim(), input.as_ref(), opts)?;
        acc = Some(match acc {
            None => next,
            Some(t) => compose(t, next)?,
        });
    }
    acc.ok_or(ReductionError::Empty)
}
