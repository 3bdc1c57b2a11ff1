//! Explicit reductions as transducers and structure streams: sets of reals
//! into spaces of structures, and structures into other structures.

mod graph;
mod join;
mod linord;
mod marker;
mod matching;
mod oracles;
mod registry;
mod section;
mod simple;

pub use graph::{decode_graph, graph_construction, graph_vocabulary, to_graph, GraphError, DEFAULT_MAX_ARITY};
pub use join::{diff_join, diff_join_transducer, join_vocabulary, rename_construction, DiffJoin};
pub use linord::{
    dyadic, linord_construction, linord_transducer, linord_violation, linord_vocabulary, r_linord, sentence_star,
    LinOrd,
};
pub use marker::{
    link_name, marker_construction, marker_extend, marker_lift, marker_structure_axioms, marker_vocabulary,
    MarkerRecovery,
};
pub use matching::{matching_construction, matching_elements_after, matching_vocabulary, r_matching};
pub use oracles::{
    infcoinf_certificate, matching_certificate, matching_shape, monadic_counts, pad_infcoinf_certificate, pi2_infzeros,
    InfCoinfOracle, MatchingOracle, MatchingShape, MonadicCounts,
};
pub use registry::{pipeline, transducer_named, PipelineOptions, ReductionError, NAMES};
pub use section::{section_construction, section_structure, section_vocabulary, SectionError};
pub use simple::{infcoinf_construction, monadic_vocabulary, pad, r_infcoinf, Pad};
