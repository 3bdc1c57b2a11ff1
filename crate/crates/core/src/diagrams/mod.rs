//! Atomic diagrams: the fixed atom enumeration, diagram prefixes, stagewise
//! presentations of structures with universe ω, and staged evaluation.

mod enumeration;
mod prefix;
mod staged;
mod stream;

pub use enumeration::{atom_at, atom_in_rank, atom_index, atomic_formula, bits_for_size, offset_in_rank, rank_len};
pub(crate) use prefix::for_each_rank_tuple;
pub use prefix::{decode, encode, DiagramError, DiagramPrefix};
pub use staged::{eval_staged, StagedVerdict};
pub use stream::{DiagramReader, FactError, FiniteSource, PrefixSource, Presentation, StreamSource, StructureStream};
