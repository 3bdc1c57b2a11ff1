//! First-order syntax over relational vocabularies: parsing, prenex
//! normalization, level classification and finite-structure semantics.

mod eval;
mod parse;
mod prenex;
pub mod random;
mod structure;
mod syntax;

pub use eval::{equivalent_on_small, eval_finite, find_finite_model, holds, Compiled, EvalError, ModelSearchError};
pub use parse::{parse_formula, parse_with_inferred_vocabulary, ParseError};
pub use prenex::{classify, prenex, PrenexForm};
pub use structure::{for_each_structure, FiniteStructure, StructureError};
pub use syntax::{Formula, Level, LevelKind, LevelParseError, Quant, Symbol, Var, Vocabulary, VocabularyError};
