//! Atomic diagrams, continuous reductions between Borel pointclasses and
//! spaces of countable structures, level fragments of first-order theories,
//! and finite-injury model constructions, all at a scale where every claim
//! can be checked by brute force on ultimately periodic inputs.

pub mod battery;
pub mod diagrams;
pub mod formulas;
pub mod pointclasses;
pub mod prioritysim;
pub mod reductions;
pub mod theories;
pub mod transducers;
mod verdict;

pub use verdict::Verdict;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/diagrams.md")]
    mod diagrams {}
    #[doc = include_str!("../../../book/src/pointclasses.md")]
    mod pointclasses {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/theories.md")]
    mod theories {}
    #[doc = include_str!("../../../book/src/prioritysim.md")]
    mod prioritysim {}
    #[doc = include_str!("../../../book/src/battery.md")]
    mod battery {}
}
