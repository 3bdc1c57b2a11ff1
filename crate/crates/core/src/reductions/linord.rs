use std::cmp::Ordering;
use std::sync::Arc;

use crate::diagrams::{Presentation, StreamSource, StructureStream};
use crate::formulas::{FiniteStructure, Formula, Vocabulary};
use crate::transducers::{BitStaged, SharedTransducer, StagedRun};

pub fn linord_vocabulary() -> Vocabulary {
    Vocabulary::parse("</2,S/2").expect("valid vocabulary")
}

const LT: usize = 0;
const SUCC: usize = 1;
const ONE: u64 = 1 << 32;

/// The `s`-th dyadic rational of `(0,1)` in the order 1/2, 1/4, 3/4, 1/8,
/// 3/8, …, scaled by `2^32`.
pub fn dyadic(s: usize) -> u64 {
    let level = (s + 1).ilog2();
    let i = (s + 1 - (1 << level)) as u64;
    assert!(level < 31, "dyadic schedule exhausted");
    (2 * i + 1) << (31 - level)
}

/// Position in the order: left pairs sit at keys in (0,1) with sides 0 and
/// 1, the middle element at 3/2, the right region at keys in (2,3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key(u64, u8);

/// A presentation of `2·ℚ + 1 + ℚ` with its successor relation.
#[derive(Default)]
pub struct LinOrd {
    keys: Vec<Key>,
    stage: usize,
}

impl LinOrd {
    fn append(&mut self, key: Key, out: &mut Presentation) -> usize {
        let e = out.add_element();
        for (f, other) in self.keys.iter().enumerate() {
            match other.cmp(&key) {
                Ordering::Less => out.add_fact(LT, &[f, e]),
                Ordering::Greater => out.add_fact(LT, &[e, f]),
                Ordering::Equal => unreachable!("keys are distinct"),
            }
        }
        self.keys.push(key);
        e
    }

    fn run_stage(&mut self, out: &mut Presentation) {
        let d = dyadic(self.stage);
        let l0 = self.append(Key(d, 0), out);
        let l1 = self.append(Key(d, 1), out);
        out.add_fact(SUCC, &[l0, l1]);
        if self.stage == 0 {
            self.append(Key(ONE + ONE / 2, 0), out);
        }
        self.append(Key(2 * ONE + d, 0), out);
        self.stage += 1;
    }
}

impl StreamSource for LinOrd {
    fn vocabulary(&self) -> Vocabulary {
        linord_vocabulary()
    }

    fn stage(&mut self, out: &mut Presentation) -> bool {
        self.run_stage(out);
        true
    }
}

impl StagedRun for LinOrd {
    fn stage(&mut self, _bit: bool, out: &mut Presentation) {
        self.run_stage(out);
    }
}

pub fn r_linord() -> StructureStream {
    StructureStream::new(LinOrd::default())
}

/// The same stream as a transducer that ignores its input, one stage per
/// input bit, so that it can head a pipeline.
pub fn linord_construction() -> BitStaged {
    BitStaged::new("linord", linord_vocabulary(), 3, || Box::<LinOrd>::default())
}

pub fn linord_transducer() -> SharedTransducer {
    Arc::new(linord_construction())
}

/// Checks that `<` is a strict linear order and that `S` only relates
/// immediate neighbours.
pub fn linord_violation(s: &FiniteStructure) -> Option<String> {
    let n = s.size();
    let lt = |a: usize, b: usize| s.holds(LT, &[a, b]);
    for a in 0..n {
        if lt(a, a) {
            return Some(format!("{a} < {a}"));
        }
        for b in 0..n {
            if a != b && lt(a, b) == lt(b, a) {
                return Some(format!("{a} and {b} are not comparable exactly one way"));
            }
            for c in 0..n {
                if lt(a, b) && lt(b, c) && !lt(a, c) {
                    return Some(format!("{a} < {b} < {c} but not {a} < {c}"));
                }
            }
            if s.holds(SUCC, &[a, b]) && (!lt(a, b) || (0..n).any(|c| lt(a, c) && lt(c, b))) {
                return Some(format!("S({a},{b}) is not an immediate successor pair"));
            }
        }
    }
    None
}

fn lt(a: u32, b: u32) -> Formula {
    Formula::atom("<", &[a, b])
}

fn succ(a: u32, b: u32) -> Formula {
    Formula::atom("S", &[a, b])
}

/// The single `∃₃` axiom singling out `2·ℚ + 1 + ℚ` among linear orders
/// with successor, bounded quantifiers written as implications:
///
/// ```text
/// ∃x [ (∀y<x) ∃z [y<z<x]
///    ∧ (∀y>x) (∃z [x<z<y] ∧ (∀u>x) ¬S(y,u))
///    ∧ (∀y<x) (∃z (S(y,z) ∨ S(z,y)) ∧ (∃u S(y,u) → ∀v ¬S(v,y))) ]
/// ```
pub fn sentence_star() -> Formula {
    let (x, y, z, u, v) = (0, 1, 2, 3, 4);
    let left_dense =
        Formula::forall(y, Formula::implies(lt(y, x), Formula::exists(z, Formula::and([lt(y, z), lt(z, x)]))));
    let right = Formula::forall(
        y,
        Formula::implies(
            lt(x, y),
            Formula::and([
                Formula::exists(z, Formula::and([lt(x, z), lt(z, y)])),
                Formula::forall(u, Formula::implies(lt(x, u), Formula::not(succ(y, u)))),
            ]),
        ),
    );
    let left_pairs = Formula::forall(
        y,
        Formula::implies(
            lt(y, x),
            Formula::and([
                Formula::exists(z, Formula::or([succ(y, z), succ(z, y)])),
                Formula::implies(Formula::exists(u, succ(y, u)), Formula::forall(v, Formula::not(succ(v, y)))),
            ]),
        ),
    );
    Formula::exists(x, Formula::and([left_dense, right, left_pairs]))
}
